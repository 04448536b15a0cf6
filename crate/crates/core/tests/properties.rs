//! Whole-system properties: scenario round trips, frame invariance of
//! clearance, controller precedence, and plot well-formedness.

use std::path::PathBuf;

use meanpath::analysis::{follow_metrics, path_metrics, MetricsTable};
use meanpath::engine::{run, step, SimState};
use meanpath::plot::{emit_plot, PlotKind};
use meanpath::trace::{Mode, TraceId};
use meanpath::world::{Body, BodyId, Obstacle, Scene, Shape, World};
use meanpath::{load_scenario, load_scenario_file, Color, Scenario, Vec2};
use proptest::prelude::*;

fn shipped(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name]
        .iter()
        .collect();
    load_scenario_file(&path).unwrap()
}

// ------------------------------------------------------------ scenarios

fn scenario_document() -> impl Strategy<Value = String> {
    (
        0.0..120.0f64,
        1usize..5,
        -std::f64::consts::PI..std::f64::consts::PI,
        prop::option::of((0.1..0.6f64, 0.1..0.6f64)),
        0.1..0.5f64,
        prop::collection::vec(0.1..3.0f64, 1..4),
        (2000u32..5000, 0.005..0.05f64, 0.1..1.0f64),
        (0.3..0.6f64, 0.15..0.3f64),
    )
        .prop_map(|(duration, n, heading, rect, disc, gaps, (stop, band, delta), (height, radius))| {
            let mut doc = format!("duration_s = {duration:?}\n[world]\nbounds = [0.0, 0.0, 30.0, 20.0]\n");
            if let Some((w, h)) = rect {
                doc += &format!("[[obstacles]]\nkind = \"rect\"\ncenter = [25.0, 15.0]\nsize = [{w:?}, {h:?}]\n");
            }
            doc += &format!("[[obstacles]]\nkind = \"circle\"\ncenter = [25.0, 5.0]\nradius = {disc:?}\n");
            for k in 0..n {
                doc += &format!(
                    "[[robots]]\nid = {}\nx = {:?}\ny = 3.0\nheading = {heading:?}\n",
                    k * 7 + 1,
                    2.0 + 3.0 * k as f64
                );
            }
            let mut t = 0.0;
            let wps: Vec<String> = gaps
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    let s = format!("[{t:?}, {:?}, 12.0]", 5.0 + k as f64);
                    t += g;
                    s
                })
                .collect();
            doc += &format!("[[intruders]]\ncolor = \"green\"\nwaypoints = [{}]\n", wps.join(", "));
            doc += &format!("[params]\npixel_stop = {stop}\nband = {band:?}\nsteer_delta = {delta:?}\n");
            doc += &format!("[intruder]\nheight = {height:?}\nradius = {radius:?}\n");
            doc
        })
}

proptest! {
    #[test]
    fn scenario_documents_round_trip(doc in scenario_document()) {
        let first = load_scenario(&doc).unwrap();
        let second = load_scenario(&first.to_document()).unwrap();
        prop_assert_eq!(first, second);
    }
}

#[test]
fn shipped_scenarios_load() {
    let patrol = shipped("patrol.toml");
    assert_eq!((patrol.robots.len(), patrol.intruders.len()), (4, 2));
    assert_eq!(patrol.duration, 60.0);
    assert_eq!((patrol.camera.width, patrol.camera.height), (256, 128));
    shipped("corridor.toml");
    shipped("follow.toml");
}

// ------------------------------------------------------------ clearance

fn rotate90(v: Vec2, quarter_turns: u8) -> Vec2 {
    (0..quarter_turns).fold(v, |p, _| Vec2::new(-p.y, p.x))
}

fn transform_shape(s: &Shape, q: u8, offset: Vec2) -> Shape {
    match *s {
        Shape::Rect {
            center,
            half_extents,
        } => {
            let h = if q % 2 == 1 {
                Vec2::new(half_extents.y, half_extents.x)
            } else {
                half_extents
            };
            Shape::rect(rotate90(center, q) + offset, h)
        }
        Shape::Circle { center, radius } => Shape::circle(rotate90(center, q) + offset, radius),
    }
}

proptest! {
    #[test]
    fn clearance_is_frame_invariant(
        rects in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.1..1.5f64, 0.1..1.5f64), 0..4),
        discs in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64, 0.1..1.0f64), 0..4),
        query in (-6.0..6.0f64, -6.0..6.0f64),
        q in 0u8..4,
        offset in (-50.0..50.0f64, -50.0..50.0f64),
    ) {
        let mut shapes: Vec<Shape> = rects
            .iter()
            .map(|&(x, y, hx, hy)| Shape::rect(Vec2::new(x, y), Vec2::new(hx, hy)))
            .collect();
        shapes.extend(discs.iter().map(|&(x, y, r)| Shape::circle(Vec2::new(x, y), r)));
        let offset = Vec2::new(offset.0, offset.1);
        let p = Vec2::new(query.0, query.1);

        let world = World::open(shapes.iter().map(|&shape| Obstacle { shape }).collect());
        let moved = World::open(shapes.iter().map(|s| Obstacle { shape: transform_shape(s, q, offset) }).collect());
        let body = Body { id: BodyId::Robot(9), position: Vec2::new(1.0, -2.0), radius: 0.22 };
        let moved_body = Body { position: rotate90(body.position, q) + offset, ..body };

        let before = Scene::new(&world, &[body]).clearance(p, 0.22, None);
        let after = Scene::new(&moved, &[moved_body]).clearance(rotate90(p, q) + offset, 0.22, None);
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }
}

// ------------------------------------------------------------ controllers

fn facing_intruder(wall_gap: f64) -> Scenario {
    let doc = format!(
        r#"
duration_s = 1.0
[world]
bounds = [0.0, 0.0, 20.0, 10.0]
[[obstacles]]
kind = "rect"
center = [5.0, {:?}]
size = [6.0, 1.0]
[[robots]]
id = 1
x = 3.0
y = 5.0
[[intruders]]
color = "blue"
waypoints = [[0.0, 6.0, 5.0]]
"#,
        5.0 + 0.22 + wall_gap + 0.5
    );
    load_scenario(&doc).unwrap()
}

#[test]
fn obstacles_take_precedence_over_a_visible_target() {
    let near = facing_intruder(0.6);
    let (_, records, _) = step(&SimState::initial(&near), &near, None);
    assert_eq!(records[0].mode, Mode::Nav);

    let far = facing_intruder(4.0);
    let (_, records, _) = step(&SimState::initial(&far), &far, None);
    assert_eq!(records[0].mode, Mode::Follow);
    assert_eq!(records[0].chosen_color, Some(Color::Blue));
}

#[test]
fn calibrated_intruder_at_standoff_stops_the_robot() {
    let doc = r#"
duration_s = 1.0
[world]
bounds = [0.0, 0.0, 20.0, 10.0]
[[robots]]
id = 1
x = 5.0
y = 5.0
[[intruders]]
color = "green"
waypoints = [[0.0, 6.8, 5.0]]
"#;
    let sc = load_scenario(doc).unwrap();
    let (_, records, _) = step(&SimState::initial(&sc), &sc, None);
    assert_eq!(records[0].mode, Mode::Stopped);
    assert!(records[0].left_pixels + records[0].right_pixels > 3000);
    assert_eq!((records[0].cmd_left, records[0].cmd_right), (0.0, 0.0));
}

#[test]
fn stopped_robots_do_not_move() {
    let sc = shipped("follow.toml");
    let trace = run(&sc);
    let mut stopped = 0;
    for id in [3, 4] {
        let rows: Vec<_> = trace
            .records
            .iter()
            .filter(|r| r.id == TraceId::Robot(id))
            .collect();
        for pair in rows.windows(2) {
            if pair[0].mode == Mode::Stopped {
                stopped += 1;
                assert_eq!(
                    (pair[0].x, pair[0].y),
                    (pair[1].x, pair[1].y),
                    "tick {}",
                    pair[0].tick
                );
                assert_eq!((pair[0].cmd_left, pair[0].cmd_right), (0.0, 0.0));
            }
        }
    }
    assert!(stopped > 0, "the follow run should reach standoff");
}

#[test]
fn every_tick_has_one_row_per_body() {
    let sc = shipped("follow.toml");
    let trace = run(&sc);
    let ticks = meanpath::engine::tick_count(sc.duration) as usize;
    assert_eq!(
        trace.records.len(),
        ticks * (sc.robots.len() + sc.intruders.len())
    );
}

// ------------------------------------------------------------ plots

fn assert_well_formed(svg: &str) {
    let doc = roxmltree::Document::parse(svg).expect("plot parses as XML");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
}

#[test]
fn plots_from_real_runs_are_well_formed() {
    let corridor = run(&shipped("corridor.toml"));
    let times: Vec<f64> = (0..=39).map(f64::from).collect();
    let rows = path_metrics(&corridor.records, 1, &times).unwrap();
    let svg = emit_plot(&MetricsTable::from_path_rows(&rows), PlotKind::Path).unwrap();
    assert_well_formed(&svg);
    assert_eq!(svg.matches("<polyline").count(), 3);

    let follow = run(&shipped("follow.toml"));
    let rows = follow_metrics(
        &follow.records,
        &[3, 4],
        Color::Green,
        &[1.0, 5.0, 9.0, 13.0],
    )
    .unwrap();
    let svg = emit_plot(&MetricsTable::from_follow_rows(&rows), PlotKind::Follow).unwrap();
    assert_well_formed(&svg);
    assert_eq!(svg.matches("<polyline").count(), 3);

    let single = emit_plot(&MetricsTable::from_path_rows(&rows_one()), PlotKind::Path).unwrap();
    assert_well_formed(&single);
}

fn rows_one() -> Vec<meanpath::analysis::PathMetricsRow> {
    vec![meanpath::analysis::PathMetricsRow::from_sides(
        3.0, 1.59, 1.67,
    )]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plots_are_well_formed_for_any_rows(
        rows in prop::collection::vec((0.0..100.0f64, 0.0..5.0f64, 0.0..5.0f64), 1..30),
    ) {
        let rows: Vec<_> = rows
            .iter()
            .map(|&(t, l, r)| meanpath::analysis::PathMetricsRow::from_sides(t, l, r))
            .collect();
        let svg = emit_plot(&MetricsTable::from_path_rows(&rows), PlotKind::Path).unwrap();
        prop_assert!(roxmltree::Document::parse(&svg).is_ok());
    }
}
