//! Independent brute-force oracles shared by the property suites and the
//! acceptance runner.

#![allow(dead_code)]

use meanpath::engine::integrate;
use meanpath::nav::WheelCommand;
use meanpath::perception::{segment, CameraFrame, DepthFrame};
use meanpath::world::{Body, BodyGeometry, BodyId, Bounds, Obstacle, Scene, Shape, World};
use meanpath::{Pose, Vec2};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const SIDE: f64 = 10.0;

// ---------------------------------------------------------------- ray cast

#[derive(Debug, Clone)]
pub enum Solid {
    Rect { c: (f64, f64), h: (f64, f64) },
    Disc { c: (f64, f64), r: f64 },
}

/// Exact Euclidean signed distance, written independently of the library.
pub fn solid_sdf(s: &Solid, p: (f64, f64)) -> f64 {
    match *s {
        Solid::Rect { c, h } => {
            let qx = (p.0 - c.0).abs() - h.0;
            let qy = (p.1 - c.1).abs() - h.1;
            let outside = qx.max(0.0).hypot(qy.max(0.0));
            outside + qx.max(qy).min(0.0)
        }
        Solid::Disc { c, r } => (p.0 - c.0).hypot(p.1 - c.1) - r,
    }
}

/// Distance to the nearest surface from a point inside the square arena.
pub fn scene_sdf(solids: &[Solid], p: (f64, f64)) -> f64 {
    let box_d = p.0.min(SIDE - p.0).min(p.1).min(SIDE - p.1);
    solids.iter().map(|s| solid_sdf(s, p)).fold(box_d, f64::min)
}

/// Sphere tracing: advance by the distance bound until the surface is reached.
pub fn march(solids: &[Solid], o: (f64, f64), theta: f64) -> Option<f64> {
    let (dx, dy) = (theta.cos(), theta.sin());
    let mut t = 0.0;
    for _ in 0..2_000_000 {
        let d = scene_sdf(solids, (o.0 + t * dx, o.1 + t * dy));
        if d < 1e-11 {
            return Some(t);
        }
        t += d;
        if t > 4.0 * SIDE {
            return None;
        }
    }
    panic!("ray march did not converge");
}

fn solid_strategy() -> impl Strategy<Value = Solid> {
    prop_oneof![
        (1.0..9.0f64, 1.0..9.0f64, 0.05..1.2f64, 0.05..1.2f64).prop_map(|(x, y, hx, hy)| {
            Solid::Rect {
                c: (x, y),
                h: (hx, hy),
            }
        }),
        (1.0..9.0f64, 1.0..9.0f64, 0.05..0.8f64).prop_map(|(x, y, r)| Solid::Disc { c: (x, y), r }),
    ]
}

fn to_shape(s: &Solid) -> Shape {
    match *s {
        Solid::Rect { c, h } => Shape::rect(Vec2::new(c.0, c.1), Vec2::new(h.0, h.1)),
        Solid::Disc { c, r } => Shape::circle(Vec2::new(c.0, c.1), r),
    }
}

/// Obstacles, robot disc centers, ray origin, ray direction.
pub type RayCase = (Vec<Solid>, Vec<(f64, f64)>, (f64, f64), f64);

pub fn ray_case() -> impl Strategy<Value = RayCase> {
    (
        prop::collection::vec(solid_strategy(), 0..6),
        prop::collection::vec((1.0..9.0f64, 1.0..9.0f64), 0..3),
        (0.2..9.8f64, 0.2..9.8f64),
        -std::f64::consts::PI..std::f64::consts::PI,
    )
}

pub fn check_ray((obstacles, discs, origin, theta): RayCase) -> Result<(), TestCaseError> {
    let mut solids = obstacles.clone();
    solids.extend(discs.iter().map(|&c| Solid::Disc { c, r: 0.22 }));
    prop_assume!(scene_sdf(&solids, origin) > 0.05);

    let world = World::bounded(
        Bounds {
            min: Vec2::ZERO,
            max: Vec2::new(SIDE, SIDE),
        },
        obstacles
            .iter()
            .map(|s| Obstacle { shape: to_shape(s) })
            .collect(),
    );
    let bodies: Vec<Body> = discs
        .iter()
        .enumerate()
        .map(|(k, &(x, y))| Body {
            id: BodyId::Robot(k as u32),
            position: Vec2::new(x, y),
            radius: 0.22,
        })
        .collect();
    let scene = Scene::new(&world, &bodies);

    let expected = march(&solids, origin, theta).expect("the arena is closed");
    let hit = scene
        .ray_cast(Vec2::new(origin.0, origin.1), theta, 100.0, None)
        .expect("the arena is closed");
    prop_assert!(
        (hit.distance - expected).abs() < 1e-6,
        "cast {} vs march {}",
        hit.distance,
        expected
    );
    Ok(())
}

// ------------------------------------------------------------ segmentation

/// Per-pixel oracle: (blue left, blue right, blue min, green left, green right, green min).
pub fn brute_segment(frame: &CameraFrame, depth: &DepthFrame, max_depth: f64) -> [f64; 6] {
    let mut out = [0.0, 0.0, max_depth, 0.0, 0.0, max_depth];
    for y in 0..frame.height {
        for x in 0..frame.width {
            let [r, g, b] = frame.get(x, y);
            let base = if b > 130 && r < 134 && g < 134 {
                0
            } else if b < 116 && r < 116 && g > 161 {
                3
            } else {
                continue;
            };
            let right = x >= frame.width / 2;
            out[base + usize::from(right)] += 1.0;
            out[base + 2] = out[base + 2].min(depth.get(x, y));
        }
    }
    out
}

/// Channel values clustered around the classification thresholds.
fn channel() -> impl Strategy<Value = u8> {
    prop_oneof![
        any::<u8>(),
        (110u8..=140),
        (155u8..=170),
        Just(0u8),
        Just(255u8)
    ]
}

/// Width, height, per-pixel (rgb, depth), max depth.
pub type FrameCase = (usize, usize, Vec<((u8, u8, u8), f64)>, f64);

pub fn frame_case() -> impl Strategy<Value = FrameCase> {
    (1usize..40, 1usize..24, 5.0..10.0f64).prop_flat_map(|(w, h, max_depth)| {
        (
            Just(w),
            Just(h),
            prop::collection::vec(((channel(), channel(), channel()), 0.2..12.0f64), w * h),
            Just(max_depth),
        )
    })
}

pub fn check_segmentation((w, h, pixels, max_depth): FrameCase) -> Result<(), TestCaseError> {
    let mut frame = CameraFrame::filled(w, h, [255, 255, 255]);
    let mut depth = DepthFrame::filled(w, h, max_depth);
    for (k, &((r, g, b), d)) in pixels.iter().enumerate() {
        frame.set(k % w, k / w, [r, g, b]);
        depth.set(k % w, k / w, d);
    }
    let got = segment(&frame, &depth, max_depth);
    let got = [
        got.blue.left_count as f64,
        got.blue.right_count as f64,
        got.blue.min_range,
        got.green.left_count as f64,
        got.green.right_count as f64,
        got.green.min_range,
    ];
    prop_assert_eq!(got, brute_segment(&frame, &depth, max_depth));
    Ok(())
}

// --------------------------------------------------------------- kinematics

/// Wheel speeds and start pose (x, y, heading).
pub type MotionCase = (f64, f64, f64, f64, f64);

pub fn motion_case() -> impl Strategy<Value = MotionCase> {
    (
        -5.24..5.24f64,
        -5.24..5.24f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
        -std::f64::consts::PI..std::f64::consts::PI,
    )
}

pub fn check_integrate((left, right, x, y, heading): MotionCase) -> Result<(), TestCaseError> {
    let geom = BodyGeometry::default();
    let dt = 0.064;
    let got = integrate(
        &Pose::new(x, y, heading),
        &WheelCommand::new(left, right),
        &geom,
        dt,
    );

    let v = geom.wheel_radius * (left + right) / 2.0;
    let w = geom.wheel_radius * (right - left) / geom.axle_track;
    let n = 1000;
    let step = dt / n as f64;
    let (mut px, mut py, mut th) = (x, y, heading);
    for _ in 0..n {
        px += v * th.cos() * step;
        py += v * th.sin() * step;
        th += w * step;
    }
    prop_assert!(
        (got.position.x - px).hypot(got.position.y - py) < 1e-6,
        "arc ({}, {}) vs euler ({px}, {py})",
        got.position.x,
        got.position.y
    );
    prop_assert!((got.heading - th).sin().abs() < 1e-9);
    Ok(())
}
