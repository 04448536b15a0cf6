//! Fixed-step simulation loop.
//!
//! Every tick, each robot senses and decides against the same tick-start
//! snapshot of all bodies, then all robots move. Robots only ever read their
//! own sensors. Intruders follow their scripted waypoints.

use crate::geometry::{normalize_angle, Pose, Vec2};
use crate::nav::{nav_command, obstacle_clear, WheelCommand};
use crate::perception::{render, segment, CameraFrame, IntruderLook, SegmentationResult};
use crate::pursuit::{pursuit_command, PursuitMode};
use crate::scenario::{Scenario, Trajectory};
use crate::sonar::{scan, SonarLayout};
use crate::trace::{Mode, TraceId, TraceRecord};
use crate::world::{Body, BodyGeometry, BodyId, Color, Scene};

/// Tick length in milliseconds.
pub const TICK_MS: u64 = 64;
/// Tick length in seconds.
pub const DT: f64 = TICK_MS as f64 / 1000.0;
/// Robots stop this far short of first contact when a move is clamped, meters.
pub const CONTACT_BACKOFF: f64 = 1e-3;

/// Simulation time at the start of `tick`, computed from integer milliseconds.
pub fn tick_time(tick: u64) -> f64 {
    (tick * TICK_MS) as f64 / 1000.0
}

/// Number of whole ticks in `duration` seconds.
pub fn tick_count(duration: f64) -> u64 {
    let ms = (duration * 1000.0).round() as u64;
    ms / TICK_MS
}

/// Unicycle update over `dt`, following the exact circular arc.
pub fn integrate(pose: &Pose, cmd: &WheelCommand, geom: &BodyGeometry, dt: f64) -> Pose {
    let v = geom.wheel_radius * (cmd.left + cmd.right) / 2.0;
    let omega = geom.wheel_radius * (cmd.right - cmd.left) / geom.axle_track;
    let th = pose.heading;
    let p = pose.position;
    if omega.abs() < 1e-9 {
        let d = Vec2::from_angle(th) * (v * dt);
        return Pose {
            position: p + d,
            heading: pose.heading,
        };
    }
    let th1 = th + omega * dt;
    let r = v / omega;
    Pose {
        position: Vec2::new(
            p.x + r * (th1.sin() - th.sin()),
            p.y - r * (th1.cos() - th.cos()),
        ),
        heading: normalize_angle(th1),
    }
}

/// Intruder pose at time `t` along its waypoints. The heading follows the
/// active segment; the last position is held after the final waypoint.
pub fn intruder_step(trajectory: &Trajectory, t: f64) -> Pose {
    let wps = &trajectory.waypoints;
    let Some(first) = wps.first() else {
        return Pose::default();
    };
    if wps.len() == 1 {
        return Pose {
            position: first.position,
            heading: 0.0,
        };
    }
    let seg = wps
        .windows(2)
        .position(|w| t < w[1].time)
        .unwrap_or(wps.len() - 2);
    let (a, b) = (wps[seg], wps[seg + 1]);
    let heading = (b.position - a.position).angle();
    let frac = ((t - a.time) / (b.time - a.time)).clamp(0.0, 1.0);
    Pose {
        position: a.position + (b.position - a.position) * frac,
        heading: normalize_angle(heading),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotState {
    pub id: u32,
    pub pose: Pose,
    pub last_command: WheelCommand,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub tick: u64,
    pub robots: Vec<RobotState>,
    pub intruder_poses: Vec<(Color, Pose)>,
}

impl SimState {
    pub fn initial(scenario: &Scenario) -> Self {
        Self {
            tick: 0,
            robots: scenario
                .robots
                .iter()
                .map(|r| RobotState {
                    id: r.id,
                    pose: r.pose,
                    last_command: WheelCommand::STOP,
                    mode: Mode::Nav,
                })
                .collect(),
            intruder_poses: scenario
                .intruders
                .iter()
                .map(|i| (i.color, intruder_step(&i.trajectory, 0.0)))
                .collect(),
        }
    }

    pub fn time(&self) -> f64 {
        tick_time(self.tick)
    }

    fn bodies(&self, scenario: &Scenario) -> Vec<Body> {
        self.robots
            .iter()
            .map(|r| Body {
                id: BodyId::Robot(r.id),
                position: r.pose.position,
                radius: scenario.geometry.body_radius,
            })
            .chain(self.intruder_poses.iter().map(|(c, p)| Body {
                id: BodyId::Intruder(*c),
                position: p.position,
                radius: scenario.intruder_body.radius,
            }))
            .collect()
    }
}

/// A move that had to be cut short to avoid penetrating geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub tick: u64,
    pub robot_id: u32,
}

/// Receives each rendered camera frame: (tick, robot id, frame).
pub type FrameSink<'a> = dyn FnMut(u64, u32, &CameraFrame) + 'a;

struct Decision {
    mode: Mode,
    command: WheelCommand,
    record: TraceRecord,
}

fn decide(
    scenario: &Scenario,
    scene: &Scene<'_>,
    state: &SimState,
    robot: &RobotState,
    frames: &mut Option<&mut FrameSink<'_>>,
) -> Decision {
    let params = &scenario.params;
    let own = Some(BodyId::Robot(robot.id));
    let layout = SonarLayout::with_range(params.sonar_max_range, params.sonar_incidence_cutoff);
    let sonar = scan(scene, &robot.pose, &layout, own);
    let nav = nav_command(&sonar, params);

    let (mode, command, seg, choice) = if obstacle_clear(&sonar, params) {
        let look = IntruderLook {
            height: scenario.intruder_body.height,
        };
        let (frame, depth) = render(scene, &robot.pose, own, &scenario.camera, look);
        if let Some(sink) = frames.as_mut() {
            sink(state.tick, robot.id, &frame);
        }
        let seg = segment(&frame, &depth, scenario.camera.max_depth);
        let d = pursuit_command(&seg, params);
        let mode = match d.mode {
            PursuitMode::Follow => Mode::Follow,
            PursuitMode::SearchSpin => Mode::SearchSpin,
            PursuitMode::Stopped => Mode::Stopped,
        };
        (mode, d.command, seg, Some(d.choice))
    } else {
        (
            Mode::Nav,
            nav.command,
            SegmentationResult::empty(params.range_max),
            None,
        )
    };

    let record = TraceRecord {
        tick: state.tick,
        time: state.time(),
        id: TraceId::Robot(robot.id),
        x: robot.pose.position.x,
        y: robot.pose.position.y,
        heading: robot.pose.heading,
        mode,
        d_left: nav.d_left,
        d_right: nav.d_right,
        midpoint: nav.midpoint,
        chosen_color: choice.and_then(|c| c.color),
        left_pixels: choice.map_or(0, |c| c.left_pixels),
        right_pixels: choice.map_or(0, |c| c.right_pixels),
        blue_min_range: seg.blue.min_range,
        green_min_range: seg.green.min_range,
        cmd_left: command.left,
        cmd_right: command.right,
        clearance: scene.clearance(robot.pose.position, scenario.geometry.body_radius, own),
    };
    Decision {
        mode,
        command,
        record,
    }
}

/// Moves a robot, cutting the motion short just before first contact.
/// Returns the new pose and whether clamping happened.
fn advance(
    scenario: &Scenario,
    scene: &Scene<'_>,
    robot: &RobotState,
    cmd: &WheelCommand,
) -> (Pose, bool) {
    let geom = &scenario.geometry;
    let own = Some(BodyId::Robot(robot.id));
    let clearance_at = |f: f64| {
        let p = integrate(&robot.pose, cmd, geom, DT * f);
        (p, scene.clearance(p.position, geom.body_radius, own))
    };
    let (full, c_full) = clearance_at(1.0);
    if c_full >= CONTACT_BACKOFF {
        return (full, false);
    }
    let c_start = scene.clearance(robot.pose.position, geom.body_radius, own);
    if c_start <= CONTACT_BACKOFF {
        // already in contact: only moves that open the gap are allowed
        return if c_full > c_start {
            (full, true)
        } else {
            (robot.pose, true)
        };
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..48 {
        let mid = (lo + hi) / 2.0;
        if clearance_at(mid).1 >= CONTACT_BACKOFF {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (clearance_at(lo).0, true)
}

/// Advances the whole simulation by one tick. Returns the next state, one
/// record per robot and intruder for the current tick, and any clamped moves.
pub fn step(
    state: &SimState,
    scenario: &Scenario,
    mut frames: Option<&mut FrameSink<'_>>,
) -> (SimState, Vec<TraceRecord>, Vec<CollisionEvent>) {
    let bodies = state.bodies(scenario);
    let scene = Scene::new(&scenario.world, &bodies);

    let decisions: Vec<Decision> = state
        .robots
        .iter()
        .map(|r| decide(scenario, &scene, state, r, &mut frames))
        .collect();

    // Moves resolve in scenario order; each robot is clamped against the
    // positions its predecessors have already moved to this tick.
    let mut moved = bodies.clone();
    let mut collisions = Vec::new();
    let mut robots = Vec::with_capacity(state.robots.len());
    for (k, (r, d)) in state.robots.iter().zip(&decisions).enumerate() {
        let (pose, clamped) = advance(
            scenario,
            &Scene::new(&scenario.world, &moved),
            r,
            &d.command,
        );
        if clamped {
            collisions.push(CollisionEvent {
                tick: state.tick,
                robot_id: r.id,
            });
        }
        moved[k].position = pose.position;
        robots.push(RobotState {
            id: r.id,
            pose,
            last_command: d.command,
            mode: d.mode,
        });
    }

    let mut records: Vec<TraceRecord> = decisions.into_iter().map(|d| d.record).collect();
    records.extend(state.intruder_poses.iter().map(|(color, pose)| {
        let own = Some(BodyId::Intruder(*color));
        TraceRecord::intruder(
            state.tick,
            state.time(),
            *color,
            pose,
            scenario.params.range_max,
            scene.clearance(pose.position, scenario.intruder_body.radius, own),
        )
    }));

    let next_tick = state.tick + 1;
    let t_next = tick_time(next_tick);
    let intruder_poses = scenario
        .intruders
        .iter()
        .map(|i| (i.color, intruder_step(&i.trajectory, t_next)))
        .collect();

    (
        SimState {
            tick: next_tick,
            robots,
            intruder_poses,
        },
        records,
        collisions,
    )
}

/// A complete run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub collisions: Vec<CollisionEvent>,
}

impl Trace {
    /// Records of friendly robots only.
    pub fn robot_records(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.id, TraceId::Robot(_)))
    }
}

pub fn run(scenario: &Scenario) -> Trace {
    run_with_frames(scenario, None)
}

/// Runs `scenario` for its full duration, passing every rendered frame to `frames`.
pub fn run_with_frames(scenario: &Scenario, mut frames: Option<&mut FrameSink<'_>>) -> Trace {
    let ticks = tick_count(scenario.duration);
    let per_tick = scenario.robots.len() + scenario.intruders.len();
    let mut trace = Trace {
        records: Vec::with_capacity(ticks as usize * per_tick),
        collisions: Vec::new(),
    };
    let mut state = SimState::initial(scenario);
    for _ in 0..ticks {
        let (next, records, collisions) = step(&state, scenario, frames.as_deref_mut());
        trace.records.extend(records);
        trace.collisions.extend(collisions);
        state = next;
    }
    trace
}
