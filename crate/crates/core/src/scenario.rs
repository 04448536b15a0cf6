//! Scenario documents: world bounds, obstacles, robots, scripted intruders,
//! and tuning parameters, stored as TOML.
//!
//! ```toml
//! duration_s = 40.0
//!
//! [world]
//! bounds = [0.0, 0.0, 20.0, 8.0]   # min x, min y, max x, max y
//!
//! [[obstacles]]
//! kind = "rect"
//! center = [6.0, 2.0]
//! size = [4.0, 0.6]                # full width and depth
//!
//! [[obstacles]]
//! kind = "circle"
//! center = [12.0, 5.0]
//! radius = 0.4
//!
//! [[robots]]
//! id = 1
//! x = 1.0
//! y = 4.0
//! heading = 0.0                    # radians
//!
//! [[intruders]]
//! color = "green"
//! waypoints = [[0.0, 15.0, 4.0], [13.0, 16.45, 4.0]]   # [t, x, y]
//!
//! [params]        # controller overrides, see ControllerParams
//! [geometry]      # robot body, see BodyGeometry
//! [camera]        # see CameraParams
//! [intruder]      # radius, height
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Pose, Vec2};
use crate::params::ControllerParams;
use crate::perception::CameraParams;
use crate::world::{BodyGeometry, Bounds, Color, Obstacle, Shape, World};

/// Extra lateral margin required on each side of a robot between facing obstacles.
pub const PASSAGE_MARGIN: f64 = 0.2;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid(msg.into())
}

/// Shape of the intruder bodies, shared by sonar, camera, and clearance.
///
/// The default height puts the 3000-pixel stop at about 1.85 m head-on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntruderBody {
    pub radius: f64,
    pub height: f64,
}

impl Default for IntruderBody {
    fn default() -> Self {
        Self {
            radius: 0.20,
            height: 0.40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub time: f64,
    pub position: Vec2,
}

/// Piecewise-linear intruder path. Times start at 0 and strictly increase.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpec {
    pub id: u32,
    pub pose: Pose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntruderSpec {
    pub color: Color,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: World,
    pub robots: Vec<RobotSpec>,
    pub intruders: Vec<IntruderSpec>,
    /// Seconds.
    pub duration: f64,
    pub params: ControllerParams,
    pub geometry: BodyGeometry,
    pub camera: CameraParams,
    pub intruder_body: IntruderBody,
}

// ---- document schema ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDoc {
    bounds: [f64; 4],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleDoc {
    kind: String,
    center: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    id: u32,
    x: f64,
    y: f64,
    #[serde(default)]
    heading: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntruderDoc {
    color: Color,
    waypoints: Vec<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    duration_s: f64,
    world: WorldDoc,
    #[serde(default)]
    obstacles: Vec<ObstacleDoc>,
    robots: Vec<RobotDoc>,
    #[serde(default)]
    intruders: Vec<IntruderDoc>,
    #[serde(default)]
    params: ControllerParams,
    #[serde(default)]
    geometry: BodyGeometry,
    #[serde(default)]
    camera: CameraParams,
    #[serde(default)]
    intruder: IntruderBody,
}

/// Parses and validates a scenario document.
pub fn load_scenario(document: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = toml::from_str(document)
        .map_err(|e| ScenarioError::Parse(e.to_string().trim_end().to_owned()))?;
    let scenario = from_doc(doc)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_scenario(&text)
}

fn from_doc(doc: ScenarioDoc) -> Result<Scenario, ScenarioError> {
    let [x0, y0, x1, y1] = doc.world.bounds;
    if !(x0 < x1 && y0 < y1) || doc.world.bounds.iter().any(|v| !v.is_finite()) {
        return Err(invalid(
            "world.bounds must be [min_x, min_y, max_x, max_y] with min < max",
        ));
    }
    let bounds = Bounds {
        min: Vec2::new(x0, y0),
        max: Vec2::new(x1, y1),
    };

    let mut obstacles = Vec::with_capacity(doc.obstacles.len());
    for (i, o) in doc.obstacles.iter().enumerate() {
        let center = Vec2::new(o.center[0], o.center[1]);
        let shape = match (o.kind.as_str(), o.size, o.radius) {
            ("rect", Some([w, h]), None) => Shape::rect(center, Vec2::new(w / 2.0, h / 2.0)),
            ("circle", None, Some(r)) => Shape::circle(center, r),
            ("rect", ..) => {
                return Err(invalid(format!(
                    "obstacles[{i}]: rect needs `size` and no `radius`"
                )))
            }
            ("circle", ..) => {
                return Err(invalid(format!(
                    "obstacles[{i}]: circle needs `radius` and no `size`"
                )))
            }
            (other, ..) => {
                return Err(invalid(format!(
                    "obstacles[{i}].kind: unknown kind `{other}` (expected rect or circle)"
                )))
            }
        };
        if !shape.is_valid() {
            return Err(invalid(format!(
                "obstacles[{i}]: dimensions must be positive and finite"
            )));
        }
        obstacles.push(Obstacle { shape });
    }

    let robots = doc
        .robots
        .iter()
        .map(|r| RobotSpec {
            id: r.id,
            pose: Pose::new(r.x, r.y, r.heading),
        })
        .collect();
    let intruders = doc
        .intruders
        .iter()
        .map(|d| IntruderSpec {
            color: d.color,
            trajectory: Trajectory {
                waypoints: d
                    .waypoints
                    .iter()
                    .map(|&[t, x, y]| Waypoint {
                        time: t,
                        position: Vec2::new(x, y),
                    })
                    .collect(),
            },
        })
        .collect();

    Ok(Scenario {
        world: World::bounded(bounds, obstacles),
        robots,
        intruders,
        duration: doc.duration_s,
        params: doc.params,
        geometry: doc.geometry,
        camera: doc.camera,
        intruder_body: doc.intruder,
    })
}

impl Scenario {
    pub fn bounds(&self) -> Bounds {
        self.world
            .bounds
            .expect("scenario worlds are always bounded")
    }

    /// Checks every scenario invariant, naming the first one violated.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(invalid("duration_s must be finite and >= 0"));
        }
        if let Some(v) = self.params.violation() {
            return Err(invalid(format!("params: {v}")));
        }
        if let Some(v) = self.camera.violation() {
            return Err(invalid(format!("camera: {v}")));
        }
        if !self.geometry.is_valid() {
            return Err(invalid(
                "geometry: dimensions must be positive with body_radius >= axle_track / 2",
            ));
        }
        if !(self.intruder_body.radius > 0.0 && self.intruder_body.height > 0.0) {
            return Err(invalid("intruder: radius and height must be positive"));
        }
        if self.robots.is_empty() {
            return Err(invalid("at least one friendly robot is required"));
        }
        let mut ids = HashSet::new();
        for r in &self.robots {
            if !ids.insert(r.id) {
                return Err(invalid(format!("robot id {} is not unique", r.id)));
            }
            if !r.pose.position.is_finite() || !r.pose.heading.is_finite() {
                return Err(invalid(format!("robot {}: pose must be finite", r.id)));
            }
        }
        let mut colors = HashSet::new();
        for i in &self.intruders {
            if !colors.insert(i.color) {
                return Err(invalid(format!("intruder color {} is not unique", i.color)));
            }
            validate_waypoints(i)?;
        }

        let bounds = self.bounds();
        let radius = self.geometry.body_radius;
        let mut discs: Vec<(String, Vec2, f64)> = self
            .robots
            .iter()
            .map(|r| (format!("robot {}", r.id), r.pose.position, radius))
            .collect();
        discs.extend(self.intruders.iter().map(|i| {
            (
                format!("{} intruder", i.color),
                i.trajectory.waypoints[0].position,
                self.intruder_body.radius,
            )
        }));
        for (name, c, r) in &discs {
            if !bounds.contains_disc(*c, *r) {
                return Err(invalid(format!("{name} starts outside the world bounds")));
            }
            if let Some(k) = self
                .world
                .obstacles
                .iter()
                .position(|o| o.shape.signed_distance(*c) < *r)
            {
                return Err(invalid(format!("{name} overlaps obstacles[{k}]")));
            }
        }
        for (a, (na, ca, ra)) in discs.iter().enumerate() {
            for (nb, cb, rb) in &discs[a + 1..] {
                if ca.distance(*cb) < ra + rb {
                    return Err(invalid(format!("{na} overlaps {nb}")));
                }
            }
        }

        let min_gap = 2.0 * (radius + PASSAGE_MARGIN);
        let walls = bounds.walls();
        let statics: Vec<(String, Shape)> = self
            .world
            .obstacles
            .iter()
            .enumerate()
            .map(|(k, o)| (format!("obstacles[{k}]"), o.shape))
            .collect();
        for (a, (na, sa)) in statics.iter().enumerate() {
            let others = statics[a + 1..]
                .iter()
                .map(|(n, s)| (n.clone(), *s))
                .chain(walls.iter().map(|w| ("boundary wall".to_owned(), w.shape)));
            for (nb, sb) in others {
                let gap = sa.gap(&sb);
                if gap > 0.0 && gap < min_gap {
                    return Err(invalid(format!(
                        "passage between {na} and {nb} is {gap:.3} m, narrower than {min_gap:.3} m"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Canonical TOML document for this scenario.
    pub fn to_document(&self) -> String {
        let b = self.bounds();
        let doc = ScenarioDoc {
            duration_s: self.duration,
            world: WorldDoc {
                bounds: [b.min.x, b.min.y, b.max.x, b.max.y],
            },
            obstacles: self
                .world
                .obstacles
                .iter()
                .map(|o| match o.shape {
                    Shape::Rect {
                        center,
                        half_extents,
                    } => ObstacleDoc {
                        kind: "rect".into(),
                        center: [center.x, center.y],
                        size: Some([half_extents.x * 2.0, half_extents.y * 2.0]),
                        radius: None,
                    },
                    Shape::Circle { center, radius } => ObstacleDoc {
                        kind: "circle".into(),
                        center: [center.x, center.y],
                        size: None,
                        radius: Some(radius),
                    },
                })
                .collect(),
            robots: self
                .robots
                .iter()
                .map(|r| RobotDoc {
                    id: r.id,
                    x: r.pose.position.x,
                    y: r.pose.position.y,
                    heading: r.pose.heading,
                })
                .collect(),
            intruders: self
                .intruders
                .iter()
                .map(|i| IntruderDoc {
                    color: i.color,
                    waypoints: i
                        .trajectory
                        .waypoints
                        .iter()
                        .map(|w| [w.time, w.position.x, w.position.y])
                        .collect(),
                })
                .collect(),
            params: self.params,
            geometry: self.geometry,
            camera: self.camera,
            intruder: self.intruder_body,
        };
        toml::to_string(&doc).expect("scenario documents always serialize")
    }
}

fn validate_waypoints(intruder: &IntruderSpec) -> Result<(), ScenarioError> {
    let wps = &intruder.trajectory.waypoints;
    let name = intruder.color;
    let first = wps
        .first()
        .ok_or_else(|| invalid(format!("{name} intruder: waypoints must not be empty")))?;
    if first.time != 0.0 {
        return Err(invalid(format!(
            "{name} intruder: first waypoint time must be 0"
        )));
    }
    if wps
        .iter()
        .any(|w| !w.time.is_finite() || !w.position.is_finite())
    {
        return Err(invalid(format!(
            "{name} intruder: waypoints must be finite"
        )));
    }
    if wps.windows(2).any(|w| w[1].time <= w[0].time) {
        return Err(invalid(format!(
            "{name} intruder: waypoint times must be strictly increasing"
        )));
    }
    Ok(())
}
