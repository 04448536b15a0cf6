//! Static world geometry, dynamic bodies, and the ray-cast and clearance
//! queries every sensor model is built on.
//!
//! Everything here is a pure function over an immutable [`World`] plus a
//! per-tick slice of [`Body`] values, so queries for different robots can be
//! evaluated independently.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

/// Thickness of the four boundary wall rectangles laid just outside the bounds.
pub const WALL_THICKNESS: f64 = 0.5;

/// Intruder marking colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Green,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Blue, Color::Green];

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Green => "green",
        }
    }

    pub fn parse(s: &str) -> Option<Color> {
        match s.trim().to_ascii_lowercase().as_str() {
            "blue" => Some(Color::Blue),
            "green" => Some(Color::Green),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Convex primitive shapes. Rectangles are axis-aligned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Rect { center: Vec2, half_extents: Vec2 },
    Circle { center: Vec2, radius: f64 },
}

/// Entry point of a ray into a shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub distance: f64,
    /// Angle between the ray and the surface normal at the entry point.
    pub incidence: f64,
}

impl Shape {
    pub fn rect(center: Vec2, half_extents: Vec2) -> Self {
        Shape::Rect {
            center,
            half_extents,
        }
    }

    pub fn circle(center: Vec2, radius: f64) -> Self {
        Shape::Circle { center, radius }
    }

    pub fn center(&self) -> Vec2 {
        match *self {
            Shape::Rect { center, .. } | Shape::Circle { center, .. } => center,
        }
    }

    /// Checks the positive-size invariants.
    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Rect {
                center,
                half_extents,
            } => center.is_finite() && half_extents.x > 0.0 && half_extents.y > 0.0,
            Shape::Circle { center, radius } => center.is_finite() && radius > 0.0,
        }
    }

    /// Signed distance from `p` to the surface; negative inside.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        match *self {
            Shape::Rect {
                center,
                half_extents,
            } => {
                let qx = (p.x - center.x).abs() - half_extents.x;
                let qy = (p.y - center.y).abs() - half_extents.y;
                let outside = qx.max(0.0).hypot(qy.max(0.0));
                let inside = qx.max(qy).min(0.0);
                outside + inside
            }
            Shape::Circle { center, radius } => p.distance(center) - radius,
        }
    }

    /// Gap between the surfaces of two shapes, zero when they touch or overlap.
    pub fn gap(&self, other: &Shape) -> f64 {
        match (*self, *other) {
            (
                Shape::Rect {
                    center: c1,
                    half_extents: h1,
                },
                Shape::Rect {
                    center: c2,
                    half_extents: h2,
                },
            ) => {
                let dx = ((c1.x - c2.x).abs() - h1.x - h2.x).max(0.0);
                let dy = ((c1.y - c2.y).abs() - h1.y - h2.y).max(0.0);
                dx.hypot(dy)
            }
            (Shape::Circle { center, radius }, s) | (s, Shape::Circle { center, radius }) => {
                (s.signed_distance(center) - radius).max(0.0)
            }
        }
    }

    /// First intersection of the ray `origin + t·dir` (unit `dir`, t ≥ 0).
    /// An origin inside the shape reports an entry at distance zero.
    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<Entry> {
        match *self {
            Shape::Rect {
                center,
                half_extents,
            } => {
                let lo = center - half_extents;
                let hi = center + half_extents;
                let mut t_enter = f64::NEG_INFINITY;
                let mut t_exit = f64::INFINITY;
                let mut enter_cos = 0.0;
                for (o, d, l, h) in [(origin.x, dir.x, lo.x, hi.x), (origin.y, dir.y, lo.y, hi.y)] {
                    if d == 0.0 {
                        if o < l || o > h {
                            return None;
                        }
                        continue;
                    }
                    let (mut t0, mut t1) = ((l - o) / d, (h - o) / d);
                    if t0 > t1 {
                        std::mem::swap(&mut t0, &mut t1);
                    }
                    if t0 > t_enter {
                        t_enter = t0;
                        enter_cos = d.abs();
                    }
                    t_exit = t_exit.min(t1);
                }
                if t_enter > t_exit || t_exit < 0.0 {
                    return None;
                }
                if t_enter <= 0.0 {
                    return Some(Entry {
                        distance: 0.0,
                        incidence: 0.0,
                    });
                }
                Some(Entry {
                    distance: t_enter,
                    incidence: enter_cos.clamp(0.0, 1.0).acos(),
                })
            }
            Shape::Circle { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.dot(oc) - radius * radius;
                if c <= 0.0 {
                    return Some(Entry {
                        distance: 0.0,
                        incidence: 0.0,
                    });
                }
                if b >= 0.0 {
                    return None;
                }
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                // c / (-b + √disc) avoids cancellation for near hits.
                let t = c / (-b + disc.sqrt());
                let normal = (origin + dir * t - center) * (1.0 / radius);
                let cos = dir.dot(normal).abs().clamp(0.0, 1.0);
                Some(Entry {
                    distance: t,
                    incidence: cos.acos().min(FRAC_PI_2),
                })
            }
        }
    }
}

/// A static obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub shape: Shape,
}

/// Robot platform dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyGeometry {
    pub body_radius: f64,
    pub wheel_radius: f64,
    pub axle_track: f64,
}

impl Default for BodyGeometry {
    /// Pioneer 3-DX class platform.
    fn default() -> Self {
        Self {
            body_radius: 0.22,
            wheel_radius: 0.0975,
            axle_track: 0.33,
        }
    }
}

impl BodyGeometry {
    pub fn is_valid(&self) -> bool {
        self.body_radius > 0.0
            && self.wheel_radius > 0.0
            && self.axle_track > 0.0
            && self.body_radius >= self.axle_track / 2.0
    }
}

/// Axis-aligned world rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn contains_disc(&self, center: Vec2, radius: f64) -> bool {
        center.x - radius >= self.min.x
            && center.x + radius <= self.max.x
            && center.y - radius >= self.min.y
            && center.y + radius <= self.max.y
    }

    /// The four wall rectangles enclosing the bounds.
    pub fn walls(&self) -> [Obstacle; 4] {
        let t = WALL_THICKNESS / 2.0;
        let w = (self.max.x - self.min.x) / 2.0 + WALL_THICKNESS;
        let h = (self.max.y - self.min.y) / 2.0 + WALL_THICKNESS;
        let cx = (self.min.x + self.max.x) / 2.0;
        let cy = (self.min.y + self.max.y) / 2.0;
        let rect = |x, y, hx, hy| Obstacle {
            shape: Shape::rect(Vec2::new(x, y), Vec2::new(hx, hy)),
        };
        [
            rect(cx, self.min.y - t, w, t),
            rect(cx, self.max.y + t, w, t),
            rect(self.min.x - t, cy, t, h),
            rect(self.max.x + t, cy, t, h),
        ]
    }
}

/// Immutable static geometry: interior obstacles plus boundary walls.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub bounds: Option<Bounds>,
    pub obstacles: Vec<Obstacle>,
    walls: Vec<Obstacle>,
}

impl World {
    pub fn bounded(bounds: Bounds, obstacles: Vec<Obstacle>) -> Self {
        Self {
            bounds: Some(bounds),
            obstacles,
            walls: bounds.walls().to_vec(),
        }
    }

    /// A world without boundary walls.
    pub fn open(obstacles: Vec<Obstacle>) -> Self {
        Self {
            bounds: None,
            obstacles,
            walls: Vec::new(),
        }
    }

    /// Walls first, then interior obstacles.
    pub fn statics(&self) -> impl Iterator<Item = &Obstacle> {
        self.walls.iter().chain(self.obstacles.iter())
    }
}

/// Identity of a dynamic body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BodyId {
    Robot(u32),
    Intruder(Color),
}

/// A moving disc: friendly robot or scripted intruder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    pub id: BodyId,
    pub position: Vec2,
    pub radius: f64,
}

impl Body {
    pub fn shape(&self) -> Shape {
        Shape::circle(self.position, self.radius)
    }
}

/// What a ray struck.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Static,
    Body(BodyId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    /// Angle between the ray and the surface normal, in [0, π/2].
    pub incidence: f64,
    pub surface: Surface,
}

/// World geometry together with the body poses of one tick.
#[derive(Debug, Clone, Copy)]
pub struct Scene<'a> {
    pub world: &'a World,
    pub bodies: &'a [Body],
}

impl<'a> Scene<'a> {
    pub fn new(world: &'a World, bodies: &'a [Body]) -> Self {
        Self { world, bodies }
    }

    fn candidates(&self, exclude: Option<BodyId>) -> impl Iterator<Item = (Shape, Surface)> + '_ {
        self.world
            .statics()
            .map(|o| (o.shape, Surface::Static))
            .chain(
                self.bodies
                    .iter()
                    .filter(move |b| Some(b.id) != exclude)
                    .map(|b| (b.shape(), Surface::Body(b.id))),
            )
    }

    /// Nearest surface along a ray within `max_range`, skipping the `exclude`d body.
    pub fn ray_cast(
        &self,
        origin: Vec2,
        direction: f64,
        max_range: f64,
        exclude: Option<BodyId>,
    ) -> Option<RayHit> {
        let dir = Vec2::from_angle(direction);
        let mut best: Option<RayHit> = None;
        for (shape, surface) in self.candidates(exclude) {
            if let Some(e) = shape.ray_entry(origin, dir) {
                if e.distance <= max_range && best.is_none_or(|b| e.distance < b.distance) {
                    best = Some(RayHit {
                        distance: e.distance,
                        incidence: e.incidence,
                        surface,
                    });
                }
            }
        }
        best
    }

    /// Entry hits of every candidate along the ray, nearest first.
    pub fn ray_entries(
        &self,
        origin: Vec2,
        direction: f64,
        exclude: Option<BodyId>,
    ) -> Vec<RayHit> {
        let dir = Vec2::from_angle(direction);
        let mut hits: Vec<RayHit> = self
            .candidates(exclude)
            .filter_map(|(shape, surface)| {
                shape.ray_entry(origin, dir).map(|e| RayHit {
                    distance: e.distance,
                    incidence: e.incidence,
                    surface,
                })
            })
            .collect();
        hits.sort_by(|a, b| a.distance.total_cmp(&b.distance));
        hits
    }

    /// Smallest surface distance minus `body_radius` over all obstacles and
    /// other bodies. Negative means penetration; `f64::MAX` for an empty scene.
    pub fn clearance(&self, position: Vec2, body_radius: f64, exclude: Option<BodyId>) -> f64 {
        self.candidates(exclude)
            .map(|(shape, _)| shape.signed_distance(position) - body_radius)
            .fold(f64::MAX, f64::min)
    }
}
