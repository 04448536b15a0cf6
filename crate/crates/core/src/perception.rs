//! Simulated color camera with an aligned range image, and color segmentation
//! of intruder markings.
//!
//! The renderer works column by column: every image column is one horizontal
//! ray, every row an elevation angle. Both axes are sampled at the same
//! angular pitch (`horizontal_fov / width`), so pixels are square in angle
//! and a target's pixel width is proportional to its angular extent.
//!
//! Static obstacles and friendly robots are drawn in neutral grays, intruders
//! as solid-color upright cylinders centered on the camera's height, and
//! everything else is white background.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::Pose;
use crate::world::{BodyId, Color, Scene, Surface};

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [255, 255, 255];
pub const OBSTACLE_GRAY: Rgb = [100, 100, 100];
pub const ROBOT_GRAY: Rgb = [120, 120, 120];

/// Paint used for an intruder's marking.
pub fn marking(color: Color) -> Rgb {
    match color {
        Color::Blue => [0, 0, 255],
        Color::Green => [0, 200, 0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraParams {
    pub width: usize,
    pub height: usize,
    /// Radians.
    pub horizontal_fov: f64,
    /// Range image ceiling, meters.
    pub max_depth: f64,
    /// Camera yaw relative to the robot heading, radians.
    pub mount_heading_offset: f64,
    /// Lens height above the floor, meters.
    pub mount_height: f64,
    /// Top of the friendly robot bodies above the floor, meters.
    pub robot_top: f64,
    /// Top of walls and obstacles above the floor, meters.
    pub obstacle_top: f64,
}

impl Default for CameraParams {
    fn default() -> Self {
        Self {
            width: 256,
            height: 128,
            horizontal_fov: 60f64.to_radians(),
            max_depth: 10.0,
            mount_heading_offset: 0.0,
            mount_height: 0.25,
            robot_top: 0.25,
            obstacle_top: 1.0,
        }
    }
}

impl CameraParams {
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Angular size of one pixel, radians.
    pub fn pixel_pitch(&self) -> f64 {
        self.horizontal_fov / self.width as f64
    }

    /// Bearing of a column's center relative to the optical axis (left positive).
    pub fn column_bearing(&self, u: usize) -> f64 {
        self.horizontal_fov * (0.5 - (u as f64 + 0.5) / self.width as f64)
    }

    /// Elevation of a row's center (up positive).
    pub fn row_elevation(&self, v: usize) -> f64 {
        self.pixel_pitch() * (self.height as f64 / 2.0 - (v as f64 + 0.5))
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn violation(&self) -> Option<&'static str> {
        if self.width == 0 || self.height == 0 || !self.width.is_multiple_of(2) {
            return Some("camera width must be even and both dimensions nonzero");
        }
        if !(self.horizontal_fov > 0.0 && self.horizontal_fov < std::f64::consts::PI) {
            return Some("horizontal_fov must lie in (0, pi)");
        }
        if self.pixel_pitch() * self.height as f64 >= std::f64::consts::PI {
            return Some("vertical field of view must stay below pi");
        }
        if !(self.max_depth > 0.0) {
            return Some("max_depth must be > 0");
        }
        if !(self.mount_height >= 0.0 && self.robot_top >= 0.0 && self.obstacle_top >= 0.0) {
            return Some("camera and body heights must be >= 0");
        }
        None
    }
}

/// Height of the intruder cylinders, meters; their radius is the body radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntruderLook {
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub pixels: Vec<Rgb>,
}

impl CameraFrame {
    pub fn filled(width: usize, height: usize, rgb: Rgb) -> Self {
        Self {
            width,
            height,
            pixels: vec![rgb; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: Rgb) {
        self.pixels[y * self.width + x] = rgb;
    }

    /// Binary portable pixmap (P6).
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        out.write_all(&bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    pub width: usize,
    pub height: usize,
    /// Row-major, meters.
    pub depth: Vec<f64>,
}

impl DepthFrame {
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            depth: vec![value; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.depth[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, d: f64) {
        self.depth[y * self.width + x] = d;
    }
}

/// Renders the color and range images seen from `pose`, skipping `own` body.
pub fn render(
    scene: &Scene<'_>,
    pose: &Pose,
    own: Option<BodyId>,
    params: &CameraParams,
    intruder: IntruderLook,
) -> (CameraFrame, DepthFrame) {
    let (w, h) = (params.width, params.height);
    let mut frame = CameraFrame::filled(w, h, BACKGROUND);
    let mut depth = DepthFrame::filled(w, h, params.max_depth);

    let rows: Vec<(f64, f64)> = (0..h)
        .map(|v| {
            let phi = params.row_elevation(v);
            (phi.tan(), phi.cos())
        })
        .collect();
    let floor = -params.mount_height;

    for u in 0..w {
        let bearing = params.mount_heading_offset + params.column_bearing(u);
        let hits = scene.ray_entries(pose.position, pose.direction(bearing), own);
        if hits.is_empty() {
            continue;
        }
        // vertical span of each hit relative to the lens, plus its paint
        let spans: Vec<(f64, f64, f64, Rgb)> = hits
            .iter()
            .map(|hit| {
                let (lo, hi, rgb) = match hit.surface {
                    Surface::Static => (floor, params.obstacle_top + floor, OBSTACLE_GRAY),
                    Surface::Body(BodyId::Robot(_)) => {
                        (floor, params.robot_top + floor, ROBOT_GRAY)
                    }
                    Surface::Body(BodyId::Intruder(c)) => {
                        (-intruder.height / 2.0, intruder.height / 2.0, marking(c))
                    }
                };
                (hit.distance, lo, hi, rgb)
            })
            .collect();
        for (v, &(tan_phi, cos_phi)) in rows.iter().enumerate() {
            let covering = spans.iter().find(|&&(s, lo, hi, _)| {
                let z = s * tan_phi;
                z >= lo && z <= hi
            });
            if let Some(&(s, _, _, rgb)) = covering {
                frame.set(u, v, rgb);
                depth.set(u, v, (s / cos_phi).min(params.max_depth));
            }
        }
    }
    (frame, depth)
}

/// Intruder color of a pixel under the fixed RGB thresholds.
pub fn classify_pixel(r: u8, g: u8, b: u8) -> Option<Color> {
    if b > 130 && r < 134 && g < 134 {
        Some(Color::Blue)
    } else if b < 116 && r < 116 && g > 161 {
        Some(Color::Green)
    } else {
        None
    }
}

/// Per-color pixel counts in each image half and the nearest range seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorStats {
    pub left_count: u32,
    pub right_count: u32,
    pub min_range: f64,
}

impl ColorStats {
    pub fn empty(max_depth: f64) -> Self {
        Self {
            left_count: 0,
            right_count: 0,
            min_range: max_depth,
        }
    }

    pub fn total(&self) -> u32 {
        self.left_count + self.right_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationResult {
    pub blue: ColorStats,
    pub green: ColorStats,
}

impl SegmentationResult {
    pub fn empty(max_depth: f64) -> Self {
        Self {
            blue: ColorStats::empty(max_depth),
            green: ColorStats::empty(max_depth),
        }
    }

    pub fn get(&self, color: Color) -> &ColorStats {
        match color {
            Color::Blue => &self.blue,
            Color::Green => &self.green,
        }
    }

    fn get_mut(&mut self, color: Color) -> &mut ColorStats {
        match color {
            Color::Blue => &mut self.blue,
            Color::Green => &mut self.green,
        }
    }
}

/// Splits the image at `width / 2` and tallies each intruder color.
/// `max_depth` seeds the per-color minimum range.
pub fn segment(frame: &CameraFrame, depth: &DepthFrame, max_depth: f64) -> SegmentationResult {
    debug_assert_eq!((frame.width, frame.height), (depth.width, depth.height));
    let half = frame.width / 2;
    let mut out = SegmentationResult::empty(max_depth);
    for (px_row, d_row) in frame
        .pixels
        .chunks_exact(frame.width)
        .zip(depth.depth.chunks_exact(depth.width))
    {
        for (x, (&[r, g, b], &d)) in px_row.iter().zip(d_row).enumerate() {
            let Some(color) = classify_pixel(r, g, b) else {
                continue;
            };
            let stats = out.get_mut(color);
            if x < half {
                stats.left_count += 1;
            } else {
                stats.right_count += 1;
            }
            if d < stats.min_range {
                stats.min_range = d;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::world::{Body, Obstacle, Shape, World};

    const LOOK: IntruderLook = IntruderLook { height: 0.5 };

    #[test]
    fn classify_examples() {
        assert_eq!(classify_pixel(0, 0, 255), Some(Color::Blue));
        assert_eq!(classify_pixel(0, 200, 0), Some(Color::Green));
        assert_eq!(classify_pixel(120, 120, 120), None);
        for rgb in [BACKGROUND, OBSTACLE_GRAY, ROBOT_GRAY] {
            assert_eq!(classify_pixel(rgb[0], rgb[1], rgb[2]), None);
        }
        assert_eq!(classify_pixel(0, 0, 130), None);
        assert_eq!(classify_pixel(0, 161, 0), None);
    }

    #[test]
    fn empty_scene_is_white_at_max_depth() {
        let w = World::open(vec![]);
        let p = CameraParams::default();
        let (f, d) = render(&Scene::new(&w, &[]), &Pose::default(), None, &p, LOOK);
        assert!(f.pixels.iter().all(|&px| px == BACKGROUND));
        assert!(d.depth.iter().all(|&x| x == 10.0));
        let seg = segment(&f, &d, p.max_depth);
        assert_eq!(seg, SegmentationResult::empty(10.0));
    }

    fn blue_at(x: f64, y: f64) -> Body {
        Body {
            id: BodyId::Intruder(Color::Blue),
            position: Vec2::new(x, y),
            radius: 0.2,
        }
    }

    #[test]
    fn intruder_ahead_is_centered_block() {
        let w = World::open(vec![]);
        let p = CameraParams::default();
        let bodies = [blue_at(5.0, 0.0)];
        let (f, d) = render(&Scene::new(&w, &bodies), &Pose::default(), None, &p, LOOK);
        let cols: Vec<usize> = (0..p.width)
            .filter(|&u| (0..p.height).any(|v| f.get(u, v) == marking(Color::Blue)))
            .collect();
        let expected = 2.0 * (0.2f64 / 5.0).atan() / p.horizontal_fov * p.width as f64;
        assert!(
            (cols.len() as f64 - expected).abs() <= 1.0,
            "{} vs {expected}",
            cols.len()
        );
        // contiguous and symmetric about the vertical midline
        assert_eq!(cols.last().unwrap() - cols[0] + 1, cols.len());
        assert_eq!(cols[0] + cols.last().unwrap() + 1, p.width);
        let seg = segment(&f, &d, p.max_depth);
        assert_eq!(seg.blue.left_count, seg.blue.right_count);
        assert!((seg.blue.min_range - 4.8).abs() < 0.01);
        assert_eq!(seg.green.total(), 0);
    }

    #[test]
    fn occluded_intruder_is_invisible() {
        let w = World::open(vec![Obstacle {
            shape: Shape::rect(Vec2::new(2.0, 0.0), Vec2::new(0.2, 1.0)),
        }]);
        let p = CameraParams::default();
        let bodies = [blue_at(5.0, 0.0)];
        let (f, d) = render(&Scene::new(&w, &bodies), &Pose::default(), None, &p, LOOK);
        assert_eq!(segment(&f, &d, p.max_depth).blue.total(), 0);
        assert!(f.pixels.contains(&OBSTACLE_GRAY));
    }

    #[test]
    fn blue_pixels_shrink_with_distance() {
        let w = World::open(vec![]);
        let p = CameraParams::default();
        let mut prev = u32::MAX;
        for k in 0..=80 {
            let dist = 1.0 + k as f64 * 0.1;
            let bodies = [blue_at(dist, 0.0)];
            let (f, d) = render(&Scene::new(&w, &bodies), &Pose::default(), None, &p, LOOK);
            let n = segment(&f, &d, p.max_depth).blue.total();
            assert!(n <= prev, "count rose at {dist} m");
            prev = n;
        }
    }

    #[test]
    fn segment_hand_built_frame() {
        let mut f = CameraFrame::filled(256, 128, BACKGROUND);
        let mut d = DepthFrame::filled(256, 128, 10.0);
        for k in 0..37 {
            let (x, y) = (k % 10, k / 10);
            f.set(x, y, [10, 20, 200]);
            d.set(x, y, 3.2 + k as f64 * 0.01);
        }
        let seg = segment(&f, &d, 10.0);
        assert_eq!(seg.blue.left_count, 37);
        assert_eq!(seg.blue.right_count, 0);
        assert_eq!(seg.blue.min_range, 3.2);
        assert_eq!(seg.green, ColorStats::empty(10.0));
    }

    #[test]
    fn ppm_header() {
        let f = CameraFrame::filled(4, 2, [1, 2, 3]);
        let mut buf = Vec::new();
        f.write_ppm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n4 2\n255\n"));
        assert_eq!(buf.len(), 11 + 4 * 2 * 3);
    }
}
