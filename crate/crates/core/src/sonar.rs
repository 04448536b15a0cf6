//! The eight front ultrasonic sensors.
//!
//! Readings use the integer raw domain `0..=1024`, where raw 0 means "no
//! return" and larger values mean nearer surfaces:
//! `distance = range · (1 − raw / 1024)`.

use std::f64::consts::FRAC_PI_4;

use thiserror::Error;

use crate::geometry::Pose;
use crate::world::{BodyId, Scene};

pub const MAX_RAW: u16 = 1024;
pub const SENSOR_COUNT: usize = 8;
/// Range encoded by the raw scale, meters.
pub const RAW_RANGE: f64 = 5.0;

#[derive(Debug, Error, PartialEq)]
pub enum SonarError {
    #[error("raw sonar value {0} outside 0..=1024")]
    RawOutOfRange(i64),
    #[error("distance {0} m outside the encodable range [0, 5]")]
    DistanceOutOfRange(f64),
}

/// Eight raw readings. Indices 0..=3 are the left group, 4..=7 the right group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SonarScan {
    pub raw: [u16; SENSOR_COUNT],
}

impl SonarScan {
    pub fn new(raw: [u16; SENSOR_COUNT]) -> Result<Self, SonarError> {
        if let Some(&bad) = raw.iter().find(|&&r| r > MAX_RAW) {
            return Err(SonarError::RawOutOfRange(bad as i64));
        }
        Ok(Self { raw })
    }

    pub fn left(&self) -> [u16; 4] {
        [self.raw[0], self.raw[1], self.raw[2], self.raw[3]]
    }

    pub fn right(&self) -> [u16; 4] {
        [self.raw[4], self.raw[5], self.raw[6], self.raw[7]]
    }
}

/// Sensor bearings (relative to heading, left positive), range, and incidence cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonarLayout {
    pub bearings: [f64; SENSOR_COUNT],
    pub max_range: f64,
    pub incidence_cutoff: f64,
}

impl Default for SonarLayout {
    /// 20° spacing across the front, 40° to the outermost pair.
    fn default() -> Self {
        let deg = [90.0f64, 50.0, 30.0, 10.0, -10.0, -30.0, -50.0, -90.0];
        Self {
            bearings: deg.map(f64::to_radians),
            max_range: RAW_RANGE,
            incidence_cutoff: FRAC_PI_4,
        }
    }
}

impl SonarLayout {
    pub fn with_range(max_range: f64, incidence_cutoff: f64) -> Self {
        Self {
            max_range,
            incidence_cutoff,
            ..Self::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.bearings.windows(2).all(|w| w[0] > w[1])
            && self.max_range > 0.0
            && self.incidence_cutoff > 0.0
            && self.incidence_cutoff <= std::f64::consts::FRAC_PI_2
    }
}

/// Meters for a raw reading; raw 0 maps to the full 5 m.
pub fn raw_to_distance(raw: u16) -> Result<f64, SonarError> {
    if raw > MAX_RAW {
        return Err(SonarError::RawOutOfRange(raw as i64));
    }
    Ok(raw_to_distance_unchecked(raw as f64))
}

/// The linear map on a real-valued raw (used for side means).
pub fn raw_to_distance_unchecked(raw: f64) -> f64 {
    RAW_RANGE * (1.0 - raw / MAX_RAW as f64)
}

/// Raw reading for a detected surface at `distance` meters. Never returns 0,
/// which is reserved for "no return".
pub fn distance_to_raw(distance: f64) -> Result<u16, SonarError> {
    if !(0.0..=RAW_RANGE).contains(&distance) {
        return Err(SonarError::DistanceOutOfRange(distance));
    }
    let raw = (MAX_RAW as f64 * (1.0 - distance / RAW_RANGE)).round();
    Ok((raw as u16).clamp(1, MAX_RAW))
}

/// Casts one central ray per sensor from `pose`, skipping the robot's own body.
pub fn scan(
    scene: &Scene<'_>,
    pose: &Pose,
    layout: &SonarLayout,
    own: Option<BodyId>,
) -> SonarScan {
    let mut raw = [0u16; SENSOR_COUNT];
    for (slot, bearing) in raw.iter_mut().zip(layout.bearings) {
        let hit = scene.ray_cast(
            pose.position,
            pose.direction(bearing),
            layout.max_range,
            own,
        );
        if let Some(hit) = hit {
            if hit.incidence <= layout.incidence_cutoff {
                // ranges beyond the raw scale saturate at the faintest detection
                *slot = distance_to_raw(hit.distance.min(RAW_RANGE)).unwrap_or(1);
            }
        }
    }
    SonarScan { raw }
}
