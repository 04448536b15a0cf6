//! Arithmetic-mean obstacle navigation.
//!
//! Each side's nonzero sonar raws are averaged, converted to meters, and the
//! midpoint of the two side distances becomes the lateral set point. The
//! robot steers by a fixed wheel-speed increment whenever its left-side
//! distance strays from the midpoint by more than the dead band.

use crate::params::ControllerParams;
use crate::sonar::{raw_to_distance_unchecked, SonarScan};

/// Wheel angular velocities, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WheelCommand {
    pub left: f64,
    pub right: f64,
}

impl WheelCommand {
    pub const STOP: WheelCommand = WheelCommand {
        left: 0.0,
        right: 0.0,
    };

    pub fn new(left: f64, right: f64) -> Self {
        Self { left, right }
    }

    pub fn straight(speed: f64) -> Self {
        Self::new(speed, speed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavDecision {
    pub mean_raw_left: f64,
    pub mean_raw_right: f64,
    pub d_left: f64,
    pub d_right: f64,
    pub midpoint: f64,
    /// Whether the midpoint was near enough for the steering law to act.
    pub engaged: bool,
    pub command: WheelCommand,
}

/// Mean of the strictly positive raws; 0 when none are positive.
pub fn side_mean(raws: [u16; 4]) -> f64 {
    let (sum, n) = raws
        .iter()
        .filter(|&&r| r > 0)
        .fold((0.0, 0u32), |(s, n), &r| (s + r as f64, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn midpoint(d_left: f64, d_right: f64) -> f64 {
    (d_left + d_right) / 2.0
}

/// True when no sensor reads at or above the clear gate.
pub fn obstacle_clear(scan: &SonarScan, params: &ControllerParams) -> bool {
    scan.raw.iter().all(|&r| (r as f64) < params.clear_raw_gate)
}

pub fn nav_command(scan: &SonarScan, params: &ControllerParams) -> NavDecision {
    let mean_raw_left = side_mean(scan.left());
    let mean_raw_right = side_mean(scan.right());
    let d_left = raw_to_distance_unchecked(mean_raw_left);
    let d_right = raw_to_distance_unchecked(mean_raw_right);
    let (engaged, command) = steer(d_left, d_right, params);
    NavDecision {
        mean_raw_left,
        mean_raw_right,
        d_left,
        d_right,
        midpoint: midpoint(d_left, d_right),
        engaged,
        command,
    }
}

/// Banded steering on side distances in meters. Returns whether the
/// engage gate let the steering law act, and the wheel command.
pub fn steer(d_left: f64, d_right: f64, params: &ControllerParams) -> (bool, WheelCommand) {
    let mid = midpoint(d_left, d_right);
    let base = params.base_speed();
    let delta = params.steer_delta;
    if mid >= params.engage_gate {
        return (false, WheelCommand::straight(base));
    }
    let offset = mid - d_left;
    let command = if offset > params.band {
        // left side is nearer: speed up the left wheel to veer right
        WheelCommand::new(base + delta, base - delta)
    } else if offset < -params.band {
        WheelCommand::new(base - delta, base + delta)
    } else {
        WheelCommand::straight(base)
    };
    (true, command)
}
