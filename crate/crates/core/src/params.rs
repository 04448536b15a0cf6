//! Controller tuning shared by the navigation and pursuit laws.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::sonar::MAX_RAW;

/// Speed bounds, steering increments, and switching thresholds. Every robot in
/// a scenario runs with the same values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerParams {
    /// Wheel speed ceiling, rad/s.
    pub max_wheel_speed: f64,
    /// Cruise speed as a fraction of `max_wheel_speed`.
    pub base_fraction: f64,
    /// Wheel speed added to one side and removed from the other when steering, rad/s.
    pub steer_delta: f64,
    /// Dead band around the midpoint, meters.
    pub band: f64,
    /// Steering engages only when the midpoint is nearer than this, meters.
    pub engage_gate: f64,
    /// Pursuit is allowed only when every sonar raw is below this value.
    pub clear_raw_gate: f64,
    /// Stop once the followed color covers more pixels than this.
    pub pixel_stop: u32,
    /// Spin in place while the followed color covers fewer pixels than this.
    pub pixel_search: u32,
    /// Range finder ceiling, meters.
    pub range_max: f64,
    /// Sonar detection range, meters.
    pub sonar_max_range: f64,
    /// Sonar returns beyond this incidence angle are lost, radians.
    pub sonar_incidence_cutoff: f64,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            max_wheel_speed: 5.24,
            base_fraction: 0.5,
            steer_delta: 0.5,
            band: 0.015,
            engage_gate: 3.2,
            clear_raw_gate: 700.0,
            pixel_stop: 3000,
            pixel_search: 10,
            range_max: 10.0,
            sonar_max_range: 5.0,
            sonar_incidence_cutoff: FRAC_PI_4,
        }
    }
}

impl ControllerParams {
    /// Cruise wheel speed, rad/s.
    pub fn base_speed(&self) -> f64 {
        self.base_fraction * self.max_wheel_speed
    }

    /// Returns the name of the first violated constraint, if any.
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn violation(&self) -> Option<&'static str> {
        if !(self.max_wheel_speed > 0.0) {
            return Some("max_wheel_speed must be > 0");
        }
        if !(self.base_fraction > 0.0 && self.base_fraction <= 1.0) {
            return Some("base_fraction must lie in (0, 1]");
        }
        if !(self.steer_delta >= 0.0 && self.steer_delta <= self.base_speed()) {
            return Some("steer_delta must lie in [0, base_fraction * max_wheel_speed]");
        }
        if self.base_speed() + self.steer_delta > self.max_wheel_speed {
            return Some("base speed plus steer_delta exceeds max_wheel_speed");
        }
        if !(self.band > 0.0) {
            return Some("band must be > 0");
        }
        if !(self.engage_gate > 0.0) {
            return Some("engage_gate must be > 0");
        }
        if !(self.clear_raw_gate > 0.0 && self.clear_raw_gate <= MAX_RAW as f64) {
            return Some("clear_raw_gate must lie in (0, 1024]");
        }
        if self.pixel_search > self.pixel_stop {
            return Some("pixel_search must not exceed pixel_stop");
        }
        if !(self.range_max > 0.0) {
            return Some("range_max must be > 0");
        }
        if !(self.sonar_max_range > 0.0) {
            return Some("sonar_max_range must be > 0");
        }
        if !(self.sonar_incidence_cutoff > 0.0
            && self.sonar_incidence_cutoff <= std::f64::consts::FRAC_PI_2)
        {
            return Some("sonar_incidence_cutoff must lie in (0, pi/2]");
        }
        None
    }
}
