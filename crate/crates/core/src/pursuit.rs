//! Nearest-intruder target selection and pixel-balance pursuit.

use std::fmt;

use crate::nav::WheelCommand;
use crate::params::ControllerParams;
use crate::perception::SegmentationResult;
use crate::world::Color;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetChoice {
    /// `None` when neither color was seen.
    pub color: Option<Color>,
    pub chosen_range: f64,
    pub left_pixels: u32,
    pub right_pixels: u32,
}

impl TargetChoice {
    pub fn total(&self) -> u32 {
        self.left_pixels + self.right_pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PursuitMode {
    Follow,
    SearchSpin,
    Stopped,
}

impl fmt::Display for PursuitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PursuitMode::Follow => "follow",
            PursuitMode::SearchSpin => "search_spin",
            PursuitMode::Stopped => "stopped",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PursuitDecision {
    pub choice: TargetChoice,
    pub total_pixels: u32,
    pub mode: PursuitMode,
    pub command: WheelCommand,
}

/// Picks the intruder at the smaller sensed range. Exact ties go to blue.
/// Nothing is chosen when both ranges sit at the range ceiling.
pub fn select_target(seg: &SegmentationResult, params: &ControllerParams) -> TargetChoice {
    let (b, g) = (&seg.blue, &seg.green);
    if b.min_range >= params.range_max && g.min_range >= params.range_max {
        return TargetChoice {
            color: None,
            chosen_range: params.range_max,
            left_pixels: 0,
            right_pixels: 0,
        };
    }
    let color = if g.min_range < b.min_range {
        Color::Green
    } else {
        Color::Blue
    };
    let stats = seg.get(color);
    TargetChoice {
        color: Some(color),
        chosen_range: stats.min_range.min(params.range_max),
        left_pixels: stats.left_count,
        right_pixels: stats.right_count,
    }
}

pub fn pursuit_command(seg: &SegmentationResult, params: &ControllerParams) -> PursuitDecision {
    let choice = select_target(seg, params);
    let (left, right) = (choice.left_pixels, choice.right_pixels);
    let total = choice.total();
    let base = params.base_speed();
    let delta = params.steer_delta;

    let (mode, command) = if total > params.pixel_stop {
        (PursuitMode::Stopped, WheelCommand::STOP)
    } else if total < params.pixel_search {
        (PursuitMode::SearchSpin, WheelCommand::new(0.0, base))
    } else if right < left {
        // target sits in the left half: turn left
        (
            PursuitMode::Follow,
            WheelCommand::new(base - delta, base + delta),
        )
    } else if right > left {
        (
            PursuitMode::Follow,
            WheelCommand::new(base + delta, base - delta),
        )
    } else {
        (PursuitMode::Follow, WheelCommand::straight(base))
    };

    PursuitDecision {
        choice,
        total_pixels: total,
        mode,
        command,
    }
}
