//! Deterministic simulator for a team of differential-drive patrol robots.
//!
//! Each robot steers between obstacles with an arithmetic-mean law over its
//! eight front sonars, and once the sonars are clear it looks for color-marked
//! intruders with a camera and range finder, follows the nearest one by
//! balancing target pixels across the image halves, and stops once the target
//! fills enough of the frame.
//!
//! - [`world`]: geometry, ray casting, clearance
//! - [`scenario`]: scenario documents
//! - [`sonar`], [`perception`]: sensor models
//! - [`nav`], [`pursuit`]: per-robot controllers
//! - [`engine`]: the fixed-step loop and its trace
//! - [`analysis`], [`plot`]: post-run metrics and SVG charts

pub mod analysis;
pub mod engine;
pub mod geometry;
pub mod nav;
pub mod params;
pub mod perception;
pub mod plot;
pub mod pursuit;
pub mod scenario;
pub mod sonar;
pub mod trace;
pub mod world;

pub use geometry::{Pose, Vec2};
pub use params::ControllerParams;
pub use scenario::{load_scenario, load_scenario_file, Scenario, ScenarioError};
pub use world::Color;
