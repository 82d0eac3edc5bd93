//! A deterministic 2D grid-world navigation stack.
//!
//! The pipeline per simulation tick: a simulated laser scanner sweeps the
//! front semicircle of the robot, the returns are grouped into obstacle
//! clusters with an adaptive distance threshold, each cluster is matched
//! against the previous frame and classified as new / static / dynamic,
//! potential collisions are predicted from the robot's and obstacles'
//! motion, and a fan-of-lines local planner detours around anything the
//! robot cannot simply wait out.
//!
//! The [`navigator`] module ties the stages together; [`scenario`] and
//! [`trace`] provide the file formats used by the CLI harness.

pub mod analysis;
pub mod batch;
pub mod clustering;
pub mod geometry;
pub mod metrics;
pub mod morphin;
pub mod navigator;
pub mod prediction;
pub mod recognition;
pub mod scenario;
pub mod trace;
pub mod world;

pub use geometry::{GlobalPoint, GridCoord, PolarBeam, Pose};
pub use navigator::{Navigator, RunOutcome, RunResult};
pub use scenario::Scenario;
