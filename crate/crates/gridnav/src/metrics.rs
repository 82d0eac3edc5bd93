//! Summary metrics for a finished run.

use serde::{Deserialize, Serialize};

use crate::geometry::global_to_grid;
use crate::navigator::{RunOutcome, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub outcome: RunOutcome,
    pub ticks_to_target: Option<u64>,
    /// Cells visited along the trajectory (consecutive duplicates removed).
    pub path_length_cells: u64,
    pub morphin_invocations: u64,
    pub wait_ticks: u64,
    pub slowdown_ticks: u64,
    pub min_clearance_cells: Option<i32>,
    pub collision_count: u64,
}

pub fn summarize(result: &RunResult, r: f64) -> RunMetrics {
    let mut path_length_cells = 0u64;
    let mut prev = None;
    for pose in &result.trajectory {
        let cell = global_to_grid(&pose.position(), r);
        if prev != Some(cell) {
            path_length_cells += 1;
            prev = Some(cell);
        }
    }
    RunMetrics {
        outcome: result.outcome,
        ticks_to_target: result.ticks_to_target,
        path_length_cells,
        morphin_invocations: result.morphin_invocations,
        wait_ticks: result.wait_ticks,
        slowdown_ticks: result.slowdown_ticks,
        min_clearance_cells: result.min_clearance_cells,
        collision_count: result.collision_count,
    }
}
