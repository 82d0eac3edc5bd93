//! Per-tick trace records and the line-delimited trace format.
//!
//! One JSON object per line with stable field order, so identical runs
//! produce byte-identical files and diff-based regression checks work.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::geometry::{CellBox, GridCoord};
use crate::prediction::{Scenario, Verdict};
use crate::recognition::ObstacleClass;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleReport {
    pub id: u32,
    pub class: ObstacleClass,
    pub sigma_max: f64,
    pub delta: f64,
    pub xi: f64,
    /// Estimated speed, mm/s (0 when no motion estimate exists).
    pub v: f64,
    /// Estimated motion direction, degrees.
    pub alpha: f64,
    pub area: CellBox,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionReport {
    pub obstacle_id: u32,
    pub scenario: Scenario,
    pub verdict: Verdict,
    pub pcp: Option<GridCoord>,
    pub t_robot: Option<f64>,
    pub t_obstacle: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateReport {
    pub angle_g: f64,
    pub endpoint: GridCoord,
    pub sub_target: GridCoord,
    pub g_abs: f64,
    pub delta_l: f64,
    pub w: f64,
    pub blocked: bool,
    /// None when blocked (the score is infinite).
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerReport {
    pub pcp: GridCoord,
    pub candidates: Vec<CandidateReport>,
    pub chosen_angle: f64,
    pub sub_target: GridCoord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TickReport {
    pub tick: u64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub mode: Mode,
    pub waiting: bool,
    pub slowdown: bool,
    /// Situation label for this tick: the acted-on prediction's scenario,
    /// or H when several predictions fired at once.
    pub scenario: Scenario,
    pub obstacles: Vec<ObstacleReport>,
    pub predictions: Vec<PredictionReport>,
    pub planner: Option<PlannerReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    FollowGlobal,
    Detour,
    Waiting,
}

pub fn write_trace<W: Write>(mut out: W, reports: &[TickReport]) -> io::Result<()> {
    for rep in reports {
        serde_json::to_writer(&mut out, rep)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace<R: BufRead>(input: R) -> io::Result<Vec<TickReport>> {
    let mut reports = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        reports.push(serde_json::from_str(&line)?);
    }
    Ok(reports)
}
