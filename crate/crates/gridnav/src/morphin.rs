//! Simplified Morphin local planner: a fan of straight candidate paths
//! around the centerline from the robot to the potential collision point,
//! scored by turn angle, sub-target distance to the goal, and path-sharing
//! with the global line. Arcs are drawn as straight lines; every candidate
//! has the centerline's length.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{segment_cells, CellBox, GlobalPoint, GridCoord};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MorphinWeights {
    /// Weight of the turn angle |G| (radians).
    pub k1: f64,
    /// Weight of the sub-target-to-target distance, grid-edge units.
    pub k2: f64,
    /// Weight of the path-sharing term W = 1/(1+m).
    pub k3: f64,
}

impl Default for MorphinWeights {
    fn default() -> Self {
        MorphinWeights { k1: 1.0, k2: 1.3, k3: 0.6 }
    }
}

/// Candidate angles relative to the centerline, degrees. The centerline
/// itself is excluded: it runs into the collision point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanSpec {
    pub angles: Vec<f64>,
}

impl Default for FanSpec {
    fn default() -> Self {
        let mut angles = Vec::new();
        for a in [15.0, 30.0, 45.0, 60.0, 75.0] {
            angles.push(a);
            angles.push(-a);
        }
        FanSpec { angles }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidatePath {
    /// Offset from the centerline, degrees; positive turns left.
    pub angle_g: f64,
    pub cells: Vec<GridCoord>,
    pub endpoint: GridCoord,
    pub endpoint_point: GlobalPoint,
    /// Rejoin cell on the global path.
    pub sub_target: GridCoord,
    /// |G| in radians.
    pub g_abs: f64,
    pub delta_l: f64,
    pub w: f64,
    /// Whether the endpoint→sub-target leg avoids every known obstacle.
    pub rejoin_clear: bool,
    /// Infinite when blocked.
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphinPlan {
    pub candidates: Vec<CandidatePath>,
    pub chosen: usize,
    pub sub_target: GridCoord,
}

impl MorphinPlan {
    pub fn chosen_path(&self) -> &CandidatePath {
        &self.candidates[self.chosen]
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("all candidate paths are blocked")]
    NoFeasiblePath,
}

/// Full-arc evaluation: y = e1 L + e2 G + e3 dL + e4 W, infinite when the
/// path crosses an obstacle. Kept as a scoring variant only; the planner
/// itself uses the simplified straight-line form.
pub fn score_full_arc(l: f64, g: f64, dl: f64, w: f64, eps: [f64; 4], blocked: bool) -> f64 {
    if blocked {
        f64::INFINITY
    } else {
        eps[0] * l + eps[1] * g + eps[2] * dl + eps[3] * w
    }
}

/// Plan a detour around `pcp`.
///
/// `path_remaining` is the global path from the robot's cell to the
/// target, in order. `blocking_box` is the area of the obstacle that
/// triggered the replan; the base rejoin point is the first path cell
/// beyond it (pushed `extra_push` cells farther for same-direction
/// overtakes). `bounds`, when given, marks cells outside the grid as
/// blocked.
#[allow(clippy::too_many_arguments)]
pub fn plan(
    robot_pos: GlobalPoint,
    pcp: GridCoord,
    path_remaining: &[GridCoord],
    target: GridCoord,
    obstacle_boxes: &[CellBox],
    blocking_box: Option<CellBox>,
    weights: &MorphinWeights,
    fan: &FanSpec,
    r: f64,
    extra_push: usize,
    bounds: Option<(i32, i32)>,
) -> Result<MorphinPlan, PlanError> {
    assert!(!fan.angles.is_empty(), "at least one candidate angle required");
    assert!(!path_remaining.is_empty());

    let pcp_point = pcp.center(r);
    let center_len = robot_pos.distance(&pcp_point);
    let center_angle = (pcp_point.y - robot_pos.y).atan2(pcp_point.x - robot_pos.x);

    // Base rejoin: first path cell past everything the blocking obstacle
    // (with a one-cell skirt, so the rejoin leg does not skim its face),
    // every other known obstacle, and the pcp itself.
    let skirt = blocking_box.map(|b| CellBox {
        x_min: b.x_min - 1,
        x_max: b.x_max + 1,
        y_min: b.y_min - 1,
        y_max: b.y_max + 1,
    });
    let mut last_blocked = None;
    for (i, c) in path_remaining.iter().enumerate() {
        let hit = *c == pcp
            || skirt.map_or(false, |b| b.contains(*c))
            || obstacle_boxes.iter().any(|b| b.contains(*c));
        if hit {
            last_blocked = Some(i);
        }
    }
    let base_idx = match last_blocked {
        Some(i) => (i + 1 + extra_push).min(path_remaining.len() - 1),
        // Nothing on the remaining path is covered: rejoin right away.
        None => 0,
    };

    let in_bounds = |c: GridCoord| match bounds {
        Some((w, h)) => c.gx >= 0 && c.gx < w && c.gy >= 0 && c.gy < h,
        None => true,
    };
    let target_point = target.center(r);

    // Candidates are screened against obstacle boxes grown by one cell so
    // chosen endpoints keep a margin from perceived surfaces (grazing-angle
    // perception can bulge a box by a cell between scans). When the robot
    // is too hemmed in for that, the raw boxes are used instead.
    let grown: Vec<CellBox> = obstacle_boxes
        .iter()
        .map(|b| CellBox {
            x_min: b.x_min - 1,
            x_max: b.x_max + 1,
            y_min: b.y_min - 1,
            y_max: b.y_max + 1,
        })
        .collect();

    let evaluate = |angle_g: f64, len: f64, boxes: &[CellBox]| -> CandidatePath {
        let phi = center_angle + angle_g.to_radians();
        let endpoint_point = GlobalPoint::new(
            robot_pos.x + len * phi.cos(),
            robot_pos.y + len * phi.sin(),
        );
        let cells = segment_cells(robot_pos, endpoint_point, r);
        let endpoint = *cells.last().unwrap();
        // A candidate that never leaves the robot's cell makes no progress.
        // The robot's own cell is exempt from the box screen: when a box
        // has swallowed it, escaping outward is exactly the point.
        let blocked = cells.len() <= 1
            || cells
                .iter()
                .skip(1)
                .any(|c| *c == pcp || !in_bounds(*c) || boxes.iter().any(|b| b.contains(*c)));

        // Rejoin at the path cell (at or past the base rejoin) nearest to
        // this candidate's endpoint.
        let sub_target = path_remaining[base_idx..]
            .iter()
            .min_by(|a, b| {
                let da = a.center(r).distance(&endpoint_point);
                let db = b.center(r).distance(&endpoint_point);
                da.partial_cmp(&db).unwrap()
            })
            .copied()
            .unwrap_or(target);

        let delta_l = sub_target.center(r).distance(&target_point) / r;
        let rejoin_cells = segment_cells(endpoint_point, sub_target.center(r), r);
        // A clipped rejoin leg is not fatal — the navigator hops to the
        // endpoint and replans from there — but clean legs are preferred.
        let rejoin_clear = !rejoin_cells.iter().any(|c| {
            *c == pcp || !in_bounds(*c) || boxes.iter().any(|b| b.contains(*c))
        });
        let m = rejoin_cells
            .iter()
            .filter(|c| path_remaining.contains(c))
            .count();
        let w = 1.0 / (1.0 + m as f64);
        let g_abs = angle_g.to_radians().abs();
        let score = if blocked {
            f64::INFINITY
        } else {
            weights.k1 * g_abs + weights.k2 * delta_l + weights.k3 * w
        };
        CandidatePath {
            angle_g,
            cells,
            endpoint,
            endpoint_point,
            sub_target,
            g_abs,
            delta_l,
            w,
            rejoin_clear,
            score,
        }
    };

    #[cfg(feature = "parallel")]
    let evaluate_all = |len: f64, boxes: &[CellBox]| -> Vec<CandidatePath> {
        use rayon::prelude::*;
        fan.angles.par_iter().map(|a| evaluate(*a, len, boxes)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let evaluate_all = |len: f64, boxes: &[CellBox]| -> Vec<CandidatePath> {
        fan.angles.iter().map(|a| evaluate(*a, len, boxes)).collect()
    };

    // Fallbacks, tried in order: stretch the fan when it is too short to
    // get around the obstacle (the robot replanned right at its face), and
    // drop the one-cell margin when the robot is hemmed in too tightly for
    // it.
    let reach = robot_pos.distance(&path_remaining[base_idx].center(r));
    let mut candidates = evaluate_all(center_len, &grown);
    for (len, boxes) in [
        (reach, grown.as_slice()),
        (center_len, obstacle_boxes),
        (reach, obstacle_boxes),
    ] {
        if candidates.iter().any(|c| c.score.is_finite()) {
            break;
        }
        if len > 0.0 {
            candidates = evaluate_all(len, boxes);
        }
    }

    // Deterministic arg-min: clear rejoin leg first, then score, then
    // smaller |G|, then the left side.
    let mut chosen: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        if c.score.is_infinite() {
            continue;
        }
        let better = match chosen {
            None => true,
            Some(j) => {
                let b = &candidates[j];
                (c.rejoin_clear, b.score, b.g_abs, c.angle_g)
                    .partial_cmp(&(b.rejoin_clear, c.score, c.g_abs, b.angle_g))
                    .map_or(false, |o| o == std::cmp::Ordering::Greater)
            }
        };
        if better {
            chosen = Some(i);
        }
    }
    match chosen {
        Some(i) => {
            let sub_target = candidates[i].sub_target;
            Ok(MorphinPlan { candidates, chosen: i, sub_target })
        }
        None => Err(PlanError::NoFeasiblePath),
    }
}
