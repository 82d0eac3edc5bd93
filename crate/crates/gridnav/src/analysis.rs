//! Per-cluster attributes and cross-frame matching: cluster center, grid
//! bounding box, overlap and coincidence of boxes, and the spatial
//! correlation used to match obstacles between consecutive scans.

use serde::{Deserialize, Serialize};

use crate::clustering::Cluster;
use crate::geometry::{global_to_grid, polar_to_global, CellBox, GlobalPoint, Pose};

/// Default weights for the spatial correlation.
pub const Y_DELTA: f64 = 0.5;
pub const Y_ETA: f64 = 0.5;

/// One tracked obstacle at a single scan time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleRecord {
    pub id: u32,
    pub center: GlobalPoint,
    pub area: CellBox,
    pub mean_rho: f64,
    pub mean_alpha: f64,
}

/// Match quality between a current record and one from the previous scan.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MatchScore {
    /// Center distance in grid-edge units.
    pub delta: f64,
    /// Non-overlapping rate in [0, 1].
    pub eta: f64,
    /// Coincidence of the current area with the previous one.
    pub xi: f64,
    pub sigma: f64,
}

/// Cluster center: mean range and mean angle, mapped to the global frame.
pub fn center(cluster: &Cluster, robot: &Pose) -> GlobalPoint {
    debug_assert!(!cluster.is_empty());
    let n = cluster.len() as f64;
    let mean_rho = cluster.beams.iter().map(|b| b.rho).sum::<f64>() / n;
    let mean_alpha = cluster.beams.iter().map(|b| b.alpha()).sum::<f64>() / n;
    polar_to_global(robot, mean_rho, mean_alpha)
}

/// Grid bounding box of a cluster: the corners come from the extreme
/// (rho, alpha) pairs, mapped to cells and reordered into a box.
///
/// The range is padded by a sliver before mapping: a return lies on the
/// obstacle's near face, and when that face coincides with a cell border
/// exactly, rounding must attribute the hit to the occupied cell behind
/// the surface, not the free cell in front of it.
pub fn grid_area(cluster: &Cluster, robot: &Pose, r: f64) -> CellBox {
    debug_assert!(!cluster.is_empty());
    const SURFACE_EPS: f64 = 1e-6;
    let min_rho = cluster.beams.iter().map(|b| b.rho).fold(f64::INFINITY, f64::min);
    let max_rho = cluster.beams.iter().map(|b| b.rho).fold(f64::NEG_INFINITY, f64::max);
    let min_alpha = cluster.beams.first().unwrap().alpha();
    let max_alpha = cluster.beams.last().unwrap().alpha();
    let pad = r * SURFACE_EPS;
    let a = global_to_grid(&polar_to_global(robot, min_rho + pad, min_alpha), r);
    let b = global_to_grid(&polar_to_global(robot, max_rho + pad, max_alpha), r);
    CellBox::from_corners(a, b)
}

/// Build the full record for a cluster.
pub fn make_record(id: u32, cluster: &Cluster, robot: &Pose, r: f64) -> ObstacleRecord {
    let n = cluster.len() as f64;
    ObstacleRecord {
        id,
        center: center(cluster, robot),
        area: grid_area(cluster, robot, r),
        mean_rho: cluster.beams.iter().map(|b| b.rho).sum::<f64>() / n,
        mean_alpha: cluster.beams.iter().map(|b| b.alpha()).sum::<f64>() / n,
    }
}

/// Intersection and union cell counts of two boxes via the sorted-boundary
/// formula; returns (intersection, union).
pub fn overlap(a: &CellBox, b: &CellBox) -> (i64, i64) {
    let disjoint = b.x_max < a.x_min || b.x_min > a.x_max || b.y_max < a.y_min || b.y_min > a.y_max;
    let inter = if disjoint {
        0
    } else {
        let mut xs = [a.x_min, a.x_max, b.x_min, b.x_max];
        let mut ys = [a.y_min, a.y_max, b.y_min, b.y_max];
        xs.sort_unstable();
        ys.sort_unstable();
        i64::from(xs[2] - xs[1] + 1) * i64::from(ys[2] - ys[1] + 1)
    };
    (inter, a.cell_count() + b.cell_count() - inter)
}

/// Coincidence: fraction of the current box `a` covered by the previous
/// box `b`.
pub fn coincidence(a: &CellBox, b: &CellBox) -> f64 {
    debug_assert!(a.cell_count() >= 1);
    let (inter, _) = overlap(a, b);
    inter as f64 / a.cell_count() as f64
}

/// Spatial correlation between a current and a previous record.
///
/// `delta` is the center distance converted to grid-edge units (dividing
/// by `r`); in raw millimetres the 1/(delta+1) term would vanish for any
/// two distinct obstacles and the recognition thresholds would be
/// unreachable.
pub fn spatial_correlation(
    a: &ObstacleRecord,
    b: &ObstacleRecord,
    r: f64,
    y_delta: f64,
    y_eta: f64,
) -> MatchScore {
    debug_assert!(y_delta >= 0.0 && y_eta >= 0.0);
    let delta = a.center.distance(&b.center) / r;
    let (inter, union) = overlap(&a.area, &b.area);
    let eta = 1.0 - inter as f64 / union as f64;
    MatchScore {
        delta,
        eta,
        xi: coincidence(&a.area, &b.area),
        sigma: y_delta / (delta + 1.0) + y_eta / (eta + 1.0),
    }
}

/// Best match of a current record against the previous chain: the maximal
/// spatial correlation. Ties go to the lowest previous-record id. Returns
/// `None` (sigma_max = 0) for an empty previous chain.
pub fn max_spatial_correlation<'a>(
    a: &ObstacleRecord,
    prev_chain: &'a [ObstacleRecord],
    r: f64,
    y_delta: f64,
    y_eta: f64,
) -> Option<(&'a ObstacleRecord, MatchScore)> {
    let mut best: Option<(&ObstacleRecord, MatchScore)> = None;
    for prev in prev_chain {
        let score = spatial_correlation(a, prev, r, y_delta, y_eta);
        let better = match &best {
            None => true,
            Some((bp, bs)) => {
                score.sigma > bs.sigma || (score.sigma == bs.sigma && prev.id < bp.id)
            }
        };
        if better {
            best = Some((prev, score));
        }
    }
    best
}
