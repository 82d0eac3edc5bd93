//! The per-tick control loop: scan, cluster, analyze, classify, predict,
//! act, step. Runs until the robot's cell reaches the target or the run
//! times out.

use serde::{Deserialize, Serialize};

use crate::analysis::{make_record, max_spatial_correlation, ObstacleRecord};
use crate::clustering::cluster_scan;
use crate::geometry::{global_to_grid, segment_cells, GlobalPoint, GridCoord, Pose};
use crate::morphin::{self, FanSpec, MorphinWeights, PlanError};
use crate::prediction::{
    predict, CollisionPrediction, PredictionParams, RobotMotion, Scenario, Verdict,
};
use crate::recognition::{
    classify, estimate_motion, MotionEstimate, ObstacleClass, RecognitionThresholds,
};
use crate::trace::{
    CandidateReport, Mode, ObstacleReport, PlannerReport, PredictionReport, TickReport,
};
use crate::world::{RobotCommand, World, WorldError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NavParams {
    /// Clustering adaptive rate.
    pub lambda: f64,
    pub thresholds: RecognitionThresholds,
    pub y_delta: f64,
    pub y_eta: f64,
    pub prediction: PredictionParams,
    pub weights: MorphinWeights,
    pub fan: FanSpec,
    /// Fraction of the current speed shed per SlowDown tick.
    pub delta_v_fraction: f64,
    pub max_ticks: u64,
}

impl Default for NavParams {
    fn default() -> Self {
        NavParams {
            lambda: 1.2,
            thresholds: RecognitionThresholds::default(),
            y_delta: 0.5,
            y_eta: 0.5,
            prediction: PredictionParams::default(),
            weights: MorphinWeights::default(),
            fan: FanSpec::default(),
            delta_v_fraction: 0.25,
            max_ticks: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunOutcome {
    ReachedTarget,
    Timeout,
    NoFeasiblePath,
    RobotOutOfBounds,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub reports: Vec<TickReport>,
    pub trajectory: Vec<Pose>,
    pub ticks_to_target: Option<u64>,
    pub morphin_invocations: u64,
    pub wait_ticks: u64,
    pub slowdown_ticks: u64,
    pub collision_count: u64,
    /// Minimum Chebyshev cell distance from the robot cell to any obstacle
    /// box over the run; `None` when no obstacle was ever live.
    pub min_clearance_cells: Option<i32>,
}

/// One remembered obstacle. Grid quantization makes a mover's perceived
/// box hop a whole cell every few scans and sit still in between, so
/// motion is measured against an anchor (the box at the last confirmed
/// hop) rather than the previous scan, and the confirmed estimate is held
/// between hops. Tracks outlive a scan: an obstacle does not vanish when
/// the robot turns and its half-plane view sweeps away.
struct Track {
    record: ObstacleRecord,
    motion: Option<MotionEstimate>,
    anchor_center: GlobalPoint,
    anchor_area: crate::geometry::CellBox,
    anchor_tick: u64,
    /// Tick the track was first seen; until it has been watched long
    /// enough for a mover to betray itself, a motionless box is treated
    /// as still-unclassified rather than static.
    born_tick: u64,
    /// Tick of the scan that last actually observed this obstacle.
    last_seen_tick: u64,
    /// Consecutive scans in which the track sat in plain view (inside the
    /// scan cone and window) yet no cluster matched it.
    missed_in_view: u32,
}

pub struct Navigator {
    pub world: World,
    pub params: NavParams,
}

impl Navigator {
    pub fn new(world: World, params: NavParams) -> Self {
        Navigator { world, params }
    }

    pub fn run(&self) -> Result<RunResult, WorldError> {
        let cfg = &self.world.config;
        cfg.validate()?;
        let r = cfg.r;
        let window_mm = cfg.max_range();
        let t_period = cfg.scan_period_t;
        let cruise = cfg.v_robot;
        let target_point = cfg.target.center(r);

        // The global path is the straight start-to-target line, fixed for
        // the whole run; detours rejoin it at their sub-target.
        let global_path = segment_cells(cfg.robot_start.position(), target_point, r);

        let mut state = self.world.initial_state();
        let mut speed = cruise;
        let mut waypoints: Vec<GridCoord> = Vec::new(); // active detour, nearest first
        let mut waiting = false;
        let mut prev_tracks: Vec<Track> = Vec::new();
        let mut next_id: u32 = 0;

        let mut reports = Vec::new();
        let mut trajectory = vec![state.robot];
        let mut morphin_invocations = 0u64;
        let mut wait_ticks = 0u64;
        // Consecutive planner failures. A single failure with traffic at
        // close range is transient: hold still and retry once the mover
        // clears. Only a sustained run of failures is a dead end.
        let mut plan_failures = 0u32;
        const MAX_PLAN_FAILURES: u32 = 10;
        let mut slowdown_ticks = 0u64;
        let mut collision_count = 0u64;
        let mut min_clearance: Option<i32> = None;
        let mut outcome = RunOutcome::Timeout;
        let mut ticks_to_target = None;

        for _ in 0..self.params.max_ticks {
            let robot_pos = state.robot.position();
            let robot_cell = global_to_grid(&robot_pos, r);

            // Ground-truth safety accounting.
            let gt_boxes = self.world.obstacle_boxes(state.tick);
            for (_, b) in &gt_boxes {
                let dx = (b.x_min - robot_cell.gx).max(robot_cell.gx - b.x_max).max(0);
                let dy = (b.y_min - robot_cell.gy).max(robot_cell.gy - b.y_max).max(0);
                let clearance = dx.max(dy);
                min_clearance = Some(min_clearance.map_or(clearance, |m| m.min(clearance)));
                if clearance == 0 {
                    collision_count += 1;
                }
            }

            if robot_cell == cfg.target {
                outcome = RunOutcome::ReachedTarget;
                ticks_to_target = Some(state.tick);
                break;
            }

            // Perception. Clusters whose grid areas touch are one physical
            // obstacle seen at grazing incidence; merging them keeps a flat
            // face from exploding into phantom fragments.
            let scan = self.world.scan(&state);
            let chain = cluster_scan(&scan, self.params.lambda, window_mm);
            let clusters = merge_adjacent_clusters(chain.clusters, &state.robot, r);
            let prev_records: Vec<ObstacleRecord> =
                prev_tracks.iter().map(|t| t.record.clone()).collect();
            // Center-displacement speed at which a track is treated as
            // moving: the tree's own delta threshold in mm/s terms, with
            // headroom because perceived centers lag true ones by up to a
            // cell of silhouette noise.
            let v_dyn = 0.75 * self.params.thresholds.theta_delta * r / t_period;
            // How long a confirmed hop stays fresh: the hop interval of an
            // obstacle moving at exactly v_dyn, plus one scan of margin.
            let stale_ticks = (r / (v_dyn * t_period)).ceil() as u64 + 1;
            // A newborn track needs an entry transient (its box grows as
            // it slides into the window) plus one hop interval before a
            // motionless label can be trusted.
            let grace_ticks = stale_ticks + 2;
            let mut tracks: Vec<(Track, ObstacleClass)> = Vec::new();
            let mut obstacle_reports = Vec::new();
            let mut claimed: Vec<u32> = Vec::new();
            for cluster in &clusters {
                let mut rec = make_record(u32::MAX, cluster, &state.robot, r);
                let mut best = max_spatial_correlation(
                    &rec,
                    &prev_records,
                    r,
                    self.params.y_delta,
                    self.params.y_eta,
                );
                // Association plausibility: the correlation score alone
                // would pair a fresh sighting with a remembered track up
                // to ~9 cells away. No obstacle here hops more than two
                // cells per scan, so such pairs are distinct obstacles.
                if let Some((prev, s)) = &best {
                    let since = prev_tracks
                        .iter()
                        .find(|t| t.record.id == prev.id)
                        .map_or(1, |t| (state.tick - t.last_seen_tick).max(1));
                    if s.delta > 2.0 * since as f64 {
                        best = None;
                    }
                }
                let class = classify(best.as_ref().map(|(_, s)| s), &self.params.thresholds);
                let mut effective_class = class;
                let mut motion: Option<MotionEstimate> = None;
                let mut anchor_center = rec.center;
                let mut anchor_area = rec.area;
                let mut anchor_tick = state.tick;
                let mut born_tick = state.tick;
                let id = match (&best, class) {
                    (Some((prev, _)), c) if c != ObstacleClass::New => {
                        let id = if claimed.contains(&prev.id) {
                            let id = next_id;
                            next_id += 1;
                            id
                        } else {
                            prev.id
                        };
                        let pt = prev_tracks
                            .iter()
                            .find(|t| t.record.id == prev.id)
                            .expect("matched record has a track");
                        // A box that truly moved has translated since its
                        // anchor: an edge pair shifted the same way
                        // (trailing edge vacated, leading edge advanced).
                        // A box that only grew came further into view, and
                        // a one-sided shrink is the robot's own motion
                        // changing the grazing silhouette. The tree's
                        // dynamic verdict flaps on all three, so the
                        // controller trusts the translation test plus the
                        // anchored speed. Edges are measured against the
                        // anchor, not the previous scan: per-scan edge
                        // noise rarely moves both edges of a pair at once.
                        let (a, p) = (&rec.area, &pt.anchor_area);
                        let shifted = |lo: i32, hi: i32| (lo > 0 && hi > 0) || (lo < 0 && hi < 0);
                        let translated = shifted(a.x_min - p.x_min, a.x_max - p.x_max)
                            || shifted(a.y_min - p.y_min, a.y_max - p.y_max);
                        born_tick = pt.born_tick;
                        let mut confirmed = false;
                        if translated {
                            let dt = (state.tick - pt.anchor_tick).max(1) as f64 * t_period;
                            // Only displacement along a translated axis is
                            // real motion; the other axis carries
                            // silhouette noise, which would corrupt the
                            // direction estimate.
                            let from = GlobalPoint::new(
                                if shifted(a.x_min - p.x_min, a.x_max - p.x_max) {
                                    pt.anchor_center.x
                                } else {
                                    rec.center.x
                                },
                                if shifted(a.y_min - p.y_min, a.y_max - p.y_max) {
                                    pt.anchor_center.y
                                } else {
                                    rec.center.y
                                },
                            );
                            let m = estimate_motion(&rec.center, &from, dt);
                            if !m.zero_displacement && m.v >= v_dyn {
                                motion = Some(m);
                                confirmed = true;
                            }
                        }
                        if !confirmed && state.tick - pt.anchor_tick <= stale_ticks {
                            // No confirmed hop this scan; hold the last
                            // estimate and keep accumulating displacement
                            // against the old anchor while it is fresh.
                            motion = pt.motion;
                            anchor_center = pt.anchor_center;
                            anchor_area = pt.anchor_area;
                            anchor_tick = pt.anchor_tick;
                        }
                        effective_class = if motion.is_some() {
                            ObstacleClass::Dynamic
                        } else if state.tick - born_tick >= grace_ticks {
                            ObstacleClass::Static
                        } else {
                            // Too young to rule out motion: a mover takes
                            // up to a hop interval to vacate its first
                            // cell. Leave it unclassified so prediction
                            // holds off for one interval.
                            ObstacleClass::New
                        };
                        id
                    }
                    _ => {
                        let id = next_id;
                        next_id += 1;
                        id
                    }
                };
                claimed.push(id);
                rec.id = id;
                let (sigma_max, delta, xi) = best
                    .as_ref()
                    .map(|(_, s)| (s.sigma, s.delta, s.xi))
                    .unwrap_or((0.0, 0.0, 0.0));
                obstacle_reports.push(ObstacleReport {
                    id,
                    class: effective_class,
                    sigma_max,
                    delta,
                    xi,
                    v: motion.map_or(0.0, |m| m.v),
                    alpha: motion.map_or(0.0, |m| m.alpha),
                    area: rec.area,
                });
                tracks.push((
                    Track {
                        record: rec,
                        motion,
                        anchor_center,
                        anchor_area,
                        anchor_tick,
                        born_tick,
                        last_seen_tick: state.tick,
                        missed_in_view: 0,
                    },
                    effective_class,
                ));
            }

            // Carry unmatched tracks: the robot turning away must not
            // erase a box it just saw. A motionless box persists until
            // contradicted — watched in plain view with nothing there — or
            // until it falls out of the window. A remembered mover is
            // dead-reckoned along its estimated motion so its box stays
            // where the obstacle actually is, but only for a few scans:
            // its box goes stale fast.
            let mem_ttl = grace_ticks;
            let scan_theta = state.robot.theta.to_radians();
            for mut old in std::mem::take(&mut prev_tracks) {
                if claimed.contains(&old.record.id) {
                    continue;
                }
                let dx = old.record.center.x - robot_pos.x;
                let dy = old.record.center.y - robot_pos.y;
                let dist = dx.hypot(dy);
                let bearing = dy.atan2(dx);
                let off = (bearing - scan_theta).sin().atan2((bearing - scan_theta).cos());
                // A comfortable margin inside the half-plane and window, so
                // edge-of-view geometry never counts as a missed sighting.
                let in_view = off.abs() <= 80f64.to_radians() && dist <= 0.8 * window_mm;
                if in_view {
                    old.missed_in_view += 1;
                }
                let keep = if old.motion.is_some() {
                    state.tick - old.last_seen_tick <= mem_ttl
                } else {
                    old.missed_in_view < 2 && dist <= window_mm
                };
                if keep {
                    let class = if old.motion.is_some() {
                        ObstacleClass::Dynamic
                    } else if state.tick - old.born_tick >= grace_ticks {
                        ObstacleClass::Static
                    } else {
                        ObstacleClass::New
                    };
                    if let Some(m) = &old.motion {
                        let phi = m.alpha.to_radians();
                        let before = global_to_grid(&old.record.center, r);
                        old.record.center.x += m.v * t_period * phi.sin();
                        old.record.center.y += m.v * t_period * phi.cos();
                        let after = global_to_grid(&old.record.center, r);
                        old.record.area = old.record.area.translated(
                            after.gx - before.gx,
                            after.gy - before.gy,
                        );
                    }
                    tracks.push((old, class));
                }
            }
            // Prediction and planning see every track: live boxes, held
            // motionless ones, and dead-reckoned movers alike.
            let acting: Vec<(&Track, ObstacleClass)> =
                tracks.iter().map(|(t, c)| (t, *c)).collect();

            // Detour waypoint maintenance.
            if !waypoints.is_empty() && robot_cell == waypoints[0] {
                waypoints.remove(0);
            }
            let goal_point = waypoints
                .first()
                .map(|w| w.center(r))
                .unwrap_or(target_point);
            let heading = heading_toward(&robot_pos, &goal_point, state.robot.theta);
            let mut path_ahead = segment_cells(robot_pos, goal_point, r);
            if !path_ahead.is_empty() {
                path_ahead.remove(0); // the robot's own cell is not "ahead"
            }

            // Prediction. A held robot plans with its cruise speed so it
            // can tell when resuming is safe.
            let planning_speed = if waiting { cruise } else { speed };
            let robot_motion = RobotMotion { position: robot_pos, heading, speed: planning_speed };
            let predictions: Vec<CollisionPrediction> = acting
                .iter()
                .map(|(t, class)| {
                    predict(
                        &robot_motion,
                        &t.record,
                        *class,
                        t.motion.as_ref(),
                        &path_ahead,
                        r,
                        window_mm,
                        t.last_seen_tick == state.tick,
                        &self.params.prediction,
                    )
                })
                .collect();
            let mut actionable: Vec<&CollisionPrediction> = predictions
                .iter()
                .filter(|p| p.verdict != Verdict::NoAction)
                .collect();
            actionable.sort_by(|a, b| {
                let da = a.pcp.map_or(f64::INFINITY, |c| robot_pos.distance(&c.center(r)));
                let db = b.pcp.map_or(f64::INFINITY, |c| robot_pos.distance(&c.center(r)));
                da.partial_cmp(&db).unwrap()
            });
            let scenario = match actionable.len() {
                0 => Scenario::A,
                1 => actionable[0].scenario,
                _ => Scenario::H,
            };

            // Act on the nearest actionable prediction.
            let mut planner_report = None;
            let mut slowdown = false;
            let mut command_heading = heading;
            match actionable.first() {
                Some(p) => match p.verdict {
                    Verdict::Replan => {
                        waiting = false;
                        let mut pcp = p.pcp.expect("replan verdicts carry a pcp");
                        let blocking = acting
                            .iter()
                            .find(|(t, _)| t.record.id == p.obstacle_id)
                            .map(|(t, _)| t.record.area);
                        let obstacle_boxes: Vec<_> =
                            acting.iter().map(|(t, _)| t.record.area).collect();
                        // Remaining global path from the robot onward.
                        let start_idx = nearest_path_index(&global_path, robot_cell);
                        let path_remaining = &global_path[start_idx..];
                        // Same-direction overtakes rejoin one footprint
                        // length farther along the path.
                        let extra_push = if p.scenario == Scenario::G {
                            blocking.map_or(1, |b| {
                                (b.x_max - b.x_min + 1).max(b.y_max - b.y_min + 1) as usize
                            })
                        } else {
                            0
                        };
                        let mut attempt = morphin::plan(
                            robot_pos,
                            pcp,
                            path_remaining,
                            cfg.target,
                            &obstacle_boxes,
                            blocking,
                            &self.params.weights,
                            &self.params.fan,
                            r,
                            extra_push,
                            Some((cfg.grid_w, cfg.grid_h)),
                        );
                        // A static block's prediction pcp follows the
                        // current (possibly detour) leg; when that leaves
                        // the whole fan blocked, retry with the cell where
                        // the GLOBAL line enters the box.
                        if attempt.is_err() && p.scenario == Scenario::B {
                            if let Some(c) = blocking.and_then(|b| {
                                path_remaining
                                    .iter()
                                    .find(|c| **c != robot_cell && b.contains(**c))
                            }) {
                                pcp = *c;
                                attempt = morphin::plan(
                                    robot_pos,
                                    pcp,
                                    path_remaining,
                                    cfg.target,
                                    &obstacle_boxes,
                                    blocking,
                                    &self.params.weights,
                                    &self.params.fan,
                                    r,
                                    extra_push,
                                    Some((cfg.grid_w, cfg.grid_h)),
                                );
                            }
                        }
                        match attempt {
                            Ok(plan) => {
                                plan_failures = 0;
                                morphin_invocations += 1;
                                let best = plan.chosen_path();
                                waypoints = vec![best.endpoint, plan.sub_target];
                                speed = cruise;
                                command_heading = heading_toward(
                                    &robot_pos,
                                    &best.endpoint_point,
                                    state.robot.theta,
                                );
                                planner_report = Some(PlannerReport {
                                    pcp,
                                    candidates: plan
                                        .candidates
                                        .iter()
                                        .map(|c| CandidateReport {
                                            angle_g: c.angle_g,
                                            endpoint: c.endpoint,
                                            sub_target: c.sub_target,
                                            g_abs: c.g_abs,
                                            delta_l: c.delta_l,
                                            w: c.w,
                                            blocked: c.score.is_infinite(),
                                            score: c.score.is_finite().then_some(c.score),
                                        })
                                        .collect(),
                                    chosen_angle: best.angle_g,
                                    sub_target: plan.sub_target,
                                });
                            }
                            Err(PlanError::NoFeasiblePath) => {
                                speed = 0.0;
                                plan_failures += 1;
                                if plan_failures >= MAX_PLAN_FAILURES {
                                    outcome = RunOutcome::NoFeasiblePath;
                                } else {
                                    waiting = true;
                                    wait_ticks += 1;
                                }
                            }
                        }
                    }
                    Verdict::StopAndWait => {
                        plan_failures = 0;
                        waiting = true;
                        speed = 0.0;
                        wait_ticks += 1;
                    }
                    Verdict::SlowDown => {
                        waiting = false;
                        speed *= 1.0 - self.params.delta_v_fraction;
                        if speed < 1e-9 {
                            speed = 0.0;
                        }
                        slowdown = true;
                        slowdown_ticks += 1;
                    }
                    Verdict::NoAction => unreachable!(),
                },
                None => {
                    // An unseen mover is known only by dead reckoning, and
                    // its estimated speed errs high; a held robot stays put
                    // until the mover is actually re-sighted (or its track
                    // expires) rather than trusting the ghost to have
                    // passed.
                    let ghost_mover = tracks
                        .iter()
                        .any(|(t, _)| t.motion.is_some() && t.last_seen_tick != state.tick);
                    if waiting && ghost_mover {
                        speed = 0.0;
                        wait_ticks += 1;
                    } else {
                        // Clear: restore cruise speed, release any wait.
                        plan_failures = 0;
                        waiting = false;
                        speed = cruise;
                    }
                }
            }

            let mode = if waiting {
                Mode::Waiting
            } else if waypoints.is_empty() {
                Mode::FollowGlobal
            } else {
                Mode::Detour
            };
            reports.push(TickReport {
                tick: state.tick,
                x: state.robot.x,
                y: state.robot.y,
                heading: command_heading,
                speed,
                mode,
                waiting,
                slowdown,
                scenario,
                obstacles: obstacle_reports,
                predictions: predictions
                    .iter()
                    .map(|p| PredictionReport {
                        obstacle_id: p.obstacle_id,
                        scenario: p.scenario,
                        verdict: p.verdict,
                        pcp: p.pcp,
                        t_robot: p.t_robot,
                        t_obstacle: p.t_obstacle,
                    })
                    .collect(),
                planner: planner_report,
            });

            if outcome == RunOutcome::NoFeasiblePath {
                break;
            }

            prev_tracks = tracks.into_iter().map(|(t, _)| t).collect();

            match self.world.step(
                &state,
                &RobotCommand { speed, heading: command_heading },
            ) {
                Ok(next) => state = next,
                Err(WorldError::RobotOutOfBounds { .. }) => {
                    outcome = RunOutcome::RobotOutOfBounds;
                    break;
                }
                Err(e) => return Err(e),
            }
            trajectory.push(state.robot);
        }

        Ok(RunResult {
            outcome,
            reports,
            trajectory,
            ticks_to_target,
            morphin_invocations,
            wait_ticks,
            slowdown_ticks,
            collision_count,
            min_clearance_cells: min_clearance,
        })
    }
}

/// Coalesce clusters whose grid footprints touch (Chebyshev-adjacent
/// boxes) into a single cluster, in first-beam order.
fn merge_adjacent_clusters(
    clusters: Vec<crate::clustering::Cluster>,
    robot: &Pose,
    r: f64,
) -> Vec<crate::clustering::Cluster> {
    let boxes: Vec<_> = clusters
        .iter()
        .map(|c| crate::analysis::grid_area(c, robot, r))
        .collect();
    let touches = |a: &crate::geometry::CellBox, b: &crate::geometry::CellBox| {
        b.x_max >= a.x_min - 1
            && b.x_min <= a.x_max + 1
            && b.y_max >= a.y_min - 1
            && b.y_min <= a.y_max + 1
    };
    let n = clusters.len();
    let mut group: Vec<usize> = (0..n).collect();
    // Tiny n: repeated relabeling beats a union-find here.
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if group[i] != group[j] && touches(&boxes[i], &boxes[j]) {
                    let (from, to) = (group[i].max(group[j]), group[i].min(group[j]));
                    for g in group.iter_mut() {
                        if *g == from {
                            *g = to;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut merged: Vec<crate::clustering::Cluster> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for (i, cluster) in clusters.into_iter().enumerate() {
        match slot[group[i]] {
            Some(k) => merged[k].beams.extend(cluster.beams),
            None => {
                slot[group[i]] = Some(merged.len());
                merged.push(cluster);
            }
        }
    }
    merged
}

fn heading_toward(from: &GlobalPoint, to: &GlobalPoint, fallback: f64) -> f64 {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if dx == 0.0 && dy == 0.0 {
        fallback
    } else {
        crate::geometry::normalize_deg(dy.atan2(dx).to_degrees())
    }
}

fn nearest_path_index(path: &[GridCoord], cell: GridCoord) -> usize {
    path.iter()
        .enumerate()
        .min_by_key(|(_, c)| {
            let dx = i64::from(c.gx - cell.gx);
            let dy = i64::from(c.gy - cell.gy);
            dx * dx + dy * dy
        })
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CellBox;
    use crate::world::{ObstacleScript, WorldConfig};

    fn base_config() -> WorldConfig {
        WorldConfig {
            grid_w: 30,
            grid_h: 20,
            r: 500.0,
            r_w: 8,
            scan_period_t: 0.5,
            robot_start: Pose::new(1000.0, 5000.0, 0.0),
            target: GridCoord::new(27, 10),
            v_robot: 600.0,
        }
    }

    fn run_with(scripts: Vec<ObstacleScript>) -> RunResult {
        let world = World::new(base_config(), scripts).unwrap();
        Navigator::new(world, NavParams::default()).run().unwrap()
    }

    #[test]
    fn empty_world_reaches_target_in_straight_line() {
        // 6 m course at 100 mm/s and T = 0.5 s: 120 ticks.
        let cfg = WorldConfig {
            grid_w: 20,
            grid_h: 20,
            r: 500.0,
            r_w: 8,
            scan_period_t: 0.5,
            robot_start: Pose::new(0.0, 5000.0, 0.0),
            target: GridCoord::new(12, 10),
            v_robot: 100.0,
        };
        let world = World::new(cfg, vec![]).unwrap();
        let res = Navigator::new(world, NavParams::default()).run().unwrap();
        assert_eq!(res.outcome, RunOutcome::ReachedTarget);
        // Target cell entered at x >= 5750 mm: 115 ticks of 50 mm.
        assert_eq!(res.ticks_to_target, Some(115));
        assert_eq!(res.morphin_invocations, 0);
        assert_eq!(res.collision_count, 0);
        // Straight line: heading 0 throughout.
        assert!(res.reports.iter().all(|r| r.heading == 0.0));
    }

    #[test]
    fn progress_strictly_decreases_when_clear() {
        let res = run_with(vec![]);
        assert_eq!(res.outcome, RunOutcome::ReachedTarget);
        let target = GridCoord::new(27, 10).center(500.0);
        let mut prev = f64::INFINITY;
        for p in &res.trajectory {
            let d = p.position().distance(&target);
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn static_obstacle_triggers_detour_and_still_reaches_target() {
        let res = run_with(vec![ObstacleScript {
            id: 1,
            footprint: CellBox { x_min: 10, x_max: 11, y_min: 9, y_max: 11 },
            spawn_tick: 0,
            v: 0.0,
            angle: 0.0,
            despawn_tick: None,
        }]);
        assert_eq!(res.outcome, RunOutcome::ReachedTarget);
        assert!(res.morphin_invocations >= 1);
        assert_eq!(res.collision_count, 0);
        let empty = run_with(vec![]);
        assert!(res.ticks_to_target.unwrap() > empty.ticks_to_target.unwrap());
    }

    #[test]
    fn replan_changes_heading_in_the_same_tick() {
        let res = run_with(vec![ObstacleScript {
            id: 1,
            footprint: CellBox { x_min: 10, x_max: 11, y_min: 9, y_max: 11 },
            spawn_tick: 0,
            v: 0.0,
            angle: 0.0,
            despawn_tick: None,
        }]);
        let replan_tick = res
            .reports
            .iter()
            .find(|rep| rep.planner.is_some())
            .expect("a replan must occur");
        assert!(replan_tick.heading != 0.0);
    }

    #[test]
    fn detours_terminate() {
        // No Detour mode at the end of the run; the run ends on the
        // global path.
        let res = run_with(vec![ObstacleScript {
            id: 1,
            footprint: CellBox { x_min: 12, x_max: 13, y_min: 10, y_max: 11 },
            spawn_tick: 0,
            v: 0.0,
            angle: 0.0,
            despawn_tick: None,
        }]);
        assert_eq!(res.outcome, RunOutcome::ReachedTarget);
        assert_eq!(res.reports.last().unwrap().mode, Mode::FollowGlobal);
    }
}
