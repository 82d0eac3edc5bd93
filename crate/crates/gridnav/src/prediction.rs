//! Heuristic collision prediction between the robot and one classified
//! obstacle, labelled with one of eight situation scenarios:
//!
//! a none, b static on path, c crossing obstacle passes first, d robot
//! passes first, e simultaneous arrival at the crossing point, f head-on
//! on the path, g slower leader on the same path, h mixed (assigned by the
//! navigator when several predictions fire in one tick).

use serde::{Deserialize, Serialize};

use crate::analysis::ObstacleRecord;
use crate::geometry::{global_to_grid, GlobalPoint, GridCoord};
use crate::recognition::{MotionEstimate, ObstacleClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NoAction,
    SlowDown,
    StopAndWait,
    Replan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionPrediction {
    pub obstacle_id: u32,
    pub scenario: Scenario,
    pub pcp: Option<GridCoord>,
    /// Seconds for the robot to reach the pcp.
    pub t_robot: Option<f64>,
    /// Seconds for the obstacle to reach the pcp.
    pub t_obstacle: Option<f64>,
    pub verdict: Verdict,
}

impl CollisionPrediction {
    fn none(obstacle_id: u32) -> Self {
        CollisionPrediction {
            obstacle_id,
            scenario: Scenario::A,
            pcp: None,
            t_robot: None,
            t_obstacle: None,
            verdict: Verdict::NoAction,
        }
    }
}

/// Robot state as seen by the predictor.
#[derive(Debug, Clone, Copy)]
pub struct RobotMotion {
    pub position: GlobalPoint,
    /// Degrees, global frame.
    pub heading: f64,
    /// mm/s; the navigator passes the cruise speed while waiting so a held
    /// robot can decide when resuming is safe.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PredictionParams {
    /// Simultaneity window in seconds; `None` derives it from the cell
    /// traversal time plus the obstacle's half-width travel time.
    pub margin_t: Option<f64>,
    /// Heading tolerance for parallel / anti-parallel tests, degrees.
    pub margin_angle: f64,
}

impl Default for PredictionParams {
    fn default() -> Self {
        PredictionParams { margin_t: None, margin_angle: 15.0 }
    }
}

fn unit_from_heading(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.cos(), r.sin())
}

/// Obstacle motion direction: its alpha is measured from the +y axis.
fn unit_from_motion_alpha(deg: f64) -> (f64, f64) {
    let r = deg.to_radians();
    (r.sin(), r.cos())
}

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn dot(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn derived_margin_t(rec: &ObstacleRecord, r: f64, v_robot: f64, v_obstacle: f64) -> f64 {
    const MIN_SPEED: f64 = 1e-6;
    let cells = (rec.area.x_max - rec.area.x_min + 1).max(rec.area.y_max - rec.area.y_min + 1);
    let half_width = f64::from(cells) * r / 2.0;
    r / v_robot.max(MIN_SPEED) + half_width / v_obstacle.max(MIN_SPEED)
}

/// Predict a potential collision with a single obstacle.
///
/// `path_ahead` is the rasterized cell sequence of the robot's forthcoming
/// path segment, ordered from the robot outward.
pub fn predict(
    robot: &RobotMotion,
    rec: &ObstacleRecord,
    class: ObstacleClass,
    motion: Option<&MotionEstimate>,
    path_ahead: &[GridCoord],
    r: f64,
    window_mm: f64,
    observed_now: bool,
    params: &PredictionParams,
) -> CollisionPrediction {
    // A new obstacle has no motion estimate yet; acting on it one tick
    // later, once it has resolved to static or dynamic, is always safe at
    // window scale.
    if matches!(class, ObstacleClass::New) {
        return CollisionPrediction::none(rec.id);
    }
    let moving = matches!(class, ObstacleClass::Dynamic)
        && motion.map_or(false, |m| !m.zero_displacement && m.v > 0.0);
    if !moving {
        return predict_static(robot, rec, path_ahead);
    }
    let m = motion.unwrap();

    let u_r = unit_from_heading(robot.heading);
    let u_o = unit_from_motion_alpha(m.alpha);
    let on_path = path_ahead.iter().any(|c| rec.area.contains(*c));
    let to_obstacle = (rec.center.x - robot.position.x, rec.center.y - robot.position.y);
    let gap = to_obstacle.0.hypot(to_obstacle.1);
    // Angle between travel directions, in [0, 180].
    let angle = dot(u_r, u_o).clamp(-1.0, 1.0).acos().to_degrees();

    // A prediction is head-on when the travel directions are anti-parallel
    // on the path, and also whenever the robot itself stands inside the
    // obstacle's swept corridor with the obstacle bearing down on it: in
    // that position the crossing arithmetic below would tell the robot to
    // wait (or do nothing) while it gets run over, so it must move aside.
    const MIN_SPEED: f64 = 1e-6;
    let toward_robot = dot(u_o, (-to_obstacle.0, -to_obstacle.1)) > 0.0;
    let lateral = cross(to_obstacle, u_o).abs();
    let cells = (rec.area.x_max - rec.area.x_min + 1).max(rec.area.y_max - rec.area.y_min + 1);
    let corridor = f64::from(cells) * r / 2.0 + r;
    // Only a timely threat counts: the robot crossing the lane of an
    // obstacle that arrives well after the robot's own motion has carried
    // it out of the corridor is scenario d, not a danger. For a true
    // head-on the robot's heading runs along the corridor axis, its
    // lateral speed is ~0 and it never exits on its own.
    let t_arrive = gap / m.v.max(MIN_SPEED);
    let lat_speed = cross(u_r, u_o).abs() * robot.speed;
    let t_exit = if lat_speed > MIN_SPEED {
        (corridor + lateral) / lat_speed
    } else {
        f64::INFINITY
    };
    let margin = params
        .margin_t
        .unwrap_or_else(|| derived_margin_t(rec, r, robot.speed, m.v));
    // Bumper: a moving box observed this tick touching the robot's cell is
    // an immediate threat no matter what the (noisy) direction estimate
    // claims, unless it travels with the robot — a same-direction leader is
    // the slower scenario-g case handled below. Dead-reckoned tracks are
    // exempt: their box position is itself an estimate, and reacting to a
    // ghost grazing the robot would abort legitimate waits. A box
    // overlapping the robot's own cell is past arguing about either way:
    // move.
    let robot_cell = global_to_grid(&robot.position, r);
    let cheb = {
        let dx = (rec.area.x_min - robot_cell.gx).max(robot_cell.gx - rec.area.x_max).max(0);
        let dy = (rec.area.y_min - robot_cell.gy).max(robot_cell.gy - rec.area.y_max).max(0);
        dx.max(dy)
    };
    let overlapped = cheb == 0;
    let same_direction = angle <= params.margin_angle;
    let run_over = overlapped
        || (observed_now && cheb <= 1 && !same_direction)
        || (toward_robot && lateral <= corridor && gap <= window_mm && t_arrive <= t_exit + margin);
    let anti_parallel = angle >= 180.0 - params.margin_angle && on_path;
    if anti_parallel || run_over {
        // Head-on: closing speed is the sum.
        let closing = robot.speed + m.v;
        if closing <= 0.0 {
            return CollisionPrediction::none(rec.id);
        }
        let t_meet = gap / closing;
        // Plan at least one cell out so the collision point never
        // degenerates onto the robot's own cell.
        let ahead = (robot.speed * t_meet).max(r);
        let pcp_point = GlobalPoint::new(
            robot.position.x + u_r.0 * ahead,
            robot.position.y + u_r.1 * ahead,
        );
        return CollisionPrediction {
            obstacle_id: rec.id,
            scenario: Scenario::F,
            pcp: Some(global_to_grid(&pcp_point, r)),
            t_robot: Some(t_meet),
            t_obstacle: Some(t_meet),
            verdict: Verdict::Replan,
        };
    }

    if angle <= params.margin_angle && on_path && dot(u_r, to_obstacle) > 0.0 {
        if robot.speed <= m.v {
            // Leader pulls away: nothing to do.
            return CollisionPrediction::none(rec.id);
        }
        let t_catch = gap / (robot.speed - m.v);
        let ahead = robot.speed * t_catch;
        let pcp_point = GlobalPoint::new(
            robot.position.x + u_r.0 * ahead,
            robot.position.y + u_r.1 * ahead,
        );
        let verdict = if ahead <= window_mm { Verdict::StopAndWait } else { Verdict::SlowDown };
        return CollisionPrediction {
            obstacle_id: rec.id,
            scenario: Scenario::G,
            pcp: Some(global_to_grid(&pcp_point, r)),
            t_robot: Some(t_catch),
            t_obstacle: Some(t_catch),
            verdict,
        };
    }

    // Crossing geometry: intersect the robot's path ray with the
    // obstacle's motion ray.
    let denom = cross(u_r, u_o);
    if denom.abs() < 1e-9 {
        return CollisionPrediction::none(rec.id);
    }
    let along_robot = cross(to_obstacle, u_o) / denom;
    let along_obstacle = cross(to_obstacle, u_r) / denom;
    if along_robot < 0.0 || along_obstacle < 0.0 || along_robot > window_mm {
        return CollisionPrediction::none(rec.id);
    }
    let t_robot = along_robot / robot.speed.max(MIN_SPEED);
    let t_obstacle = along_obstacle / m.v.max(MIN_SPEED);
    let margin = params
        .margin_t
        .unwrap_or_else(|| derived_margin_t(rec, r, robot.speed, m.v));

    if t_obstacle + margin < t_robot {
        // The obstacle clears the crossing before the robot arrives.
        return CollisionPrediction {
            obstacle_id: rec.id,
            scenario: Scenario::C,
            pcp: None,
            t_robot: Some(t_robot),
            t_obstacle: Some(t_obstacle),
            verdict: Verdict::NoAction,
        };
    }
    if t_robot + margin < t_obstacle {
        return CollisionPrediction {
            obstacle_id: rec.id,
            scenario: Scenario::D,
            pcp: None,
            t_robot: Some(t_robot),
            t_obstacle: Some(t_obstacle),
            verdict: Verdict::NoAction,
        };
    }
    let pcp_point = GlobalPoint::new(
        robot.position.x + u_r.0 * along_robot,
        robot.position.y + u_r.1 * along_robot,
    );
    CollisionPrediction {
        obstacle_id: rec.id,
        scenario: Scenario::E,
        pcp: Some(global_to_grid(&pcp_point, r)),
        t_robot: Some(t_robot),
        t_obstacle: Some(t_obstacle),
        verdict: Verdict::StopAndWait,
    }
}

fn predict_static(
    robot: &RobotMotion,
    rec: &ObstacleRecord,
    path_ahead: &[GridCoord],
) -> CollisionPrediction {
    let _ = robot;
    match path_ahead.iter().find(|c| rec.area.contains(**c)) {
        Some(cell) => CollisionPrediction {
            obstacle_id: rec.id,
            scenario: Scenario::B,
            pcp: Some(*cell),
            t_robot: None,
            t_obstacle: None,
            verdict: Verdict::Replan,
        },
        None => CollisionPrediction::none(rec.id),
    }
}
