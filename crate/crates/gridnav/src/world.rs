//! Ground-truth simulation: grid map, robot kinematics, scripted obstacles
//! and the simulated laser scanner.
//!
//! Everything is a deterministic function of the tick counter: obstacle
//! positions are recomputed from their spawn pose each tick rather than
//! integrated, so identical configs replay bit-identically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    global_to_grid, normalize_deg, CellBox, GlobalPoint, GridCoord, Pose, BEAM_COUNT,
    BEAM_SPACING_DEG,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldConfig {
    pub grid_w: i32,
    pub grid_h: i32,
    /// Grid resolution, mm per cell edge.
    pub r: f64,
    /// Sliding-window radius in cells.
    pub r_w: i32,
    /// Scan period T, seconds per tick.
    pub scan_period_t: f64,
    pub robot_start: Pose,
    pub target: GridCoord,
    /// Cruise speed, mm/s.
    pub v_robot: f64,
}

impl WorldConfig {
    /// Laser range cap: data beyond the sliding window is discarded.
    pub fn max_range(&self) -> f64 {
        f64::from(self.r_w) * self.r
    }

    pub fn in_bounds(&self, c: GridCoord) -> bool {
        c.gx >= 0 && c.gx < self.grid_w && c.gy >= 0 && c.gy < self.grid_h
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if self.grid_w < 1 || self.grid_h < 1 {
            return Err(WorldError::Config("grid dimensions must be >= 1".into()));
        }
        if self.r <= 0.0 {
            return Err(WorldError::Config("resolution r must be > 0".into()));
        }
        if self.r_w < 1 {
            return Err(WorldError::Config("window radius r_w must be >= 1".into()));
        }
        if self.scan_period_t <= 0.0 {
            return Err(WorldError::Config("scan period T must be > 0".into()));
        }
        if self.v_robot < 0.0 {
            return Err(WorldError::Config("robot speed must be >= 0".into()));
        }
        if !self.in_bounds(self.target) {
            return Err(WorldError::Config("target outside the grid".into()));
        }
        Ok(())
    }
}

/// A scripted obstacle: a rectangle of cells that may translate at a
/// constant velocity between its spawn and despawn ticks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleScript {
    pub id: u32,
    pub footprint: CellBox,
    #[serde(default)]
    pub spawn_tick: u64,
    /// Speed, mm/s; 0 means static.
    #[serde(default)]
    pub v: f64,
    /// Motion direction, degrees in the global frame.
    #[serde(default)]
    pub angle: f64,
    #[serde(default)]
    pub despawn_tick: Option<u64>,
}

impl ObstacleScript {
    pub fn is_live(&self, tick: u64) -> bool {
        tick >= self.spawn_tick && self.despawn_tick.map_or(true, |d| tick < d)
    }

    /// Continuous anchor (center of the footprint's min cell) at `tick`, mm.
    /// `angle` follows the motion-direction convention: degrees measured
    /// from the +y axis, so 0° moves north and 90° moves east.
    pub fn anchor(&self, tick: u64, r: f64, t_period: f64) -> GlobalPoint {
        let dt = (tick.saturating_sub(self.spawn_tick)) as f64 * t_period;
        let phi = self.angle.to_radians();
        // Snap near-zero trig residue (e.g. cos 270° = -1.8e-16) so an
        // axis-aligned mover does not drift across a cell boundary.
        let snap = |v: f64| if v.abs() < 1e-9 { 0.0 } else { v };
        GlobalPoint::new(
            f64::from(self.footprint.x_min) * r + self.v * dt * snap(phi.sin()),
            f64::from(self.footprint.y_min) * r + self.v * dt * snap(phi.cos()),
        )
    }

    /// Rasterized footprint at `tick`: the spawn-shaped block anchored at
    /// the rounded anchor cell.
    pub fn box_at(&self, tick: u64, r: f64, t_period: f64) -> CellBox {
        let a = self.anchor(tick, r, t_period);
        let c = global_to_grid(&a, r);
        CellBox {
            x_min: c.gx,
            x_max: c.gx + (self.footprint.x_max - self.footprint.x_min),
            y_min: c.gy,
            y_max: c.gy + (self.footprint.y_max - self.footprint.y_min),
        }
    }
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("invalid world config: {0}")]
    Config(String),
    #[error("robot left the grid at tick {tick} (cell {gx},{gy})")]
    RobotOutOfBounds { tick: u64, gx: i32, gy: i32 },
}

/// One laser return. `hit` is false for no-return beams, whose range is
/// clamped to the window radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamReading {
    pub rho: f64,
    pub hit: bool,
}

/// A full 361-beam sweep over the front semicircle.
#[derive(Debug, Clone, PartialEq)]
pub struct LaserScan {
    pub beams: Vec<BeamReading>,
}

impl LaserScan {
    pub fn all_clear(max_range: f64) -> Self {
        LaserScan {
            beams: vec![BeamReading { rho: max_range, hit: false }; BEAM_COUNT],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotCommand {
    /// mm/s, >= 0.
    pub speed: f64,
    /// Degrees, global frame.
    pub heading: f64,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub tick: u64,
    pub robot: Pose,
    pub robot_speed: f64,
}

/// The simulation: static configuration plus obstacle scripts.
#[derive(Debug, Clone)]
pub struct World {
    pub config: WorldConfig,
    pub scripts: Vec<ObstacleScript>,
}

impl World {
    pub fn new(config: WorldConfig, scripts: Vec<ObstacleScript>) -> Result<Self, WorldError> {
        config.validate()?;
        Ok(World { config, scripts })
    }

    pub fn initial_state(&self) -> WorldState {
        WorldState {
            tick: 0,
            robot: self.config.robot_start,
            robot_speed: self.config.v_robot,
        }
    }

    /// Footprints of all live obstacles at `tick`.
    pub fn obstacle_boxes(&self, tick: u64) -> Vec<(u32, CellBox)> {
        self.scripts
            .iter()
            .filter(|s| s.is_live(tick))
            .map(|s| (s.id, s.box_at(tick, self.config.r, self.config.scan_period_t)))
            .collect()
    }

    fn occupied(&self, boxes: &[(u32, CellBox)], cell: GridCoord) -> bool {
        boxes.iter().any(|(_, b)| b.contains(cell))
    }

    /// Advance one tick: move the robot along the commanded heading, then
    /// increment time (obstacle motion is implied by the tick counter).
    pub fn step(&self, state: &WorldState, command: &RobotCommand) -> Result<WorldState, WorldError> {
        debug_assert!(command.speed >= 0.0);
        let t = self.config.scan_period_t;
        let phi = command.heading.to_radians();
        let robot = Pose::new(
            state.robot.x + command.speed * t * phi.cos(),
            state.robot.y + command.speed * t * phi.sin(),
            normalize_deg(command.heading),
        );
        let cell = global_to_grid(&robot.position(), self.config.r);
        if !self.config.in_bounds(cell) {
            return Err(WorldError::RobotOutOfBounds {
                tick: state.tick + 1,
                gx: cell.gx,
                gy: cell.gy,
            });
        }
        Ok(WorldState {
            tick: state.tick + 1,
            robot,
            robot_speed: command.speed,
        })
    }

    /// Simulate one laser sweep from the robot's current pose.
    ///
    /// Each beam walks the grid with a conservative DDA (every cell the ray
    /// passes through is tested, including both neighbours at exact corner
    /// crossings) and reports the exact entry distance into the first
    /// occupied cell, capped at the window radius.
    pub fn scan(&self, state: &WorldState) -> LaserScan {
        let boxes = self.obstacle_boxes(state.tick);
        let max_range = self.config.max_range();
        let mut beams = Vec::with_capacity(BEAM_COUNT);
        for i in 0..BEAM_COUNT {
            let alpha = i as f64 * BEAM_SPACING_DEG;
            let phi = (state.robot.theta - alpha).to_radians();
            let rho = self.cast_ray(&boxes, state.robot.position(), phi.cos(), phi.sin(), max_range);
            match rho {
                Some(d) => beams.push(BeamReading { rho: d, hit: true }),
                None => beams.push(BeamReading { rho: max_range, hit: false }),
            }
        }
        LaserScan { beams }
    }

    /// Distance (mm) to the first occupied cell along the ray, if within
    /// `max_range`. Works in grid units internally: cell (gx,gy) spans
    /// [gx-1/2, gx+1/2] x [gy-1/2, gy+1/2] after dividing by r.
    fn cast_ray(
        &self,
        boxes: &[(u32, CellBox)],
        origin: GlobalPoint,
        dx: f64,
        dy: f64,
        max_range: f64,
    ) -> Option<f64> {
        let r = self.config.r;
        // Shift so cell boundaries sit at integers.
        let ux = origin.x / r + 0.5;
        let uy = origin.y / r + 0.5;
        let mut cx = ux.floor() as i32;
        let mut cy = uy.floor() as i32;

        let start = GridCoord::new(cx, cy);
        if self.occupied(boxes, start) {
            return Some(0.0);
        }

        let step_x: i32 = if dx > 0.0 { 1 } else { -1 };
        let step_y: i32 = if dy > 0.0 { 1 } else { -1 };
        // t measured in mm along the ray.
        let mut t_max_x = if dx.abs() < 1e-15 {
            f64::INFINITY
        } else if dx > 0.0 {
            ((cx as f64 + 1.0) - ux) * r / dx
        } else {
            (ux - cx as f64) * r / -dx
        };
        let mut t_max_y = if dy.abs() < 1e-15 {
            f64::INFINITY
        } else if dy > 0.0 {
            ((cy as f64 + 1.0) - uy) * r / dy
        } else {
            (uy - cy as f64) * r / -dy
        };
        let t_delta_x = if dx.abs() < 1e-15 { f64::INFINITY } else { r / dx.abs() };
        let t_delta_y = if dy.abs() < 1e-15 { f64::INFINITY } else { r / dy.abs() };

        const TIE_EPS: f64 = 1e-9;
        loop {
            let t = t_max_x.min(t_max_y);
            if t > max_range {
                return None;
            }
            if (t_max_x - t_max_y).abs() <= TIE_EPS {
                // Exact corner crossing: test both side cells before the
                // diagonal so the ray cannot tunnel between them.
                for cand in [
                    GridCoord::new(cx + step_x, cy),
                    GridCoord::new(cx, cy + step_y),
                ] {
                    if self.occupied(boxes, cand) {
                        return Some(t);
                    }
                }
                cx += step_x;
                cy += step_y;
                t_max_x += t_delta_x;
                t_max_y += t_delta_y;
            } else if t_max_x < t_max_y {
                cx += step_x;
                t_max_x += t_delta_x;
            } else {
                cy += step_y;
                t_max_y += t_delta_y;
            }
            if self.occupied(boxes, GridCoord::new(cx, cy)) {
                return Some(t);
            }
        }
    }
}
