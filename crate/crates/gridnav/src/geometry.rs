//! Coordinate-frame algebra between robot-centric polar, global Cartesian
//! (millimetres) and grid coordinates.
//!
//! Angles are kept in degrees throughout: the scanner's 0.5 degree beam
//! spacing is exact in degrees and conversion to radians happens only at
//! the trigonometric call sites.

use serde::{Deserialize, Serialize};

/// Angular spacing between neighbouring laser beams, degrees.
pub const BEAM_SPACING_DEG: f64 = 0.5;

/// Number of beams in one sweep over [0, 180] degrees.
pub const BEAM_COUNT: usize = 361;

/// One laser return in the robot-centric polar frame.
///
/// `alpha` is always `index * 0.5` degrees; the beam at index 0 points
/// along angle 0 relative to the robot heading and index 360 along 180.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarBeam {
    pub index: u16,
    /// Range in mm.
    pub rho: f64,
}

impl PolarBeam {
    pub fn new(index: u16, rho: f64) -> Self {
        debug_assert!(index < BEAM_COUNT as u16);
        debug_assert!(rho >= 0.0);
        PolarBeam { index, rho }
    }

    /// Beam angle in degrees, measured from the robot heading.
    pub fn alpha(&self) -> f64 {
        f64::from(self.index) * BEAM_SPACING_DEG
    }
}

/// Robot pose in the global frame: position in mm, heading in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in degrees, normalized to [0, 360).
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose {
            x,
            y,
            theta: normalize_deg(theta),
        }
    }

    pub fn position(&self) -> GlobalPoint {
        GlobalPoint { x: self.x, y: self.y }
    }
}

/// A point in the global Cartesian frame, mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalPoint {
    pub x: f64,
    pub y: f64,
}

impl GlobalPoint {
    pub fn new(x: f64, y: f64) -> Self {
        GlobalPoint { x, y }
    }

    pub fn distance(&self, other: &GlobalPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Integer grid-cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCoord {
    pub gx: i32,
    pub gy: i32,
}

impl GridCoord {
    pub fn new(gx: i32, gy: i32) -> Self {
        GridCoord { gx, gy }
    }

    /// Center of this cell in the global frame for resolution `r`.
    pub fn center(&self, r: f64) -> GlobalPoint {
        GlobalPoint::new(f64::from(self.gx) * r, f64::from(self.gy) * r)
    }
}

/// An axis-aligned, inclusive box of grid cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellBox {
    pub x_min: i32,
    pub x_max: i32,
    pub y_min: i32,
    pub y_max: i32,
}

impl CellBox {
    /// Box spanning the two cells, reordering coordinates as needed.
    pub fn from_corners(a: GridCoord, b: GridCoord) -> Self {
        CellBox {
            x_min: a.gx.min(b.gx),
            x_max: a.gx.max(b.gx),
            y_min: a.gy.min(b.gy),
            y_max: a.gy.max(b.gy),
        }
    }

    pub fn single(c: GridCoord) -> Self {
        Self::from_corners(c, c)
    }

    pub fn cell_count(&self) -> i64 {
        i64::from(self.x_max - self.x_min + 1) * i64::from(self.y_max - self.y_min + 1)
    }

    pub fn contains(&self, c: GridCoord) -> bool {
        c.gx >= self.x_min && c.gx <= self.x_max && c.gy >= self.y_min && c.gy <= self.y_max
    }

    /// Grid cell at the center of the box (rounded down).
    /// The same box shifted by whole cells.
    pub fn translated(&self, dx: i32, dy: i32) -> CellBox {
        CellBox {
            x_min: self.x_min + dx,
            x_max: self.x_max + dx,
            y_min: self.y_min + dy,
            y_max: self.y_max + dy,
        }
    }

    pub fn center_cell(&self) -> GridCoord {
        GridCoord::new(
            self.x_min + (self.x_max - self.x_min) / 2,
            self.y_min + (self.y_max - self.y_min) / 2,
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = GridCoord> + '_ {
        (self.y_min..=self.y_max)
            .flat_map(move |gy| (self.x_min..=self.x_max).map(move |gx| GridCoord::new(gx, gy)))
    }
}

/// Normalize an angle in degrees to [0, 360).
pub fn normalize_deg(deg: f64) -> f64 {
    let d = deg % 360.0;
    if d < 0.0 {
        d + 360.0
    } else {
        d
    }
}

/// Global position of a laser return: the robot position offset by the
/// beam range along `theta_R - alpha`.
pub fn polar_to_global(robot: &Pose, rho: f64, alpha_deg: f64) -> GlobalPoint {
    let phi = (robot.theta - alpha_deg).to_radians();
    GlobalPoint {
        x: robot.x + rho * phi.cos(),
        y: robot.y + rho * phi.sin(),
    }
}

/// Global point of a beam via [`polar_to_global`].
pub fn beam_to_global(robot: &Pose, beam: &PolarBeam) -> GlobalPoint {
    polar_to_global(robot, beam.rho, beam.alpha())
}

/// Round a global coordinate to its grid cell: floor(x/r + 1/2) per axis.
///
/// Out-of-bounds coordinates are returned as-is; bounds are the caller's
/// concern.
pub fn global_to_grid(p: &GlobalPoint, r: f64) -> GridCoord {
    debug_assert!(r > 0.0);
    GridCoord {
        gx: (p.x / r + 0.5).floor() as i32,
        gy: (p.y / r + 0.5).floor() as i32,
    }
}

/// Every grid cell a straight segment passes through, in order from
/// `from` to `to`.
///
/// The traversal is conservative: at an exact corner crossing both side
/// cells are included before the diagonal one, so a segment that grazes a
/// corner cannot slip between two diagonally touching cells. The sensor
/// raycaster and the planner both rely on this coverage rule so their
/// notions of "the cells a line touches" agree.
pub fn segment_cells(from: GlobalPoint, to: GlobalPoint, r: f64) -> Vec<GridCoord> {
    debug_assert!(r > 0.0);
    let ux = from.x / r + 0.5;
    let uy = from.y / r + 0.5;
    let mut cx = ux.floor() as i32;
    let mut cy = uy.floor() as i32;
    let mut cells = vec![GridCoord::new(cx, cy)];

    let len = from.distance(&to);
    if len == 0.0 {
        return cells;
    }
    let dx = (to.x - from.x) / len;
    let dy = (to.y - from.y) / len;

    let step_x: i32 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i32 = if dy > 0.0 { 1 } else { -1 };
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
        if t >= len {
            return cells;
        }
        if (t_max_x - t_max_y).abs() <= TIE_EPS {
            cells.push(GridCoord::new(cx + step_x, cy));
            cells.push(GridCoord::new(cx, cy + step_y));
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
        cells.push(GridCoord::new(cx, cy));
    }
}
