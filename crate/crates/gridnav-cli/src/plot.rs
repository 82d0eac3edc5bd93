//! Static trajectory plots: grid, obstacles, the straight global line in
//! green, and the executed path in blue.

use std::path::Path;

use gridnav::navigator::RunResult;
use gridnav::scenario::Scenario;
use gridnav::trace::TickReport;
use image::{Rgb, RgbImage};

const CELL_PX: u32 = 24;
const GRID: Rgb<u8> = Rgb([210, 210, 210]);
const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const OBSTACLE: Rgb<u8> = Rgb([90, 90, 90]);
const OBSTACLE_FINAL: Rgb<u8> = Rgb([160, 120, 120]);
const GLOBAL_LINE: Rgb<u8> = Rgb([0, 160, 0]);
const TRAJECTORY: Rgb<u8> = Rgb([30, 60, 220]);
const START: Rgb<u8> = Rgb([220, 120, 0]);
const TARGET: Rgb<u8> = Rgb([200, 0, 0]);

struct Canvas {
    img: RgbImage,
    r: f64,
    grid_h: i32,
}

impl Canvas {
    fn new(grid_w: i32, grid_h: i32, r: f64) -> Self {
        let img = RgbImage::from_pixel(
            grid_w as u32 * CELL_PX + 1,
            grid_h as u32 * CELL_PX + 1,
            BACKGROUND,
        );
        Canvas { img, r, grid_h }
    }

    /// World mm → pixel. Cell (0,0) is centered at r/2 from the origin of
    /// the image grid; the y axis is flipped for image coordinates.
    fn to_px(&self, x_mm: f64, y_mm: f64) -> (f64, f64) {
        let px = (x_mm / self.r + 0.5) * CELL_PX as f64;
        let py = (self.grid_h as f64 - (y_mm / self.r + 0.5)) * CELL_PX as f64;
        (px, py)
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb<u8>) {
        if x >= 0 && y >= 0 && (x as u32) < self.img.width() && (y as u32) < self.img.height() {
            self.img.put_pixel(x as u32, y as u32, c);
        }
    }

    fn grid_lines(&mut self) {
        let (w, h) = (self.img.width(), self.img.height());
        for gx in (0..w).step_by(CELL_PX as usize) {
            for y in 0..h {
                self.img.put_pixel(gx, y, GRID);
            }
        }
        for gy in (0..h).step_by(CELL_PX as usize) {
            for x in 0..w {
                self.img.put_pixel(x, gy, GRID);
            }
        }
    }

    fn fill_cell(&mut self, gx: i32, gy: i32, c: Rgb<u8>) {
        let x0 = gx as i64 * CELL_PX as i64;
        let y0 = (self.grid_h as i64 - 1 - gy as i64) * CELL_PX as i64;
        for dy in 1..CELL_PX as i64 {
            for dx in 1..CELL_PX as i64 {
                self.put(x0 + dx, y0 + dy, c);
            }
        }
    }

    fn line_mm(&mut self, from: (f64, f64), to: (f64, f64), c: Rgb<u8>, thick: bool) {
        let a = self.to_px(from.0, from.1);
        let b = self.to_px(to.0, to.1);
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = (a.0 + (b.0 - a.0) * t).round() as i64;
            let y = (a.1 + (b.1 - a.1) * t).round() as i64;
            self.put(x, y, c);
            if thick {
                self.put(x + 1, y, c);
                self.put(x, y + 1, c);
            }
        }
    }

    fn dot_mm(&mut self, at: (f64, f64), c: Rgb<u8>) {
        let (x, y) = self.to_px(at.0, at.1);
        let (x, y) = (x.round() as i64, y.round() as i64);
        for dy in -3..=3i64 {
            for dx in -3..=3i64 {
                if dx * dx + dy * dy <= 9 {
                    self.put(x + dx, y + dy, c);
                }
            }
        }
    }
}

fn draw_scenario(canvas: &mut Canvas, scenario: &Scenario, last_tick: u64) {
    let cfg = scenario.world_config();
    for script in scenario.scripts() {
        let spawn = script.box_at(script.spawn_tick, cfg.r, cfg.scan_period_t);
        for c in spawn.cells() {
            canvas.fill_cell(c.gx, c.gy, OBSTACLE);
        }
        // Moving obstacles also get their final live position, hatched in
        // a lighter tone, so the crossing is readable on a static image.
        if script.v > 0.0 {
            let end = script.despawn_tick.map_or(last_tick, |d| d.min(last_tick));
            let final_box = script.box_at(end, cfg.r, cfg.scan_period_t);
            if final_box != spawn {
                for c in final_box.cells() {
                    canvas.fill_cell(c.gx, c.gy, OBSTACLE_FINAL);
                }
            }
        }
    }
    let start = cfg.robot_start.position();
    let target = cfg.target.center(cfg.r);
    canvas.line_mm((start.x, start.y), (target.x, target.y), GLOBAL_LINE, false);
    canvas.dot_mm((start.x, start.y), START);
    canvas.dot_mm((target.x, target.y), TARGET);
}

fn draw_trajectory(canvas: &mut Canvas, points: &[(f64, f64)]) {
    for pair in points.windows(2) {
        canvas.line_mm(pair[0], pair[1], TRAJECTORY, true);
    }
}

pub fn render(scenario: &Scenario, result: &RunResult, path: &Path) -> Result<(), String> {
    let cfg = scenario.world_config();
    let mut canvas = Canvas::new(cfg.grid_w, cfg.grid_h, cfg.r);
    canvas.grid_lines();
    let last_tick = result.reports.last().map_or(0, |r| r.tick);
    draw_scenario(&mut canvas, scenario, last_tick);
    let points: Vec<(f64, f64)> = result.trajectory.iter().map(|p| (p.x, p.y)).collect();
    draw_trajectory(&mut canvas, &points);
    canvas.img.save(path).map_err(|e| format!("writing {}: {e}", path.display()))
}

pub fn render_from_trace(
    reports: &[TickReport],
    scenario: Option<&Scenario>,
    path: &Path,
) -> Result<(), String> {
    if reports.is_empty() {
        return Err("trace is empty".into());
    }
    let mut canvas = match scenario {
        Some(s) => {
            let cfg = s.world_config();
            Canvas::new(cfg.grid_w, cfg.grid_h, cfg.r)
        }
        None => {
            // No config: size the canvas to the trajectory and the
            // perceived obstacle areas, assuming the default cell size.
            let r = 500.0;
            let max_gx = reports
                .iter()
                .flat_map(|t| t.obstacles.iter().map(|o| o.area.x_max))
                .chain(reports.iter().map(|t| (t.x / r + 0.5) as i32))
                .max()
                .unwrap_or(0);
            let max_gy = reports
                .iter()
                .flat_map(|t| t.obstacles.iter().map(|o| o.area.y_max))
                .chain(reports.iter().map(|t| (t.y / r + 0.5) as i32))
                .max()
                .unwrap_or(0);
            Canvas::new(max_gx + 2, max_gy + 2, r)
        }
    };
    canvas.grid_lines();
    match scenario {
        Some(s) => {
            let last_tick = reports.last().map_or(0, |r| r.tick);
            draw_scenario(&mut canvas, s, last_tick);
        }
        None => {
            // Perceived areas stand in for ground truth.
            for t in reports {
                for o in &t.obstacles {
                    for c in o.area.cells() {
                        canvas.fill_cell(c.gx, c.gy, OBSTACLE);
                    }
                }
            }
        }
    }
    let points: Vec<(f64, f64)> = reports.iter().map(|t| (t.x, t.y)).collect();
    draw_trajectory(&mut canvas, &points);
    canvas.img.save(path).map_err(|e| format!("writing {}: {e}", path.display()))
}
