//! TOML scenario configs: world geometry, navigator parameter overrides,
//! and scripted obstacles.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{CellBox, GridCoord, Pose};
use crate::navigator::{NavParams, Navigator};
use crate::world::{ObstacleScript, World, WorldConfig, WorldError};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid scenario {name}: {reason}")]
    Invalid { name: String, reason: String },
    #[error(transparent)]
    World(#[from] WorldError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub world: WorldSection,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default, rename = "obstacles")]
    pub obstacles: Vec<ObstacleSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldSection {
    pub grid_w: i32,
    pub grid_h: i32,
    pub r: f64,
    pub r_w: i32,
    pub scan_period_t: f64,
    /// [x_mm, y_mm, theta_deg]
    pub robot_start: [f64; 3],
    /// [gx, gy]
    pub target: [i32; 2],
    pub v_robot: f64,
}

/// Navigator overrides; absent fields keep the defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamsSection {
    pub lambda: Option<f64>,
    pub max_ticks: Option<u64>,
    pub margin_t: Option<f64>,
    pub margin_angle: Option<f64>,
    pub delta_v_fraction: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSection {
    pub id: u32,
    /// [x_min, x_max, y_min, y_max] in grid cells.
    pub footprint: [i32; 4],
    #[serde(default)]
    pub spawn_tick: u64,
    /// mm/s.
    #[serde(default)]
    pub v: f64,
    /// Motion direction, degrees from the +y axis.
    #[serde(default)]
    pub angle: f64,
    pub despawn_tick: Option<u64>,
}

impl Scenario {
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let scenario: Scenario =
            toml::from_str(&text).map_err(|source| ScenarioError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |reason: String| ScenarioError::Invalid {
            name: self.name.clone(),
            reason,
        };
        if self.name.is_empty() {
            return Err(invalid("empty name".into()));
        }
        for ob in &self.obstacles {
            let [x0, x1, y0, y1] = ob.footprint;
            if x0 > x1 || y0 > y1 {
                return Err(invalid(format!("obstacle {} footprint corners inverted", ob.id)));
            }
            if ob.v < 0.0 {
                return Err(invalid(format!("obstacle {} has negative speed", ob.id)));
            }
            if let Some(d) = ob.despawn_tick {
                if d <= ob.spawn_tick {
                    return Err(invalid(format!(
                        "obstacle {} despawns at {} before spawning at {}",
                        ob.id, d, ob.spawn_tick
                    )));
                }
            }
        }
        let mut ids: Vec<u32> = self.obstacles.iter().map(|o| o.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.obstacles.len() {
            return Err(invalid("duplicate obstacle ids".into()));
        }
        self.world_config().validate()?;
        Ok(())
    }

    pub fn world_config(&self) -> WorldConfig {
        let w = &self.world;
        WorldConfig {
            grid_w: w.grid_w,
            grid_h: w.grid_h,
            r: w.r,
            r_w: w.r_w,
            scan_period_t: w.scan_period_t,
            robot_start: Pose::new(w.robot_start[0], w.robot_start[1], w.robot_start[2]),
            target: GridCoord::new(w.target[0], w.target[1]),
            v_robot: w.v_robot,
        }
    }

    pub fn scripts(&self) -> Vec<ObstacleScript> {
        self.obstacles
            .iter()
            .map(|o| ObstacleScript {
                id: o.id,
                footprint: CellBox {
                    x_min: o.footprint[0],
                    x_max: o.footprint[1],
                    y_min: o.footprint[2],
                    y_max: o.footprint[3],
                },
                spawn_tick: o.spawn_tick,
                v: o.v,
                angle: o.angle,
                despawn_tick: o.despawn_tick,
            })
            .collect()
    }

    pub fn nav_params(&self) -> NavParams {
        let mut p = NavParams::default();
        let o = &self.params;
        if let Some(v) = o.lambda {
            p.lambda = v;
        }
        if let Some(v) = o.max_ticks {
            p.max_ticks = v;
        }
        if let Some(v) = o.margin_t {
            p.prediction.margin_t = Some(v);
        }
        if let Some(v) = o.margin_angle {
            p.prediction.margin_angle = v;
        }
        if let Some(v) = o.delta_v_fraction {
            p.delta_v_fraction = v;
        }
        p
    }

    pub fn build_navigator(&self) -> Result<Navigator, ScenarioError> {
        let world = World::new(self.world_config(), self.scripts())?;
        Ok(Navigator::new(world, self.nav_params()))
    }
}
