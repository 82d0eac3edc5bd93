//! Run a set of scenarios, optionally in parallel across scenarios.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::metrics::{summarize, RunMetrics};
use crate::navigator::RunResult;
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug)]
pub struct BatchEntry {
    pub name: String,
    pub result: RunResult,
    pub metrics: RunMetrics,
}

fn run_one(scenario: &Scenario) -> Result<BatchEntry, ScenarioError> {
    let nav = scenario.build_navigator()?;
    let result = nav.run()?;
    let metrics = summarize(&result, scenario.world.r);
    Ok(BatchEntry {
        name: scenario.name.clone(),
        result,
        metrics,
    })
}

/// Sequential runner; result order matches input order.
pub fn run_batch_sequential(scenarios: &[Scenario]) -> Result<Vec<BatchEntry>, ScenarioError> {
    scenarios.iter().map(run_one).collect()
}

/// Parallel across scenarios; each run is itself deterministic, and
/// collecting preserves input order, so output is identical to the
/// sequential runner.
#[cfg(feature = "parallel")]
pub fn run_batch(scenarios: &[Scenario]) -> Result<Vec<BatchEntry>, ScenarioError> {
    scenarios.par_iter().map(run_one).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch(scenarios: &[Scenario]) -> Result<Vec<BatchEntry>, ScenarioError> {
    run_batch_sequential(scenarios)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(name: &str, target_x: i32) -> Scenario {
        toml::from_str(&format!(
            r#"
name = "{name}"

[world]
grid_w = 30
grid_h = 20
r = 500.0
r_w = 8
scan_period_t = 0.5
robot_start = [1000.0, 5000.0, 0.0]
target = [{target_x}, 10]
v_robot = 600.0
"#
        ))
        .unwrap()
    }

    #[test]
    fn parallel_matches_sequential() {
        let scenarios = vec![sample("one", 20), sample("two", 25), sample("three", 27)];
        let par = run_batch(&scenarios).unwrap();
        let seq = run_batch_sequential(&scenarios).unwrap();
        assert_eq!(par.len(), seq.len());
        for (p, s) in par.iter().zip(&seq) {
            assert_eq!(p.name, s.name);
            assert_eq!(p.metrics.ticks_to_target, s.metrics.ticks_to_target);
            assert_eq!(p.result.trajectory.len(), s.result.trajectory.len());
        }
        // Order follows input order.
        assert_eq!(par[0].name, "one");
        assert_eq!(par[2].name, "three");
    }
}
