mod plot;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridnav::batch::{run_batch, BatchEntry};
use gridnav::metrics::RunMetrics;
use gridnav::navigator::RunOutcome;
use gridnav::scenario::Scenario;
use gridnav::trace::{read_trace, write_trace};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "gridnav", about = "Grid-world navigation scenario harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct RunOpts {
    /// Output directory for trace, metrics, and plot files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the scenario's tick budget.
    #[arg(long)]
    max_ticks: Option<u64>,
    /// Override the scan period T in seconds.
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also render a trajectory plot.
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config; write its trace and metrics.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every scenario config (*.toml) in a directory.
    Suite {
        dir: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Check the pairwise tick-count orderings over metrics files.
    Compare {
        metrics: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Render a trajectory plot from a trace file.
    Plot {
        trace: PathBuf,
        /// Scenario config for the grid extent, obstacles, and target.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Scenario(#[from] gridnav::scenario::ScenarioError),
    #[error(transparent)]
    World(#[from] gridnav::world::WorldError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Plot(String),
    #[error("missing scenario: {0}")]
    MissingScenario(String),
    #[error("run did not reach the target: {0:?}")]
    BadOutcome(RunOutcome),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, opts } => cmd_run(&config, &opts),
        Command::Suite { dir, opts } => cmd_suite(&dir, &opts),
        Command::Compare { metrics, format } => cmd_compare(&metrics, format),
        Command::Plot { trace, config, out } => cmd_plot(&trace, config.as_deref(), &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_scenario(path: &Path, opts: &RunOpts) -> Result<Scenario, CliError> {
    let mut scenario = Scenario::from_path(path)?;
    if let Some(mt) = opts.max_ticks {
        scenario.params.max_ticks = Some(mt);
    }
    if let Some(t) = opts.t {
        scenario.world.scan_period_t = t;
    }
    scenario.validate()?;
    Ok(scenario)
}

fn write_outputs(entry: &BatchEntry, scenario: &Scenario, opts: &RunOpts) -> Result<(), CliError> {
    fs::create_dir_all(&opts.out).map_err(io_err(&opts.out))?;
    let trace_path = opts.out.join(format!("{}.trace.jsonl", entry.name));
    let file = File::create(&trace_path).map_err(io_err(&trace_path))?;
    write_trace(BufWriter::new(file), &entry.result.reports).map_err(io_err(&trace_path))?;

    let metrics_path = opts.out.join(format!("{}.metrics.json", entry.name));
    let json = serde_json::to_string_pretty(&entry.metrics).expect("metrics serialize");
    fs::write(&metrics_path, json + "\n").map_err(io_err(&metrics_path))?;

    if opts.plot {
        let plot_path = opts.out.join(format!("{}.png", entry.name));
        plot::render(scenario, &entry.result, &plot_path).map_err(CliError::Plot)?;
    }
    Ok(())
}

fn print_metrics(name: &str, m: &RunMetrics, format: Format, out: &mut impl Write) {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(m).expect("metrics serialize");
            v["scenario"] = serde_json::Value::String(name.to_string());
            writeln!(out, "{v}").expect("stdout write");
        }
        Format::Text => {
            writeln!(
                out,
                "{name}: {:?} ticks={} path_cells={} morphin={} waits={} slowdowns={} \
                 clearance={} collisions={}",
                m.outcome,
                m.ticks_to_target.map_or("-".into(), |t| t.to_string()),
                m.path_length_cells,
                m.morphin_invocations,
                m.wait_ticks,
                m.slowdown_ticks,
                m.min_clearance_cells.map_or("-".into(), |c| c.to_string()),
                m.collision_count,
            )
            .expect("stdout write");
        }
    }
}

fn cmd_run(config: &Path, opts: &RunOpts) -> Result<(), CliError> {
    let scenario = load_scenario(config, opts)?;
    let entries = run_batch(std::slice::from_ref(&scenario))?;
    let entry = &entries[0];
    write_outputs(entry, &scenario, opts)?;
    print_metrics(&entry.name, &entry.metrics, opts.format, &mut std::io::stdout());
    if entry.metrics.outcome != RunOutcome::ReachedTarget {
        return Err(CliError::BadOutcome(entry.metrics.outcome));
    }
    Ok(())
}

fn cmd_suite(dir: &Path, opts: &RunOpts) -> Result<(), CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let scenarios: Vec<Scenario> = paths
        .iter()
        .map(|p| load_scenario(p, opts))
        .collect::<Result<_, _>>()?;
    let entries = run_batch(&scenarios)?;
    let mut failed = false;
    let mut stdout = std::io::stdout();
    for (entry, scenario) in entries.iter().zip(&scenarios) {
        write_outputs(entry, scenario, opts)?;
        print_metrics(&entry.name, &entry.metrics, opts.format, &mut stdout);
        failed |= entry.metrics.outcome != RunOutcome::ReachedTarget;
    }
    if failed {
        return Err(CliError::BadOutcome(RunOutcome::Timeout));
    }
    Ok(())
}

/// Pairwise tick-count ordering constraints over the a–h suite, in the
/// direction of the reference timings.
const ORDERINGS: &[(&str, &str, bool)] = &[
    // (left, right, strict): ticks(left) < ticks(right), or ≤ when !strict
    ("a", "c", false),
    ("a", "d", false),
    ("c", "b", true),
    ("d", "b", true),
    ("b", "e", false),
    ("e", "g", true),
    ("g", "f", false),
    ("f", "h", false),
];

fn cmd_compare(paths: &[PathBuf], format: Format) -> Result<(), CliError> {
    if paths.len() < 2 {
        return Err(CliError::MissingScenario(
            "compare needs at least two metrics files".into(),
        ));
    }
    let mut ticks: BTreeMap<String, u64> = BTreeMap::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let m: RunMetrics = serde_json::from_str(&text)
            .map_err(|e| CliError::Io { path: path.display().to_string(), source: e.into() })?;
        let name = path
            .file_name()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_suffix(".metrics.json"))
            .unwrap_or_default()
            .to_string();
        let t = m
            .ticks_to_target
            .ok_or_else(|| CliError::BadOutcome(m.outcome))?;
        ticks.insert(name, t);
    }
    let mut all_pass = true;
    let mut report = Vec::new();
    for &(l, rgt, strict) in ORDERINGS {
        // Only check constraints whose scenarios are both present, but a
        // constraint with exactly one side present is a missing scenario.
        match (ticks.get(l), ticks.get(rgt)) {
            (Some(a), Some(b)) => {
                let pass = if strict { a < b } else { a <= b };
                all_pass &= pass;
                let op = if strict { "<" } else { "<=" };
                report.push((format!("ticks({l}) {op} ticks({rgt})"), *a, *b, pass));
            }
            (Some(_), None) => return Err(CliError::MissingScenario(rgt.to_string())),
            (None, Some(_)) => return Err(CliError::MissingScenario(l.to_string())),
            (None, None) => {}
        }
    }
    if report.is_empty() {
        return Err(CliError::MissingScenario(
            "no known scenario pair among the given metrics".into(),
        ));
    }
    match format {
        Format::Json => {
            let rows: Vec<_> = report
                .iter()
                .map(|(c, a, b, p)| {
                    serde_json::json!({ "constraint": c, "left": a, "right": b, "pass": p })
                })
                .collect();
            println!("{}", serde_json::json!({ "orderings": rows, "all_pass": all_pass }));
        }
        Format::Text => {
            for (c, a, b, p) in &report {
                println!("{} [{} vs {}]: {}", c, a, b, if *p { "pass" } else { "FAIL" });
            }
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::BadOutcome(RunOutcome::Timeout))
    }
}

fn cmd_plot(trace: &Path, config: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let file = File::open(trace).map_err(io_err(trace))?;
    let reports = read_trace(BufReader::new(file)).map_err(io_err(trace))?;
    let scenario = config.map(Scenario::from_path).transpose()?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let stem = trace
        .file_name()
        .and_then(|s| s.to_str())
        .map(|s| s.trim_end_matches(".trace.jsonl"))
        .unwrap_or("trace");
    let path = out.join(format!("{stem}.png"));
    plot::render_from_trace(&reports, scenario.as_ref(), &path).map_err(CliError::Plot)?;
    Ok(())
}
