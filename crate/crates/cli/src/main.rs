//! `geoshrink`: run the shrinkage experiments, demos and validation suites.
//!
//! Exit status is 0 when every requested run finished and its checks held,
//! 1 when a check failed, and 2 on a usage or runtime error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use geoshrink::harness::{
    render_csv, render_json, render_svg, CircleConfig, ExperimentOutput, ExperimentSpec, Runner,
    SpdBayesConfig, SpdFreqConfig, Table1Config,
};
use geoshrink::validate::{run_validation, SpaceFilter, ValidateConfig};

#[derive(Parser, Debug)]
#[command(
    name = "geoshrink",
    version,
    about = "Geodesic James-Stein shrinkage experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bayes risk ratios for two walkers on the 3-regular tree.
    Table1(Common),
    /// Bayes risk curves over n for SPD matrices.
    SpdBayes(Common),
    /// Proportion of parameter draws where shrinkage beats X.
    SpdFreq(Common),
    /// Tower-rule counterexample on a tripod.
    DemoTripod(Common),
    /// Risk inflation when shrinking on the circle.
    DemoCircle(Common),
    /// Randomised property suites.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON file with the experiment's configuration; unknown keys are rejected.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replicate count (outer replicates for spd-bayes, inner for spd-freq).
    #[arg(long)]
    reps: Option<usize>,
    /// Draws used by the Monte Carlo moment oracle.
    #[arg(long)]
    oracle_reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for CSV and JSON output; without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot (requires --out).
    #[arg(long)]
    plots: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// all, euclidean, spd or tree.
    #[arg(long)]
    space: Option<String>,
    /// Adds a space with a deliberately asymmetric metric.
    #[arg(long, hide = true)]
    inject_asymmetry: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ValidateFile {
    space: String,
    cases: usize,
    oracle_instances: usize,
    seed: u64,
}

impl Default for ValidateFile {
    fn default() -> Self {
        let d = ValidateConfig::default();
        ValidateFile {
            space: "all".into(),
            cases: d.cases,
            oracle_instances: d.oracle_instances,
            seed: d.seed,
        }
    }
}

type CliResult<T> = Result<T, String>;

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

fn runner(common: &Common) -> CliResult<Runner> {
    let workers = common
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from));
    Runner::new(workers).map_err(|e| e.to_string())
}

fn reject_oracle_reps(common: &Common, cmd: &str) -> CliResult<()> {
    match common.oracle_reps {
        Some(_) => Err(format!(
            "{cmd} has no moment oracle; --oracle-reps does not apply"
        )),
        None => Ok(()),
    }
}

fn build_spec(command: &Command) -> CliResult<(ExperimentSpec, &Common)> {
    let spec = match command {
        Command::Table1(c) => {
            reject_oracle_reps(c, "table1")?;
            let mut cfg: Table1Config = load(c.config.as_deref())?;
            cfg.reps = c.reps.unwrap_or(cfg.reps);
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            (ExperimentSpec::Table1(cfg), c)
        }
        Command::SpdBayes(c) => {
            let mut cfg: SpdBayesConfig = load(c.config.as_deref())?;
            cfg.outer_reps = c.reps.unwrap_or(cfg.outer_reps);
            cfg.oracle_reps = c.oracle_reps.unwrap_or(cfg.oracle_reps);
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            (ExperimentSpec::SpdBayes(cfg), c)
        }
        Command::SpdFreq(c) => {
            let mut cfg: SpdFreqConfig = load(c.config.as_deref())?;
            cfg.inner_reps = c.reps.unwrap_or(cfg.inner_reps);
            cfg.oracle_reps = c.oracle_reps.unwrap_or(cfg.oracle_reps);
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            (ExperimentSpec::SpdFreq(cfg), c)
        }
        Command::DemoTripod(c) => {
            reject_oracle_reps(c, "demo-tripod")?;
            if c.config.is_some() || c.reps.is_some() || c.seed.is_some() {
                return Err("demo-tripod is exact and takes no configuration".into());
            }
            (ExperimentSpec::DemoTripod, c)
        }
        Command::DemoCircle(c) => {
            reject_oracle_reps(c, "demo-circle")?;
            let mut cfg: CircleConfig = load(c.config.as_deref())?;
            cfg.reps = c.reps.unwrap_or(cfg.reps);
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            (ExperimentSpec::DemoCircle(cfg), c)
        }
        Command::Validate(_) => unreachable!("handled separately"),
    };
    spec.0.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn write_outputs(output: &ExperimentOutput, common: &Common) -> CliResult<()> {
    let csv = render_csv(output).map_err(|e| e.to_string())?;
    let Some(dir) = &common.out else {
        if common.plots {
            return Err("--plots needs --out".into());
        }
        emit(&csv);
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let write = |ext: &str, text: &str| {
        let path = dir.join(format!("{}.{ext}", output.experiment));
        fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        eprintln!("wrote {}", path.display());
        Ok::<_, String>(())
    };
    write("csv", &csv)?;
    write("json", &render_json(output).map_err(|e| e.to_string())?)?;
    if common.plots {
        match render_svg(output) {
            Some(svg) => write("svg", &svg)?,
            None => eprintln!("no plot for {}", output.experiment),
        }
    }
    Ok(())
}

fn run_experiment(command: &Command) -> CliResult<bool> {
    let (spec, common) = build_spec(command)?;
    let runner = runner(common)?;
    let output = spec.run(&runner).map_err(|e| e.to_string())?;
    emit(&format!("{}\n", output.report.trim_end()));
    write_outputs(&output, common)?;
    if !output.passed {
        eprintln!("{}: a checked property did not hold", output.experiment);
    }
    Ok(output.passed)
}

fn run_validate(args: &ValidateArgs) -> CliResult<bool> {
    let c = &args.common;
    reject_oracle_reps(c, "validate")?;
    if c.out.is_some() || c.plots {
        return Err("validate writes no files".into());
    }
    let file: ValidateFile = load(c.config.as_deref())?;
    let space = args.space.as_deref().unwrap_or(&file.space);
    let config = ValidateConfig {
        filter: space.parse::<SpaceFilter>().map_err(|e| e.to_string())?,
        cases: c.reps.unwrap_or(file.cases),
        oracle_instances: file.oracle_instances,
        seed: c.seed.unwrap_or(file.seed),
        inject_asymmetry: args.inject_asymmetry,
    };
    let checks = run_validation(&config, &runner(c)?).map_err(|e| e.to_string())?;
    emit(&checks.iter().map(|c| format!("{c}\n")).collect::<String>());
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}/{}", c.suite, c.invariant))
        .collect();
    if failed.is_empty() {
        emit(&format!("all {} checks passed\n", checks.len()));
        Ok(true)
    } else {
        eprintln!("violated: {}", failed.join(", "));
        Ok(false)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(args) => run_validate(args),
        other => run_experiment(other),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
