use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cohtherm::bath::{build_rate_table, BathSpec, RateCache};
use cohtherm::coherence::CoherenceTrajectory;
use cohtherm::dynamics::{EnvironmentKind, Solver};
use cohtherm::states::StateKind;
use cohtherm::thermometry::{ScenarioTemplate, Thermometer};
use cohtherm::TimeGrid;
use cohtherm_cli::config::{output_root, DEFAULT_SAMPLES, DEFAULT_T_MAX};
use cohtherm_cli::verify::run_checks;
use cohtherm_cli::{
    expand_presets, figure_preset, run, CliError, ConfigLayer, RunConfig, RunReport,
};

/// Coherence dynamics of three qubits under finite-temperature dephasing.
///
/// Relative output paths are resolved against $COHTHERM_OUT (default: the
/// working directory).
#[derive(Parser, Debug)]
#[command(name = "cohtherm", version, about)]
struct Cli {
    /// Worker threads for parallel sweeps (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario sweep from a config file and/or flags.
    Run(RunArgs),
    /// Reproduce figure panels (fig2a..fig5i, or groups fig2..fig5, all).
    Preset(PresetArgs),
    /// Estimate kT from a coherence time series.
    EstimateTemp(EstimateArgs),
    /// Dump the dephasing-rate table of one bath as CSV.
    Rates(RatesArgs),
    /// Run the oracle cross-checks.
    Verify(GridArgs),
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML file with [state], [bath] and [run] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// State kind: ghz, w, wbar, wwbar, star, mix-ghz-w, werner-ghz, werner-w.
    #[arg(long)]
    state: Option<String>,
    /// Mixing parameter of mixed states.
    #[arg(long)]
    p: Option<f64>,
    /// local or common.
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated temperatures.
    #[arg(long = "kt", value_delimiter = ',')]
    kt: Option<Vec<f64>>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// ode, analytic or both.
    #[arg(long)]
    solver: Option<String>,
    /// RK4 substeps per grid interval.
    #[arg(long)]
    substeps: Option<usize>,
    /// Name used for the plot script.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute even when cached results match.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct PresetArgs {
    #[arg(required = true)]
    names: Vec<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    substeps: Option<usize>,
    /// Directory receiving one subdirectory per panel.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    state: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value = "local")]
    env: String,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    /// CSV with columns t,c_r; its time column defines the grid.
    #[arg(long, conflicts_with = "true_kt", required_unless_present = "true_kt")]
    observed: Option<PathBuf>,
    /// Simulate the observation at this kT instead of reading one.
    #[arg(long)]
    true_kt: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_T_MAX)]
    t_max: f64,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, default_value_t = 0.01)]
    kt_min: f64,
    #[arg(long, default_value_t = 100.0)]
    kt_max: f64,
    /// Also write the JSON result to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RatesArgs {
    #[arg(long = "kt")]
    kt: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        output_root().join(path)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.into(),
            source: e,
        })?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.into(),
        source: e,
    })
}

fn print_report(report: &RunReport) {
    for f in &report.files {
        println!(
            "{} {}",
            if f.cached { "cached" } else { "wrote " },
            f.path.display()
        );
    }
    for c in &report.cross_checks {
        let verdict = if c.check.passed { "PASS" } else { "FAIL" };
        println!(
            "crosscheck kT={}: max |rho_ode - rho_analytic| = {:.3e}, max |dC_R| = {:.3e} {verdict}",
            c.check.kt, c.check.max_density_diff, c.check.max_coherence_diff
        );
    }
    println!(
        "{} outputs: {} cache hits, {} computed; plot script {}",
        report.files.len() + report.cross_checks.len(),
        report.cache_hits(),
        report.computed(),
        report.plot_script.display()
    );
}

fn finish(report: &RunReport) -> Result<(), CliError> {
    print_report(report);
    let failed: Vec<String> = report
        .failed_checks()
        .map(|c| format!("kT={}", c.kt))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "ODE and analytic solutions disagree at {}",
            failed.join(", ")
        )))
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => ConfigLayer::load(path)?,
        None => ConfigLayer::default(),
    };
    let flags = ConfigLayer {
        name: args.name,
        state: args.state,
        p: args.p,
        environment: args.env,
        eta: args.eta,
        lambda: args.lambda,
        kt: args.kt,
        t_max: args.t_max,
        samples: args.samples,
        solver: args.solver,
        substeps: args.substeps,
        output: args.out,
        cache: args.no_cache.then_some(false),
    };
    let config = RunConfig::resolve(file.overlay(flags), &output_root())?;
    finish(&run(&config, &RateCache::new())?)
}

fn cmd_preset(args: PresetArgs) -> Result<(), CliError> {
    let panels = expand_presets(&args.names)?;
    let root = args.out.as_deref().map(resolve).unwrap_or_else(output_root);
    let overrides = ConfigLayer {
        t_max: args.t_max,
        samples: args.samples,
        solver: args.solver,
        substeps: args.substeps,
        cache: args.no_cache.then_some(false),
        ..Default::default()
    };
    let configs: Vec<RunConfig> = panels
        .iter()
        .map(|p| figure_preset(p, overrides.clone(), &root))
        .collect::<Result<_, _>>()?;
    // Panels share baths, so one rate cache serves them all.
    let cache = RateCache::new();
    let mut failure = None;
    for config in &configs {
        println!("== {}", config.name);
        if let Err(e) = finish(&run(config, &cache)?) {
            failure.get_or_insert(e);
        }
    }
    failure.map_or(Ok(()), Err)
}

fn read_observed(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = |reason: String| CliError::Config {
        field: "observed".into(),
        reason: format!("{}: {reason}", path.display()),
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io {
            path: path.into(),
            source: io,
        },
        other => bad(format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| bad(format!("no '{name}' column")))
    };
    let (ti, ci) = (column("t")?, column("c_r")?);
    let (mut t, mut c) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let parse = |i: usize| -> Result<f64, CliError> {
            let field = record.get(i).unwrap_or("");
            field
                .trim()
                .parse()
                .map_err(|_| bad(format!("'{field}' is not a number")))
        };
        t.push(parse(ti)?);
        c.push(parse(ci)?);
    }
    Ok((t, c))
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let state = StateKind::from_name(&args.state, args.p)?;
    let environment = EnvironmentKind::from_name(&args.env)?;
    BathSpec::new(args.eta, args.lambda, 0.0)?;
    let (grid, observed_c_r) = match (&args.observed, args.true_kt) {
        (Some(path), _) => {
            let (t, c) = read_observed(path)?;
            (TimeGrid::from_points(t)?, Some(c))
        }
        (None, _) => (TimeGrid::uniform(args.t_max, args.samples)?, None),
    };
    let template = ScenarioTemplate {
        initial: state,
        environment,
        eta: args.eta,
        cutoff: args.lambda,
        grid: grid.clone(),
    };
    let thermometer = Thermometer::new(template);
    let observed = match (observed_c_r, args.true_kt) {
        (Some(c_r), _) => CoherenceTrajectory {
            grid,
            c_r,
            scenario_hash: "observed".into(),
            solver: Solver::Analytic,
        },
        (None, Some(kt)) => thermometer.forward(kt)?,
        (None, None) => unreachable!("clap requires --observed or --true-kt"),
    };
    let result = thermometer.estimate(&observed, (args.kt_min, args.kt_max))?;
    let json = result.to_json();
    println!("{json}");
    if let Some(out) = &args.out {
        write_file(&resolve(out), &format!("{json}\n"))?;
    }
    Ok(())
}

fn cmd_rates(args: RatesArgs) -> Result<(), CliError> {
    let spec = BathSpec::new(args.eta, args.lambda, args.kt)?;
    let grid = TimeGrid::uniform(args.grid.t_max, args.grid.samples)?;
    let csv = build_rate_table(&spec, &grid)?.to_csv();
    match &args.out {
        Some(out) => write_file(&resolve(out), &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn cmd_verify(args: GridArgs) -> Result<(), CliError> {
    let checks = run_checks(args.t_max, args.samples)?;
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{failed} of {} checks failed",
            checks.len()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: cannot configure worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Preset(a) => cmd_preset(a),
        Command::EstimateTemp(a) => cmd_estimate(a),
        Command::Rates(a) => cmd_rates(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
