//! Executes a [`RunConfig`]: one CSV per (kT, solver), cached on disk.
//!
//! Each output file `X` has a sidecar `X.key` holding the digest of
//! everything that determines its contents. A file is reused only when the
//! sidecar matches, so a change of physics, grid, solver settings or code
//! version forces recomputation.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use cohtherm::bath::{BathSpec, RateCache};
use cohtherm::coherence::{coherence_of, CoherenceTrajectory};
use cohtherm::dynamics::{
    propagate_analytic, propagate_ode, OdeOptions, Scenario, ScenarioRates, Solver, Trajectory,
};
use cohtherm::TimeGrid;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{trajectory_file_name, RunConfig};
use crate::error::CliError;
use crate::plot::{emit_plot_script, Curve};

/// Largest accepted element-wise gap between ODE and analytic density matrices.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-6;

const TOOL_VERSION: &str = concat!("cohtherm-cli-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct FileOutcome {
    pub kt: f64,
    pub solver: Solver,
    pub path: PathBuf,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    #[serde(rename = "kT")]
    pub kt: f64,
    pub max_density_diff: f64,
    pub max_coherence_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckOutcome {
    pub check: CrossCheck,
    pub path: PathBuf,
    pub cached: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<FileOutcome>,
    pub cross_checks: Vec<CrossCheckOutcome>,
    pub plot_script: PathBuf,
}

impl RunReport {
    pub fn cache_hits(&self) -> usize {
        self.files.iter().filter(|f| f.cached).count()
            + self.cross_checks.iter().filter(|c| c.cached).count()
    }

    pub fn computed(&self) -> usize {
        self.files.len() + self.cross_checks.len() - self.cache_hits()
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CrossCheck> {
        self.cross_checks
            .iter()
            .map(|c| &c.check)
            .filter(|c| !c.passed)
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".key");
    PathBuf::from(s)
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn trajectory_key(scenario: &Scenario, solver: Solver, ode: OdeOptions) -> String {
    let mut text = format!(
        "{};solver={};tool={TOOL_VERSION}",
        scenario.canonical(),
        solver.name()
    );
    if solver == Solver::Ode {
        text.push_str(&format!(";substeps={}", ode.substeps));
    }
    digest(&text)
}

fn is_cached(path: &Path, key: &str) -> bool {
    path.is_file() && fs::read_to_string(sidecar(path)).is_ok_and(|k| k.trim() == key)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = OsString::from(path.as_os_str());
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Writes the data file first and its key second, so an interrupted write
/// is never mistaken for a cache hit.
fn store(path: &Path, key: &str, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents)?;
    write_atomic(&sidecar(path), &format!("{key}\n"))
}

struct Cell {
    files: Vec<FileOutcome>,
    cross_check: Option<CrossCheckOutcome>,
}

fn propagate(
    scenario: &Scenario,
    rates: &ScenarioRates,
    solver: Solver,
    ode: OdeOptions,
) -> Result<Trajectory, CliError> {
    Ok(match solver {
        Solver::Analytic => propagate_analytic(scenario, rates)?,
        Solver::Ode => propagate_ode(scenario, rates, ode)?,
    })
}

fn run_cell(
    config: &RunConfig,
    grid: &TimeGrid,
    ode: OdeOptions,
    kt: f64,
    cache: &RateCache,
) -> Result<Cell, CliError> {
    let bath = BathSpec::new(config.eta, config.cutoff, kt)?;
    let scenario = Scenario::new(
        config.state,
        config.environment.with_bath(bath),
        grid.clone(),
    )?;
    let jobs: Vec<(Solver, PathBuf, String)> = config
        .solver
        .solvers()
        .iter()
        .map(|&s| {
            let path = config.output.join(trajectory_file_name(
                config.state,
                config.environment,
                kt,
                s,
            ));
            (s, path, trajectory_key(&scenario, s, ode))
        })
        .collect();
    let hits: Vec<bool> = jobs
        .iter()
        .map(|(_, path, key)| config.cache && is_cached(path, key))
        .collect();

    let report = (jobs.len() == 2).then(|| {
        let stem = format!(
            "{}_{}_kT{kt}_crosscheck.json",
            config.state,
            config.environment.name()
        );
        let key = digest(&format!(
            "{};{};crosscheck;tol={CROSS_CHECK_TOLERANCE:e}",
            jobs[0].2, jobs[1].2
        ));
        let path = config.output.join(stem);
        let cached = config.cache && is_cached(&path, &key);
        (path, key, cached)
    });
    let need_all = report.as_ref().is_some_and(|r| !r.2);

    let mut trajectories: Vec<Option<(Trajectory, CoherenceTrajectory)>> = vec![None; jobs.len()];
    if need_all || hits.iter().any(|h| !h) {
        let rates = ScenarioRates::build(&scenario, cache)?;
        for (i, (solver, _, _)) in jobs.iter().enumerate() {
            if need_all || !hits[i] {
                let traj = propagate(&scenario, &rates, *solver, ode)?;
                let c_r = coherence_of(&traj)?;
                trajectories[i] = Some((traj, c_r));
            }
        }
    }

    let mut files = Vec::new();
    for (i, (solver, path, key)) in jobs.iter().enumerate() {
        if !hits[i] {
            let (_, c_r) = trajectories[i].as_ref().expect("computed above");
            store(path, key, &c_r.to_csv())?;
        }
        files.push(FileOutcome {
            kt,
            solver: *solver,
            path: path.clone(),
            cached: hits[i],
        });
    }

    let cross_check = match report {
        None => None,
        Some((path, _, true)) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
            let check: CrossCheck = serde_json::from_str(&text).map_err(|e| {
                CliError::io(
                    &path,
                    std::io::Error::new(std::io::ErrorKind::InvalidData, e),
                )
            })?;
            Some(CrossCheckOutcome {
                check,
                path,
                cached: true,
            })
        }
        Some((path, key, false)) => {
            let (a, ca) = trajectories[0].as_ref().expect("computed above");
            let (o, co) = trajectories[1].as_ref().expect("computed above");
            let max_coherence_diff = ca
                .c_r
                .iter()
                .zip(&co.c_r)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let max_density_diff = a.max_abs_diff(o);
            let check = CrossCheck {
                kt,
                max_density_diff,
                max_coherence_diff,
                tolerance: CROSS_CHECK_TOLERANCE,
                passed: max_density_diff <= CROSS_CHECK_TOLERANCE,
            };
            let text = serde_json::to_string(&check).expect("plain struct serializes");
            store(&path, &key, &format!("{text}\n"))?;
            Some(CrossCheckOutcome {
                check,
                path,
                cached: false,
            })
        }
    };
    Ok(Cell { files, cross_check })
}

/// Runs every temperature of `config` (concurrently) and writes the plot script.
pub fn run(config: &RunConfig, cache: &RateCache) -> Result<RunReport, CliError> {
    config.validate()?;
    fs::create_dir_all(&config.output).map_err(|e| CliError::io(&config.output, e))?;
    let grid = config.grid()?;
    let ode = config.ode_options(&grid);
    let cells: Vec<Cell> = config
        .kts
        .par_iter()
        .map(|&kt| run_cell(config, &grid, ode, kt, cache))
        .collect::<Result<_, _>>()?;

    // Plot the analytic curve when it exists, else the ODE one.
    let curves: Vec<Curve> = cells
        .iter()
        .map(|cell| {
            let f = &cell.files[0];
            Curve {
                label: format!("kT = {}", f.kt),
                file: f
                    .path
                    .file_name()
                    .expect("file path")
                    .to_string_lossy()
                    .into_owned(),
            }
        })
        .collect();
    let plot_script = emit_plot_script(&config.output, &config.name, &config.title, &curves)?;

    let mut files = Vec::new();
    let mut cross_checks = Vec::new();
    for cell in cells {
        files.extend(cell.files);
        cross_checks.extend(cell.cross_check);
    }
    Ok(RunReport {
        files,
        cross_checks,
        plot_script,
    })
}
