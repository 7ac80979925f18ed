//! Run configuration: a TOML file with `[state]`, `[bath]` and `[run]`
//! sections, overlaid by command-line flags.
//!
//! ```toml
//! [state]
//! kind = "werner-w"
//! p = 0.5
//!
//! [bath]
//! environment = "common"
//! eta = 0.1
//! lambda = 0.01
//! kT = [0.1, 0.2, 0.5, 2.0, 10.0]
//!
//! [run]
//! t_max = 200.0
//! samples = 2001
//! solver = "both"
//! output = "werner-w"
//! cache = true
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cohtherm::bath::BathSpec;
use cohtherm::dynamics::{EnvironmentKind, OdeOptions, Solver};
use cohtherm::states::StateKind;
use cohtherm::TimeGrid;
use serde::Deserialize;

use crate::error::CliError;
use crate::OUTPUT_ROOT_VAR;

pub const DEFAULT_TEMPERATURES: [f64; 5] = [0.1, 0.2, 0.5, 2.0, 10.0];
pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_SAMPLES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverChoice {
    Ode,
    Analytic,
    #[default]
    Both,
}

impl SolverChoice {
    pub fn solvers(self) -> &'static [Solver] {
        match self {
            SolverChoice::Ode => &[Solver::Ode],
            SolverChoice::Analytic => &[Solver::Analytic],
            SolverChoice::Both => &[Solver::Analytic, Solver::Ode],
        }
    }
}

impl FromStr for SolverChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "ode" => Ok(SolverChoice::Ode),
            "analytic" => Ok(SolverChoice::Analytic),
            "both" => Ok(SolverChoice::Both),
            other => Err(CliError::config(
                "solver",
                format!("unknown solver '{other}' (expected ode, analytic or both)"),
            )),
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverChoice::Ode => "ode",
            SolverChoice::Analytic => "analytic",
            SolverChoice::Both => "both",
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateSection {
    kind: Option<String>,
    p: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BathSection {
    environment: Option<String>,
    eta: Option<f64>,
    lambda: Option<f64>,
    #[serde(rename = "kT")]
    kt: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    name: Option<String>,
    t_max: Option<f64>,
    samples: Option<usize>,
    solver: Option<String>,
    substeps: Option<usize>,
    output: Option<PathBuf>,
    cache: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    state: StateSection,
    #[serde(default)]
    bath: BathSection,
    #[serde(default)]
    run: RunSection,
}

/// One source of settings. Later layers override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigLayer {
    pub name: Option<String>,
    pub state: Option<String>,
    pub p: Option<f64>,
    pub environment: Option<String>,
    pub eta: Option<f64>,
    pub lambda: Option<f64>,
    pub kt: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub solver: Option<String>,
    pub substeps: Option<usize>,
    pub output: Option<PathBuf>,
    pub cache: Option<bool>,
}

impl ConfigLayer {
    pub fn parse_toml(text: &str) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text)
            .map_err(|e| CliError::config("config", e.message().to_string()))?;
        Ok(ConfigLayer {
            name: file.run.name,
            state: file.state.kind,
            p: file.state.p,
            environment: file.bath.environment,
            eta: file.bath.eta,
            lambda: file.bath.lambda,
            kt: file.bath.kt,
            t_max: file.run.t_max,
            samples: file.run.samples,
            solver: file.run.solver,
            substeps: file.run.substeps,
            output: file.run.output,
            cache: file.run.cache,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_toml(&text)
    }

    pub fn overlay(self, top: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            name: top.name.or(self.name),
            state: top.state.or(self.state),
            p: top.p.or(self.p),
            environment: top.environment.or(self.environment),
            eta: top.eta.or(self.eta),
            lambda: top.lambda.or(self.lambda),
            kt: top.kt.or(self.kt),
            t_max: top.t_max.or(self.t_max),
            samples: top.samples.or(self.samples),
            solver: top.solver.or(self.solver),
            substeps: top.substeps.or(self.substeps),
            output: top.output.or(self.output),
            cache: top.cache.or(self.cache),
        }
    }
}

/// A fully resolved and validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub title: String,
    pub state: StateKind,
    pub environment: EnvironmentKind,
    pub eta: f64,
    pub cutoff: f64,
    pub kts: Vec<f64>,
    pub t_max: f64,
    pub samples: usize,
    pub solver: SolverChoice,
    /// RK4 substeps per grid interval; `None` picks one from the grid spacing.
    pub substeps: Option<usize>,
    pub output: PathBuf,
    pub cache: bool,
}

impl RunConfig {
    /// Resolves a layer, filling defaults. Relative output paths are placed
    /// under `root`.
    pub fn resolve(layer: ConfigLayer, root: &Path) -> Result<Self, CliError> {
        let kind = layer
            .state
            .ok_or_else(|| CliError::config("state", "no state kind given"))?;
        let state = StateKind::from_name(&kind, layer.p)?;
        let environment =
            EnvironmentKind::from_name(layer.environment.as_deref().unwrap_or("local"))?;
        let reference = BathSpec::reference(0.0);
        let name = layer
            .name
            .unwrap_or_else(|| format!("{state}_{}", environment.name()));
        let output = match layer.output {
            Some(p) if p.is_absolute() => p,
            Some(p) => root.join(p),
            None => root.join(&name),
        };
        let config = RunConfig {
            title: format!(
                "{}, {} environment",
                crate::plot::state_label(state),
                environment.name()
            ),
            name,
            state,
            environment,
            eta: layer.eta.unwrap_or(reference.eta),
            cutoff: layer.lambda.unwrap_or(reference.cutoff),
            kts: layer.kt.unwrap_or_else(|| DEFAULT_TEMPERATURES.to_vec()),
            t_max: layer.t_max.unwrap_or(DEFAULT_T_MAX),
            samples: layer.samples.unwrap_or(DEFAULT_SAMPLES),
            solver: layer
                .solver
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or_default(),
            substeps: layer.substeps,
            output,
            cache: layer.cache.unwrap_or(true),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.kts.is_empty() {
            return Err(CliError::config(
                "kT",
                "at least one temperature is required",
            ));
        }
        if let Some(bad) = self.kts.iter().find(|k| !k.is_finite() || **k < 0.0) {
            return Err(CliError::config(
                "kT",
                format!("{bad} is not a finite non-negative value"),
            ));
        }
        let mut sorted = self.kts.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::config("kT", "temperatures must be distinct"));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(CliError::config(
                "t_max",
                format!("{} is not a finite positive value", self.t_max),
            ));
        }
        if self.samples < 2 {
            return Err(CliError::config("samples", format!("{} < 2", self.samples)));
        }
        if let Some(n) = self.substeps {
            if n < 4 {
                return Err(CliError::config("substeps", format!("{n} < 4")));
            }
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::config(
                "name",
                format!("'{}' is not a plain file stem", self.name),
            ));
        }
        self.state.validate()?;
        BathSpec::new(self.eta, self.cutoff, 0.0)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::uniform(self.t_max, self.samples)?)
    }

    pub fn ode_options(&self, grid: &TimeGrid) -> OdeOptions {
        match self.substeps {
            Some(substeps) => OdeOptions {
                substeps,
                ..OdeOptions::default()
            },
            None => OdeOptions::for_step(grid.step()),
        }
    }
}

/// Output root: the value of `COHTHERM_OUT` if set, else the working directory.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// File name of one trajectory: `{state}_{env}_kT{value}_{solver}.csv`.
pub fn trajectory_file_name(
    state: StateKind,
    env: EnvironmentKind,
    kt: f64,
    solver: Solver,
) -> String {
    format!("{state}_{}_kT{kt}_{}.csv", env.name(), solver.name())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_overrides() {
        let file = ConfigLayer::parse_toml(
            "[state]\nkind = \"werner-w\"\np = 0.5\n[bath]\nenvironment = \"common\"\nkT = [0.5, 2.0]\n[run]\nsamples = 11\n",
        )
        .unwrap();
        let flags = ConfigLayer {
            samples: Some(21),
            solver: Some("analytic".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(file.overlay(flags), Path::new("/out")).unwrap();
        assert_eq!(cfg.state, StateKind::WernerW(0.5));
        assert_eq!(cfg.environment, EnvironmentKind::Common);
        assert_eq!(cfg.kts, vec![0.5, 2.0]);
        assert_eq!(cfg.samples, 21);
        assert_eq!(cfg.solver, SolverChoice::Analytic);
        assert_eq!(cfg.output, PathBuf::from("/out/werner-w-p0.5_common"));
        assert_eq!((cfg.eta, cfg.cutoff, cfg.t_max), (0.1, 0.01, 200.0));
    }

    #[test]
    fn errors_name_the_field() {
        let base = ConfigLayer {
            state: Some("ghz".into()),
            ..Default::default()
        };
        let field_of = |layer: ConfigLayer| match RunConfig::resolve(layer, Path::new(".")) {
            Err(CliError::Config { field, .. }) => field,
            Err(CliError::Core(cohtherm::Error::Parameter { field, .. })) => field.to_string(),
            other => panic!("expected a field error, got {other:?}"),
        };
        assert_eq!(
            field_of(ConfigLayer {
                kt: Some(vec![]),
                ..base.clone()
            }),
            "kT"
        );
        assert_eq!(
            field_of(ConfigLayer {
                samples: Some(1),
                ..base.clone()
            }),
            "samples"
        );
        assert_eq!(
            field_of(ConfigLayer {
                t_max: Some(-1.0),
                ..base.clone()
            }),
            "t_max"
        );
        assert_eq!(
            field_of(ConfigLayer {
                solver: Some("euler".into()),
                ..base.clone()
            }),
            "solver"
        );
        assert_eq!(
            field_of(ConfigLayer {
                eta: Some(-0.1),
                ..base.clone()
            }),
            "eta"
        );
        assert_eq!(
            field_of(ConfigLayer {
                state: Some("werner-w".into()),
                ..base.clone()
            }),
            "p"
        );
        assert_eq!(
            field_of(ConfigLayer {
                state: None,
                ..base
            }),
            "state"
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigLayer::parse_toml("[bath]\ntemperature = 1.0\n").is_err());
    }

    #[test]
    fn file_names() {
        assert_eq!(
            trajectory_file_name(StateKind::W, EnvironmentKind::Common, 0.1, Solver::Analytic),
            "w_common_kT0.1_analytic.csv"
        );
        assert_eq!(
            trajectory_file_name(
                StateKind::MixGhzW(0.9),
                EnvironmentKind::Local,
                10.0,
                Solver::Ode
            ),
            "mix-ghz-w-p0.9_local_kT10_ode.csv"
        );
    }
}
