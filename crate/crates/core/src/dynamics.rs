//! Propagation of the three-qubit density matrix under local and collective
//! pure dephasing.
//!
//! Two independent routes are provided: [`propagate_analytic`] evaluates the
//! element-wise closed-form solution from the accumulated exponents of a
//! [`RateTable`], while [`propagate_ode`] integrates the master equation
//! itself with fixed-step RK4, assembling the right-hand side from the
//! operators `H_S`, `sigma_z^i` and `S_z`.
//!
//! The lab frame is kept, so off-diagonal elements carry the free phases
//! `exp(-i (E_m - E_n) t)` with `E_m = omega0 M(m) / 2`.

use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bath::{BathSpec, RateCache, RateTable};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::states::{
    basis_table, make_state, DensityMatrix, Matrix8, StateKind, Tolerances, DIM, QUBITS,
};

/// Bumped whenever a change alters numerical output; part of every cache key.
pub const MODEL_VERSION: &str = "cohtherm-model-1";

/// Reservoir topology.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Environment {
    /// One independent reservoir per qubit.
    Local([BathSpec; QUBITS]),
    /// A single reservoir coupled to the collective `S_z`.
    Common(BathSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvironmentKind {
    Local,
    Common,
}

impl EnvironmentKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnvironmentKind::Local => "local",
            EnvironmentKind::Common => "common",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "local" => Ok(EnvironmentKind::Local),
            "common" => Ok(EnvironmentKind::Common),
            other => Err(Error::param(
                "environment",
                format!("expected `local` or `common`, got `{other}`"),
            )),
        }
    }

    /// Environment of this kind with every reservoir set to `bath`.
    pub fn with_bath(&self, bath: BathSpec) -> Environment {
        match self {
            EnvironmentKind::Local => Environment::Local([bath; QUBITS]),
            EnvironmentKind::Common => Environment::Common(bath),
        }
    }
}

impl fmt::Display for EnvironmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Environment {
    pub fn kind(&self) -> EnvironmentKind {
        match self {
            Environment::Local(_) => EnvironmentKind::Local,
            Environment::Common(_) => EnvironmentKind::Common,
        }
    }

    pub fn baths(&self) -> Vec<BathSpec> {
        match self {
            Environment::Local(b) => b.to_vec(),
            Environment::Common(b) => vec![*b],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solver {
    Ode,
    Analytic,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Ode => "ode",
            Solver::Analytic => "analytic",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A complete experiment: initial state, reservoirs and output grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub initial: StateKind,
    pub environment: Environment,
    /// Qubit frequency; 1 in scaled units.
    pub omega0: f64,
    pub grid: TimeGrid,
}

impl Scenario {
    pub fn new(initial: StateKind, environment: Environment, grid: TimeGrid) -> Result<Self> {
        let s = Scenario {
            initial,
            environment,
            omega0: 1.0,
            grid,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        for b in self.environment.baths() {
            b.validate()?;
        }
        if !(self.omega0.is_finite()) {
            return Err(Error::param("omega0", "must be finite"));
        }
        if self.grid.points().first() != Some(&0.0) {
            return Err(Error::param("t_grid", "grid must start at 0"));
        }
        Ok(())
    }

    /// Canonical text form; two scenarios hash equal iff these are equal.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{MODEL_VERSION};state={}", self.initial.name());
        if let Some(p) = self.initial.mixing() {
            let _ = write!(s, ";p={p:?}");
        }
        let _ = write!(s, ";env={}", self.environment.kind());
        for b in self.environment.baths() {
            let _ = write!(
                s,
                ";bath(eta={:?},lambda={:?},kT={:?})",
                b.eta, b.cutoff, b.kt
            );
        }
        let _ = write!(
            s,
            ";omega0={:?};grid(n={},dt={:?})",
            self.omega0,
            self.grid.len(),
            self.grid.step()
        );
        s
    }

    /// Hex SHA-256 of [`Scenario::canonical`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// Rate tables for every reservoir of a scenario, on the scenario grid.
#[derive(Debug, Clone)]
pub enum ScenarioRates {
    Local([Arc<RateTable>; QUBITS]),
    Common(Arc<RateTable>),
}

impl ScenarioRates {
    pub fn build(scenario: &Scenario, cache: &RateCache) -> Result<Self> {
        Ok(match &scenario.environment {
            Environment::Local(b) => ScenarioRates::Local([
                cache.get(&b[0], &scenario.grid)?,
                cache.get(&b[1], &scenario.grid)?,
                cache.get(&b[2], &scenario.grid)?,
            ]),
            Environment::Common(b) => ScenarioRates::Common(cache.get(b, &scenario.grid)?),
        })
    }

    fn tables(&self) -> Vec<&RateTable> {
        match self {
            ScenarioRates::Local(t) => t.iter().map(|a| a.as_ref()).collect(),
            ScenarioRates::Common(t) => vec![t.as_ref()],
        }
    }

    fn check_against(&self, scenario: &Scenario) -> Result<()> {
        let kinds_match = matches!(
            (self, &scenario.environment),
            (ScenarioRates::Local(_), Environment::Local(_))
                | (ScenarioRates::Common(_), Environment::Common(_))
        );
        if !kinds_match {
            return Err(Error::param(
                "environment",
                "rate tables do not match the scenario topology",
            ));
        }
        for (table, spec) in self.tables().into_iter().zip(scenario.environment.baths()) {
            let g = table.grid();
            if g.len() != scenario.grid.len()
                || g.step().to_bits() != scenario.grid.step().to_bits()
            {
                return Err(Error::param(
                    "t_grid",
                    "rate table grid differs from scenario grid",
                ));
            }
            if table.spec() != &spec {
                return Err(Error::param(
                    "bath",
                    "rate table was built for a different reservoir",
                ));
            }
        }
        Ok(())
    }
}

/// Exponent weight multiplying the accumulated rate in the decay of `rho_mn`.
///
/// Local: `sum_i (1 - s_i(m) s_i(n))`, in `{0, 2, 4, 6}`.
/// Common: `(M(m) - M(n))^2 / 2`, in `{0, 2, 8, 18}`.
pub fn dephasing_weight(env: EnvironmentKind, m: usize, n: usize) -> u32 {
    let basis = basis_table();
    match env {
        EnvironmentKind::Local => {
            let (a, b) = (basis.spins(m), basis.spins(n));
            (0..QUBITS).map(|i| (1 - a[i] * b[i]) as u32).sum()
        }
        EnvironmentKind::Common => {
            let d = (basis.collective(m) - basis.collective(n)) as i32;
            (d * d / 2) as u32
        }
    }
}

/// Density matrices on the scenario grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<DensityMatrix>,
    pub scenario_hash: String,
    pub solver: Solver,
}

impl Trajectory {
    /// One row per time: `t` then `re_ij,im_ij` over the upper triangle.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for i in 0..DIM {
            for j in i..DIM {
                let _ = write!(s, ",re_{i}{j},im_{i}{j}");
            }
        }
        s.push('\n');
        for (t, rho) in self.grid.points().iter().zip(&self.states) {
            let _ = write!(s, "{t:.16e}");
            for i in 0..DIM {
                for j in i..DIM {
                    let z = rho.get(i, j);
                    let _ = write!(s, ",{:.16e},{:.16e}", z.re, z.im);
                }
            }
            s.push('\n');
        }
        s
    }

    /// Largest elementwise modulus difference over all grid points.
    pub fn max_abs_diff(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Element-wise closed-form evolution.
pub fn propagate_analytic(scenario: &Scenario, rates: &ScenarioRates) -> Result<Trajectory> {
    scenario.validate()?;
    rates.check_against(scenario)?;
    let rho0 = make_state(scenario.initial)?;
    let basis = basis_table();
    let collective: Vec<f64> = (0..DIM).map(|m| basis.collective(m) as f64).collect();
    let half_omega = 0.5 * scenario.omega0;

    let mut states = Vec::with_capacity(scenario.grid.len());
    for (k, &t) in scenario.grid.points().iter().enumerate() {
        let rho = Matrix8::from_fn(|m, n| {
            let r0 = rho0.get(m, n);
            if m == n || r0 == Complex64::new(0.0, 0.0) {
                return r0;
            }
            let d_m = collective[m] - collective[n];
            let mut phase = -half_omega * d_m * t;
            let decay = match rates {
                ScenarioRates::Local(tables) => {
                    let (a, b) = (basis.spins(m), basis.spins(n));
                    (0..QUBITS)
                        .map(|i| (1 - a[i] * b[i]) as f64 * tables[i].accumulated_gamma()[k])
                        .sum::<f64>()
                }
                ScenarioRates::Common(table) => {
                    let m2 = collective[m] * collective[m] - collective[n] * collective[n];
                    phase += m2 * table.accumulated_phase()[k];
                    0.5 * d_m * d_m * table.accumulated_gamma()[k]
                }
            };
            r0 * Complex64::from_polar((-decay).exp(), phase)
        });
        states.push(DensityMatrix::from_matrix_unchecked(rho));
    }
    Ok(Trajectory {
        grid: scenario.grid.clone(),
        states,
        scenario_hash: scenario.hash(),
        solver: Solver::Analytic,
    })
}

/// Diagonal operator in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalOperator(pub [f64; DIM]);

impl DiagonalOperator {
    /// `sigma_z` acting on qubit `q` (0-based).
    pub fn sigma_z(q: usize) -> Self {
        let b = basis_table();
        DiagonalOperator(std::array::from_fn(|m| b.spins(m)[q] as f64))
    }

    /// Collective `S_z = sum_i sigma_z^i`.
    pub fn collective_z() -> Self {
        let b = basis_table();
        DiagonalOperator(std::array::from_fn(|m| b.collective(m) as f64))
    }

    /// `H_S = (omega0 / 2) sum_i sigma_z^i`.
    pub fn system_hamiltonian(omega0: f64) -> Self {
        DiagonalOperator(Self::collective_z().0.map(|v| 0.5 * omega0 * v))
    }

    pub fn squared(&self) -> Self {
        DiagonalOperator(self.0.map(|v| v * v))
    }

    pub fn to_matrix(&self) -> Matrix8 {
        Matrix8::from_fn(|m, n| {
            if m == n {
                Complex64::new(self.0[m], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `A rho`
    pub fn left(&self, rho: &Matrix8) -> Matrix8 {
        Matrix8::from_fn(|m, n| rho[(m, n)] * self.0[m])
    }

    /// `rho A`
    pub fn right(&self, rho: &Matrix8) -> Matrix8 {
        Matrix8::from_fn(|m, n| rho[(m, n)] * self.0[n])
    }

    /// `A rho A`
    pub fn sandwich(&self, rho: &Matrix8) -> Matrix8 {
        Matrix8::from_fn(|m, n| rho[(m, n)] * (self.0[m] * self.0[n]))
    }
}

/// Right-hand side of the master equation at one instant.
enum Generator {
    Local {
        hamiltonian: DiagonalOperator,
        sigmas: [DiagonalOperator; QUBITS],
    },
    Common {
        hamiltonian: DiagonalOperator,
        sz: DiagonalOperator,
        sz2: DiagonalOperator,
    },
}

impl Generator {
    fn new(env: EnvironmentKind, omega0: f64) -> Self {
        let hamiltonian = DiagonalOperator::system_hamiltonian(omega0);
        match env {
            EnvironmentKind::Local => Generator::Local {
                hamiltonian,
                sigmas: std::array::from_fn(DiagonalOperator::sigma_z),
            },
            EnvironmentKind::Common => {
                let sz = DiagonalOperator::collective_z();
                Generator::Common {
                    hamiltonian,
                    sz,
                    sz2: sz.squared(),
                }
            }
        }
    }

    fn apply(&self, t: f64, rho: &Matrix8, rates: &ScenarioRates) -> Matrix8 {
        let minus_i = Complex64::new(0.0, -1.0);
        match (self, rates) {
            (
                Generator::Local {
                    hamiltonian,
                    sigmas,
                },
                ScenarioRates::Local(tables),
            ) => {
                let mut out = (hamiltonian.left(rho) - hamiltonian.right(rho)) * minus_i;
                for (sigma, table) in sigmas.iter().zip(tables) {
                    let gamma = table.rates_at(t).gamma;
                    out += (sigma.sandwich(rho) - rho) * Complex64::new(gamma, 0.0);
                }
                out
            }
            (
                Generator::Common {
                    hamiltonian,
                    sz,
                    sz2,
                },
                ScenarioRates::Common(table),
            ) => {
                let r = table.rates_at(t);
                let alpha = Complex64::new(r.re_alpha, r.im_alpha);
                (hamiltonian.left(rho) - hamiltonian.right(rho)) * minus_i
                    + sz.sandwich(rho) * Complex64::new(r.gamma, 0.0)
                    - sz2.left(rho) * alpha
                    - sz2.right(rho) * alpha.conj()
            }
            _ => unreachable!("rate tables checked against scenario"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// RK4 steps per grid interval; at least 4.
    pub substeps: usize,
    pub max_trace_drift: f64,
    pub max_negativity: f64,
}

impl OdeOptions {
    /// Largest RK4 step used by [`OdeOptions::for_step`]. Keeps the phase
    /// error of the fastest free oscillation (frequency 3) well below 1e-6
    /// over a few hundred time units.
    pub const MAX_STEP: f64 = 1.0 / 160.0;

    /// Options whose substep count keeps the RK4 step at or below
    /// [`OdeOptions::MAX_STEP`] for a grid of spacing `grid_step`.
    pub fn for_step(grid_step: f64) -> Self {
        let substeps = (grid_step / Self::MAX_STEP).ceil().max(4.0) as usize;
        OdeOptions {
            substeps,
            ..Self::default()
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            substeps: 16,
            max_trace_drift: 1e-8,
            max_negativity: 1e-6,
        }
    }
}

/// Fixed-step RK4 integration of the master equation, sampled on the grid.
pub fn propagate_ode(
    scenario: &Scenario,
    rates: &ScenarioRates,
    opts: OdeOptions,
) -> Result<Trajectory> {
    scenario.validate()?;
    rates.check_against(scenario)?;
    if opts.substeps < 4 {
        return Err(Error::param(
            "substeps",
            format!("must be >= 4, got {}", opts.substeps),
        ));
    }
    let generator = Generator::new(scenario.environment.kind(), scenario.omega0);
    let rho0 = make_state(scenario.initial)?;
    let tol = Tolerances {
        hermiticity: 1e-10,
        trace: opts.max_trace_drift,
        positivity: opts.max_negativity,
    };

    let points = scenario.grid.points();
    let h = scenario.grid.step() / opts.substeps as f64;
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let mut rho = *rho0.matrix();
    let mut states = Vec::with_capacity(points.len());
    states.push(rho0);
    for &t_start in &points[..points.len().saturating_sub(1)] {
        for s in 0..opts.substeps {
            let t = t_start + s as f64 * h;
            let k1 = generator.apply(t, &rho, rates);
            let k2 = generator.apply(t + 0.5 * h, &(rho + k1 * half), rates);
            let k3 = generator.apply(t + 0.5 * h, &(rho + k2 * half), rates);
            let k4 = generator.apply(t + h, &(rho + k3 * full), rates);
            rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        }
        let t_end = t_start + scenario.grid.step();
        let state = DensityMatrix::from_matrix_unchecked(rho);
        state.check(tol).map_err(|e| Error::Integration {
            t: t_end,
            reason: e.to_string(),
        })?;
        states.push(state);
    }
    Ok(Trajectory {
        grid: scenario.grid.clone(),
        states,
        scenario_hash: scenario.hash(),
        solver: Solver::Ode,
    })
}
