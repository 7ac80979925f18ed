//! Temperature estimation from an observed coherence decay.
//!
//! The forward model maps a trial `kT` to the coherence series of a fixed
//! scenario. The estimate minimizes the RMS misfit over a log-spaced coarse
//! grid, then refines with golden-section search in `ln kT`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, RateCache};
use crate::coherence::{coherence_of, CoherenceTrajectory};
use crate::dynamics::{propagate_analytic, EnvironmentKind, Scenario, ScenarioRates};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::states::StateKind;

pub const COARSE_POINTS: usize = 33;
/// Golden-section search stops once the bracket is this narrow relative to `kT`.
pub const REFINE_RELATIVE_WIDTH: f64 = 1e-4;
/// Below this sensitivity the data carry no temperature information.
pub const IDENTIFIABILITY_THRESHOLD: f64 = 1e-6;

/// A scenario with the temperature left open. Every reservoir shares `kT`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTemplate {
    pub initial: StateKind,
    pub environment: EnvironmentKind,
    pub eta: f64,
    pub cutoff: f64,
    pub grid: TimeGrid,
}

impl ScenarioTemplate {
    pub fn new(initial: StateKind, environment: EnvironmentKind, grid: TimeGrid) -> Self {
        let reference = BathSpec::reference(0.0);
        ScenarioTemplate {
            initial,
            environment,
            eta: reference.eta,
            cutoff: reference.cutoff,
            grid,
        }
    }

    pub fn at(&self, kt: f64) -> Result<Scenario> {
        let bath = BathSpec::new(self.eta, self.cutoff, kt)?;
        Scenario::new(
            self.initial,
            self.environment.with_bath(bath),
            self.grid.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermometryResult {
    pub kt_hat: f64,
    /// RMS misfit between observed and modelled coherence.
    pub residual: f64,
    pub identifiable: bool,
    /// `max_t |dC_R/dkT|` at `kt_hat`.
    pub sensitivity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ThermometryResult {
    /// Single-line JSON record.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct always serializes")
    }
}

/// Forward model with a shared rate-table cache.
#[derive(Debug)]
pub struct Thermometer {
    template: ScenarioTemplate,
    cache: RateCache,
}

impl Thermometer {
    pub fn new(template: ScenarioTemplate) -> Self {
        Thermometer {
            template,
            cache: RateCache::new(),
        }
    }

    pub fn template(&self) -> &ScenarioTemplate {
        &self.template
    }

    /// Coherence series predicted at temperature `kt`.
    pub fn forward(&self, kt: f64) -> Result<CoherenceTrajectory> {
        let scenario = self.template.at(kt)?;
        let rates = ScenarioRates::build(&scenario, &self.cache)?;
        coherence_of(&propagate_analytic(&scenario, &rates)?)
    }

    fn misfit(&self, observed: &[f64], kt: f64) -> Result<f64> {
        let model = self.forward(kt)?;
        let ss: f64 = observed
            .iter()
            .zip(&model.c_r)
            .map(|(o, m)| (o - m) * (o - m))
            .sum();
        Ok((ss / observed.len() as f64).sqrt())
    }

    fn check_observed(&self, observed: &CoherenceTrajectory) -> Result<()> {
        let g = &self.template.grid;
        if observed.grid.len() != g.len()
            || observed.c_r.len() != g.len()
            || observed.grid.step().to_bits() != g.step().to_bits()
        {
            return Err(Error::param(
                "observed",
                "observed series is not on the scenario grid",
            ));
        }
        if observed.c_r.iter().any(|c| !c.is_finite()) {
            return Err(Error::param(
                "observed",
                "observed series contains non-finite values",
            ));
        }
        Ok(())
    }

    /// RMS misfit at the log-spaced coarse temperatures.
    pub fn misfit_profile(
        &self,
        observed: &CoherenceTrajectory,
        bounds: (f64, f64),
    ) -> Result<Vec<(f64, f64)>> {
        check_bounds(bounds)?;
        self.check_observed(observed)?;
        log_spaced(bounds, COARSE_POINTS)
            .into_par_iter()
            .map(|kt| Ok((kt, self.misfit(&observed.c_r, kt)?)))
            .collect()
    }

    /// Central-difference `dC_R/dkT` at every grid time.
    pub fn sensitivity_profile(&self, kt: f64) -> Result<Vec<f64>> {
        if !(kt.is_finite() && kt > 0.0) {
            return Err(Error::param(
                "kT",
                format!("sensitivity needs kT > 0, got {kt}"),
            ));
        }
        let step = (1e-3 * kt).max(1e-4);
        let (lo, hi) = if kt - step > 0.0 {
            (kt - step, kt + step)
        } else {
            (kt, kt + step)
        };
        let minus = self.forward(lo)?;
        let plus = self.forward(hi)?;
        Ok(plus
            .c_r
            .iter()
            .zip(&minus.c_r)
            .map(|(p, m)| (p - m) / (hi - lo))
            .collect())
    }

    pub fn estimate(
        &self,
        observed: &CoherenceTrajectory,
        bounds: (f64, f64),
    ) -> Result<ThermometryResult> {
        let profile = self.misfit_profile(observed, bounds)?;
        // Strict comparison while scanning upward keeps the smaller kT on ties.
        let best = profile.iter().enumerate().fold(
            0,
            |best, (i, &(_, r))| if r < profile[best].1 { i } else { best },
        );

        let lo = profile[best.saturating_sub(1)].0.ln();
        let hi = profile[(best + 1).min(profile.len() - 1)].0.ln();
        let (refined, refined_misfit) = self.golden_section(&observed.c_r, lo, hi)?;

        let mut candidates = vec![(refined, refined_misfit)];
        candidates.push(profile[best]);
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (kt_hat, residual) = candidates
            .into_iter()
            .reduce(|acc, c| if c.1 < acc.1 { c } else { acc })
            .expect("at least one candidate");

        let sensitivity = self
            .sensitivity_profile(kt_hat)?
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max);
        let identifiable = sensitivity >= IDENTIFIABILITY_THRESHOLD;

        let (b_lo, b_hi) = bounds;
        let near = |a: f64, b: f64| (a / b).ln().abs() <= 2.0 * REFINE_RELATIVE_WIDTH;
        let warning = if !identifiable {
            Some(
                "coherence is insensitive to temperature; estimate is not identifiable".to_string(),
            )
        } else if near(kt_hat, b_lo) {
            Some(format!(
                "minimum at lower bound kT = {b_lo}; misfit still decreases below it"
            ))
        } else if near(kt_hat, b_hi) {
            Some(format!(
                "minimum at upper bound kT = {b_hi}; misfit still decreases above it"
            ))
        } else {
            None
        };
        Ok(ThermometryResult {
            kt_hat,
            residual,
            identifiable,
            sensitivity,
            warning,
        })
    }

    /// Golden-section minimization of the misfit over `ln kT in [lo, hi]`.
    fn golden_section(&self, observed: &[f64], mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let tol = REFINE_RELATIVE_WIDTH.ln_1p();
        let f = |x: f64| self.misfit(observed, x.exp());
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut f1 = f(x1)?;
        let mut f2 = f(x2)?;
        while hi - lo > tol {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = f(x2)?;
            }
        }
        Ok(if f1 <= f2 {
            (x1.exp(), f1)
        } else {
            (x2.exp(), f2)
        })
    }
}

fn check_bounds((lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::param(
            "bounds",
            format!("need 0 < kT_lo < kT_hi, got [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

fn log_spaced((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            i if i == n - 1 => hi,
            i => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Whether `values` first falls then rises (ties allowed).
pub fn is_unimodal(values: &[f64]) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if rising && w[1] < w[0] {
            return false;
        }
    }
    true
}

pub fn estimate_temperature(
    observed: &CoherenceTrajectory,
    template: &ScenarioTemplate,
    bounds: (f64, f64),
) -> Result<ThermometryResult> {
    Thermometer::new(template.clone()).estimate(observed, bounds)
}

pub fn sensitivity_profile(template: &ScenarioTemplate, kt: f64) -> Result<Vec<f64>> {
    Thermometer::new(template.clone()).sensitivity_profile(kt)
}
