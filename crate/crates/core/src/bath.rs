//! Ohmic reservoirs and the time-dependent dephasing coefficients they induce.
//!
//! Units: `hbar = k_B = 1`, frequencies in units of the qubit frequency
//! `omega0`, times in `1/omega0`, temperatures as `kT` in units of
//! `hbar * omega0`.
//!
//! For a spectral density `J(w) = eta * w * exp(-w / cutoff)` the coefficients are
//!
//! ```text
//! gamma(t)    = 2 int_0^inf J(w) coth(w / 2kT) sin(w t) / w dw
//! Re alpha(t) =   int_0^inf J(w) coth(w / 2kT) sin(w t) / w dw
//! Im alpha(t) =  -int_0^inf J(w) (1 - cos(w t)) / w dw
//! ```
//!
//! and the dynamics consume their running integrals
//! `Gamma(t) = int_0^t gamma` and `X(t) = -int_0^t Im alpha`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::quadrature::{integrate_panels, AdaptiveOptions, GaussLegendre};

/// Parameters of one Ohmic reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Coupling strength `eta`.
    pub eta: f64,
    /// Cutoff frequency `Lambda`.
    pub cutoff: f64,
    /// Temperature `kT`; zero selects the zero-temperature kernel.
    pub kt: f64,
}

impl BathSpec {
    /// Coupling and cutoff used for every figure: `eta = 0.1`, `Lambda = 0.01`.
    pub fn reference(kt: f64) -> Self {
        BathSpec {
            eta: 0.1,
            cutoff: 0.01,
            kt,
        }
    }

    pub fn new(eta: f64, cutoff: f64, kt: f64) -> Result<Self> {
        let spec = BathSpec { eta, cutoff, kt };
        spec.validate()?;
        Ok(spec)
    }

    /// Coupling is allowed to vanish (free evolution); everything else must be
    /// strictly inside its domain.
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::param(
                "eta",
                format!("must be finite and >= 0, got {}", self.eta),
            ));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::param(
                "lambda",
                format!("must be finite and > 0, got {}", self.cutoff),
            ));
        }
        if !(self.kt.is_finite() && self.kt >= 0.0) {
            return Err(Error::param(
                "kT",
                format!("must be finite and >= 0, got {}", self.kt),
            ));
        }
        Ok(())
    }

    fn key(&self) -> [u64; 3] {
        [self.eta.to_bits(), self.cutoff.to_bits(), self.kt.to_bits()]
    }
}

/// Numerical settings for the frequency integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    /// Upper integration limit in multiples of the cutoff.
    pub omega_max_cutoffs: f64,
    /// Below `series_switch * min(kT, Lambda)` the thermal kernel is replaced
    /// by its small-frequency expansion.
    pub series_switch: f64,
    pub gl_order: usize,
    pub tolerances: AdaptiveOptions,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            omega_max_cutoffs: 50.0,
            series_switch: 1e-3,
            gl_order: 8,
            tolerances: AdaptiveOptions::default(),
        }
    }
}

/// Ohmic spectral density `eta * w * exp(-w / Lambda)`.
pub fn ohmic_j(omega: f64, spec: &BathSpec) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::param(
            "omega",
            format!("frequency must be >= 0, got {omega}"),
        ));
    }
    if omega.is_infinite() {
        return Ok(0.0);
    }
    Ok(spec.eta * omega * (-omega / spec.cutoff).exp())
}

/// `coth(w / 2kT) * sin(w t)`, finite as `w -> 0`.
fn thermal_sine(omega: f64, t: f64, kt: f64, switch: f64) -> f64 {
    if kt == 0.0 {
        return (omega * t).sin();
    }
    let x = omega / (2.0 * kt);
    if omega < switch {
        let wt = omega * t;
        2.0 * kt * t * (1.0 + x * x / 3.0 - wt * wt / 6.0)
    } else {
        (omega * t).sin() / x.tanh()
    }
}

/// Evaluates the coefficients for one bath. Holds the quadrature rule so it
/// is built once per table rather than once per time point.
#[derive(Debug, Clone)]
pub struct CoefficientIntegrator {
    spec: BathSpec,
    settings: QuadratureSettings,
    rule: GaussLegendre,
}

impl CoefficientIntegrator {
    pub fn new(spec: BathSpec, settings: QuadratureSettings) -> Result<Self> {
        spec.validate()?;
        Ok(CoefficientIntegrator {
            spec,
            settings,
            rule: GaussLegendre::new(settings.gl_order),
        })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    fn omega_max(&self) -> f64 {
        self.settings.omega_max_cutoffs * self.spec.cutoff
    }

    /// Panels resolve both the cutoff and a quarter period of `sin(w t)`.
    fn panel_width(&self, t: f64) -> f64 {
        let by_cutoff = self.spec.cutoff / 4.0;
        if t > 0.0 {
            by_cutoff.min(PI / (4.0 * t))
        } else {
            by_cutoff
        }
    }

    fn switch(&self) -> f64 {
        self.settings.series_switch * self.spec.kt.min(self.spec.cutoff)
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param(
                "t",
                format!("time must be finite and >= 0, got {t}"),
            ));
        }
        Ok(())
    }

    /// `int_0^inf J(w) coth(w/2kT) sin(w t) / w dw`, scaled by `prefactor`.
    fn thermal_integral(&self, t: f64, prefactor: f64) -> Result<f64> {
        Self::check_time(t)?;
        if t == 0.0 || self.spec.eta == 0.0 {
            return Ok(0.0);
        }
        let BathSpec { eta, cutoff, kt } = self.spec;
        let switch = self.switch();
        let f = |w: f64| prefactor * eta * (-w / cutoff).exp() * thermal_sine(w, t, kt, switch);
        let est = integrate_panels(
            &self.rule,
            &f,
            0.0,
            self.omega_max(),
            self.panel_width(t),
            self.settings.tolerances,
        )?;
        Ok(est.value)
    }

    /// Dephasing rate `gamma(t)`.
    pub fn gamma(&self, t: f64) -> Result<f64> {
        self.thermal_integral(t, 2.0)
    }

    /// `Im alpha(t) = -int_0^inf J(w) (1 - cos w t) / w dw`; independent of `kT`.
    pub fn im_alpha(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        if t == 0.0 || self.spec.eta == 0.0 {
            return Ok(0.0);
        }
        let BathSpec { eta, cutoff, .. } = self.spec;
        let f = |w: f64| {
            let s = (0.5 * w * t).sin();
            -2.0 * eta * (-w / cutoff).exp() * s * s
        };
        let est = integrate_panels(
            &self.rule,
            &f,
            0.0,
            self.omega_max(),
            self.panel_width(t),
            self.settings.tolerances,
        )?;
        Ok(est.value)
    }

    /// Complex coefficient `alpha(t)` of the collective master equation.
    pub fn alpha(&self, t: f64) -> Result<Complex64> {
        Ok(Complex64::new(
            self.thermal_integral(t, 1.0)?,
            self.im_alpha(t)?,
        ))
    }
}

pub fn gamma_rate(t: f64, spec: &BathSpec) -> Result<f64> {
    CoefficientIntegrator::new(*spec, QuadratureSettings::default())?.gamma(t)
}

pub fn alpha_coeff(t: f64, spec: &BathSpec) -> Result<Complex64> {
    CoefficientIntegrator::new(*spec, QuadratureSettings::default())?.alpha(t)
}

/// Running integral of samples on a uniform grid with spacing `h`.
///
/// Even indices use composite Simpson; odd indices add a three-eighths panel
/// on the last three intervals. Index 1 integrates the cubic through the
/// first four samples (the quadratic through three when fewer exist).
pub fn cumulative_integral(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    let f = values;
    out[1] = if n >= 4 {
        h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    } else {
        h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
    };
    for k in (2..n).step_by(2) {
        out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    for k in (3..n).step_by(2) {
        out[k] = out[k - 3] + 3.0 * h / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
    }
    out
}

/// Instantaneous coefficients at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub gamma: f64,
    pub re_alpha: f64,
    pub im_alpha: f64,
}

/// Coefficients and their running integrals tabulated on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    spec: BathSpec,
    grid: TimeGrid,
    gamma: Vec<f64>,
    re_alpha: Vec<f64>,
    im_alpha: Vec<f64>,
    accumulated_gamma: Vec<f64>,
    accumulated_phase: Vec<f64>,
}

pub fn build_rate_table(spec: &BathSpec, grid: &TimeGrid) -> Result<RateTable> {
    build_rate_table_with(spec, grid, QuadratureSettings::default())
}

pub fn build_rate_table_with(
    spec: &BathSpec,
    grid: &TimeGrid,
    settings: QuadratureSettings,
) -> Result<RateTable> {
    assemble(spec, grid, settings, None)
}

/// Builds a table, reusing `im_alpha` when it was already computed for the
/// same coupling, cutoff and grid (it does not depend on temperature).
fn assemble(
    spec: &BathSpec,
    grid: &TimeGrid,
    settings: QuadratureSettings,
    im_alpha: Option<&[f64]>,
) -> Result<RateTable> {
    // Re-validate: a grid may have been deserialized.
    let grid = TimeGrid::from_points(grid.points().to_vec())?;
    let integrator = CoefficientIntegrator::new(*spec, settings)?;
    let (gamma, im_alpha): (Vec<f64>, Vec<f64>) = match im_alpha {
        Some(im) if im.len() == grid.len() => {
            let gamma = grid
                .points()
                .par_iter()
                .map(|&t| integrator.gamma(t))
                .collect::<Result<_>>()?;
            (gamma, im.to_vec())
        }
        _ => {
            let pairs: Vec<(f64, f64)> = grid
                .points()
                .par_iter()
                .map(|&t| Ok((integrator.gamma(t)?, integrator.im_alpha(t)?)))
                .collect::<Result<_>>()?;
            pairs.into_iter().unzip()
        }
    };
    // The thermal integrand of Re alpha is exactly half that of gamma.
    let re_alpha: Vec<f64> = gamma.iter().map(|g| 0.5 * g).collect();
    let neg_im: Vec<f64> = im_alpha.iter().map(|v| -v).collect();
    let accumulated_gamma = cumulative_integral(&gamma, grid.step());
    let accumulated_phase = cumulative_integral(&neg_im, grid.step());
    Ok(RateTable {
        spec: *spec,
        grid,
        gamma,
        re_alpha,
        im_alpha,
        accumulated_gamma,
        accumulated_phase,
    })
}

impl RateTable {
    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn re_alpha(&self) -> &[f64] {
        &self.re_alpha
    }

    pub fn im_alpha(&self) -> &[f64] {
        &self.im_alpha
    }

    /// `Gamma(t_k) = int_0^{t_k} gamma`.
    pub fn accumulated_gamma(&self) -> &[f64] {
        &self.accumulated_gamma
    }

    /// `X(t_k) = -int_0^{t_k} Im alpha`.
    pub fn accumulated_phase(&self) -> &[f64] {
        &self.accumulated_phase
    }

    /// Coefficients at an arbitrary time inside the grid, by four-point
    /// Lagrange interpolation of the tabulated columns.
    pub fn rates_at(&self, t: f64) -> Rates {
        Rates {
            gamma: self.interpolate(&self.gamma, t),
            re_alpha: self.interpolate(&self.re_alpha, t),
            im_alpha: self.interpolate(&self.im_alpha, t),
        }
    }

    fn interpolate(&self, column: &[f64], t: f64) -> f64 {
        let n = column.len();
        let h = self.grid.step();
        if n == 1 || h == 0.0 {
            return column[0];
        }
        let u = (t / h).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        if n < 4 {
            let s = u - k as f64;
            return column[k] * (1.0 - s) + column[k + 1] * s;
        }
        let start = k.saturating_sub(1).min(n - 4);
        let x = u - start as f64;
        let (y0, y1, y2, y3) = (
            column[start],
            column[start + 1],
            column[start + 2],
            column[start + 3],
        );
        let l0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
        let l1 = x * (x - 2.0) * (x - 3.0) / 2.0;
        let l2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
        let l3 = x * (x - 1.0) * (x - 2.0) / 6.0;
        y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
    }

    /// CSV with header `t,gamma,re_alpha,im_alpha,Gamma,X`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,gamma,re_alpha,im_alpha,Gamma,X\n");
        for k in 0..self.grid.len() {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid.points()[k],
                self.gamma[k],
                self.re_alpha[k],
                self.im_alpha[k],
                self.accumulated_gamma[k],
                self.accumulated_phase[k]
            );
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Bits of (η, Λ, kT), grid length and bits of the grid step.
type TableKey = ([u64; 3], usize, u64);

/// Read-mostly cache of rate tables keyed by bath parameters and grid.
#[derive(Debug, Default)]
pub struct RateCache {
    settings: Option<QuadratureSettings>,
    tables: Mutex<HashMap<TableKey, Arc<RateTable>>>,
}

impl RateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_settings(settings: QuadratureSettings) -> Self {
        RateCache {
            settings: Some(settings),
            tables: Mutex::default(),
        }
    }

    pub fn get(&self, spec: &BathSpec, grid: &TimeGrid) -> Result<Arc<RateTable>> {
        let key = (spec.key(), grid.len(), grid.step().to_bits());
        let sibling = {
            let tables = self.tables.lock().expect("rate cache poisoned");
            if let Some(table) = tables.get(&key) {
                return Ok(Arc::clone(table));
            }
            tables
                .iter()
                .find(|((k, len, step), _)| k[..2] == key.0[..2] && (*len, *step) == (key.1, key.2))
                .map(|(_, table)| Arc::clone(table))
        };
        let settings = self.settings.unwrap_or_default();
        let table = Arc::new(assemble(
            spec,
            grid,
            settings,
            sibling.as_ref().map(|t| t.im_alpha()),
        )?);
        self.tables
            .lock()
            .expect("rate cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&table));
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.tables.lock().expect("rate cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ETA: f64 = 0.1;
    const CUTOFF: f64 = 0.01;

    fn zero_t_gamma(t: f64) -> f64 {
        2.0 * ETA * CUTOFF * CUTOFF * t / (1.0 + CUTOFF * CUTOFF * t * t)
    }

    #[test]
    fn spectral_density_values() {
        let spec = BathSpec::reference(0.5);
        assert_eq!(ohmic_j(0.0, &spec).unwrap(), 0.0);
        let at_cutoff = ohmic_j(CUTOFF, &spec).unwrap();
        assert!((at_cutoff - 0.1 * 0.01 * (-1f64).exp()).abs() < 1e-18);
        assert!((at_cutoff - 3.679e-4).abs() < 1e-7);
        assert!(ohmic_j(-1.0, &spec).is_err());
        assert!(ohmic_j(100.0, &spec).unwrap() < 1e-300);
    }

    #[test]
    fn spectral_density_peaks_at_cutoff() {
        let spec = BathSpec::reference(0.0);
        let j = |w: f64| ohmic_j(w, &spec).unwrap();
        // Derivative changes sign across the cutoff.
        let eps = 1e-9;
        assert!(j(CUTOFF - eps) < j(CUTOFF) && j(CUTOFF + eps) < j(CUTOFF));
        let (grid_max, _) = (1..2000).map(|k| k as f64 * 1e-5).map(|w| (w, j(w))).fold(
            (0.0, 0.0),
            |acc, (w, v)| if v > acc.1 { (w, v) } else { acc },
        );
        assert!((grid_max - CUTOFF).abs() < 1e-5);
    }

    #[test]
    fn zero_temperature_gamma_closed_form() {
        let spec = BathSpec::reference(0.0);
        assert_eq!(gamma_rate(0.0, &spec).unwrap(), 0.0);
        for t in [0.3, 7.0, 50.0, 100.0, 200.0] {
            let g = gamma_rate(t, &spec).unwrap();
            let exact = zero_t_gamma(t);
            assert!((g - exact).abs() <= 1e-6 * exact, "t={t}: {g} vs {exact}");
        }
        let at = gamma_rate(1.0 / CUTOFF, &spec).unwrap();
        assert!((at - ETA * CUTOFF).abs() < 1e-6 * ETA * CUTOFF);
    }

    #[test]
    fn high_temperature_asymptote() {
        let spec = BathSpec::reference(10.0);
        for t in [1.0, 20.0, 100.0, 200.0] {
            let g = gamma_rate(t, &spec).unwrap();
            let asym = 4.0 * ETA * 10.0 * (CUTOFF * t).atan();
            assert!(((g - asym) / asym).abs() < 5e-3, "t={t}: {g} vs {asym}");
        }
    }

    #[test]
    fn alpha_real_part_is_half_gamma_and_imag_closed_form() {
        for kt in [0.0, 0.1, 2.0] {
            let spec = BathSpec::reference(kt);
            assert_eq!(alpha_coeff(0.0, &spec).unwrap(), Complex64::new(0.0, 0.0));
            for t in [0.5, 33.0, 180.0] {
                let a = alpha_coeff(t, &spec).unwrap();
                let g = gamma_rate(t, &spec).unwrap();
                assert!((a.re - g / 2.0).abs() <= 1e-9 * g.abs());
                let lt = CUTOFF * t;
                let exact = -ETA * CUTOFF.powi(3) * t * t / (1.0 + lt * lt);
                assert!((a.im - exact).abs() <= 1e-6 * exact.abs(), "kT={kt} t={t}");
            }
        }
    }

    #[test]
    fn series_switch_is_harmless() {
        let spec = BathSpec::reference(0.2);
        let base = QuadratureSettings::default();
        let halved = QuadratureSettings {
            series_switch: base.series_switch / 2.0,
            ..base
        };
        for t in [1.0, 80.0, 200.0] {
            let a = CoefficientIntegrator::new(spec, base)
                .unwrap()
                .gamma(t)
                .unwrap();
            let b = CoefficientIntegrator::new(spec, halved)
                .unwrap()
                .gamma(t)
                .unwrap();
            assert!((a - b).abs() < 1e-10, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn kernel_series_matches_direct_evaluation_near_switch() {
        let (kt, t): (f64, f64) = (0.1, 150.0);
        let w = 1e-4 * kt;
        let direct = (w * t).sin() / (w / (2.0 * kt)).tanh();
        let series = thermal_sine(w, t, kt, 1.0);
        assert!((direct - series).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn cumulative_integral_is_high_order() {
        let h = 0.1;
        let xs: Vec<f64> = (0..41).map(|k| k as f64 * h).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let acc = cumulative_integral(&ys, h);
        for (x, a) in xs.iter().zip(&acc) {
            assert!((a - x.sin()).abs() < 2e-6, "x={x}");
        }
        let cubic: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
        let acc = cumulative_integral(&cubic, h);
        for (x, a) in xs.iter().zip(&acc) {
            assert!((a - x.powi(4) / 4.0).abs() < 1e-12, "x={x}");
        }
        assert_eq!(cumulative_integral(&[1.0], h), vec![0.0]);
        assert_eq!(cumulative_integral(&[1.0, 3.0], 0.5), vec![0.0, 1.0]);
    }

    #[test]
    fn table_rejects_non_uniform_grid() {
        let spec = BathSpec::reference(0.1);
        let bad: TimeGrid = serde_json::from_str(r#"{"points":[0.0,1.0,3.0],"step":1.0}"#).unwrap();
        assert!(matches!(
            build_rate_table(&spec, &bad),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn table_starts_at_zero_and_interpolates() {
        let spec = BathSpec::reference(0.5);
        let grid = TimeGrid::uniform(20.0, 41).unwrap();
        let table = build_rate_table(&spec, &grid).unwrap();
        assert_eq!(table.gamma()[0], 0.0);
        assert_eq!(table.accumulated_gamma()[0], 0.0);
        assert_eq!(table.accumulated_phase()[0], 0.0);
        let integ = CoefficientIntegrator::new(spec, QuadratureSettings::default()).unwrap();
        for t in [0.2, 3.33, 19.9] {
            let r = table.rates_at(t);
            let g = integ.gamma(t).unwrap();
            assert!((r.gamma - g).abs() < 1e-8 * g.abs().max(1e-6), "t={t}");
            assert!((r.re_alpha - g / 2.0).abs() < 1e-8 * g.abs().max(1e-6));
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("t,gamma,re_alpha,im_alpha,Gamma,X\n"));
        assert_eq!(csv.lines().count(), 42);
    }

    #[test]
    fn cache_reuses_tables() {
        let cache = RateCache::new();
        let grid = TimeGrid::uniform(5.0, 11).unwrap();
        let a = cache.get(&BathSpec::reference(0.2), &grid).unwrap();
        let b = cache.get(&BathSpec::reference(0.2), &grid).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let shared = cache.get(&BathSpec::reference(0.5), &grid).unwrap();
        assert_eq!(cache.len(), 2);
        let fresh = build_rate_table(&BathSpec::reference(0.5), &grid).unwrap();
        assert_eq!(shared.im_alpha(), fresh.im_alpha());
        assert_eq!(shared.gamma(), fresh.gamma());
        assert_eq!(shared.accumulated_phase(), fresh.accumulated_phase());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(BathSpec::new(0.1, 0.0, 1.0).is_err());
        assert!(BathSpec::new(0.1, 0.01, -1.0).is_err());
        assert!(BathSpec::new(f64::NAN, 0.01, 1.0).is_err());
        assert!(gamma_rate(-1.0, &BathSpec::reference(1.0)).is_err());
    }
}
