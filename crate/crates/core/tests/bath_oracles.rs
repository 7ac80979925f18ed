//! Rate tables against closed forms and brute-force quadrature.

use approx::assert_relative_eq;
use cohtherm::bath::{build_rate_table, BathSpec, RateTable};
use cohtherm::TimeGrid;

const ETA: f64 = 0.1;
const CUTOFF: f64 = 0.01;
const TEMPERATURES: [f64; 5] = [0.1, 0.2, 0.5, 2.0, 10.0];

fn grid() -> TimeGrid {
    TimeGrid::uniform(200.0, 401).unwrap()
}

fn table(kt: f64) -> RateTable {
    build_rate_table(&BathSpec::reference(kt), &grid()).unwrap()
}

/// Plain composite Simpson with a fixed, very fine step.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn zero_temperature_accumulated_rate() {
    let t0 = table(0.0);
    for (k, &t) in t0.grid().points().iter().enumerate() {
        let lt = CUTOFF * t;
        let gamma = 2.0 * ETA * CUTOFF * lt / (1.0 + lt * lt);
        let acc = ETA * (1.0 + lt * lt).ln();
        assert!((t0.gamma()[k] - gamma).abs() <= 1e-6 * gamma + 1e-15);
        assert!(
            (t0.accumulated_gamma()[k] - acc).abs() <= 1e-6 * acc + 1e-15,
            "t={t}: {} vs {acc}",
            t0.accumulated_gamma()[k]
        );
    }
    let at = t0
        .grid()
        .points()
        .iter()
        .position(|&t| (t - 100.0).abs() < 1e-9)
        .unwrap();
    assert!((t0.accumulated_gamma()[at] - ETA * 2f64.ln()).abs() < 1e-6 * ETA);
}

/// The accumulated phase closes to `eta (Lambda t - atan(Lambda t))`, checked
/// against a direct frequency integral of `J(w) (w t - sin w t) / w^2`.
#[test]
fn accumulated_phase_closed_form_and_brute_force() {
    for kt in [0.0, 0.5, 10.0] {
        let tab = table(kt);
        for (k, &t) in tab.grid().points().iter().enumerate().step_by(40).skip(1) {
            let lt = CUTOFF * t;
            let closed = ETA * (lt - lt.atan());
            let brute = simpson(
                |w: f64| {
                    if w == 0.0 {
                        0.0
                    } else {
                        ETA * (-w / CUTOFF).exp() * (w * t - (w * t).sin()) / w
                    }
                },
                0.0,
                60.0 * CUTOFF,
                200_000,
            );
            let got = tab.accumulated_phase()[k];
            assert_relative_eq!(closed, brute, max_relative = 1e-8);
            assert_relative_eq!(got, closed, max_relative = 1e-6);
        }
    }
}

#[test]
fn finite_temperature_rate_against_brute_force() {
    for kt in [0.1, 2.0] {
        let tab = table(kt);
        for (k, &t) in tab.grid().points().iter().enumerate().step_by(57).skip(1) {
            let brute = simpson(
                |w: f64| {
                    if w == 0.0 {
                        4.0 * ETA * kt * t
                    } else {
                        2.0 * ETA * (-w / CUTOFF).exp() * (w * t).sin() / (w / (2.0 * kt)).tanh()
                    }
                },
                0.0,
                60.0 * CUTOFF,
                400_000,
            );
            assert_relative_eq!(tab.gamma()[k], brute, max_relative = 1e-7);
        }
    }
}

#[test]
fn central_difference_consistency() {
    // Production spacing; the difference quotient's own h^2 error dominates at coarser grids.
    let fine = TimeGrid::uniform(200.0, 2001).unwrap();
    for kt in [0.0, 0.1, 10.0] {
        let tab = build_rate_table(&BathSpec::reference(kt), &fine).unwrap();
        let h = tab.grid().step();
        let max_gamma = tab.gamma().iter().cloned().fold(0.0, f64::max);
        let acc = tab.accumulated_gamma();
        for k in 1..acc.len() - 1 {
            let d = (acc[k + 1] - acc[k - 1]) / (2.0 * h);
            assert!(
                (d - tab.gamma()[k]).abs() <= 1e-6 * max_gamma,
                "kT={kt} k={k}: {d} vs {}",
                tab.gamma()[k]
            );
        }
    }
}

#[test]
fn rates_nonnegative_and_ordered_in_temperature() {
    let grid = TimeGrid::uniform(200.0, 201).unwrap();
    let tables: Vec<RateTable> = TEMPERATURES
        .iter()
        .map(|&kt| build_rate_table(&BathSpec::reference(kt), &grid).unwrap())
        .collect();
    for tab in &tables {
        assert!(tab.gamma().iter().all(|&g| g >= -1e-12));
        assert!(tab.accumulated_gamma().windows(2).all(|w| w[1] >= w[0]));
        for (r, g) in tab.re_alpha().iter().zip(tab.gamma()) {
            assert!((r - g / 2.0).abs() <= 1e-9 * g.abs());
        }
    }
    for pair in tables.windows(2) {
        for k in 1..grid.len() {
            assert!(pair[1].accumulated_gamma()[k] > pair[0].accumulated_gamma()[k]);
        }
    }
    // Im alpha does not depend on temperature.
    for k in 0..grid.len() {
        assert!((tables[0].im_alpha()[k] - tables[4].im_alpha()[k]).abs() <= 1e-10);
    }
}

#[test]
fn high_temperature_asymptote_over_grid() {
    let tab = table(10.0);
    for (k, &t) in tab.grid().points().iter().enumerate().skip(1) {
        let asym = 4.0 * ETA * 10.0 * (CUTOFF * t).atan();
        assert_relative_eq!(tab.gamma()[k], asym, max_relative = 5e-3);
    }
}
