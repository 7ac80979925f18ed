use cohtherm::bath::{BathSpec, RateCache};
use cohtherm::coherence::{coherence_of, relative_entropy_of_coherence, von_neumann_entropy};
use cohtherm::dynamics::{
    propagate_analytic, propagate_ode, EnvironmentKind, OdeOptions, Scenario, ScenarioRates,
    Trajectory,
};
use cohtherm::states::{basis_table, make_state, DensityMatrix, Matrix8, StateKind, DIM};
use cohtherm::TimeGrid;
use num_complex::Complex64;
use proptest::prelude::*;

fn scenario(
    kind: StateKind,
    env: EnvironmentKind,
    kt: f64,
    t_max: f64,
    samples: usize,
) -> Scenario {
    Scenario::new(
        kind,
        env.with_bath(BathSpec::reference(kt)),
        TimeGrid::uniform(t_max, samples).unwrap(),
    )
    .unwrap()
}

fn analytic(s: &Scenario) -> Trajectory {
    propagate_analytic(s, &ScenarioRates::build(s, &RateCache::new()).unwrap()).unwrap()
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

fn entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > 1e-12)
        .map(|l| -l * l.ln())
        .sum()
}

#[test]
fn entropy_matches_block_diagonalization() {
    // GHZ pair under common dephasing: 2x2 block with complex coherence.
    let traj = analytic(&scenario(
        StateKind::MixGhzW(0.4),
        EnvironmentKind::Common,
        0.5,
        40.0,
        21,
    ));
    for rho in &traj.states {
        let (a, b, c) = (rho.get(0, 0).re, rho.get(7, 7).re, rho.get(0, 7).norm());
        let mean = 0.5 * (a + b);
        let r = ((0.5 * (a - b)).powi(2) + c * c).sqrt();
        // W sector: real 3x3 block (no phase within a collective-spin sector).
        let idx = [1usize, 2, 4];
        let block: Vec<Vec<f64>> = idx
            .iter()
            .map(|&m| idx.iter().map(|&n| rho.get(m, n).re).collect())
            .collect();
        let mut spectrum = vec![mean + r, mean - r];
        spectrum.extend(jacobi_eigenvalues(block));
        let expected = entropy(&spectrum);
        assert!((von_neumann_entropy(rho).unwrap() - expected).abs() <= 1e-10);
    }
    // Werner-GHZ by brute-force diagonalization of the full real matrix.
    let rho = make_state(StateKind::WernerGhz(0.9)).unwrap();
    let full: Vec<Vec<f64>> = (0..DIM)
        .map(|m| (0..DIM).map(|n| rho.get(m, n).re).collect())
        .collect();
    let s = entropy(&jacobi_eigenvalues(full));
    assert!((s - 0.4670).abs() < 5e-5);
    assert!((von_neumann_entropy(&rho).unwrap() - s).abs() < 1e-10);
}

#[test]
fn entropy_is_finite_on_deeply_decayed_states() {
    // Coherences spread over ~200 orders of magnitude once the Star state has
    // mostly dephased; the spectrum must stay finite and match Jacobi.
    let traj = analytic(&scenario(
        StateKind::Star,
        EnvironmentKind::Common,
        10.0,
        200.0,
        2001,
    ));
    let c = coherence_of(&traj).unwrap();
    assert!(c.c_r.iter().all(|v| v.is_finite()));
    for k in [300, 338, 1000, 2000] {
        let rho = &traj.states[k];
        let embed: Vec<Vec<f64>> = (0..2 * DIM)
            .map(|i| {
                (0..2 * DIM)
                    .map(|j| {
                        let z = rho.get(i % DIM, j % DIM);
                        match (i < DIM, j < DIM) {
                            (true, true) | (false, false) => z.re,
                            (true, false) => -z.im,
                            (false, true) => z.im,
                        }
                    })
                    .collect()
            })
            .collect();
        let expected = entropy(&jacobi_eigenvalues(embed)) / 2.0;
        assert!(
            (von_neumann_entropy(rho).unwrap() - expected).abs() < 1e-10,
            "k={k}"
        );
    }
}

#[test]
fn local_environment_contracts_coherence() {
    for kind in [StateKind::Star, StateKind::WWbar, StateKind::MixGhzW(0.5)] {
        let traj = analytic(&scenario(kind, EnvironmentKind::Local, 0.2, 200.0, 201));
        for w in traj.states.windows(2) {
            for m in 0..DIM {
                for n in 0..DIM {
                    assert!(w[1].get(m, n).norm() <= w[0].get(m, n).norm() + 1e-15);
                }
            }
        }
        let c = coherence_of(&traj).unwrap();
        assert!(c.c_r.windows(2).all(|w| w[1] <= w[0] + 1e-8), "{kind}");
    }
}

#[test]
fn common_environment_preserves_decoherence_free_sectors() {
    let basis = basis_table();
    for kind in [
        StateKind::WWbar,
        StateKind::MixGhzW(0.5),
        StateKind::WernerW(0.9),
    ] {
        let traj = analytic(&scenario(kind, EnvironmentKind::Common, 10.0, 200.0, 101));
        let rho0 = &traj.states[0];
        for rho in &traj.states {
            for m in 0..DIM {
                for n in 0..DIM {
                    if basis.collective(m) == basis.collective(n) {
                        assert!((rho.get(m, n).norm() - rho0.get(m, n).norm()).abs() <= 1e-10);
                    }
                }
            }
        }
    }
}

/// The collective equation has no explicit Hermitian symmetrization; the ODE
/// route confirms it stays Hermitian and trace preserving.
#[test]
fn ode_common_environment_stays_physical() {
    let s = scenario(StateKind::Star, EnvironmentKind::Common, 2.0, 60.0, 601);
    let rates = ScenarioRates::build(&s, &RateCache::new()).unwrap();
    let ode = propagate_ode(&s, &rates, OdeOptions::for_step(s.grid.step())).unwrap();
    let rho0 = make_state(StateKind::Star).unwrap();
    for rho in &ode.states {
        assert!(rho.hermiticity_error() <= 1e-10);
        assert!((rho.trace().re - 1.0).abs() <= 1e-10);
        for m in 0..DIM {
            assert!((rho.get(m, m) - rho0.get(m, m)).norm() <= 1e-10);
        }
    }
}

fn kind_strategy() -> impl Strategy<Value = StateKind> {
    let p = 0.0..=1.0f64;
    prop_oneof![
        Just(StateKind::Ghz),
        Just(StateKind::W),
        Just(StateKind::Wbar),
        Just(StateKind::WWbar),
        Just(StateKind::Star),
        p.clone().prop_map(StateKind::MixGhzW),
        p.clone().prop_map(StateKind::WernerGhz),
        p.prop_map(StateKind::WernerW),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coherence_invariant_under_diagonal_unitaries(
        kind in kind_strategy(),
        phases in proptest::array::uniform8(-std::f64::consts::PI..std::f64::consts::PI),
    ) {
        let rho = make_state(kind).unwrap();
        let u = Matrix8::from_fn(|m, n| if m == n { Complex64::from_polar(1.0, phases[m]) } else { Complex64::new(0.0, 0.0) });
        let rotated = DensityMatrix::new(u * rho.matrix() * u.adjoint()).unwrap();
        let a = relative_entropy_of_coherence(&rho).unwrap();
        let b = relative_entropy_of_coherence(&rotated).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn analytic_trajectories_stay_physical(
        kind in kind_strategy(),
        kt in 0.05..10.0f64,
        common in any::<bool>(),
    ) {
        let env = if common { EnvironmentKind::Common } else { EnvironmentKind::Local };
        let traj = analytic(&scenario(kind, env, kt, 50.0, 26));
        let rho0 = make_state(kind).unwrap();
        prop_assert!(traj.states[0].max_abs_diff(&rho0) <= 1e-14);
        for rho in &traj.states {
            prop_assert!((rho.trace().re - 1.0).abs() <= 1e-14);
            prop_assert!(rho.hermiticity_error() <= 1e-12);
            prop_assert!(rho.eigenvalues()[0] >= -1e-10);
        }
        let c = coherence_of(&traj).unwrap();
        prop_assert!(c.c_r.iter().all(|&v| (0.0..=8f64.ln()).contains(&v)));
    }
}
