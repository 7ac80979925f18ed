//! Three-qubit initial states and computational-basis metadata.
//!
//! Basis order is binary ascending with qubit 1 as the leftmost symbol:
//! index `m` is `|q1 q2 q3>` with `q1` the most significant bit. The Pauli
//! convention is `sigma_z |0> = +|0>`.

use std::fmt;

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hilbert-space dimension of three qubits.
pub const DIM: usize = 8;
pub const QUBITS: usize = 3;

pub type Matrix8 = SMatrix<Complex64, DIM, DIM>;

/// Tolerances a density matrix must satisfy.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Tolerances {
    pub const STRICT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        trace: 1e-12,
        positivity: 1e-10,
    };
}

/// An 8x8 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix8);

impl DensityMatrix {
    /// Wrap `m` after checking it against [`Tolerances::STRICT`].
    pub fn new(m: Matrix8) -> Result<Self> {
        Self::with_tolerances(m, Tolerances::STRICT)
    }

    pub fn with_tolerances(m: Matrix8, tol: Tolerances) -> Result<Self> {
        let rho = DensityMatrix(m);
        rho.check(tol)?;
        Ok(rho)
    }

    /// Wrap without checking. Callers are responsible for the invariants.
    pub fn from_matrix_unchecked(m: Matrix8) -> Self {
        DensityMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix8 {
        self.0
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.0[(m, n)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest elementwise deviation `max |rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Diagonalizes the real symmetric embedding `[[A, -B], [B, A]]` of
    /// `H = A + iB`; every eigenvalue of `H` appears there twice. nalgebra's
    /// complex Householder reduction returns NaN on some nearly-diagonal
    /// matrices with widely separated entry scales, the real path does not.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let cutoff = scale * 1e-100;
        let part =
            |z: Complex64, f: fn(Complex64) -> f64| if z.norm() < cutoff { 0.0 } else { f(z) };
        let real = SMatrix::<f64, { 2 * DIM }, { 2 * DIM }>::from_fn(|i, j| {
            let z = h[(i % DIM, j % DIM)];
            match (i < DIM, j < DIM) {
                (true, true) | (false, false) => part(z, |z| z.re),
                (true, false) => -part(z, |z| z.im),
                (false, true) => part(z, |z| z.im),
            }
        });
        let mut ev: Vec<f64> = real.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    pub fn check(&self, tol: Tolerances) -> Result<()> {
        let herm = self.hermiticity_error();
        if !(herm <= tol.hermiticity) {
            return Err(Error::Numerical(format!(
                "density matrix not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if !((tr.re - 1.0).abs() <= tol.trace && tr.im.abs() <= tol.trace) {
            return Err(Error::Numerical(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min_ev = self.eigenvalues()[0];
        if !(min_ev >= -tol.positivity) {
            return Err(Error::Numerical(format!(
                "density matrix not positive semidefinite (min eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(())
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Per-qubit and collective `sigma_z` eigenvalues for every basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisTable {
    spins: [[i8; QUBITS]; DIM],
}

impl BasisTable {
    /// `s(m)`: eigenvalues of `sigma_z^1, sigma_z^2, sigma_z^3` on `|m>`.
    pub fn spins(&self, m: usize) -> [i8; QUBITS] {
        self.spins[m]
    }

    /// `M(m)`: eigenvalue of the collective `S_z` on `|m>`.
    pub fn collective(&self, m: usize) -> i8 {
        self.spins[m].iter().sum()
    }
}

pub fn basis_table() -> BasisTable {
    let mut spins = [[0i8; QUBITS]; DIM];
    for (m, s) in spins.iter_mut().enumerate() {
        for (q, si) in s.iter_mut().enumerate() {
            let bit = (m >> (QUBITS - 1 - q)) & 1;
            *si = if bit == 0 { 1 } else { -1 };
        }
    }
    BasisTable { spins }
}

/// The initial states considered: four pure states, their spin-flipped W
/// partner, and three one-parameter mixtures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateKind {
    Ghz,
    W,
    Wbar,
    WWbar,
    Star,
    /// `p |GHZ><GHZ| + (1 - p) |W><W|`
    MixGhzW(f64),
    /// `p |GHZ><GHZ| + (1 - p) I/8`
    WernerGhz(f64),
    /// `p |W><W| + (1 - p) I/8`
    WernerW(f64),
}

impl StateKind {
    pub const NAMES: [&'static str; 8] = [
        "ghz",
        "w",
        "wbar",
        "wwbar",
        "star",
        "mix-ghz-w",
        "werner-ghz",
        "werner-w",
    ];

    /// Resolve a configuration name. Mixed kinds require `p`; pure kinds reject it.
    pub fn from_name(name: &str, p: Option<f64>) -> Result<Self> {
        let mixed = |f: fn(f64) -> StateKind| -> Result<StateKind> {
            let p = p.ok_or_else(|| {
                Error::param("p", format!("state `{name}` requires a mixing parameter"))
            })?;
            let kind = f(p);
            kind.validate()?;
            Ok(kind)
        };
        let pure = |k: StateKind| -> Result<StateKind> {
            match p {
                Some(_) => Err(Error::param(
                    "p",
                    format!("pure state `{name}` takes no mixing parameter"),
                )),
                None => Ok(k),
            }
        };
        match name {
            "ghz" => pure(StateKind::Ghz),
            "w" => pure(StateKind::W),
            "wbar" => pure(StateKind::Wbar),
            "wwbar" => pure(StateKind::WWbar),
            "star" => pure(StateKind::Star),
            "mix-ghz-w" => mixed(StateKind::MixGhzW),
            "werner-ghz" => mixed(StateKind::WernerGhz),
            "werner-w" => mixed(StateKind::WernerW),
            other => Err(Error::param(
                "state",
                format!(
                    "unknown state `{other}`; expected one of {}",
                    Self::NAMES.join(", ")
                ),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Ghz => "ghz",
            StateKind::W => "w",
            StateKind::Wbar => "wbar",
            StateKind::WWbar => "wwbar",
            StateKind::Star => "star",
            StateKind::MixGhzW(_) => "mix-ghz-w",
            StateKind::WernerGhz(_) => "werner-ghz",
            StateKind::WernerW(_) => "werner-w",
        }
    }

    pub fn mixing(&self) -> Option<f64> {
        match *self {
            StateKind::MixGhzW(p) | StateKind::WernerGhz(p) | StateKind::WernerW(p) => Some(p),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mixing() {
            Some(p) if !(0.0..=1.0).contains(&p) => Err(Error::param(
                "p",
                format!("mixing probability must lie in [0, 1], got {p}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StateKind {
    /// File-name friendly label, e.g. `ghz` or `werner-w-p0.5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mixing() {
            Some(p) => write!(f, "{}-p{}", self.name(), p),
            None => f.write_str(self.name()),
        }
    }
}

type Ket = [Complex64; DIM];

fn ket(amplitudes: &[(usize, f64)]) -> Ket {
    let mut v = [Complex64::new(0.0, 0.0); DIM];
    for &(m, a) in amplitudes {
        v[m] = Complex64::new(a, 0.0);
    }
    v
}

fn projector(v: &Ket) -> Matrix8 {
    Matrix8::from_fn(|m, n| v[m] * v[n].conj())
}

pub fn ghz_ket() -> Ket {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    ket(&[(0b000, a), (0b111, a)])
}

pub fn w_ket() -> Ket {
    let a = 1.0 / 3f64.sqrt();
    ket(&[(0b100, a), (0b010, a), (0b001, a)])
}

pub fn wbar_ket() -> Ket {
    let a = 1.0 / 3f64.sqrt();
    ket(&[(0b011, a), (0b101, a), (0b110, a)])
}

pub fn wwbar_ket() -> Ket {
    let a = 1.0 / 6f64.sqrt();
    ket(&[
        (0b100, a),
        (0b010, a),
        (0b001, a),
        (0b011, a),
        (0b101, a),
        (0b110, a),
    ])
}

pub fn star_ket() -> Ket {
    ket(&[(0b000, 0.5), (0b100, 0.5), (0b101, 0.5), (0b111, 0.5)])
}

fn maximally_mixed() -> Matrix8 {
    Matrix8::identity() * Complex64::new(1.0 / DIM as f64, 0.0)
}

fn mix(p: f64, a: &Matrix8, b: &Matrix8) -> Matrix8 {
    a * Complex64::new(p, 0.0) + b * Complex64::new(1.0 - p, 0.0)
}

/// Density matrix of the requested initial state.
pub fn make_state(kind: StateKind) -> Result<DensityMatrix> {
    kind.validate()?;
    let m = match kind {
        StateKind::Ghz => projector(&ghz_ket()),
        StateKind::W => projector(&w_ket()),
        StateKind::Wbar => projector(&wbar_ket()),
        StateKind::WWbar => projector(&wwbar_ket()),
        StateKind::Star => projector(&star_ket()),
        StateKind::MixGhzW(p) => mix(p, &projector(&ghz_ket()), &projector(&w_ket())),
        StateKind::WernerGhz(p) => mix(p, &projector(&ghz_ket()), &maximally_mixed()),
        StateKind::WernerW(p) => mix(p, &projector(&w_ket()), &maximally_mixed()),
    };
    DensityMatrix::new(m)
}
