//! Coherence dynamics of three-qubit states in non-Markovian Ohmic dephasing
//! reservoirs at finite temperature, and temperature estimation from the
//! resulting coherence decay.
//!
//! The pipeline is
//! [`states`] -> [`bath`] -> [`dynamics`] -> [`coherence`] -> [`thermometry`].

// `!(x >= 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod error;
pub mod grid;
pub mod quadrature;
pub mod states;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub mod coherence;
pub mod dynamics;
pub mod thermometry;
