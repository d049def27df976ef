//! Quantum discord and quantum work deficit of bipartite states, computed
//! both over the full set of rank-1 local projective measurements and over
//! small "earmarked" subsets of it.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense Hermitian primitives (Jacobi eigensolver, entropy,
//!   partial trace and transpose, Kronecker products).
//! - [`states`]: every density-matrix family used in the experiments, Haar
//!   fixed-rank sampling and the PPT test.
//! - [`measurements`]: measurement bases and the earmarked-set constructions.
//! - [`correlations`]: given-basis functionals, constrained minima, the
//!   numerical reference minimum and the voluntary error.
//! - [`closed_forms`]: analytic constrained values for X states and the
//!   2x4 bound entangled state.
//! - [`spin_models`]: the transverse-field XY chain via free fermions and the
//!   two-qubit thermal state.
//! - [`stats`]: ensemble statistics, power-law and linear fits, optimizer
//!   landscapes.
//! - [`cli`]: the batch experiment driver behind the `qcorr` binary.
//!
//! All entropies are in bits.

pub mod cli;
pub mod closed_forms;
pub mod correlations;
mod error;
pub mod linalg;
pub mod measurements;
pub mod optimize;
pub mod rng;
pub mod spin_models;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
