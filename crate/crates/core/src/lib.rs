//! Complexified von Roos position-dependent-mass Hamiltonians.
//!
//! A reference Hamiltonian `H_q = -d^2/dq^2 + V_eff(q)` built from a
//! generator `F(q)` is mapped to an isospectral target Hamiltonian `H_x`
//! for each admissible ordering `(alpha, beta, gamma)` through
//! `q'(x) = 1/mu(x)`. The crate discretizes both pictures, solves them with
//! a dense complex eigensolver, and checks isospectrality, the intertwining
//! relation `eta H = H^dagger eta` and the closed-form spectra.

pub mod cli;
pub mod config;
pub mod discretize;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod model;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
