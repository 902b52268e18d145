//! Explicit diagonalization of the finite Hilbert transform on two touching
//! intervals [b_L, 0] and [0, b_R], via a 2x2 Riemann-Hilbert problem with a
//! closed-form hypergeometric solution.

pub mod asymptotics;
pub mod complexfn;
pub mod diagonalization;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod rhp;
pub mod spectral;
pub mod sturm_liouville;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{Mat2, Pt, Shore, Side, C64};
