//! Complex special functions: log-gamma, digamma, Gauss 2F1, and the
//! hypergeometric solution pair normalized at infinity.

pub mod gamma;
pub mod hyp2f1;
pub mod ode;
pub mod pair;

pub use gamma::{digamma, gamma, gamma_ratio, ln_gamma, rgamma};
pub use hyp2f1::{gauss_2f1, gauss_2f1_d, gauss_2f1_with, Degenerate, HypParams, Method};
pub use ode::SecondOrderOde;
pub use pair::{hyp_pair_at_infinity, HypPair};
