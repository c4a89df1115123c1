//! Special functions and quadrature used by the Bogoliubov layer.

mod kummer;
mod quadrature;

pub use kummer::{kummer_m, kummer_m_with, KummerConfig, KummerParams};
pub use quadrature::{
    fourier_tail, integrate_adaptive, oscillatory_integral, wynn_epsilon, QuadResult,
    QuadratureSpec,
};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("|z| = {z_abs} exceeds the validated cap {cap}")]
    DomainCap { z_abs: f64, cap: f64 },
    #[error("no convergence after {evaluations} steps: best estimate {estimate}, error bound {error:e}")]
    NonConvergence {
        estimate: Complex64,
        error: f64,
        evaluations: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
