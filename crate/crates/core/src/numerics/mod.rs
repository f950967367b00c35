//! Special functions, quadrature, Laplace-transform derivative recursions and
//! small complex linear algebra.
//!
//! All routines are pure and reentrant.

mod laplace;
mod linalg;
mod quadrature;
mod special;

pub use laplace::{
    exp_derivatives, laplace_derivatives, laplace_derivatives_product, leibniz_product,
    power_derivatives, DerivativeSource, MAX_DERIVATIVE_ORDER,
};
pub use linalg::{zf_project, ComplexMatrix, ComplexVector, ZfWorkspace, RANK_THRESHOLD};
pub use quadrature::{integrate, integrate_to_infinity, Integral, QuadratureSpec};
pub use special::{
    alzer_bounds, binomial, complete_beta, gamma_ccdf, incomplete_beta,
    incomplete_beta_complement, incomplete_beta_with, interference_tail_integral,
    interference_tail_integral_with, ln_factorial, GainLaw,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument `{name}` = {value} is outside the domain of {function}")]
    Domain {
        function: &'static str,
        name: &'static str,
        value: f64,
    },
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(&'static str),
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate}, error {error})"
    )]
    NotConverged {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("derivative order {requested} exceeds the supported maximum {max}")]
    OrderOverflow { requested: usize, max: usize },
    #[error("derivative source returned {got} values, expected {expected}")]
    DerivativeLength { expected: usize, got: usize },
    #[error("derivative of order {order} violates complete monotonicity (value {value})")]
    SignViolation { order: usize, value: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("rank-deficient interference channels (conditioning estimate {estimate:e})")]
    RankDeficient { estimate: f64 },
}

pub(crate) fn check_domain(
    ok: bool,
    function: &'static str,
    name: &'static str,
    value: f64,
) -> Result<(), NumericsError> {
    if ok {
        Ok(())
    } else {
        Err(NumericsError::Domain {
            function,
            name,
            value,
        })
    }
}
