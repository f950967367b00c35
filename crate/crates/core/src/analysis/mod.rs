//! Analytical coverage probabilities, distance laws and the STP formula.
//!
//! Every SIR target is linear. Results that leave `[0, 1]` by at most 1e-9
//! are clamped; larger excursions are reported as errors.

mod bounds;
mod distance;
mod exact;
mod stp;
mod table;

pub use bounds::{
    coverage_closed_form_mf, coverage_closed_form_zf, coverage_closed_form_zf_printed,
    coverage_mf_bound, coverage_zf_bound, mf_bound_factors, BoundKind,
};
pub use distance::{distance_pdf, ratio_second_moment, DistanceLaw};
pub use exact::{
    ball_derivatives, coverage_mf_exact, coverage_mf_exact_with, coverage_zf_exact,
    coverage_zf_exact_with, ring_derivatives, InterferenceLaplace,
};
pub use stp::{stp_analytic, stp_per_file};
pub use table::{coverage_table, CoverageTable, Method};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("parameter `{name}` = {value} is invalid")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("serving rank {k} is outside 1..={cluster_size}")]
    InvalidRank { k: usize, cluster_size: usize },
    #[error("zero forcing needs at least K = {cluster_size} antennas, got {antennas}")]
    TooFewAntennas { antennas: usize, cluster_size: usize },
    #[error("computed probability {value} is outside [0, 1]")]
    OutOfRange { value: f64 },
    #[error("expected {expected} entries, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coverage table ({method}) increases from k = {k} to k = {}", k + 1)]
    NotMonotone { method: &'static str, k: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Content(#[from] crate::content::ContentError),
}

const CLAMP_SLACK: f64 = 1e-9;

/// Clamps quadrature roundoff back into `[0, 1]`.
pub(crate) fn probability(value: f64) -> Result<f64, AnalysisError> {
    if !value.is_finite() || value < -CLAMP_SLACK || value > 1.0 + CLAMP_SLACK {
        return Err(AnalysisError::OutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<(), AnalysisError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::InvalidParameter { name, value })
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), AnalysisError> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::InvalidParameter { name: "alpha", value: alpha })
    }
}

pub(crate) fn check_rank(k: usize, cluster_size: usize) -> Result<(), AnalysisError> {
    if k >= 1 && k <= cluster_size {
        Ok(())
    } else {
        Err(AnalysisError::InvalidRank { k, cluster_size })
    }
}

pub(crate) fn check_zf(antennas: usize, cluster_size: usize) -> Result<(), AnalysisError> {
    if antennas >= cluster_size {
        Ok(())
    } else {
        Err(AnalysisError::TooFewAntennas { antennas, cluster_size })
    }
}
