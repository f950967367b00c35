//! Cache placement: maximize the STP over caching probabilities subject to
//! `Σ b_n = M`, `0 ≤ b_n ≤ 1`.
//!
//! The objective is separable and concave, so the optimum is characterized
//! by a single multiplier `μ` on the budget: each `b_n(μ)` solves its own
//! stationarity condition, and `μ` is found by bisection on `Σ b_n(μ) = M`.

mod dual;
mod oracle;

pub use dual::{
    cache_from_dual, file_probability, optimize_caching, optimize_caching_with, stationarity_residual,
    DualState, KktReport, OptimizationResult, Status, DEFAULT_EPSILON,
};
pub use oracle::{brute_force_oracle, OracleResult, ORACLE_MAX_FILES};

use alloc::vec::Vec;

use thiserror::Error;

use crate::analysis::{AnalysisError, CoverageTable};
use crate::content::{CachePolicy, ContentError, ContentParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("coverage table is unusable: {0}")]
    InvalidCoverage(#[source] AnalysisError),
    #[error("multiplier {0} must be finite and >= 0")]
    InvalidMultiplier(f64),
    #[error("tolerance {0} must be positive and finite")]
    InvalidEpsilon(f64),
    #[error("brute-force search supports at most {max} files, got {files}")]
    TooManyFiles { files: usize, max: usize },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Content(#[from] ContentError),
}

/// Most-popular caching: the `M` most popular files with certainty, ties to
/// the lowest index.
pub fn mpc_policy(content: &ContentParams) -> CachePolicy {
    let p = content.popularity();
    let mut order: Vec<usize> = (0..p.len()).collect();
    // Stable sort keeps the lowest index first among equal popularities.
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    let mut b = alloc::vec![0.0; p.len()];
    for &n in order.iter().take(content.cache_size()) {
        b[n] = 1.0;
    }
    CachePolicy::new(b).expect("0/1 probabilities are valid")
}

pub(crate) fn validated_coverage(coverage: &CoverageTable) -> Result<&[f64], OptimizerError> {
    coverage.check_monotone(1e-12).map_err(OptimizerError::InvalidCoverage)?;
    Ok(coverage.values())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mpc_examples() {
        let c = ContentParams::new(vec![0.5, 0.3, 0.2], 1).unwrap();
        assert_eq!(mpc_policy(&c).probabilities(), &[1.0, 0.0, 0.0]);
        let c = ContentParams::new(vec![0.2, 0.3, 0.5], 3).unwrap();
        assert_eq!(mpc_policy(&c).probabilities(), &[1.0, 1.0, 1.0]);
        let c = ContentParams::new(vec![0.25; 4], 2).unwrap();
        assert_eq!(mpc_policy(&c).probabilities(), &[1.0, 1.0, 0.0, 0.0]);
    }
}
