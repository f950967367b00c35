use super::{AnalysisError, CoverageTable};
use crate::content::CachePolicy;

/// Success probability for one file cached with probability `b`:
/// `Σ_k b (1-b)^(k-1) P^k`, i.e. the nearest holder is the k-th nearest SBS
/// with probability `b (1-b)^(k-1)`.
pub fn stp_per_file(b: f64, coverage: &[f64]) -> f64 {
    let miss = 1.0 - b;
    let mut reach = b;
    let mut sum = 0.0;
    for &p in coverage {
        sum += reach * p;
        reach *= miss;
    }
    sum
}

/// Successful transmission probability `Σ_n p_n Σ_k b_n (1-b_n)^(k-1) P^k`.
pub fn stp_analytic(
    popularity: &[f64],
    policy: &CachePolicy,
    coverage: &CoverageTable,
) -> Result<f64, AnalysisError> {
    if popularity.len() != policy.len() {
        return Err(AnalysisError::Dimension { expected: popularity.len(), got: policy.len() });
    }
    let total: f64 = popularity.iter().sum();
    if popularity.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(AnalysisError::InvalidParameter { name: "popularity", value: total });
    }
    let values = coverage.values();
    let terms: alloc::vec::Vec<f64> = popularity
        .iter()
        .zip(policy.probabilities())
        .map(|(&p, &b)| p * stp_per_file(b, values))
        .collect();
    super::probability(crate::content::pairwise_sum(&terms))
}
