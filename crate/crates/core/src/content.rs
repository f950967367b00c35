//! File library, popularity and caching probabilities.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContentError {
    #[error("library must contain at least one file")]
    EmptyLibrary,
    #[error("popularity of file {index} is {value}, expected a finite value >= 0")]
    InvalidPopularity { index: usize, value: f64 },
    #[error("popularity sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("caching probability of file {index} is {value}, expected a value in [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("caching probabilities sum to {sum}, exceeding the cache size {cache_size}")]
    BudgetExceeded { sum: f64, cache_size: usize },
    #[error("zipf skewness must be finite and >= 0, got {0}")]
    InvalidSkewness(f64),
    #[error("policy has {policy} entries but the library has {library} files")]
    LengthMismatch { policy: usize, library: usize },
}

/// Zipf request probabilities `p_n = n^(-δ) / Σ_j j^(-δ)`, `n = 1..=N`.
pub fn zipf_popularity(library_size: usize, delta: f64) -> Result<Vec<f64>, ContentError> {
    if library_size == 0 {
        return Err(ContentError::EmptyLibrary);
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(ContentError::InvalidSkewness(delta));
    }
    let weights: Vec<f64> = (1..=library_size)
        .map(|n| libm::pow(n as f64, -delta))
        .collect();
    let total = pairwise_sum(&weights);
    Ok(weights.into_iter().map(|w| w / total).collect())
}

pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Request popularity together with the per-SBS cache size `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentParams {
    popularity: Vec<f64>,
    cache_size: usize,
}

impl ContentParams {
    pub fn new(popularity: Vec<f64>, cache_size: usize) -> Result<Self, ContentError> {
        if popularity.is_empty() {
            return Err(ContentError::EmptyLibrary);
        }
        for (index, &value) in popularity.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ContentError::InvalidPopularity { index, value });
            }
        }
        let total = pairwise_sum(&popularity);
        if (total - 1.0).abs() > 1e-9 {
            return Err(ContentError::NotNormalized(total));
        }
        Ok(Self {
            popularity,
            cache_size,
        })
    }

    pub fn zipf(library_size: usize, delta: f64, cache_size: usize) -> Result<Self, ContentError> {
        Self::new(zipf_popularity(library_size, delta)?, cache_size)
    }

    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }

    pub fn library_size(&self) -> usize {
        self.popularity.len()
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }
}

/// Per-file caching probabilities `b_n`, shared by every SBS.
#[derive(Debug, Clone, PartialEq)]
pub struct CachePolicy {
    probabilities: Vec<f64>,
}

impl CachePolicy {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, ContentError> {
        for (index, &value) in probabilities.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ContentError::InvalidProbability { index, value });
            }
        }
        Ok(Self { probabilities })
    }

    pub fn zeros(library_size: usize) -> Self {
        Self {
            probabilities: vec![0.0; library_size],
        }
    }

    pub fn uniform(library_size: usize, cache_size: usize) -> Self {
        let b = (cache_size as f64 / library_size as f64).min(1.0);
        Self {
            probabilities: vec![b; library_size],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probabilities)
    }

    /// Checks `Σ b_n ≤ M` (with 1e-9 slack) and the library length.
    pub fn check_budget(&self, content: &ContentParams) -> Result<(), ContentError> {
        if self.len() != content.library_size() {
            return Err(ContentError::LengthMismatch {
                policy: self.len(),
                library: content.library_size(),
            });
        }
        let sum = self.total();
        if sum > content.cache_size() as f64 + 1e-9 {
            return Err(ContentError::BudgetExceeded {
                sum,
                cache_size: content.cache_size(),
            });
        }
        Ok(())
    }

    /// Largest absolute per-file difference.
    pub fn max_abs_diff(&self, other: &CachePolicy) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zipf_anchors() {
        assert_eq!(zipf_popularity(1, 0.9).unwrap(), vec![1.0]);
        let u = zipf_popularity(8, 0.0).unwrap();
        assert!(u.iter().all(|&p| (p - 0.125).abs() < 1e-15));

        let p = zipf_popularity(100, 0.9).unwrap();
        let harmonic: f64 = (1..=100).map(|n| 1.0 / libm::pow(n as f64, 0.9)).sum();
        assert!((p[0] - 1.0 / harmonic).abs() < 1e-14);
        assert!((p[0] - 0.155_600).abs() < 1e-6);
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zipf_errors() {
        assert_eq!(zipf_popularity(0, 1.0), Err(ContentError::EmptyLibrary));
        assert!(zipf_popularity(3, -0.5).is_err());
        assert!(zipf_popularity(3, f64::NAN).is_err());
    }

    #[test]
    fn content_validation() {
        assert!(ContentParams::new(vec![0.5, 0.4], 1).is_err());
        assert!(ContentParams::new(vec![0.5, -0.1, 0.6], 1).is_err());
        assert!(ContentParams::new(vec![0.5, 0.5], 1).is_ok());
    }

    #[test]
    fn policy_validation() {
        assert!(CachePolicy::new(vec![0.2, 1.1]).is_err());
        assert!(CachePolicy::new(vec![-0.1]).is_err());
        let content = ContentParams::new(vec![0.5, 0.3, 0.2], 1).unwrap();
        let p = CachePolicy::new(vec![0.6, 0.6, 0.0]).unwrap();
        assert!(matches!(
            p.check_budget(&content),
            Err(ContentError::BudgetExceeded { .. })
        ));
        assert!(CachePolicy::new(vec![0.5, 0.5, 0.0])
            .unwrap()
            .check_budget(&content)
            .is_ok());
    }
}
