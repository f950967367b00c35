use alloc::vec::Vec;

use rand::Rng;

use super::ModelError;
use crate::content::{CachePolicy, ContentError};

/// Interval-stacking layout of a caching policy: file `n` occupies
/// `[c_n, c_n + b_n)` on the line `[0, M)`, cut into `M` unit bins.
///
/// A single uniform height `u` selects, in each bin `m`, the file covering
/// `m + u`. Since every `b_n ≤ 1`, no file is picked twice and file `n` is
/// cached with probability exactly `b_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheLayout {
    /// `c_0 = 0, c_n = b_0 + … + b_{n-1}`; length `N + 1`.
    offsets: Vec<f64>,
    cache_size: usize,
}

impl CacheLayout {
    pub fn new(policy: &CachePolicy, cache_size: usize) -> Result<Self, ModelError> {
        let b = policy.probabilities();
        for (index, &value) in b.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ContentError::InvalidProbability { index, value }.into());
            }
        }
        let mut offsets = Vec::with_capacity(b.len() + 1);
        let mut acc = 0.0;
        offsets.push(acc);
        for &v in b {
            acc += v;
            offsets.push(acc);
        }
        if acc > cache_size as f64 + 1e-9 {
            return Err(ContentError::BudgetExceeded { sum: acc, cache_size }.into());
        }
        Ok(Self { offsets, cache_size })
    }

    pub fn library_size(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    /// Whether file `n` is cached at height `u ∈ [0, 1)`.
    pub fn contains(&self, n: usize, u: f64) -> bool {
        let (lo, hi) = (self.offsets[n], self.offsets[n + 1]);
        if hi <= lo {
            return false;
        }
        // First bin whose height m + u reaches lo.
        let m = libm::ceil(lo - u).max(0.0);
        m < self.cache_size as f64 && m + u < hi
    }

    /// Indices of the cached files at height `u`, ascending.
    pub fn realize(&self, u: f64) -> Vec<usize> {
        let n_files = self.library_size();
        let mut out = Vec::with_capacity(self.cache_size.min(n_files));
        for m in 0..self.cache_size {
            let h = m as f64 + u;
            // Largest n with offsets[n] <= h.
            let n = self.offsets.partition_point(|&c| c <= h);
            if n == 0 || n > n_files {
                continue;
            }
            let file = n - 1;
            if h < self.offsets[file + 1] && out.last() != Some(&file) {
                out.push(file);
            }
        }
        out
    }
}

/// Draws one SBS's cache content: at most `M` files, file `n` cached with
/// probability `b_n`.
pub fn sample_cache_realization<R: Rng + ?Sized>(
    policy: &CachePolicy,
    cache_size: usize,
    rng: &mut R,
) -> Result<Vec<usize>, ModelError> {
    let layout = CacheLayout::new(policy, cache_size)?;
    Ok(layout.realize(rng.random::<f64>()))
}
