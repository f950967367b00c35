use alloc::vec::Vec;

use super::{validated_coverage, OptimizerError};
use crate::analysis::{stp_analytic, CoverageTable};
use crate::content::{pairwise_sum, CachePolicy, ContentParams};

/// Default width of the final multiplier bracket, relative to its initial
/// upper end.
pub const DEFAULT_EPSILON: f64 = 1e-12;

const MAX_OUTER_ITERATIONS: usize = 400;

/// `Σ_k (1-w)^(k-2) (1-kw) P^k`, the marginal STP gain of one file per unit
/// of popularity. The k = 1 term is `P^1`.
fn marginal(w: f64, coverage: &[f64]) -> f64 {
    let miss = 1.0 - w;
    let mut sum = coverage[0];
    let mut power = 1.0; // (1-w)^(k-2)
    for (i, &p) in coverage.iter().enumerate().skip(1) {
        let k = (i + 1) as f64;
        sum += power * (1.0 - k * w) * p;
        power *= miss;
    }
    sum
}

/// Stationarity residual of file `n` (0-based) at `b_n = w`:
/// `p_n Σ_k (1-w)^(k-2) (1-kw) P^k - μ`. Non-increasing in `w`.
pub fn stationarity_residual(
    w: f64,
    n: usize,
    mu: f64,
    popularity: &[f64],
    coverage: &CoverageTable,
) -> f64 {
    popularity[n] * marginal(w, coverage.values()) - mu
}

/// `b_n(μ) = min(1, [w_n(μ)]^+)` for a file of popularity `p`.
pub fn file_probability(p: f64, mu: f64, coverage: &[f64]) -> f64 {
    file_probability_side(p, mu, coverage, true)
}

/// At a degenerate point where both thresholds coincide, `prefer_one`
/// picks the left limit (1) over the right limit (0).
fn file_probability_side(p: f64, mu: f64, coverage: &[f64], prefer_one: bool) -> f64 {
    let top = p * coverage.iter().sum::<f64>();
    let bottom = p * (coverage[0] - coverage.get(1).copied().unwrap_or(0.0));
    if prefer_one && mu <= bottom {
        return 1.0;
    }
    if mu >= top {
        return 0.0;
    }
    if mu <= bottom {
        return 1.0;
    }
    // Residual is positive at 0 and negative at 1 here; bisect to the last
    // representable split.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p * marginal(mid, coverage) - mu > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Per-file optimal probabilities for multiplier `μ`, ignoring the budget.
pub fn cache_from_dual(
    mu: f64,
    popularity: &[f64],
    coverage: &CoverageTable,
) -> Result<CachePolicy, OptimizerError> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(OptimizerError::InvalidMultiplier(mu));
    }
    let values = validated_coverage(coverage)?;
    Ok(CachePolicy::new(
        popularity.iter().map(|&p| file_probability(p, mu, values)).collect(),
    )?)
}

/// Multiplier bracket of the outer bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub mu_l: f64,
    pub mu_u: f64,
    pub epsilon: f64,
    pub mu_star: f64,
    /// `b_n(μ*)` before the final budget repair.
    pub roots: Vec<f64>,
    pub iterations: usize,
}

/// KKT certificate of a returned policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// `max |residual|` over files with `0 < b_n < 1`.
    pub interior: f64,
    /// `min residual` over files with `b_n = 1` (should be ≥ 0).
    pub at_one: f64,
    /// `max residual` over files with `b_n = 0` (should be ≤ 0).
    pub at_zero: f64,
    /// `|Σ b_n - M|`.
    pub budget_gap: f64,
}

impl KktReport {
    /// Interior `≤ 1e-6 p_1`, boundary sign slack 1e-9, budget 1e-6.
    pub fn satisfied(&self, p_max: f64) -> bool {
        self.interior <= 1e-6 * p_max
            && self.at_one >= -1e-9
            && self.at_zero <= 1e-9
            && self.budget_gap <= 1e-6
    }

    fn compute(policy: &CachePolicy, mu: f64, popularity: &[f64], coverage: &[f64], budget: f64) -> Self {
        let mut r = KktReport {
            interior: 0.0,
            at_one: f64::INFINITY,
            at_zero: f64::NEG_INFINITY,
            budget_gap: (policy.total() - budget).abs(),
        };
        for (&b, &p) in policy.probabilities().iter().zip(popularity) {
            let res = p * marginal(b, coverage) - mu;
            if b >= 1.0 - 1e-12 {
                r.at_one = r.at_one.min(res);
            } else if b <= 1e-12 {
                r.at_zero = r.at_zero.max(res);
            } else {
                r.interior = r.interior.max(res.abs());
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    /// `M ≥ N`: caching every file is optimal and no search was run.
    Saturated,
    /// `M = 0`: nothing can be cached.
    EmptyCache,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub policy: CachePolicy,
    pub mu_star: f64,
    pub stp: f64,
    pub kkt: KktReport,
    pub status: Status,
    pub dual: DualState,
}

pub fn optimize_caching(
    content: &ContentParams,
    coverage: &CoverageTable,
) -> Result<OptimizationResult, OptimizerError> {
    optimize_caching_with(content, coverage, DEFAULT_EPSILON)
}

/// Bisection on `μ` until the bracket is narrower than `ε·μ_u`, followed by
/// an exact budget repair between the policies at the two bracket ends.
pub fn optimize_caching_with(
    content: &ContentParams,
    coverage: &CoverageTable,
    epsilon: f64,
) -> Result<OptimizationResult, OptimizerError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(OptimizerError::InvalidEpsilon(epsilon));
    }
    let values = validated_coverage(coverage)?;
    let p = content.popularity();
    let n_files = p.len();
    let m = content.cache_size();
    let budget = m as f64;
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let p_min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let total_cov: f64 = values.iter().sum();
    let gap12 = values[0] - values.get(1).copied().unwrap_or(0.0);

    let finish = |policy: CachePolicy, mu: f64, status: Status, dual: DualState| {
        let stp = stp_analytic(p, &policy, coverage)?;
        let kkt = KktReport::compute(&policy, mu, p, values, budget);
        Ok(OptimizationResult { policy, mu_star: mu, stp, kkt, status, dual })
    };

    if m >= n_files {
        let dual = DualState {
            mu_l: 0.0,
            mu_u: 0.0,
            epsilon,
            mu_star: 0.0,
            roots: alloc::vec![1.0; n_files],
            iterations: 0,
        };
        // Budget is slack: the reported gap is against N, not M.
        let mut r = finish(CachePolicy::new(alloc::vec![1.0; n_files])?, 0.0, Status::Saturated, dual)?;
        r.kkt.budget_gap = 0.0;
        return Ok(r);
    }
    if m == 0 {
        let mu = p_max * total_cov;
        let dual = DualState {
            mu_l: mu,
            mu_u: mu,
            epsilon,
            mu_star: mu,
            roots: alloc::vec![0.0; n_files],
            iterations: 0,
        };
        return finish(CachePolicy::zeros(n_files), mu, Status::EmptyCache, dual);
    }

    let sum_at_side = |mu: f64, prefer_one: bool| -> (Vec<f64>, f64) {
        let b: Vec<f64> = p
            .iter()
            .map(|&pn| file_probability_side(pn, mu, values, prefer_one))
            .collect();
        let s = pairwise_sum(&b);
        (b, s)
    };
    let sum_at = |mu: f64| sum_at_side(mu, true);

    // Σ b(μ_u) = 0 < M and Σ b(μ_l) = N > M.
    let mut mu_u = p_max * total_cov;
    let mut mu_l = p_min * gap12;
    let width = epsilon * mu_u;
    let mut iterations = 0;
    while mu_u - mu_l > width && iterations < MAX_OUTER_ITERATIONS {
        let mu = 0.5 * (mu_l + mu_u);
        if mu <= mu_l || mu >= mu_u {
            break;
        }
        let (_, s) = sum_at(mu);
        if s < budget {
            mu_u = mu;
        } else {
            mu_l = mu;
        }
        iterations += 1;
    }

    // Σ b(μ_l) ≥ M ≥ Σ b(μ_u); every convex combination is KKT at μ*
    // up to the bracket width, and one of them meets the budget exactly.
    let (b_l, s_l) = sum_at(mu_l);
    let (b_u, s_u) = sum_at_side(mu_u, false);
    let theta = if s_l > s_u { ((budget - s_u) / (s_l - s_u)).clamp(0.0, 1.0) } else { 1.0 };
    let mu_star = 0.5 * (mu_l + mu_u);
    let b: Vec<f64> = b_u
        .iter()
        .zip(&b_l)
        .map(|(&u, &l)| (u + theta * (l - u)).clamp(0.0, 1.0))
        .collect();
    let roots = sum_at(mu_star).0;
    let dual = DualState { mu_l, mu_u, epsilon, mu_star, roots, iterations };
    finish(CachePolicy::new(b)?, mu_star, Status::Converged, dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Method;
    use crate::network::Scheme;

    fn table(values: &[f64]) -> CoverageTable {
        CoverageTable::new(Scheme::Mf, Method::Upper, values.to_vec()).unwrap()
    }

    #[test]
    fn residual_endpoints() {
        let t = table(&[0.6, 0.3, 0.1]);
        let p = [0.7, 0.3];
        let r0 = stationarity_residual(0.0, 0, 0.05, &p, &t);
        assert!((r0 - (0.7 * 1.0 - 0.05)).abs() < 1e-15);
        let r1 = stationarity_residual(1.0, 1, 0.05, &p, &t);
        assert!((r1 - (0.3 * 0.3 - 0.05)).abs() < 1e-15);
    }

    #[test]
    fn root_matches_grid_scan() {
        let t = table(&[0.6, 0.3]);
        let p = [1.0];
        let mu = 0.55;
        let root = file_probability(1.0, mu, t.values());
        let grid = (0..=10_000)
            .map(|i| i as f64 / 10_000.0)
            .min_by(|a, b| {
                stationarity_residual(*a, 0, mu, &p, &t)
                    .abs()
                    .total_cmp(&stationarity_residual(*b, 0, mu, &p, &t).abs())
            })
            .unwrap();
        assert!((root - grid).abs() < 1e-4);
        assert!(stationarity_residual(root, 0, mu, &p, &t).abs() < 1e-12);
    }

    #[test]
    fn dual_extremes() {
        let t = table(&[0.6, 0.3]);
        let p = [0.5, 0.3, 0.2];
        let b = cache_from_dual(0.0, &p, &t).unwrap();
        assert!(b.probabilities().iter().all(|&v| v == 1.0));
        let b = cache_from_dual(0.5 * 0.9, &p, &t).unwrap();
        assert!(b.probabilities().iter().all(|&v| v == 0.0));
        assert!(cache_from_dual(-1.0, &p, &t).is_err());
    }

    #[test]
    fn uniform_popularity_is_flat() {
        let content = ContentParams::new(alloc::vec![0.1; 10], 3).unwrap();
        let r = optimize_caching(&content, &table(&[0.6, 0.3])).unwrap();
        assert!(r.policy.probabilities().iter().all(|&b| (b - 0.3).abs() <= 1e-9));
    }

    #[test]
    fn step_coverage_still_feasible() {
        // P^2 = 0 makes b_n(μ) jump; the repair must still meet the budget.
        let content = ContentParams::new(alloc::vec![0.25; 4], 2).unwrap();
        let r = optimize_caching(&content, &table(&[0.6, 0.0])).unwrap();
        assert!(r.kkt.budget_gap <= 1e-9);
        assert!(r.kkt.satisfied(0.25), "{:?}", r.kkt);
        assert!((r.stp - 0.3).abs() < 1e-9);
    }

    #[test]
    fn saturated_and_empty() {
        let t = table(&[0.6, 0.3]);
        let c = ContentParams::new(alloc::vec![0.5, 0.5], 3).unwrap();
        let r = optimize_caching(&c, &t).unwrap();
        assert_eq!(r.status, Status::Saturated);
        assert!((r.stp - 0.6).abs() < 1e-15);
        let c = ContentParams::new(alloc::vec![0.5, 0.5], 0).unwrap();
        let r = optimize_caching(&c, &t).unwrap();
        assert_eq!(r.status, Status::EmptyCache);
        assert_eq!(r.stp, 0.0);
    }

    #[test]
    fn rejects_non_monotone_coverage() {
        let c = ContentParams::new(alloc::vec![0.5, 0.5], 1).unwrap();
        let t = CoverageTable::new(Scheme::Mf, Method::Mc, alloc::vec![0.3, 0.4]).unwrap();
        assert!(matches!(optimize_caching(&c, &t), Err(OptimizerError::InvalidCoverage(_))));
    }
}
