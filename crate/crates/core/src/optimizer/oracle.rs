use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{validated_coverage, OptimizerError};
use crate::analysis::CoverageTable;
use crate::content::{CachePolicy, ContentParams};
use crate::network::RngStream;

/// Largest library the brute-force search accepts.
pub const ORACLE_MAX_FILES: usize = 6;

const STARTS: u64 = 20;
const ORACLE_SEED: u64 = 0x0b5e_55ed;
const MAX_STEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub policy: CachePolicy,
    pub stp: f64,
    /// Final objective reached from every random start.
    pub start_values: Vec<f64>,
}

fn objective(b: &[f64], p: &[f64], coverage: &[f64]) -> f64 {
    b.iter()
        .zip(p)
        .map(|(&bn, &pn)| {
            let mut s = 0.0;
            for (i, &pk) in coverage.iter().enumerate() {
                s += bn * libm::pow(1.0 - bn, i as f64) * pk;
            }
            pn * s
        })
        .sum()
}

/// `∂/∂b_n` written as the product-rule expansion
/// `p_n Σ_k P^k [(1-b)^(k-1) - (k-1) b (1-b)^(k-2)]`.
fn gradient(b: &[f64], p: &[f64], coverage: &[f64], out: &mut [f64]) {
    for ((g, &bn), &pn) in out.iter_mut().zip(b).zip(p) {
        let mut s = 0.0;
        for (i, &pk) in coverage.iter().enumerate() {
            let first = libm::pow(1.0 - bn, i as f64);
            let second = if i == 0 {
                0.0
            } else {
                i as f64 * bn * libm::pow(1.0 - bn, (i - 1) as f64)
            };
            s += pk * (first - second);
        }
        *g = pn * s;
    }
}

/// Euclidean projection onto `{0 ≤ b ≤ 1, Σ b = M}`: `b = clip(y - τ)` with
/// the shift `τ` found by bisection.
fn project(y: &[f64], budget: f64, out: &mut [f64]) {
    let shifted = |tau: f64| -> f64 { y.iter().map(|v| (v - tau).clamp(0.0, 1.0)).sum() };
    let mut lo = y.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if shifted(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    for (o, v) in out.iter_mut().zip(y) {
        *o = (v - tau).clamp(0.0, 1.0);
    }
}

/// Moves mass between pairs of files while that improves the objective,
/// shrinking the step from `resolution` down to 1e-12.
fn exchange_refine(b: &mut [f64], p: &[f64], coverage: &[f64], resolution: f64) {
    let mut step = resolution;
    let mut best = objective(b, p, coverage);
    while step >= 1e-12 {
        let mut improved = false;
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i == j {
                    continue;
                }
                let t = step.min(b[i]).min(1.0 - b[j]);
                if t <= 0.0 {
                    continue;
                }
                b[i] -= t;
                b[j] += t;
                let v = objective(b, p, coverage);
                if v > best {
                    best = v;
                    improved = true;
                } else {
                    b[i] += t;
                    b[j] -= t;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
}

/// Independent optimum for small libraries: projected-gradient ascent from
/// 20 random feasible starts, each polished by pairwise mass exchange.
pub fn brute_force_oracle(
    content: &ContentParams,
    coverage: &CoverageTable,
    grid_resolution: f64,
) -> Result<OracleResult, OptimizerError> {
    let n = content.library_size();
    if n > ORACLE_MAX_FILES {
        return Err(OptimizerError::TooManyFiles { files: n, max: ORACLE_MAX_FILES });
    }
    if !(grid_resolution > 0.0 && grid_resolution <= 1.0) {
        return Err(OptimizerError::InvalidEpsilon(grid_resolution));
    }
    let values = validated_coverage(coverage)?;
    let p = content.popularity();
    let budget = (content.cache_size() as f64).min(n as f64);

    let curvature: f64 = values.iter().enumerate().map(|(i, &pk)| 2.0 * ((i + 1) * (i + 1)) as f64 * pk).sum();
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let step = 1.0 / (p_max * curvature).max(1e-12);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut start_values = Vec::with_capacity(STARTS as usize);
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for start in 0..STARTS {
        let mut rng = RngStream::new(ORACLE_SEED, start).rng();
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut b = vec![0.0; n];
        project(&raw, budget, &mut b);
        for _ in 0..MAX_STEPS {
            gradient(&b, p, values, &mut grad);
            for ((t, &bi), &gi) in trial.iter_mut().zip(&b).zip(&grad) {
                *t = bi + step * gi;
            }
            let mut next = vec![0.0; n];
            project(&trial, budget, &mut next);
            let moved = next.iter().zip(&b).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
            b = next;
            if moved < 1e-14 {
                break;
            }
        }
        exchange_refine(&mut b, p, values, grid_resolution);
        let v = objective(&b, p, values);
        start_values.push(v);
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, b));
        }
    }
    let (stp, b) = best.expect("at least one start");
    Ok(OracleResult { policy: CachePolicy::new(b)?, stp, start_values })
}
