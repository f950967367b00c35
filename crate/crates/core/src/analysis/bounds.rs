use core::f64::consts::FRAC_PI_2;

use super::{check_alpha, check_positive, check_rank, check_zf, probability, AnalysisError};
use crate::numerics::{
    binomial, incomplete_beta, incomplete_beta_complement, interference_tail_integral, GainLaw,
};

/// Which side of the Alzer bracket to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Upper,
    Lower,
}

/// `(β1, β2)` for `g = x·γ·l`:
///
/// * `β1 = [1 - (2 g^(2/α) / α) · B(2/α, 1 - 2/α, 1/(1+g))]^(k-1)`, the
///   Laplace factor of the k-1 SBSs closer than the server;
/// * `β2 = (2 g^(2/α) / α) · B'(2/α, 1 - 2/α, 1/(1+g))`, the normalized
///   exponent of the SBSs beyond it.
pub fn mf_bound_factors(
    x: f64,
    gamma: f64,
    alpha: f64,
    l: usize,
    k: usize,
) -> Result<(f64, f64), AnalysisError> {
    let g = x * gamma * l as f64;
    let delta = 2.0 / alpha;
    let scale = delta * libm::pow(g, delta);
    let z = 1.0 / (1.0 + g);
    let inner = 1.0 - scale * incomplete_beta(delta, 1.0 - delta, z)?;
    let beta1 = libm::pow(inner.max(0.0), (k - 1) as f64);
    let beta2 = scale * incomplete_beta_complement(delta, 1.0 - delta, z)?;
    Ok((beta1, beta2))
}

/// Alzer bounds on MF coverage when served by the k-th nearest SBS.
///
/// The upper bound uses `x = (L!)^(-1/L)`, the lower one `x = 1`; they
/// coincide for a single antenna.
pub fn coverage_mf_bound(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    kind: BoundKind,
) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_positive("gamma", gamma)?;
    check_alpha(alpha)?;
    let law = GainLaw::new(antennas)?;
    let x = match kind {
        BoundKind::Upper => law.alzer_constant(),
        BoundKind::Lower => 1.0,
    };
    let mut sum = 0.0;
    for l in 1..=antennas {
        let (beta1, beta2) = mf_bound_factors(x, gamma, alpha, l, k)?;
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binomial(antennas, l) * beta1 / libm::pow(1.0 + beta2, k as f64);
    }
    probability(sum)
}

/// Single-antenna MF coverage at α = 4:
/// `(1 - √γ·asin(1/√(1+γ)))^(k-1) / (1 + √γ·acos(1/√(1+γ)))^k`.
pub fn coverage_closed_form_mf(k: usize, gamma: f64) -> Result<f64, AnalysisError> {
    check_positive("gamma", gamma)?;
    if k == 0 {
        return Err(AnalysisError::InvalidRank { k, cluster_size: 0 });
    }
    let root = libm::sqrt(gamma);
    let t = 1.0 / libm::sqrt(1.0 + gamma);
    let near = 1.0 - root * libm::asin(t);
    let far = 1.0 + root * libm::acos(t);
    probability(libm::pow(near, (k - 1) as f64) / libm::pow(far, k as f64))
}

/// `A(x) = ∫_x^∞ du / (1 + u^(α/2))`, analytic at α = 4.
fn tail(x: f64, alpha: f64) -> Result<f64, AnalysisError> {
    if alpha == 4.0 {
        Ok(FRAC_PI_2 - libm::atan(x))
    } else {
        Ok(interference_tail_integral(x, alpha)?)
    }
}

/// Approximate bounds on ZF coverage, replacing the ratio `δ_k² = (r_k/r_K)²`
/// inside the interference integral by its mean `k/K`.
///
/// The upper bound uses `κ = ((L-K+1)!)^(-1/(L-K+1))`, the lower one `κ = 1`;
/// they coincide when `L = K`.
pub fn coverage_zf_bound(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    kind: BoundKind,
) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_zf(antennas, cluster_size)?;
    check_positive("gamma", gamma)?;
    check_alpha(alpha)?;
    let shape = antennas + 1 - cluster_size;
    let law = GainLaw::new(shape)?;
    let kappa = match kind {
        BoundKind::Upper => law.alzer_constant(),
        BoundKind::Lower => 1.0,
    };
    let ratio = libm::sqrt(k as f64 / cluster_size as f64);
    let mut sum = 0.0;
    for l in 1..=shape {
        let g = libm::pow(kappa * gamma * l as f64, 2.0 / alpha);
        let denom = 1.0 + g * ratio * tail(1.0 / (ratio * g), alpha)?;
        let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binomial(shape, l) / libm::pow(denom, k as f64);
    }
    probability(sum)
}

/// ZF coverage for `L = K`, α = 4, obtained by specializing the general
/// approximate bound: `1 / [1 + √(kγ/K)·arccot(√(K/(kγ)))]^k`.
pub fn coverage_closed_form_zf(k: usize, cluster_size: usize, gamma: f64) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_positive("gamma", gamma)?;
    let q = k as f64 * gamma / cluster_size as f64;
    let root = libm::sqrt(q);
    // arccot(1/√q) = atan(√q)
    probability(1.0 / libm::pow(1.0 + root * libm::atan(root), k as f64))
}

/// The alternative reading `1 / [1 + √(kγ/K)·arccot(K/(kγ))]^k`. It agrees
/// with [`coverage_closed_form_zf`] only at `kγ = K`; kept for comparison.
pub fn coverage_closed_form_zf_printed(
    k: usize,
    cluster_size: usize,
    gamma: f64,
) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_positive("gamma", gamma)?;
    let q = k as f64 * gamma / cluster_size as f64;
    probability(1.0 / libm::pow(1.0 + libm::sqrt(q) * libm::atan(q), k as f64))
}
