use core::f64::consts::PI;

use super::{check_positive, check_rank, AnalysisError};
use crate::numerics::{gamma_ccdf, integrate, ln_factorial, NumericsError, QuadratureSpec};

/// Distance distributions of a PPP seen from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceLaw {
    /// `r_k`, distance to the k-th nearest point (generalized Gamma).
    KthNearest { lambda_b: f64, k: usize },
    /// `r_k` given `r_K = outer_radius`: k-th nearest of the K-1 points
    /// uniform in the disk of that radius. Requires `k < K`.
    Conditional { k: usize, cluster_size: usize, outer_radius: f64 },
    /// Joint law of `(r_k, r_K)` on `0 ≤ r_k ≤ r_K`. Requires `k < K`.
    Joint { lambda_b: f64, k: usize, cluster_size: usize },
    /// `δ_k = r_k / r_K` on `[0, 1]`, independent of `r_K`. Requires `k < K`.
    Ratio { k: usize, cluster_size: usize },
}

fn check_inner_rank(k: usize, cluster_size: usize) -> Result<(), AnalysisError> {
    check_rank(k, cluster_size)?;
    if k == cluster_size {
        return Err(AnalysisError::InvalidRank { k, cluster_size: cluster_size - 1 });
    }
    Ok(())
}

fn off_support(value: f64) -> AnalysisError {
    NumericsError::Domain { function: "distance_pdf", name: "point", value }.into()
}

impl DistanceLaw {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        match *self {
            DistanceLaw::KthNearest { lambda_b, k } => {
                check_positive("lambda_b", lambda_b)?;
                if k == 0 {
                    return Err(AnalysisError::InvalidRank { k, cluster_size: 0 });
                }
                Ok(())
            }
            DistanceLaw::Conditional { k, cluster_size, outer_radius } => {
                check_positive("outer_radius", outer_radius)?;
                check_inner_rank(k, cluster_size)
            }
            DistanceLaw::Joint { lambda_b, k, cluster_size } => {
                check_positive("lambda_b", lambda_b)?;
                check_inner_rank(k, cluster_size)
            }
            DistanceLaw::Ratio { k, cluster_size } => check_inner_rank(k, cluster_size),
        }
    }

    /// Number of coordinates of a point of this law.
    pub fn dimension(&self) -> usize {
        match self {
            DistanceLaw::Joint { .. } => 2,
            _ => 1,
        }
    }

    /// Density of a univariate law at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64, AnalysisError> {
        self.validate()?;
        if x.is_nan() {
            return Err(off_support(x));
        }
        match *self {
            DistanceLaw::KthNearest { lambda_b, k } => {
                if x < 0.0 {
                    return Err(off_support(x));
                }
                if x == 0.0 {
                    return Ok(0.0);
                }
                let z = lambda_b * PI * x * x;
                // 2 z^k e^{-z} / (r Γ(k))
                let ln = core::f64::consts::LN_2 + k as f64 * libm::log(z) - z
                    - ln_factorial(k - 1)
                    - libm::log(x);
                Ok(libm::exp(ln))
            }
            DistanceLaw::Conditional { k, cluster_size, outer_radius } => {
                if !(0.0..=outer_radius).contains(&x) {
                    return Err(off_support(x));
                }
                Ok(ratio_pdf(k, cluster_size, x / outer_radius) / outer_radius)
            }
            DistanceLaw::Ratio { k, cluster_size } => {
                if !(0.0..=1.0).contains(&x) {
                    return Err(off_support(x));
                }
                Ok(ratio_pdf(k, cluster_size, x))
            }
            DistanceLaw::Joint { .. } => Err(NumericsError::Dimension(
                "joint distance law needs a point (r_k, r_K)",
            )
            .into()),
        }
    }

    /// Density of the joint law at `(r_k, r_K)`.
    pub fn joint_pdf(&self, r_k: f64, r_outer: f64) -> Result<f64, AnalysisError> {
        self.validate()?;
        let DistanceLaw::Joint { lambda_b, k, cluster_size } = *self else {
            return Err(NumericsError::Dimension("joint_pdf needs the joint law").into());
        };
        if !(r_k >= 0.0 && r_outer >= r_k && r_outer.is_finite()) {
            return Err(off_support(r_k));
        }
        if r_outer == 0.0 {
            return Ok(0.0);
        }
        let outer = DistanceLaw::KthNearest { lambda_b, k: cluster_size }.pdf(r_outer)?;
        let inner = DistanceLaw::Conditional { k, cluster_size, outer_radius: r_outer }.pdf(r_k)?;
        Ok(outer * inner)
    }

    /// CDF of a univariate law.
    pub fn cdf(&self, x: f64) -> Result<f64, AnalysisError> {
        self.validate()?;
        match *self {
            DistanceLaw::KthNearest { lambda_b, k } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok(1.0 - gamma_ccdf(lambda_b * PI * x * x, k)?)
            }
            DistanceLaw::Conditional { k, cluster_size, outer_radius } => {
                Ok(ratio_cdf(k, cluster_size, (x / outer_radius).clamp(0.0, 1.0)))
            }
            DistanceLaw::Ratio { k, cluster_size } => {
                Ok(ratio_cdf(k, cluster_size, x.clamp(0.0, 1.0)))
            }
            DistanceLaw::Joint { .. } => {
                Err(NumericsError::Dimension("joint law has no univariate CDF").into())
            }
        }
    }
}

/// `f_δ(x) = 2 (K-1)! / ((k-1)! (K-k-1)!) · x^(2k-1) (1-x²)^(K-k-1)`.
fn ratio_pdf(k: usize, cluster_size: usize, x: f64) -> f64 {
    let ln_c = core::f64::consts::LN_2 + ln_factorial(cluster_size - 1)
        - ln_factorial(k - 1)
        - ln_factorial(cluster_size - k - 1);
    let tail = cluster_size - k - 1;
    let base = if tail == 0 { 1.0 } else { libm::pow(1.0 - x * x, tail as f64) };
    libm::exp(ln_c) * libm::pow(x, (2 * k - 1) as f64) * base
}

/// `P[δ ≤ x] = 1 - Σ_{i<k} (K-1)! x^(2(k-1-i)) (1-x²)^(K-k+i) / ((K-k+i)! (k-1-i)!)`.
fn ratio_cdf(k: usize, cluster_size: usize, x: f64) -> f64 {
    let x2 = x * x;
    let mut sum = 0.0;
    for i in 0..k {
        let ln_c = ln_factorial(cluster_size - 1)
            - ln_factorial(cluster_size - k + i)
            - ln_factorial(k - 1 - i);
        sum += libm::exp(ln_c)
            * libm::pow(x2, (k - 1 - i) as f64)
            * libm::pow(1.0 - x2, (cluster_size - k + i) as f64);
    }
    (1.0 - sum).clamp(0.0, 1.0)
}

/// Evaluates `law` at `point` (one coordinate, or `(r_k, r_K)` for the joint law).
pub fn distance_pdf(law: &DistanceLaw, point: &[f64]) -> Result<f64, AnalysisError> {
    if point.len() != law.dimension() {
        return Err(AnalysisError::Dimension { expected: law.dimension(), got: point.len() });
    }
    match point {
        [x] => law.pdf(*x),
        [a, b] => law.joint_pdf(*a, *b),
        _ => unreachable!(),
    }
}

/// `E[δ_k²]` by quadrature over the ratio density.
pub fn ratio_second_moment(k: usize, cluster_size: usize) -> Result<f64, AnalysisError> {
    let law = DistanceLaw::Ratio { k, cluster_size };
    law.validate()?;
    let spec = QuadratureSpec::new(1e-12, 1e-14, 2000)?;
    Ok(integrate(|x| x * x * ratio_pdf(k, cluster_size, x), 0.0, 1.0, &spec)?.value)
}
