use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use super::distance::DistanceLaw;
use super::{check_alpha, check_positive, check_rank, check_zf, probability, AnalysisError};
use crate::numerics::{
    exp_derivatives, gamma_ccdf, integrate, integrate_to_infinity, laplace_derivatives,
    laplace_derivatives_product, leibniz_product, power_derivatives, DerivativeSource,
    NumericsError, QuadratureSpec, MAX_DERIVATIVE_ORDER,
};

/// Tail mass of the serving-distance law left out of the outer integrals.
const TRUNCATION_MASS: f64 = 1e-10;

fn factorial(j: usize) -> f64 {
    (1..=j).fold(1.0, |acc, i| acc * i as f64)
}

fn check_order(order: usize) -> Result<(), AnalysisError> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(NumericsError::OrderOverflow { requested: order, max: MAX_DERIVATIVE_ORDER }.into());
    }
    Ok(())
}

/// Derivatives in `g` of `a(g) = ∫_0^1 2ρ · ρ^α / (ρ^α + g) dρ`, the Laplace
/// transform of the normalized interference of one SBS placed uniformly in
/// the unit disk.
pub fn ball_derivatives(
    g: f64,
    alpha: f64,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>, AnalysisError> {
    check_positive("g", g)?;
    check_alpha(alpha)?;
    check_order(order)?;
    (0..=order)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let scale = 2.0 * sign * factorial(j);
            let v = integrate(
                |rho| {
                    let p = libm::pow(rho, alpha);
                    let q = 1.0 / (p + g);
                    rho * p * libm::pow(q, (j + 1) as f64)
                },
                0.0,
                1.0,
                spec,
            )?;
            Ok(scale * v.value)
        })
        .collect()
}

/// Derivatives in `g` of `c(g) = ∫_1^∞ 2ρ · g / (ρ^α + g) dρ`, the
/// normalized PGFL exponent of the SBSs beyond the unit circle.
pub fn ring_derivatives(
    g: f64,
    alpha: f64,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>, AnalysisError> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(AnalysisError::InvalidParameter { name: "g", value: g });
    }
    check_alpha(alpha)?;
    check_order(order)?;
    (0..=order)
        .map(|j| {
            // x = ρ^-α keeps every factor bounded on the mapped interval.
            let v = if j == 0 {
                integrate_to_infinity(
                    |rho| {
                        let x = libm::pow(rho, -alpha);
                        2.0 * rho * g * x / (1.0 + g * x)
                    },
                    1.0,
                    spec,
                )?
            } else {
                integrate_to_infinity(
                    |rho| {
                        let x = libm::pow(rho, -alpha);
                        let d = 1.0 / (1.0 + g * x);
                        2.0 * rho * d * libm::pow(x * d, j as f64)
                    },
                    1.0,
                    spec,
                )?
            };
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            Ok(if j == 0 { v.value } else { sign * factorial(j) * v.value })
        })
        .collect()
}

/// Laplace transform `L_I(s)` of the interference seen by the typical user
/// and its derivatives in `s`.
///
/// `nearer` SBSs are uniform in the disk of radius `radius` (the MF case
/// serving rank `k` has `k - 1` of them); the PPP beyond `radius` always
/// contributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceLaplace {
    pub lambda_b: f64,
    pub alpha: f64,
    pub radius: f64,
    pub nearer: usize,
    pub spec: QuadratureSpec,
}

impl InterferenceLaplace {
    /// MF interference when served by the SBS at distance `r_k` of rank `k`.
    pub fn mf(lambda_b: f64, alpha: f64, r_k: f64, k: usize) -> Self {
        Self {
            lambda_b,
            alpha,
            radius: r_k,
            nearer: k.saturating_sub(1),
            spec: QuadratureSpec::default(),
        }
    }

    /// ZF interference from the SBSs beyond the cluster radius `r_K`.
    pub fn zf(lambda_b: f64, alpha: f64, r_outer: f64) -> Self {
        Self {
            lambda_b,
            alpha,
            radius: r_outer,
            nearer: 0,
            spec: QuadratureSpec::default(),
        }
    }

    pub fn with_spec(mut self, spec: QuadratureSpec) -> Self {
        self.spec = spec;
        self
    }

    pub fn value(&self, s: f64) -> Result<f64, AnalysisError> {
        Ok(self.evaluate(s, 0)?[0])
    }

    /// `L_I^(i)(s)` for `i = 0..=order`.
    pub fn evaluate(&self, s: f64, order: usize) -> Result<Vec<f64>, AnalysisError> {
        check_positive("lambda_b", self.lambda_b)?;
        check_positive("radius", self.radius)?;
        check_positive("s", s)?;
        let unit = libm::pow(self.radius, -self.alpha);
        let g = s * unit;
        let mass = PI * self.lambda_b * self.radius * self.radius;
        let mut c = ring_derivatives(g, self.alpha, order, &self.spec)?;
        let mut factor = 1.0;
        for cj in c.iter_mut() {
            *cj *= -mass * factor;
            factor *= unit;
        }
        if self.nearer == 0 {
            return Ok(laplace_derivatives(&move |_: f64, _: usize| Ok(c.clone()), s, order)?);
        }
        let mut a = ball_derivatives(g, self.alpha, order, &self.spec)?;
        let mut factor = 1.0;
        for aj in a.iter_mut() {
            *aj *= factor;
            factor *= unit;
        }
        Ok(laplace_derivatives_product(
            &move |_: f64, _: usize| Ok(a.clone()),
            self.nearer as u32,
            &move |_: f64, _: usize| Ok(c.clone()),
            s,
            order,
        )?)
    }
}

impl DerivativeSource for InterferenceLaplace {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>, NumericsError> {
        self.evaluate(s, order).map_err(|e| match e {
            AnalysisError::Numerics(n) => n,
            _ => NumericsError::Domain { function: "InterferenceLaplace", name: "s", value: s },
        })
    }
}

/// Radius beyond which the k-th nearest distance has less than
/// `TRUNCATION_MASS` probability.
fn truncation_radius(lambda_b: f64, k: usize) -> Result<f64, AnalysisError> {
    let mut z = k as f64 + 1.0;
    while gamma_ccdf(z, k)? > TRUNCATION_MASS {
        z *= 1.5;
    }
    Ok(libm::sqrt(z / (PI * lambda_b)))
}

/// Propagates the first error raised inside a quadrature integrand.
struct ErrorSlot(RefCell<Option<AnalysisError>>);

impl ErrorSlot {
    fn new() -> Self {
        Self(RefCell::new(None))
    }

    fn wrap(&self, r: Result<f64, AnalysisError>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn check<T>(self, r: Result<T, NumericsError>) -> Result<T, AnalysisError> {
        if let Some(e) = self.0.into_inner() {
            return Err(e);
        }
        Ok(r?)
    }
}

/// `Σ_{i ≤ order} (-g)^i / i! · F^(i)`: the Gamma-CCDF series pushed through
/// the Laplace transform.
fn ccdf_series(g: f64, derivs: &[f64]) -> f64 {
    let mut term_scale = 1.0;
    let mut sum = 0.0;
    for (i, d) in derivs.iter().enumerate() {
        if i > 0 {
            term_scale *= -g / i as f64;
        }
        sum += term_scale * d;
    }
    sum
}

/// Exact MF coverage for serving rank `k`: the serving gain is Γ(L, 1),
/// interferers have Exp(1) gains, and the expectation over `r_k` runs over
/// its generalized Gamma law.
pub fn coverage_mf_exact(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    lambda_b: f64,
) -> Result<f64, AnalysisError> {
    coverage_mf_exact_with(k, cluster_size, antennas, gamma, alpha, lambda_b, &QuadratureSpec::default())
}

pub fn coverage_mf_exact_with(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    lambda_b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_positive("gamma", gamma)?;
    check_positive("lambda_b", lambda_b)?;
    check_alpha(alpha)?;
    if antennas == 0 {
        return Err(AnalysisError::InvalidParameter { name: "antennas", value: 0.0 });
    }
    let order = antennas - 1;
    check_order(order)?;

    // With g = s·r_k^-α the transform is a(g)^(k-1) · exp(-πλ r_k² c(g)), and
    // (-s)^i d^i/ds^i = (-g)^i d^i/dg^i, so at s = γ r_k^α only g = γ occurs.
    let a = ball_derivatives(gamma, alpha, order, spec)?;
    let c = ring_derivatives(gamma, alpha, order, spec)?;
    let near = power_derivatives(&a, (k - 1) as u32)?;
    let law = DistanceLaw::KthNearest { lambda_b, k };
    let r_max = truncation_radius(lambda_b, k)?;

    // One checked evaluation enforces complete monotonicity of the transform.
    let probe_z = k as f64;
    laplace_derivatives_product(
        &|_: f64, _: usize| Ok(a.clone()),
        (k - 1) as u32,
        &|_: f64, _: usize| Ok(c.iter().map(|v| -probe_z * v).collect()),
        gamma,
        order,
    )?;

    let slot = ErrorSlot::new();
    let result = integrate(
        |r| {
            slot.wrap((|| {
                let pdf = law.pdf(r)?;
                if pdf == 0.0 {
                    return Ok(0.0);
                }
                let z = PI * lambda_b * r * r;
                let exponent: Vec<f64> = c.iter().map(|v| -z * v).collect();
                let far = exp_derivatives(&exponent)?;
                let f = leibniz_product(&near, &far)?;
                Ok(pdf * ccdf_series(gamma, &f))
            })())
        },
        0.0,
        r_max,
        spec,
    );
    probability(slot.check(result)?.value)
}

/// Exact ZF coverage for serving rank `k`: the serving gain is Γ(L-K+1, 1),
/// only SBSs beyond the cluster radius `r_K` interfere, and the expectation
/// runs over `δ_k = r_k / r_K` (independent of `r_K`) and `r_K`.
pub fn coverage_zf_exact(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    lambda_b: f64,
) -> Result<f64, AnalysisError> {
    coverage_zf_exact_with(k, cluster_size, antennas, gamma, alpha, lambda_b, &QuadratureSpec::default())
}

pub fn coverage_zf_exact_with(
    k: usize,
    cluster_size: usize,
    antennas: usize,
    gamma: f64,
    alpha: f64,
    lambda_b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, AnalysisError> {
    check_rank(k, cluster_size)?;
    check_zf(antennas, cluster_size)?;
    check_positive("gamma", gamma)?;
    check_positive("lambda_b", lambda_b)?;
    check_alpha(alpha)?;
    let order = antennas - cluster_size;
    check_order(order)?;

    let outer_law = DistanceLaw::KthNearest { lambda_b, k: cluster_size };
    let r_max = truncation_radius(lambda_b, cluster_size)?;

    // Conditional coverage given δ_k, with h = γ δ_k^α.
    let given_ratio = |h: f64| -> Result<f64, AnalysisError> {
        let c = ring_derivatives(h, alpha, order, spec)?;
        let slot = ErrorSlot::new();
        let result = integrate(
            |r| {
                slot.wrap((|| {
                    let pdf = outer_law.pdf(r)?;
                    if pdf == 0.0 {
                        return Ok(0.0);
                    }
                    let z = PI * lambda_b * r * r;
                    let exponent: Vec<f64> = c.iter().map(|v| -z * v).collect();
                    let e = laplace_derivatives(&|_: f64, _: usize| Ok(exponent.clone()), h, order)?;
                    Ok(pdf * ccdf_series(h, &e))
                })())
            },
            0.0,
            r_max,
            spec,
        );
        Ok(slot.check(result)?.value)
    };

    if k == cluster_size {
        return probability(given_ratio(gamma)?);
    }
    let ratio_law = DistanceLaw::Ratio { k, cluster_size };
    let slot = ErrorSlot::new();
    let result = integrate(
        |x| {
            slot.wrap((|| {
                let w = ratio_law.pdf(x)?;
                if w == 0.0 {
                    return Ok(0.0);
                }
                Ok(w * given_ratio(gamma * libm::pow(x, alpha))?)
            })())
        },
        0.0,
        1.0,
        spec,
    );
    probability(slot.check(result)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{coverage_closed_form_mf, coverage_mf_bound, BoundKind};

    #[test]
    fn mf_single_antenna_matches_closed_form() {
        for k in 1..=2 {
            for &gamma in &[0.1, 1.0, 10.0] {
                let e = coverage_mf_exact(k, 2, 1, gamma, 4.0, 5e-5).unwrap();
                let c = coverage_closed_form_mf(k, gamma).unwrap();
                assert!((e - c).abs() < 1e-6, "k={k} γ={gamma}: {e} vs {c}");
            }
        }
    }

    #[test]
    fn mf_exact_between_bounds() {
        for l in [2, 3, 4] {
            for k in 1..=2 {
                for &gamma in &[0.1, 1.0, 10.0] {
                    let e = coverage_mf_exact(k, 2, l, gamma, 4.0, 5e-5).unwrap();
                    let lo = coverage_mf_bound(k, 2, l, gamma, 4.0, BoundKind::Lower).unwrap();
                    let up = coverage_mf_bound(k, 2, l, gamma, 4.0, BoundKind::Upper).unwrap();
                    assert!(lo - 1e-9 <= e && e <= up + 1e-9, "L={l} k={k} γ={gamma}: {lo} {e} {up}");
                }
            }
        }
    }

    #[test]
    fn zf_two_by_two_reduces_to_single_integral() {
        // L = K = 2, k = 1, α = 4: ∫_0^1 dt / (1 + √γ t · atan(√γ t))².
        let gamma: f64 = 1.0;
        let root = gamma.sqrt();
        let direct = integrate(
            |t| {
                let d = 1.0 + root * t * libm::atan(root * t);
                1.0 / (d * d)
            },
            0.0,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        let e = coverage_zf_exact(1, 2, 2, gamma, 4.0, 5e-5).unwrap();
        assert!((e - direct).abs() < 1e-7, "{e} vs {direct}");
        assert!((e - 0.66702).abs() < 1e-5);
    }

    #[test]
    fn zf_at_cluster_edge_equals_bound() {
        let e = coverage_zf_exact(2, 2, 2, 1.0, 4.0, 5e-5).unwrap();
        assert!((e - 0.313_711).abs() < 1e-6);
    }

    #[test]
    fn laplace_finite_difference() {
        let lap = InterferenceLaplace::zf(5e-5, 4.0, 180.0);
        let s = 1.0e9;
        let d = lap.evaluate(s, 1).unwrap();
        let h = 1e-4 * s;
        let fd = (lap.value(s + h).unwrap() - lap.value(s - h).unwrap()) / (2.0 * h);
        assert!(((d[1] - fd) / d[1]).abs() < 1e-5, "{} vs {fd}", d[1]);

        let lap = InterferenceLaplace::mf(5e-5, 4.0, 120.0, 3);
        let d = lap.evaluate(s, 1).unwrap();
        let fd = (lap.value(s + h).unwrap() - lap.value(s - h).unwrap()) / (2.0 * h);
        assert!(((d[1] - fd) / d[1]).abs() < 1e-5);
    }

    #[test]
    fn order_cap() {
        assert!(matches!(
            coverage_mf_exact(1, 2, 18, 1.0, 4.0, 5e-5),
            Err(AnalysisError::Numerics(NumericsError::OrderOverflow { .. }))
        ));
    }
}
