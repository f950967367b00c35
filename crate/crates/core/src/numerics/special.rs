use super::quadrature::{integrate, integrate_to_infinity, QuadratureSpec};
use super::{check_domain, NumericsError};

pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(c)
}

/// Complete Beta function Γ(x)Γ(y)/Γ(x+y).
pub fn complete_beta(x: f64, y: f64) -> f64 {
    libm::exp(libm::lgamma(x) + libm::lgamma(y) - libm::lgamma(x + y))
}

/// Lower incomplete Beta integral `∫₀^z u^(x-1) (1-u)^(y-1) du` (not regularized).
pub fn incomplete_beta(x: f64, y: f64, z: f64) -> Result<f64, NumericsError> {
    incomplete_beta_with(x, y, z, &QuadratureSpec::default())
}

/// Complementary form `∫_z^1 u^(x-1) (1-u)^(y-1) du`, i.e. `B(x,y,1) - B(x,y,z)`.
pub fn incomplete_beta_complement(x: f64, y: f64, z: f64) -> Result<f64, NumericsError> {
    check_domain((0.0..=1.0).contains(&z), "incomplete_beta_complement", "z", z)?;
    incomplete_beta_with(y, x, 1.0 - z, &QuadratureSpec::default())
}

pub fn incomplete_beta_with(
    x: f64,
    y: f64,
    z: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    check_domain(x > 0.0 && x.is_finite(), "incomplete_beta", "x", x)?;
    check_domain(y > 0.0 && y.is_finite(), "incomplete_beta", "y", y)?;
    check_domain((0.0..=1.0).contains(&z), "incomplete_beta", "z", z)?;
    if z == 0.0 {
        return Ok(0.0);
    }

    // The endpoint singularities u^(x-1) at 0 and (1-u)^(y-1) at 1 are removed
    // by v = u^x on [0, min(z, 1/2)] and w = (1-u)^y on [1/2, z].
    let split = z.min(0.5);
    let inv_x = 1.0 / x;
    let lower = integrate(
        |v| libm::pow(1.0 - libm::pow(v, inv_x), y - 1.0),
        0.0,
        libm::pow(split, x),
        spec,
    )?
    .value
        * inv_x;
    if z <= 0.5 {
        return Ok(lower);
    }
    let inv_y = 1.0 / y;
    let upper = integrate(
        |w| libm::pow(1.0 - libm::pow(w, inv_y), x - 1.0),
        libm::pow(1.0 - z, y),
        libm::pow(0.5, y),
        spec,
    )?
    .value
        * inv_y;
    Ok(lower + upper)
}

/// Tail integral `A(x) = ∫_x^∞ du / (1 + u^(α/2))`.
pub fn interference_tail_integral(x: f64, alpha: f64) -> Result<f64, NumericsError> {
    interference_tail_integral_with(x, alpha, &QuadratureSpec::default())
}

pub fn interference_tail_integral_with(
    x: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    check_domain(
        alpha > 2.0 && alpha.is_finite(),
        "interference_tail_integral",
        "alpha",
        alpha,
    )?;
    check_domain(x >= 0.0 && !x.is_nan(), "interference_tail_integral", "x", x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let half_alpha = 0.5 * alpha;
    Ok(integrate_to_infinity(|u| 1.0 / (1.0 + libm::pow(u, half_alpha)), x, spec)?.value)
}

/// CCDF of a Γ(m, 1) variable via the finite series `Σ_{i<m} x^i e^(-x) / i!`.
pub fn gamma_ccdf(x: f64, m: usize) -> Result<f64, NumericsError> {
    check_domain(x >= 0.0 && !x.is_nan(), "gamma_ccdf", "x", x)?;
    check_domain(m >= 1, "gamma_ccdf", "m", m as f64)?;
    let mut term = libm::exp(-x);
    let mut sum = term;
    for i in 1..m {
        term *= x / i as f64;
        sum += term;
    }
    Ok(sum.min(1.0))
}

/// Gamma-distributed effective channel gain with integer shape.
///
/// MF serving gains have shape `L`, ZF serving gains shape `L - K + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLaw {
    shape: usize,
    alzer_constant: f64,
}

impl GainLaw {
    pub fn new(shape: usize) -> Result<Self, NumericsError> {
        check_domain(shape >= 1, "GainLaw::new", "shape", shape as f64)?;
        let alzer_constant = if shape == 1 {
            1.0
        } else {
            libm::exp(-ln_factorial(shape) / shape as f64)
        };
        Ok(Self {
            shape,
            alzer_constant,
        })
    }

    pub fn shape(&self) -> usize {
        self.shape
    }

    /// `(m!)^(-1/m)`.
    pub fn alzer_constant(&self) -> f64 {
        self.alzer_constant
    }

    pub fn ccdf(&self, x: f64) -> Result<f64, NumericsError> {
        gamma_ccdf(x, self.shape)
    }
}

/// Two-sided bracket `((1 - e^(-a z))^m, (1 - e^(-z))^m)` of the Γ(m, 1) CDF.
pub fn alzer_bounds(z: f64, m: usize) -> Result<(f64, f64), NumericsError> {
    check_domain(z >= 0.0 && !z.is_nan(), "alzer_bounds", "z", z)?;
    let law = GainLaw::new(m)?;
    let a = law.alzer_constant();
    let lower = libm::pow(-libm::expm1(-a * z), m as f64);
    let upper = libm::pow(-libm::expm1(-z), m as f64);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn incomplete_beta_anchors() {
        assert!((incomplete_beta(0.5, 0.5, 1.0).unwrap() - PI).abs() < 1e-10);
        assert_eq!(incomplete_beta(0.5, 0.5, 0.0).unwrap(), 0.0);
        assert!((incomplete_beta(0.5, 0.5, 0.5).unwrap() - FRAC_PI_2).abs() < 1e-10);
        // 2·asin(√z) for the arcsine kernel.
        let z: f64 = 0.3;
        let expected = 2.0 * libm::asin(libm::sqrt(z));
        assert!((incomplete_beta(0.5, 0.5, z).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn incomplete_beta_domain_errors() {
        assert!(incomplete_beta(0.0, 1.0, 0.5).is_err());
        assert!(incomplete_beta(1.0, -1.0, 0.5).is_err());
        assert!(incomplete_beta(1.0, 1.0, 1.5).is_err());
        assert!(incomplete_beta(1.0, 1.0, -0.1).is_err());
        assert!(incomplete_beta_complement(1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn complement_matches_difference() {
        for &(x, y, z) in &[(0.5, 0.5, 0.2), (0.4, 0.6, 0.9), (2.0, 3.0, 0.7), (0.25, 0.75, 0.01)] {
            let full = incomplete_beta(x, y, 1.0).unwrap();
            let lower = incomplete_beta(x, y, z).unwrap();
            let upper = incomplete_beta_complement(x, y, z).unwrap();
            assert!((full - lower - upper).abs() < 1e-10, "{x} {y} {z}");
        }
    }

    #[test]
    fn tail_integral_anchors() {
        assert!((interference_tail_integral(1.0, 4.0).unwrap() - FRAC_PI_4).abs() < 1e-10);
        assert!((interference_tail_integral(0.0, 4.0).unwrap() - FRAC_PI_2).abs() < 1e-10);
        assert!(interference_tail_integral(1e12, 4.0).unwrap() < 2e-12);
        assert_eq!(interference_tail_integral(f64::INFINITY, 4.0).unwrap(), 0.0);
        assert!(interference_tail_integral(1.0, 2.0).is_err());
        assert!(interference_tail_integral(-1.0, 4.0).is_err());
    }

    #[test]
    fn gamma_ccdf_anchors() {
        for m in 1..6 {
            assert_eq!(gamma_ccdf(0.0, m).unwrap(), 1.0);
        }
        assert!((gamma_ccdf(1.7, 1).unwrap() - libm::exp(-1.7)).abs() < 1e-15);
        assert!((gamma_ccdf(1.0, 2).unwrap() - 2.0 / E).abs() < 1e-15);
        assert!(gamma_ccdf(-1.0, 2).is_err());
        assert!(gamma_ccdf(1.0, 0).is_err());
    }

    #[test]
    fn alzer_anchors() {
        let (lo, hi) = alzer_bounds(0.8, 1).unwrap();
        assert_eq!(lo, hi);
        assert!((lo - (1.0 - libm::exp(-0.8))).abs() < 1e-15);

        let a = GainLaw::new(2).unwrap().alzer_constant();
        assert!((a - 0.707_106_781_186_547_5).abs() < 1e-12);

        let (lo, hi) = alzer_bounds(1.0, 2).unwrap();
        let cdf = 1.0 - 2.0 / E;
        assert!((lo - libm::pow(1.0 - libm::exp(-a), 2.0)).abs() < 1e-14);
        assert!((hi - 0.399_576_400_893_728_6).abs() < 1e-12);
        assert!(lo <= cdf && cdf <= hi);
        assert!((lo - 0.256_979).abs() < 1e-6);
    }

    #[test]
    fn gain_law_invariants() {
        assert!(GainLaw::new(0).is_err());
        assert_eq!(GainLaw::new(1).unwrap().alzer_constant(), 1.0);
        for m in 2..=16 {
            let a = GainLaw::new(m).unwrap().alzer_constant();
            assert!(a > 0.0 && a < 1.0);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(16, 8), 12870.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
