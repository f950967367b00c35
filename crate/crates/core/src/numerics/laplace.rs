//! Derivatives of Laplace transforms of the form `exp(X(s))` and
//! `A(s)^n · exp(X(s))`.

use alloc::vec;
use alloc::vec::Vec;

use super::special::binomial;
use super::NumericsError;

/// Highest derivative order supported by the recursions.
pub const MAX_DERIVATIVE_ORDER: usize = 16;

/// Anything that can report `f(s), f'(s), …, f^(n)(s)`.
pub trait DerivativeSource {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>, NumericsError>;
}

impl<F> DerivativeSource for F
where
    F: Fn(f64, usize) -> Result<Vec<f64>, NumericsError>,
{
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>, NumericsError> {
        self(s, order)
    }
}

fn check_order(order: usize) -> Result<(), NumericsError> {
    if order > MAX_DERIVATIVE_ORDER {
        Err(NumericsError::OrderOverflow {
            requested: order,
            max: MAX_DERIVATIVE_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Derivatives of `exp(X)` from the derivatives of `X`, using
/// `L^(i) = Σ_{m<i} C(i-1, m) L^(m) X^(i-m)`.
pub fn exp_derivatives(exponent: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if exponent.is_empty() {
        return Err(NumericsError::DerivativeLength {
            expected: 1,
            got: 0,
        });
    }
    let order = exponent.len() - 1;
    check_order(order)?;
    let mut out = vec![0.0; order + 1];
    out[0] = libm::exp(exponent[0]);
    for i in 1..=order {
        let mut acc = 0.0;
        for m in 0..i {
            acc += binomial(i - 1, m) * out[m] * exponent[i - m];
        }
        out[i] = acc;
    }
    Ok(out)
}

/// Derivatives of `a(s)^n` from the derivatives of a strictly positive `a`.
///
/// Differentiates `a · P' = n a' P` with Leibniz' rule and solves for the
/// highest-order term.
pub fn power_derivatives(base: &[f64], n: u32) -> Result<Vec<f64>, NumericsError> {
    if base.is_empty() {
        return Err(NumericsError::DerivativeLength {
            expected: 1,
            got: 0,
        });
    }
    let order = base.len() - 1;
    check_order(order)?;
    let mut out = vec![0.0; order + 1];
    if n == 0 {
        out[0] = 1.0;
        return Ok(out);
    }
    let a0 = base[0];
    if !(a0 > 0.0) {
        return Err(NumericsError::Domain {
            function: "power_derivatives",
            name: "base",
            value: a0,
        });
    }
    let nf = n as f64;
    out[0] = libm::pow(a0, nf);
    for i in 1..=order {
        let mut acc = 0.0;
        for j in 0..i {
            acc += nf * binomial(i - 1, j) * base[j + 1] * out[i - 1 - j];
        }
        for j in 1..i {
            acc -= binomial(i - 1, j) * base[j] * out[i - j];
        }
        out[i] = acc / a0;
    }
    Ok(out)
}

/// Derivatives of a product via the general Leibniz rule.
pub fn leibniz_product(f: &[f64], g: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if f.len() != g.len() {
        return Err(NumericsError::Dimension(
            "leibniz_product operands have different orders",
        ));
    }
    let mut out = vec![0.0; f.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (0..=i).map(|j| binomial(i, j) * f[j] * g[i - j]).sum();
    }
    Ok(out)
}

fn fetch(
    source: &impl DerivativeSource,
    s: f64,
    order: usize,
) -> Result<Vec<f64>, NumericsError> {
    let d = source.derivatives(s, order)?;
    if d.len() != order + 1 {
        return Err(NumericsError::DerivativeLength {
            expected: order + 1,
            got: d.len(),
        });
    }
    Ok(d)
}

fn check_complete_monotonicity(derivs: &[f64]) -> Result<(), NumericsError> {
    let scale = derivs.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    for (i, &d) in derivs.iter().enumerate() {
        let signed = if i % 2 == 0 { d } else { -d };
        if signed < -1e-9 * scale.max(f64::MIN_POSITIVE) || d.is_nan() {
            return Err(NumericsError::SignViolation { order: i, value: d });
        }
    }
    Ok(())
}

/// `L^(i)(s)` for `L = exp(X)`, `i = 0..=order`.
///
/// Fails if the result is not completely monotone, which no Laplace transform
/// of a nonnegative variable can be.
pub fn laplace_derivatives(
    exponent: &impl DerivativeSource,
    s: f64,
    order: usize,
) -> Result<Vec<f64>, NumericsError> {
    check_order(order)?;
    let x = fetch(exponent, s, order)?;
    let out = exp_derivatives(&x)?;
    check_complete_monotonicity(&out)?;
    Ok(out)
}

/// `L^(i)(s)` for the product form `L = A(s)^power · exp(X(s))`.
pub fn laplace_derivatives_product(
    base: &impl DerivativeSource,
    power: u32,
    exponent: &impl DerivativeSource,
    s: f64,
    order: usize,
) -> Result<Vec<f64>, NumericsError> {
    check_order(order)?;
    let a = fetch(base, s, order)?;
    let x = fetch(exponent, s, order)?;
    let pa = power_derivatives(&a, power)?;
    let ex = exp_derivatives(&x)?;
    let out = leibniz_product(&pa, &ex)?;
    check_complete_monotonicity(&out)?;
    Ok(out)
}
