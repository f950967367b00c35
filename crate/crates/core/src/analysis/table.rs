use alloc::vec::Vec;

use super::{
    coverage_closed_form_mf, coverage_closed_form_zf, coverage_mf_bound, coverage_mf_exact,
    coverage_zf_bound, coverage_zf_exact, AnalysisError, BoundKind,
};
use crate::network::{NetworkParams, Scheme};

/// How a coverage table was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Mc,
    Exact,
    Upper,
    Lower,
    ClosedForm,
}

impl Method {
    pub const ANALYTIC: [Method; 4] = [Method::Exact, Method::Upper, Method::Lower, Method::ClosedForm];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Exact => "exact",
            Method::Upper => "upper",
            Method::Lower => "lower",
            Method::ClosedForm => "closed_form",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Method {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Method::Mc),
            "exact" => Ok(Method::Exact),
            "upper" => Ok(Method::Upper),
            "lower" => Ok(Method::Lower),
            "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            _ => Err("expected one of mc, exact, upper, lower, closed_form"),
        }
    }
}

/// Coverage probabilities `P^k(K)` for serving ranks `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageTable {
    scheme: Scheme,
    method: Method,
    values: Vec<f64>,
}

impl CoverageTable {
    /// Checks that there is at least one entry and all lie in `[0, 1]`.
    /// Monotonicity is checked separately, since Monte Carlo tables may
    /// violate it within noise.
    pub fn new(scheme: Scheme, method: Method, values: Vec<f64>) -> Result<Self, AnalysisError> {
        if values.is_empty() {
            return Err(AnalysisError::Dimension { expected: 1, got: 0 });
        }
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(AnalysisError::OutOfRange { value: v });
            }
        }
        Ok(Self { scheme, method, values })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn cluster_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `P^k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// Fails on the first `k` with `P^(k+1) > P^k + slack`.
    pub fn check_monotone(&self, slack: f64) -> Result<(), AnalysisError> {
        match self.values.windows(2).position(|w| w[1] > w[0] + slack) {
            Some(i) => Err(AnalysisError::NotMonotone { method: self.method.as_str(), k: i + 1 }),
            None => Ok(()),
        }
    }
}

/// Analytic coverage table for every serving rank of the cluster.
///
/// Closed forms exist only at α = 4 with `L = 1` (MF) or `L = K` (ZF).
pub fn coverage_table(
    params: &NetworkParams,
    scheme: Scheme,
    method: Method,
) -> Result<CoverageTable, AnalysisError> {
    let NetworkParams { lambda_b, alpha, antennas, cluster_size, gamma, .. } = *params;
    let values = (1..=cluster_size)
        .map(|k| match (scheme, method) {
            (_, Method::Mc) => Err(AnalysisError::InvalidParameter { name: "method", value: f64::NAN }),
            (Scheme::Mf, Method::Exact) => coverage_mf_exact(k, cluster_size, antennas, gamma, alpha, lambda_b),
            (Scheme::Zf, Method::Exact) => coverage_zf_exact(k, cluster_size, antennas, gamma, alpha, lambda_b),
            (Scheme::Mf, Method::Upper) => coverage_mf_bound(k, cluster_size, antennas, gamma, alpha, BoundKind::Upper),
            (Scheme::Mf, Method::Lower) => coverage_mf_bound(k, cluster_size, antennas, gamma, alpha, BoundKind::Lower),
            (Scheme::Zf, Method::Upper) => coverage_zf_bound(k, cluster_size, antennas, gamma, alpha, BoundKind::Upper),
            (Scheme::Zf, Method::Lower) => coverage_zf_bound(k, cluster_size, antennas, gamma, alpha, BoundKind::Lower),
            (Scheme::Mf, Method::ClosedForm) => {
                if alpha != 4.0 || antennas != 1 {
                    return Err(AnalysisError::InvalidParameter { name: "antennas", value: antennas as f64 });
                }
                coverage_closed_form_mf(k, gamma)
            }
            (Scheme::Zf, Method::ClosedForm) => {
                if alpha != 4.0 || antennas != cluster_size {
                    return Err(AnalysisError::InvalidParameter { name: "antennas", value: antennas as f64 });
                }
                coverage_closed_form_zf(k, cluster_size, gamma)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    CoverageTable::new(scheme, method, values)
}
