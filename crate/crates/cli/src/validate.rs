//! The release gate: every invariant suite at a chosen scale.

use std::str::FromStr;

use multicache_core::analysis::{
    coverage_closed_form_mf, coverage_closed_form_zf, coverage_closed_form_zf_printed, coverage_zf_bound,
    BoundKind,
};
use multicache_core::{db_to_linear, Scheme};

use crate::checks::{self, Check, McBank};
use crate::output::Table;
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level `{other}` (expected quick or full)")),
        }
    }
}

impl Level {
    pub fn trials(self) -> u64 {
        match self {
            Level::Quick => 10_000,
            Level::Full => 100_000,
        }
    }
}

/// Runs the suite. MC tolerances are the acceptance values at full scale;
/// at quick scale each is widened to at least three standard errors.
pub fn run(level: Level, seed: u64, workers: usize) -> Result<Vec<Check>, HarnessError> {
    let bank = McBank::new(seed, level.trials(), workers);
    let se_floor = |tol: f64, se: f64| match level {
        Level::Quick => tol.max(3.0 * se),
        Level::Full => tol,
    };
    let mut out = Vec::new();

    out.push(Check::new(
        "db_round_trip",
        (-60..=60).all(|d| {
            let x = d as f64 * 0.5;
            (multicache_core::linear_to_db(db_to_linear(x)) - x).abs() <= 1e-12
        }),
        "γ_dB in −30..30 step 0.5",
    ));

    for k in 1..=2 {
        let anchor = coverage_closed_form_mf(k, 1.0)?;
        let se = bank.estimate(Scheme::Mf, 1, k, 0.0)?.stderr;
        out.push(checks::mc_anchor(&bank, Scheme::Mf, 1, k, 0.0, anchor, se_floor(0.005, se))?);
    }
    let anchor = coverage_closed_form_zf(2, 2, 1.0)?;
    let se = bank.estimate(Scheme::Zf, 2, 2, 0.0)?.stderr;
    out.push(checks::mc_anchor(&bank, Scheme::Zf, 2, 2, 0.0, anchor, se_floor(0.01, se))?);

    let se_mult = match level {
        Level::Quick => 3.0,
        Level::Full => 2.0,
    };
    out.extend(checks::bound_sandwich(&bank, &[1, 2, 4], se_mult, 0.02)?);
    out.extend(checks::exact_vs_mc(&bank, se_mult)?);
    out.push(checks::mf_exact_within_bounds(&[1, 2, 4], 1e-9)?);
    out.push(checks::coverage_tables_monotone()?);
    out.push(checks::gain_moments(level.trials() / 5, seed)?);
    out.push(checks::zf_orthogonality(10_000, seed, 1e-10)?);
    out.push(checks::distance_ks(10_000, seed)?);
    out.push(checks::ratio_moments(1e-8)?);
    out.extend(checks::optimizer_correctness(50, seed, 1e-4)?);
    out.extend(checks::figure_claims()?);
    out.push(checks::determinism(3_000, &[1, 2, 4])?);

    if level == Level::Full {
        let theorem = coverage_zf_bound(1, 2, 2, 1.0, 4.0, BoundKind::Upper)?;
        let printed = coverage_closed_form_zf_printed(1, 2, 1.0)?;
        let (mut check, _) = checks::adjudicate(
            &bank,
            Scheme::Zf,
            2,
            1,
            0.0,
            &[("theorem_form", theorem), ("corollary_form", printed)],
            0.01,
        )?;
        let exact = crate::commands::analytic_point(&McBank::params(2), Scheme::Zf, 1)?.0;
        check.detail = format!("{} ; exact integral {exact:.5}", check.detail);
        out.push(check);
    }
    Ok(out)
}

pub fn report(checks: &[Check]) -> Table {
    let mut t = Table::new(["invariant", "status", "detail"]);
    for c in checks {
        t.push(vec![c.name.clone(), if c.passed { "pass" } else { "fail" }.to_owned(), c.detail.clone()]);
    }
    t
}
