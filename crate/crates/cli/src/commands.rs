//! The experiment subcommands. Each returns its tables so callers can
//! inspect them; `write_*` helpers put them on disk.

use multicache_core::analysis::{
    coverage_mf_bound, coverage_mf_exact, coverage_table, coverage_zf_bound, coverage_zf_exact,
    stp_analytic, BoundKind, CoverageTable,
};
use multicache_core::optimizer::{mpc_policy, optimize_caching, OptimizationResult};
use multicache_core::{db_to_linear, CachePolicy, ContentParams, Method, NetworkParams, Scheme};

use crate::config::ExperimentConfig;
use crate::mc;
use crate::output::{db, num, Table};
use crate::HarnessError;

pub const COVERAGE_COLUMNS: [&str; 8] = ["scheme", "k", "gamma_db", "mc", "mc_stderr", "exact", "lower", "upper"];

/// Exact value and the (lower, upper) bound pair for one serving rank.
pub fn analytic_point(
    params: &NetworkParams,
    scheme: Scheme,
    k: usize,
) -> Result<(f64, f64, f64), HarnessError> {
    let NetworkParams { lambda_b, alpha, antennas: l, cluster_size: c, gamma, .. } = *params;
    Ok(match scheme {
        Scheme::Mf => (
            coverage_mf_exact(k, c, l, gamma, alpha, lambda_b)?,
            coverage_mf_bound(k, c, l, gamma, alpha, BoundKind::Lower)?,
            coverage_mf_bound(k, c, l, gamma, alpha, BoundKind::Upper)?,
        ),
        Scheme::Zf => (
            coverage_zf_exact(k, c, l, gamma, alpha, lambda_b)?,
            coverage_zf_bound(k, c, l, gamma, alpha, BoundKind::Lower)?,
            coverage_zf_bound(k, c, l, gamma, alpha, BoundKind::Upper)?,
        ),
    })
}

/// MC estimate with standard error, exact value and bounds for every
/// scheme, serving rank and SIR target of the config.
pub fn coverage(cfg: &ExperimentConfig) -> Result<Table, HarnessError> {
    let mut table = Table::new(COVERAGE_COLUMNS);
    let gammas: Vec<f64> = cfg.gamma_db.iter().map(|&g| db_to_linear(g)).collect();
    let base = cfg.network_at(0.0);
    for &scheme in &cfg.schemes {
        let sweep = mc::coverage_sweep(
            &base,
            scheme,
            cfg.interferer_model,
            &gammas,
            cfg.trials,
            cfg.seed,
            cfg.worker_count(),
        )?;
        for k in 1..=base.cluster_size {
            for (gi, &g_db) in cfg.gamma_db.iter().enumerate() {
                let est = sweep.estimate(k, gi);
                let (exact, lower, upper) = analytic_point(&cfg.network_at(g_db), scheme, k)?;
                table.push(vec![
                    scheme.to_string(),
                    k.to_string(),
                    db(g_db),
                    num(Some(est.estimate)),
                    num(Some(est.stderr)),
                    num(Some(exact)),
                    num(Some(lower)),
                    num(Some(upper)),
                ]);
            }
        }
    }
    Ok(table)
}

/// Optimized policy at `params` with the config's coverage method.
pub fn optimized(
    cfg: &ExperimentConfig,
    params: &NetworkParams,
    scheme: Scheme,
    content: &ContentParams,
) -> Result<(CoverageTable, OptimizationResult), HarnessError> {
    let table = coverage_table(params, scheme, cfg.optimize.coverage)?;
    let result = optimize_caching(content, &table)?;
    Ok((table, result))
}

/// Number of files cached with probability above `threshold`.
pub fn files_above(policy: &CachePolicy, threshold: f64) -> usize {
    policy.probabilities().iter().filter(|&&b| b > threshold).count()
}

pub struct OptimizeOutput {
    /// `gamma_db, n, popularity, mpc, opc_<scheme>...`
    pub policies: Table,
    /// `scheme, gamma_db, policy, stp, mu_star, status, files_above_0.01`
    pub stp: Table,
}

pub fn optimize(cfg: &ExperimentConfig) -> Result<OptimizeOutput, HarnessError> {
    let content = cfg.content_params()?;
    let mpc = mpc_policy(&content);
    let uniform = CachePolicy::uniform(content.library_size(), content.cache_size());
    let mut header: Vec<String> = ["gamma_db", "n", "popularity", "mpc"].map(String::from).to_vec();
    header.extend(cfg.schemes.iter().map(|s| format!("opc_{s}")));
    let mut policies = Table::new(header);
    let mut stp = Table::new(["scheme", "gamma_db", "policy", "stp", "mu_star", "status", "files_above_0.01"]);
    for &g_db in &cfg.gamma_db {
        let params = cfg.network_at(g_db);
        let mut opcs = Vec::new();
        for &scheme in &cfg.schemes {
            let (table, r) = optimized(cfg, &params, scheme, &content)?;
            let p = content.popularity();
            for (name, policy, value, mu, status) in [
                ("opc", &r.policy, r.stp, Some(r.mu_star), format!("{:?}", r.status).to_lowercase()),
                ("mpc", &mpc, stp_analytic(p, &mpc, &table)?, None, String::new()),
                ("uniform", &uniform, stp_analytic(p, &uniform, &table)?, None, String::new()),
            ] {
                stp.push(vec![
                    scheme.to_string(),
                    db(g_db),
                    name.to_owned(),
                    num(Some(value)),
                    num(mu),
                    status,
                    files_above(policy, 0.01).to_string(),
                ]);
            }
            opcs.push(r.policy);
        }
        for n in 0..content.library_size() {
            let mut row = vec![
                db(g_db),
                (n + 1).to_string(),
                num(Some(content.popularity()[n])),
                num(Some(mpc.probabilities()[n])),
            ];
            row.extend(opcs.iter().map(|b| num(Some(b.probabilities()[n]))));
            policies.push(row);
        }
    }
    Ok(OptimizeOutput { policies, stp })
}

/// STP under OPC and MPC.
fn stp_pair(
    cfg: &ExperimentConfig,
    params: &NetworkParams,
    scheme: Scheme,
    content: &ContentParams,
) -> Result<(f64, f64), HarnessError> {
    let (table, r) = optimized(cfg, params, scheme, content)?;
    let mpc = stp_analytic(content.popularity(), &mpc_policy(content), &table)?;
    Ok((r.stp, mpc))
}

pub struct CompareOutput {
    /// `scheme, antennas, gamma_db, stp_opc, stp_mpc`
    pub antennas: Table,
    /// `scheme, delta, gamma_db, stp_opc, stp_mpc`
    pub deltas: Table,
}

/// STP under optimized caching over the antenna sweep and the Zipf sweep.
/// Zero forcing is skipped wherever the antenna count is below the cluster
/// size.
pub fn compare(cfg: &ExperimentConfig) -> Result<CompareOutput, HarnessError> {
    let content = cfg.content_params()?;
    let mut antennas = Table::new(["scheme", "antennas", "gamma_db", "stp_opc", "stp_mpc"]);
    for &scheme in &cfg.schemes {
        for &l in &cfg.compare.antennas {
            if scheme == Scheme::Zf && l < cfg.network.cluster_size {
                continue;
            }
            for &g_db in &cfg.gamma_db {
                let params = cfg.network_at(g_db).with_antennas(l);
                let (opc, mpc) = stp_pair(cfg, &params, scheme, &content)?;
                antennas.push(vec![scheme.to_string(), l.to_string(), db(g_db), num(Some(opc)), num(Some(mpc))]);
            }
        }
    }
    let mut deltas = Table::new(["scheme", "delta", "gamma_db", "stp_opc", "stp_mpc"]);
    for &scheme in &cfg.schemes {
        for &d in &cfg.compare.deltas {
            let content = cfg.content_with_delta(d)?;
            for &g_db in &cfg.gamma_db {
                let (opc, mpc) = stp_pair(cfg, &cfg.network_at(g_db), scheme, &content)?;
                deltas.push(vec![scheme.to_string(), format!("{d:.3}"), db(g_db), num(Some(opc)), num(Some(mpc))]);
            }
        }
    }
    Ok(CompareOutput { antennas, deltas })
}

/// Simulated STP of OPC and MPC next to the analytic values under the
/// config's coverage method and under exact coverage.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Table, HarnessError> {
    let content = cfg.content_params()?;
    let mpc = mpc_policy(&content);
    let mut out = Table::new(["scheme", "gamma_db", "policy", "stp_mc", "stp_mc_stderr", "stp_analytic", "stp_exact"]);
    for &scheme in &cfg.schemes {
        for &g_db in &cfg.gamma_db {
            let params = cfg.network_at(g_db);
            let (table, r) = optimized(cfg, &params, scheme, &content)?;
            let exact = coverage_table(&params, scheme, Method::Exact)?;
            for (name, policy) in [("opc", &r.policy), ("mpc", &mpc)] {
                let counts = mc::stp_counts(
                    &params,
                    &content,
                    policy,
                    scheme,
                    cfg.interferer_model,
                    cfg.trials,
                    cfg.seed,
                    cfg.worker_count(),
                )?;
                let est = counts.estimate();
                out.push(vec![
                    scheme.to_string(),
                    db(g_db),
                    name.to_owned(),
                    num(Some(est.estimate)),
                    num(Some(est.stderr)),
                    num(Some(stp_analytic(content.popularity(), policy, &table)?)),
                    num(Some(stp_analytic(content.popularity(), policy, &exact)?)),
                ]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            trials: 400,
            gamma_db: vec![0.0],
            interferer_model: multicache_core::network::InterfererModel::Fast,
            ..Default::default()
        }
    }

    fn col(t: &Table, name: &str, row: usize) -> f64 {
        t.rows()[row][t.column(name).unwrap()].parse().unwrap()
    }

    #[test]
    fn coverage_rows_and_columns() {
        let t = coverage(&small()).unwrap();
        assert_eq!(t.header(), COVERAGE_COLUMNS);
        assert_eq!(t.rows().len(), 2 * 2);
        for i in 0..t.rows().len() {
            assert!(col(&t, "lower", i) <= col(&t, "upper", i));
        }
    }

    #[test]
    fn zf_square_bounds_coincide() {
        let cfg = ExperimentConfig { schemes: vec![Scheme::Zf], ..small() };
        let t = coverage(&cfg).unwrap();
        let row = t.rows().iter().position(|r| r[1] == "2").unwrap();
        assert_eq!(col(&t, "lower", row), col(&t, "upper", row));
        assert!((col(&t, "upper", row) - 0.313_711).abs() < 1e-6);
    }

    #[test]
    fn uniform_popularity_gives_flat_policy() {
        let mut cfg = small();
        cfg.content.zipf_delta = 0.0;
        let out = optimize(&cfg).unwrap();
        for r in out.policies.rows() {
            for v in &r[4..] {
                assert!((v.parse::<f64>().unwrap() - 0.1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn compare_skips_infeasible_zf() {
        let mut cfg = small();
        cfg.compare.antennas = vec![1, 2];
        cfg.compare.deltas = vec![0.5];
        let out = compare(&cfg).unwrap();
        // mf at L = 1 and 2, zf at L = 2 only.
        assert_eq!(out.antennas.rows().len(), 3);
        assert_eq!(out.deltas.rows().len(), 2);
    }

    #[test]
    fn simulate_reports_both_policies() {
        let mut cfg = small();
        cfg.schemes = vec![Scheme::Mf];
        let t = simulate(&cfg).unwrap();
        assert_eq!(t.rows().len(), 2);
        for i in 0..2 {
            let mc = col(&t, "stp_mc", i);
            let exact = col(&t, "stp_exact", i);
            assert!((mc - exact).abs() < 5.0 * col(&t, "stp_mc_stderr", i) + 1e-3);
        }
    }
}
