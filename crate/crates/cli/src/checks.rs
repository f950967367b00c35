//! Named invariant checks. `validate` runs them at a chosen scale; the
//! acceptance suite runs them with its own pinned tolerances.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use multicache_core::analysis::{
    coverage_mf_bound, coverage_mf_exact, coverage_table, ratio_second_moment, stp_analytic, BoundKind,
    CoverageTable, DistanceLaw,
};
use multicache_core::network::{CoverageSweep, Estimate, InterfererModel, RngStream, TrialSampler};
use multicache_core::optimizer::{brute_force_oracle, mpc_policy, optimize_caching};
use multicache_core::{db_to_linear, CachePolicy, ContentParams, Method, NetworkParams, Scheme};
use rand::Rng;

use crate::commands;
use crate::config::ExperimentConfig;
use crate::{mc, HarnessError};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }

    /// Folds several checks into one named check that passes iff all do.
    pub fn all(name: impl Into<String>, parts: &[Check]) -> Check {
        let failed: Vec<&str> = parts.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let detail = if failed.is_empty() {
            format!("{} sub-checks passed", parts.len())
        } else {
            format!("failed: {}", failed.join(", "))
        };
        Check::new(name, failed.is_empty(), detail)
    }
}

/// SIR targets shared by the Monte Carlo checks.
pub const GRID_DB: [f64; 4] = [-10.0, 0.0, 10.0, 20.0];

/// Lazily computed coverage sweeps over [`GRID_DB`], keyed by scheme and
/// antenna count at the default network with `K = 2`.
pub struct McBank {
    pub seed: u64,
    pub trials: u64,
    pub workers: usize,
    pub model: InterfererModel,
    sweeps: Mutex<BTreeMap<(Scheme, usize), (CoverageSweep, Duration)>>,
}

impl McBank {
    pub fn new(seed: u64, trials: u64, workers: usize) -> Self {
        Self { seed, trials, workers, model: InterfererModel::Explicit, sweeps: Mutex::new(BTreeMap::new()) }
    }

    pub fn params(antennas: usize) -> NetworkParams {
        NetworkParams::default().with_antennas(antennas)
    }

    /// Sweep for `(scheme, antennas)` and the wall time it took to compute.
    pub fn sweep(&self, scheme: Scheme, antennas: usize) -> Result<(CoverageSweep, Duration), HarnessError> {
        let mut map = self.sweeps.lock().expect("sweep cache poisoned");
        if let Some(hit) = map.get(&(scheme, antennas)) {
            return Ok(hit.clone());
        }
        let gammas: Vec<f64> = GRID_DB.iter().map(|&g| db_to_linear(g)).collect();
        let start = Instant::now();
        let sweep = mc::coverage_sweep(
            &Self::params(antennas),
            scheme,
            self.model,
            &gammas,
            self.trials,
            self.seed,
            self.workers,
        )?;
        let entry = (sweep, start.elapsed());
        map.insert((scheme, antennas), entry.clone());
        Ok(entry)
    }

    pub fn estimate(&self, scheme: Scheme, antennas: usize, k: usize, gamma_db: f64) -> Result<Estimate, HarnessError> {
        let gi = GRID_DB.iter().position(|&g| g == gamma_db).expect("SIR target not on the grid");
        Ok(self.sweep(scheme, antennas)?.0.estimate(k, gi))
    }
}

fn fmt_est(e: &Estimate) -> String {
    format!("{:.6}±{:.6}", e.estimate, e.stderr)
}

/// `|MC − anchor| ≤ tol` at the given grid point.
pub fn mc_anchor(
    bank: &McBank,
    scheme: Scheme,
    antennas: usize,
    k: usize,
    gamma_db: f64,
    anchor: f64,
    tol: f64,
) -> Result<Check, HarnessError> {
    let e = bank.estimate(scheme, antennas, k, gamma_db)?;
    let gap = (e.estimate - anchor).abs();
    Ok(Check::new(
        format!("{scheme}_anchor_L{antennas}_k{k}_{gamma_db}dB"),
        gap <= tol,
        format!("mc {} vs {anchor:.6}, |gap| {gap:.6} (tol {tol})", fmt_est(&e)),
    ))
}

/// Which of several candidate values the MC estimate supports.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub estimate: Estimate,
    pub candidates: Vec<(String, f64)>,
    /// Candidates within the tolerance.
    pub selected: Vec<String>,
}

impl Verdict {
    pub fn winner(&self) -> Option<&str> {
        match self.selected.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }
}

pub fn adjudicate(
    bank: &McBank,
    scheme: Scheme,
    antennas: usize,
    k: usize,
    gamma_db: f64,
    candidates: &[(&str, f64)],
    tol: f64,
) -> Result<(Check, Verdict), HarnessError> {
    let estimate = bank.estimate(scheme, antennas, k, gamma_db)?;
    let selected: Vec<String> = candidates
        .iter()
        .filter(|(_, v)| (estimate.estimate - v).abs() <= tol)
        .map(|(n, _)| n.to_string())
        .collect();
    let verdict = Verdict {
        estimate,
        candidates: candidates.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        selected,
    };
    let listed: Vec<String> = candidates.iter().map(|(n, v)| format!("{n}={v:.5}")).collect();
    let detail = format!(
        "mc {} ; candidates {} ; winner {}",
        fmt_est(&estimate),
        listed.join(", "),
        verdict.winner().unwrap_or(if verdict.selected.is_empty() { "none" } else { "ambiguous" })
    );
    let check = Check::new(format!("{scheme}_discrepancy_L{antennas}_k{k}_{gamma_db}dB"), verdict.winner().is_some(), detail);
    Ok((check, verdict))
}

/// MF estimates inside the true bounds widened by `se_mult` standard
/// errors; ZF estimates inside the approximate bracket widened by `zf_slack`.
pub fn bound_sandwich(
    bank: &McBank,
    antennas: &[usize],
    se_mult: f64,
    zf_slack: f64,
) -> Result<Vec<Check>, HarnessError> {
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        for &l in antennas {
            if scheme == Scheme::Zf && l < 2 {
                continue;
            }
            for k in 1..=2 {
                for g_db in GRID_DB {
                    let params = McBank::params(l).with_gamma(db_to_linear(g_db));
                    let (_, lower, upper) = commands::analytic_point(&params, scheme, k)?;
                    let e = bank.estimate(scheme, l, k, g_db)?;
                    // The plug-in error vanishes when no trial succeeds, so
                    // the error is taken at the nearest point of the bracket.
                    let q = e.estimate.clamp(lower, upper);
                    let se = (q * (1.0 - q) / e.trials as f64).sqrt();
                    let slack = match scheme {
                        Scheme::Mf => se_mult * se,
                        Scheme::Zf => zf_slack,
                    };
                    let ok = e.estimate >= lower - slack && e.estimate <= upper + slack;
                    out.push(Check::new(
                        format!("{scheme}_sandwich_L{l}_k{k}_{g_db}dB"),
                        ok,
                        format!("mc {} in [{lower:.6}, {upper:.6}] ± {slack:.6}", fmt_est(&e)),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// `|exact − MC| ≤ se_mult · stderr` at the default network, 0 dB.
pub fn exact_vs_mc(bank: &McBank, se_mult: f64) -> Result<Vec<Check>, HarnessError> {
    let mut out = Vec::new();
    for scheme in Scheme::ALL {
        for k in 1..=2 {
            let params = McBank::params(2);
            let (exact, _, _) = commands::analytic_point(&params, scheme, k)?;
            let e = bank.estimate(scheme, 2, k, 0.0)?;
            out.push(Check::new(
                format!("{scheme}_exact_vs_mc_k{k}"),
                (exact - e.estimate).abs() <= se_mult * e.stderr,
                format!("exact {exact:.6}, mc {}", fmt_est(&e)),
            ));
        }
    }
    Ok(out)
}

/// MF exact coverage inside the true bounds to `tol`.
pub fn mf_exact_within_bounds(antennas: &[usize], tol: f64) -> Result<Check, HarnessError> {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for &l in antennas {
        for k in 1..=2 {
            for g_db in GRID_DB {
                let g = db_to_linear(g_db);
                let exact = coverage_mf_exact(k, 2, l, g, 4.0, 5e-5)?;
                let lo = coverage_mf_bound(k, 2, l, g, 4.0, BoundKind::Lower)?;
                let hi = coverage_mf_bound(k, 2, l, g, 4.0, BoundKind::Upper)?;
                let excess = (lo - exact).max(exact - hi);
                if excess > worst || at.is_empty() {
                    worst = worst.max(excess);
                    at = format!("L{l} k{k} {g_db}dB");
                }
            }
        }
    }
    Ok(Check::new("mf_exact_within_bounds", worst <= tol, format!("worst excursion {worst:.3e} at {at}")))
}

/// A single table must not increase in `k`.
pub fn table_monotone(name: &str, table: &CoverageTable) -> Check {
    match table.check_monotone(1e-12) {
        Ok(()) => Check::new(name, true, format!("{:?}", table.values())),
        Err(e) => Check::new(name, false, e.to_string()),
    }
}

/// Every analytic table non-increasing in `k` and in γ.
pub fn coverage_tables_monotone() -> Result<Check, HarnessError> {
    let grid: Vec<f64> = (0..=12).map(|i| -10.0 + 2.5 * i as f64).collect();
    let mut parts = Vec::new();
    for cluster in [2usize, 3] {
        for l in 1..=4usize {
            for scheme in Scheme::ALL {
                if scheme == Scheme::Zf && l < cluster {
                    continue;
                }
                let mut methods = vec![Method::Exact, Method::Upper, Method::Lower];
                let closed = match scheme {
                    Scheme::Mf => l == 1,
                    Scheme::Zf => l == cluster,
                };
                if closed {
                    methods.push(Method::ClosedForm);
                }
                for method in methods {
                    let mut prev: Option<CoverageTable> = None;
                    for &g_db in &grid {
                        let params = NetworkParams { antennas: l, cluster_size: cluster, ..Default::default() }
                            .with_gamma(db_to_linear(g_db));
                        let t = coverage_table(&params, scheme, method)?;
                        let name = format!("{scheme}_{method}_L{l}_K{cluster}_{g_db}dB");
                        parts.push(table_monotone(&format!("{name}_in_k"), &t));
                        if let Some(p) = &prev {
                            let up = t.values().iter().zip(p.values()).any(|(a, b)| *a > b + 1e-12);
                            parts.push(Check::new(format!("{name}_in_gamma"), !up, ""));
                        }
                        prev = Some(t);
                    }
                }
            }
        }
    }
    Ok(Check::all("coverage_tables_monotone", &parts))
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Sample mean and variance of Γ(shape, 1) draws within `sigmas` standard
/// errors of `shape`.
pub fn gamma_moments(name: &str, xs: &[f64], shape: f64, sigmas: f64) -> Check {
    let n = xs.len() as f64;
    let (m, v) = mean_var(xs);
    let mean_se = (shape / n).sqrt();
    // Var of the sample variance: (μ4 − σ⁴)/n, μ4 = 3s² + 6s for Γ(s, 1).
    let var_se = ((2.0 * shape * shape + 6.0 * shape) / n).sqrt();
    let ok = (m - shape).abs() <= sigmas * mean_se && (v - shape).abs() <= sigmas * var_se;
    Check::new(name, ok, format!("mean {m:.4}, var {v:.4}, expected {shape}"))
}

/// Serving and interfering effective gains drawn with explicit beamformers.
pub fn gain_moments(draws: u64, seed: u64) -> Result<Check, HarnessError> {
    let mut parts = Vec::new();
    for (l, cluster) in [(4usize, 2usize), (3, 3), (2, 2)] {
        let params = NetworkParams { antennas: l, cluster_size: cluster, ..Default::default() };
        for scheme in Scheme::ALL {
            let sampler = TrialSampler::new(params, scheme)?;
            let mut serving = Vec::with_capacity(draws as usize);
            let mut interfering = Vec::with_capacity(draws as usize);
            for t in 0..draws {
                let trial = sampler.sample(seed, t)?;
                serving.push(trial.serving_gain[0]);
                interfering.push(trial.interferer_gain);
            }
            let shape = scheme.gain_shape(l, cluster) as f64;
            parts.push(gamma_moments(&format!("{scheme}_serving_L{l}_K{cluster}"), &serving, shape, 3.0));
            parts.push(gamma_moments(&format!("{scheme}_interferer_L{l}_K{cluster}"), &interfering, 1.0, 3.0));
        }
    }
    Ok(Check::all("gain_moments", &parts))
}

/// Largest ZF leakage toward nulled users over `draws` deployments.
pub fn zf_orthogonality(draws: u64, seed: u64, tol: f64) -> Result<Check, HarnessError> {
    let params = NetworkParams { antennas: 4, cluster_size: 3, ..Default::default() };
    let sampler = TrialSampler::new(params, Scheme::Zf)?;
    let mut worst: f64 = 0.0;
    for t in 0..draws {
        worst = worst.max(sampler.sample(seed, t)?.nulling_residual);
    }
    Ok(Check::new("zf_orthogonality", worst <= tol, format!("max residual {worst:.3e} over {draws} draws")))
}

pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// One-sample KS test of simulated k-th nearest distances at the 1% level.
pub fn distance_ks(draws: u64, seed: u64) -> Result<Check, HarnessError> {
    let params = NetworkParams { cluster_size: 3, ..Default::default() };
    let sampler = TrialSampler::new(params, Scheme::Mf)?.with_model(InterfererModel::Fast);
    let mut dists: Vec<Vec<f64>> = vec![Vec::new(); 3];
    for t in 0..draws {
        let trial = sampler.sample(seed, t)?;
        for (k, d) in trial.cluster_distances.iter().enumerate() {
            dists[k].push(*d);
        }
    }
    let critical = 1.628 / (draws as f64).sqrt();
    let mut parts = Vec::new();
    for (k, mut r) in dists.into_iter().enumerate() {
        let law = DistanceLaw::KthNearest { lambda_b: params.lambda_b, k: k + 1 };
        let d = ks_statistic(&mut r, |x| law.cdf(x).unwrap_or(f64::NAN));
        parts.push(Check::new(format!("ks_k{}", k + 1), d < critical, format!("D {d:.5} vs {critical:.5}")));
    }
    let detail: Vec<String> = parts.iter().map(|c| format!("{} {}", c.name, c.detail)).collect();
    let mut c = Check::all("distance_ks", &parts);
    c.detail = format!("{}; {}", c.detail, detail.join("; "));
    Ok(c)
}

/// `E[δ_k²] = k/K` by quadrature.
pub fn ratio_moments(tol: f64) -> Result<Check, HarnessError> {
    let mut worst: f64 = 0.0;
    for cluster in 2..=6 {
        for k in 1..cluster {
            let m = ratio_second_moment(k, cluster)?;
            worst = worst.max((m - k as f64 / cluster as f64).abs());
        }
    }
    Ok(Check::new("ratio_second_moment", worst <= tol, format!("max error {worst:.3e}")))
}

/// Random instance with `N ≤ max_files` and a non-increasing coverage table.
pub fn random_instance<R: Rng>(rng: &mut R, max_files: usize) -> (ContentParams, CoverageTable) {
    let n = rng.random_range(2..=max_files);
    let m = rng.random_range(1..n);
    let delta = rng.random_range(0.0..2.0);
    let cluster = rng.random_range(2..=4);
    let mut cov = vec![rng.random_range(0.05..1.0)];
    for _ in 1..cluster {
        let last = *cov.last().unwrap();
        cov.push(last * rng.random_range(0.0..1.0));
    }
    let scheme = if rng.random::<bool>() { Scheme::Mf } else { Scheme::Zf };
    (
        ContentParams::zipf(n, delta, m).expect("valid instance"),
        CoverageTable::new(scheme, Method::Upper, cov).expect("valid table"),
    )
}

/// Solver against the brute-force oracle plus certificates, on `instances`
/// random problems.
pub fn optimizer_correctness(instances: u64, seed: u64, stp_tol: f64) -> Result<Vec<Check>, HarnessError> {
    let mut worst_gap: f64 = 0.0;
    let mut kkt_ok = true;
    let mut worst_budget: f64 = 0.0;
    let mut worst_mpc: f64 = f64::INFINITY;
    for i in 0..instances {
        let mut rng = RngStream::new(seed, i).rng();
        let (content, table) = random_instance(&mut rng, 6);
        let r = optimize_caching(&content, &table)?;
        let o = brute_force_oracle(&content, &table, 1e-2)?;
        worst_gap = worst_gap.max((r.stp - o.stp).abs());
        kkt_ok &= r.kkt.satisfied(content.popularity()[0]);
        worst_budget = worst_budget.max((r.policy.total() - content.cache_size() as f64).abs());
        let mpc = stp_analytic(content.popularity(), &mpc_policy(&content), &table)?;
        worst_mpc = worst_mpc.min(r.stp - mpc);
    }
    let mut flat_err: f64 = 0.0;
    for (n, m) in [(10usize, 3usize), (7, 2), (100, 10), (6, 5)] {
        let content = ContentParams::new(vec![1.0 / n as f64; n], m)?;
        for cov in [vec![0.7, 0.31], vec![0.9, 0.5, 0.1], vec![0.4, 0.0]] {
            let table = CoverageTable::new(Scheme::Mf, Method::Upper, cov)?;
            let r = optimize_caching(&content, &table)?;
            for &b in r.policy.probabilities() {
                flat_err = flat_err.max((b - m as f64 / n as f64).abs());
            }
        }
    }
    Ok(vec![
        Check::new("optimizer_vs_oracle", worst_gap <= stp_tol, format!("max |ΔSTP| {worst_gap:.3e} over {instances} instances")),
        Check::new("optimizer_kkt", kkt_ok, "interior ≤ 1e-6·p1, boundary sign slack 1e-9"),
        Check::new("optimizer_budget", worst_budget <= 1e-6, format!("max |Σb − M| {worst_budget:.3e}")),
        Check::new("optimizer_uniform_flat", flat_err <= 1e-9, format!("max |b − M/N| {flat_err:.3e}")),
        Check::new("optimizer_beats_mpc", worst_mpc >= -1e-9, format!("min STP(OPC) − STP(MPC) {worst_mpc:.3e}")),
    ])
}

fn opc_stp(params: &NetworkParams, scheme: Scheme, content: &ContentParams) -> Result<(f64, f64, CachePolicy), HarnessError> {
    let table = coverage_table(params, scheme, Method::Upper)?;
    let r = optimize_caching(content, &table)?;
    let mpc = stp_analytic(content.popularity(), &mpc_policy(content), &table)?;
    Ok((r.stp, mpc, r.policy))
}

/// Qualitative orderings between schemes, Zipf exponents and policies.
pub fn figure_claims() -> Result<Vec<Check>, HarnessError> {
    let content = ContentParams::zipf(100, 0.9, 10)?;
    let fine: Vec<f64> = (-10..=20).map(f64::from).collect();
    let mut out = Vec::new();

    let mut worst: f64 = f64::INFINITY;
    for &g in &fine {
        let p = NetworkParams::default().with_antennas(4).with_gamma(db_to_linear(g));
        let zf = opc_stp(&p, Scheme::Zf, &content)?.0;
        let mf = opc_stp(&p, Scheme::Mf, &content)?.0;
        worst = worst.min(zf - mf);
    }
    out.push(Check::new("zf_beats_mf_L4", worst >= 0.0, format!("min STP_ZF − STP_MF {worst:.4e} over −10..20 dB")));

    let mut worst: f64 = f64::INFINITY;
    for &g in fine.iter().filter(|&&g| g < 10.0) {
        let p = NetworkParams::default().with_gamma(db_to_linear(g));
        let zf = opc_stp(&p, Scheme::Zf, &content)?.0;
        let mf = opc_stp(&p, Scheme::Mf, &content)?.0;
        worst = worst.min(mf - zf);
    }
    out.push(Check::new("mf_beats_zf_L2_below_10dB", worst >= 0.0, format!("min STP_MF − STP_ZF {worst:.4e}")));

    let p = NetworkParams::default().with_antennas(4);
    let mut monotone = true;
    let mut gap: f64 = 0.0;
    for scheme in Scheme::ALL {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=25 {
            let c = ContentParams::zipf(100, 0.1 * i as f64, 20)?;
            let (s, _, _) = opc_stp(&p, scheme, &c)?;
            monotone &= s >= prev - 1e-12;
            prev = s;
        }
        let (opc, mpc, _) = opc_stp(&p, scheme, &ContentParams::zipf(100, 2.0, 20)?)?;
        gap = gap.max(opc - mpc);
    }
    out.push(Check::new("stp_non_decreasing_in_delta", monotone, "δ = 0..2.5, N=100, M=20, L=4, K=2"));
    out.push(Check::new("opc_mpc_gap_delta2", gap <= 0.01, format!("max OPC − MPC {gap:.4e} at δ=2")));

    let mpc = mpc_policy(&content);
    for scheme in Scheme::ALL {
        let (opc, mpc_stp, high) = opc_stp(&p.with_gamma(db_to_linear(10.0)), scheme, &content)?;
        let dist = high.max_abs_diff(&mpc);
        out.push(Check::new(
            format!("{scheme}_opc_near_mpc_10dB"),
            dist <= 0.05,
            format!("ℓ∞ distance {dist:.4}, STP OPC − MPC {:.2e}", opc - mpc_stp),
        ));
        let (_, _, low) = opc_stp(&p.with_gamma(db_to_linear(-10.0)), scheme, &content)?;
        let spread = commands::files_above(&low, 0.01);
        out.push(Check::new(
            format!("{scheme}_opc_spreads_at_minus_10dB"),
            spread > content.cache_size(),
            format!("{spread} files with b > 0.01 (M = {})", content.cache_size()),
        ));
    }
    Ok(out)
}

/// Coverage and STP CSVs are byte-identical across repeats and worker counts.
pub fn determinism(trials: u64, worker_counts: &[usize]) -> Result<Check, HarnessError> {
    let mut reference: Option<(Vec<u8>, Vec<u8>)> = None;
    let mut ok = true;
    for &w in worker_counts.iter().chain(worker_counts.first()) {
        let cfg = ExperimentConfig {
            trials,
            workers: w,
            gamma_db: vec![-5.0, 0.0, 5.0],
            ..Default::default()
        };
        let cov = commands::coverage(&cfg)?.to_csv()?;
        let sim = commands::simulate(&ExperimentConfig { gamma_db: vec![0.0], ..cfg })?.to_csv()?;
        match &reference {
            None => reference = Some((cov, sim)),
            Some((c, s)) => ok &= *c == cov && *s == sim,
        }
    }
    Ok(Check::new("determinism", ok, format!("workers {worker_counts:?}, {trials} trials")))
}
