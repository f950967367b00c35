use multicache_core::analysis::{coverage_table, stp_analytic, CoverageTable, Method};
use multicache_core::network::{NetworkParams, Scheme};
use multicache_core::optimizer::{
    brute_force_oracle, cache_from_dual, mpc_policy, optimize_caching, stationarity_residual,
};
use multicache_core::{CachePolicy, ContentParams};
use proptest::prelude::*;

/// Non-increasing coverage table with `P^1 > 0`.
fn coverage_strategy() -> impl Strategy<Value = Vec<f64>> {
    (2usize..5, 0.05f64..1.0).prop_flat_map(|(k, first)| {
        proptest::collection::vec(0.0f64..1.0, k - 1).prop_map(move |ratios| {
            let mut v = vec![first];
            for r in ratios {
                let last = *v.last().unwrap();
                v.push(last * r);
            }
            v
        })
    })
}

fn instance() -> impl Strategy<Value = (ContentParams, CoverageTable)> {
    (3usize..40, 0.0f64..2.5, 0.0f64..1.0, coverage_strategy()).prop_map(|(n, delta, frac, cov)| {
        let m = 1 + ((n - 2) as f64 * frac) as usize;
        (
            ContentParams::zipf(n, delta, m).unwrap(),
            CoverageTable::new(Scheme::Mf, Method::Upper, cov).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimizer_output_is_feasible_and_certified((content, table) in instance()) {
        let r = optimize_caching(&content, &table).unwrap();
        let b = r.policy.probabilities();
        prop_assert!(b.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert!((r.policy.total() - content.cache_size() as f64).abs() <= 1e-6);
        prop_assert!(r.kkt.satisfied(content.popularity()[0]), "{:?}", r.kkt);
        prop_assert!(r.dual.mu_l <= r.mu_star && r.mu_star <= r.dual.mu_u);
        // Non-increasing popularity gives a non-increasing policy.
        for w in b.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-9);
        }
        let p = content.popularity();
        let mpc = stp_analytic(p, &mpc_policy(&content), &table).unwrap();
        let uniform = CachePolicy::uniform(content.library_size(), content.cache_size());
        let flat = stp_analytic(p, &uniform, &table).unwrap();
        prop_assert!(r.stp >= mpc - 1e-9);
        prop_assert!(r.stp >= flat - 1e-9);
    }

    #[test]
    fn dual_sum_non_increasing((content, table) in instance()) {
        let p = content.popularity();
        let top = p[0] * table.values().iter().sum::<f64>();
        let mut prev_sum = f64::INFINITY;
        let mut prev: Option<CachePolicy> = None;
        for i in 0..=100 {
            let mu = top * i as f64 / 100.0;
            let b = cache_from_dual(mu, p, &table).unwrap();
            prop_assert!(b.total() <= prev_sum + 1e-12);
            if let Some(prev) = &prev {
                for (x, y) in b.probabilities().iter().zip(prev.probabilities()) {
                    prop_assert!(x <= &(y + 1e-12));
                }
            }
            prev_sum = b.total();
            prev = Some(b);
        }
    }

    #[test]
    fn residual_non_increasing_in_w(cov in coverage_strategy(), p in 0.01f64..1.0, mu in 0.0f64..0.5) {
        let table = CoverageTable::new(Scheme::Zf, Method::Upper, cov).unwrap();
        let pop = [p];
        let mut prev = f64::INFINITY;
        for i in 0..=200 {
            let w = i as f64 / 200.0;
            let r = stationarity_residual(w, 0, mu, &pop, &table);
            prop_assert!(r <= prev + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn stp_concave_along_segments(
        (content, table) in instance(),
        a in proptest::collection::vec(0.0f64..1.0, 40),
        c in proptest::collection::vec(0.0f64..1.0, 40),
    ) {
        let n = content.library_size();
        let p = content.popularity();
        let scale = |v: &[f64]| {
            let s: f64 = v[..n].iter().sum();
            let f = (content.cache_size() as f64 / s).min(1.0);
            CachePolicy::new(v[..n].iter().map(|x| x * f).collect()).unwrap()
        };
        let (x, y) = (scale(&a), scale(&c));
        let mid = CachePolicy::new(
            x.probabilities().iter().zip(y.probabilities()).map(|(u, v)| 0.5 * (u + v)).collect(),
        )
        .unwrap();
        let fx = stp_analytic(p, &x, &table).unwrap();
        let fy = stp_analytic(p, &y, &table).unwrap();
        let fm = stp_analytic(p, &mid, &table).unwrap();
        prop_assert!(fm >= 0.5 * (fx + fy) - 1e-9);
    }
}

#[test]
fn spec_instance_matches_oracle() {
    let content = ContentParams::zipf(5, 0.9, 2).unwrap();
    let table = CoverageTable::new(Scheme::Mf, Method::Upper, vec![0.6, 0.3]).unwrap();
    let r = optimize_caching(&content, &table).unwrap();
    let o = brute_force_oracle(&content, &table, 1e-2).unwrap();
    assert!((r.stp - o.stp).abs() <= 1e-4);
    for v in &o.start_values {
        assert!((v - o.stp).abs() <= 1e-6, "starts disagree: {:?}", o.start_values);
    }
}

#[test]
fn steep_popularity_matches_mpc() {
    let content = ContentParams::zipf(100, 10.0, 10).unwrap();
    let table = coverage_table(&NetworkParams::default(), Scheme::Mf, Method::Upper).unwrap();
    let r = optimize_caching(&content, &table).unwrap();
    assert!(r.policy.max_abs_diff(&mpc_policy(&content)) <= 1e-3);
}

#[test]
fn steep_popularity_keeps_interior_files_when_coverage_is_flat() {
    // Thresholds of files M and M+1 overlap once P2/P1 exceeds
    // ((N/(N+1))^-δ - 1)/((N/(N+1))^-δ + 1); OPC then splits mass between them.
    let content = ContentParams::zipf(100, 10.0, 10).unwrap();
    let table = CoverageTable::new(Scheme::Mf, Method::Upper, vec![0.6, 0.3]).unwrap();
    let r = optimize_caching(&content, &table).unwrap();
    let b = r.policy.probabilities();
    assert!(b[9] < 1.0 && b[10] > 0.0);
    let mpc = stp_analytic(content.popularity(), &mpc_policy(&content), &table).unwrap();
    assert!(r.stp >= mpc && r.stp - mpc < 1e-10);
}

#[test]
fn uniform_popularity_flat_exactly() {
    for (n, m) in [(10, 3), (7, 2), (100, 10)] {
        let content = ContentParams::new(vec![1.0 / n as f64; n], m).unwrap();
        let table = CoverageTable::new(Scheme::Zf, Method::Upper, vec![0.7, 0.31, 0.1]).unwrap();
        let r = optimize_caching(&content, &table).unwrap();
        let target = m as f64 / n as f64;
        for &b in r.policy.probabilities() {
            assert!((b - target).abs() <= 1e-9, "{b} vs {target}");
        }
    }
}

fn small_instance() -> impl Strategy<Value = (ContentParams, CoverageTable)> {
    (2usize..=6, 0.0f64..2.0, 0.0f64..1.0, coverage_strategy()).prop_map(|(n, delta, frac, cov)| {
        let m = 1 + ((n - 2) as f64 * frac).round() as usize;
        (
            ContentParams::zipf(n, delta, m.min(n - 1)).unwrap(),
            CoverageTable::new(Scheme::Zf, Method::Upper, cov).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn solver_agrees_with_oracle((content, table) in small_instance()) {
        let r = optimize_caching(&content, &table).unwrap();
        let o = brute_force_oracle(&content, &table, 1e-2).unwrap();
        prop_assert!((r.stp - o.stp).abs() <= 1e-4, "{} vs {}", r.stp, o.stp);
        prop_assert!(r.stp >= o.stp - 1e-9);
    }
}
