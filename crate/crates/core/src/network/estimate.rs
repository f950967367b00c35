use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::Rng;

use super::{CacheLayout, InterfererModel, ModelError, NetworkParams, RngStream, Scheme, TrialSampler, TrialSir};
use crate::content::{CachePolicy, ContentParams};

/// Monte Carlo estimate of a probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { estimate: 0.0, stderr: 0.0, trials };
        }
        let p = successes as f64 / trials as f64;
        Self {
            estimate: p,
            stderr: libm::sqrt(p * (1.0 - p) / trials as f64),
            trials,
        }
    }
}

/// Success counts of SIR ≥ γ for every serving rank and every γ on a grid.
///
/// Counts are integers, so merging partial sweeps in any order gives the
/// same result.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSweep {
    gammas: Vec<f64>,
    cluster_size: usize,
    /// `counts[(k - 1) * gammas.len() + g]`.
    counts: Vec<u64>,
    trials: u64,
}

impl CoverageSweep {
    pub fn new(cluster_size: usize, gammas: Vec<f64>) -> Self {
        Self {
            counts: vec![0; cluster_size * gammas.len()],
            gammas,
            cluster_size,
            trials: 0,
        }
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn cluster_size(&self) -> usize {
        self.cluster_size
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn accumulate(&mut self, trial: &TrialSir) {
        let g = self.gammas.len();
        for (k, &sir) in trial.sir.iter().enumerate().take(self.cluster_size) {
            for (j, &gamma) in self.gammas.iter().enumerate() {
                if sir >= gamma {
                    self.counts[k * g + j] += 1;
                }
            }
        }
        self.trials += 1;
    }

    /// Adds the counts of `other`, which must cover the same grid.
    pub fn merge(&mut self, other: &CoverageSweep) {
        assert_eq!(self.gammas, other.gammas, "merging sweeps over different grids");
        assert_eq!(self.cluster_size, other.cluster_size);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
    }

    /// Runs the trials `range` of the run seeded with `seed`.
    pub fn run(&mut self, sampler: &TrialSampler, seed: u64, range: Range<u64>) -> Result<(), ModelError> {
        for t in range {
            self.accumulate(&sampler.sample(seed, t)?);
        }
        Ok(())
    }

    pub fn count(&self, k: usize, gamma_index: usize) -> u64 {
        self.counts[(k - 1) * self.gammas.len() + gamma_index]
    }

    /// Coverage estimate for serving rank `k` (1-based) at grid point `gamma_index`.
    pub fn estimate(&self, k: usize, gamma_index: usize) -> Estimate {
        Estimate::from_counts(self.count(k, gamma_index), self.trials)
    }
}

/// `P[SIR ≥ γ]` for serving rank `k`, estimated over `trials` independent
/// deployments with explicit beamformer construction.
pub fn estimate_coverage_mc(
    params: &NetworkParams,
    k: usize,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> Result<Estimate, ModelError> {
    if trials == 0 {
        return Err(ModelError::NoTrials);
    }
    if k == 0 || k > params.cluster_size {
        return Err(ModelError::InvalidRank { rank: k, cluster_size: params.cluster_size });
    }
    let sampler = TrialSampler::new(*params, scheme)?;
    let mut sweep = CoverageSweep::new(params.cluster_size, vec![params.gamma]);
    sweep.run(&sampler, seed, 0..trials)?;
    Ok(sweep.estimate(k, 0))
}

/// Successful local deliveries out of a number of requests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StpCounts {
    pub successes: u64,
    pub trials: u64,
}

impl StpCounts {
    pub fn merge(&mut self, other: StpCounts) {
        self.successes += other.successes;
        self.trials += other.trials;
    }

    pub fn estimate(&self) -> Estimate {
        Estimate::from_counts(self.successes, self.trials)
    }
}

fn sample_index<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// One request of the typical user: draws the deployment and gains, the
/// cache content of the K cluster SBSs and the requested file. Succeeds iff
/// the nearest cluster SBS holding the file reaches SIR ≥ γ.
pub fn stp_trial(
    sampler: &TrialSampler,
    layout: &CacheLayout,
    popularity_cdf: &[f64],
    seed: u64,
    trial: u64,
) -> Result<bool, ModelError> {
    let mut rng = RngStream::new(seed, trial).rng();
    let sirs = sampler.sample_with(&mut rng)?;
    let file = sample_index(popularity_cdf, &mut rng);
    for sir in &sirs.sir {
        let u = rng.random::<f64>();
        if layout.contains(file, u) {
            return Ok(*sir >= sampler.params().gamma);
        }
    }
    Ok(false)
}

/// Cumulative request probabilities, for [`stp_trial`].
pub fn popularity_cdf(popularity: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    popularity
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// Successful transmission probability of policy `b`, estimated over
/// `trials` requests.
pub fn estimate_stp_mc(
    params: &NetworkParams,
    content: &ContentParams,
    policy: &CachePolicy,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> Result<Estimate, ModelError> {
    estimate_stp_mc_with(params, content, policy, scheme, InterfererModel::Explicit, 0..trials, seed)
        .map(|c| c.estimate())
}

/// Counts for the trials `range`; partial ranges merge exactly.
pub fn estimate_stp_mc_with(
    params: &NetworkParams,
    content: &ContentParams,
    policy: &CachePolicy,
    scheme: Scheme,
    model: InterfererModel,
    range: Range<u64>,
    seed: u64,
) -> Result<StpCounts, ModelError> {
    if range.is_empty() {
        return Err(ModelError::NoTrials);
    }
    policy.check_budget(content)?;
    let sampler = TrialSampler::new(*params, scheme)?.with_model(model);
    let layout = CacheLayout::new(policy, content.cache_size())?;
    let cdf = popularity_cdf(content.popularity());
    let mut counts = StpCounts::default();
    for t in range {
        counts.successes += u64::from(stp_trial(&sampler, &layout, &cdf, seed, t)?);
        counts.trials += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_gamma_always_covered() {
        let params = NetworkParams { gamma: 1e-6, ..Default::default() };
        let e = estimate_coverage_mc(&params, 2, Scheme::Mf, 300, 1).unwrap();
        assert_eq!(e.estimate, 1.0);
    }

    #[test]
    fn sweep_merge_matches_single_run() {
        let params = NetworkParams::default();
        let sampler = TrialSampler::new(params, Scheme::Zf).unwrap();
        let grid = vec![0.1, 1.0, 10.0];
        let mut whole = CoverageSweep::new(2, grid.clone());
        whole.run(&sampler, 3, 0..200).unwrap();
        let mut a = CoverageSweep::new(2, grid.clone());
        let mut b = CoverageSweep::new(2, grid);
        b.run(&sampler, 3, 120..200).unwrap();
        a.run(&sampler, 3, 0..120).unwrap();
        a.merge(&b);
        assert_eq!(a, whole);
    }

    #[test]
    fn empty_cache_never_succeeds() {
        let params = NetworkParams::default();
        let content = ContentParams::zipf(10, 0.9, 2).unwrap();
        let e = estimate_stp_mc(&params, &content, &CachePolicy::zeros(10), Scheme::Mf, 200, 5)
            .unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let params = NetworkParams::default();
        assert_eq!(
            estimate_coverage_mc(&params, 1, Scheme::Mf, 0, 0),
            Err(ModelError::NoTrials)
        );
    }
}
