//! Parallel Monte Carlo over fixed trial chunks.
//!
//! Trial `t` always draws from stream `t` of the run seed, and partial
//! results are integer counts, so the outcome does not depend on how chunks
//! are spread over workers.

use std::ops::Range;

use multicache_core::network::{
    estimate_stp_mc_with, CoverageSweep, InterfererModel, ModelError, StpCounts, TrialSampler,
};
use multicache_core::{CachePolicy, ContentParams, NetworkParams, Scheme};
use rayon::prelude::*;

pub const CHUNK: u64 = 2048;

fn chunks(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials))
        .collect()
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
}

/// Coverage counts for every serving rank and every linear SIR target in
/// `gammas`. `params.gamma` is ignored.
pub fn coverage_sweep(
    params: &NetworkParams,
    scheme: Scheme,
    model: InterfererModel,
    gammas: &[f64],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<CoverageSweep, ModelError> {
    if trials == 0 {
        return Err(ModelError::NoTrials);
    }
    let sampler = TrialSampler::new(*params, scheme)?.with_model(model);
    let k = params.cluster_size;
    let parts = pool(workers).install(|| {
        chunks(trials)
            .into_par_iter()
            .map(|range| {
                let mut sweep = CoverageSweep::new(k, gammas.to_vec());
                sweep.run(&sampler, seed, range)?;
                Ok(sweep)
            })
            .collect::<Result<Vec<_>, ModelError>>()
    })?;
    let mut total = CoverageSweep::new(k, gammas.to_vec());
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

/// STP of `policy` over `trials` requests.
#[allow(clippy::too_many_arguments)]
pub fn stp_counts(
    params: &NetworkParams,
    content: &ContentParams,
    policy: &CachePolicy,
    scheme: Scheme,
    model: InterfererModel,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<StpCounts, ModelError> {
    if trials == 0 {
        return Err(ModelError::NoTrials);
    }
    let parts = pool(workers).install(|| {
        chunks(trials)
            .into_par_iter()
            .map(|range| estimate_stp_mc_with(params, content, policy, scheme, model, range, seed))
            .collect::<Result<Vec<_>, ModelError>>()
    })?;
    let mut total = StpCounts::default();
    for part in parts {
        total.merge(part);
    }
    Ok(total)
}
