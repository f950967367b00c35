//! Monte Carlo ground truth: Poisson deployments, Rayleigh channels,
//! MF/ZF beamformers, SIR samples and coverage / STP estimators.
//!
//! Trial `t` of a run with seed `s` always draws from the counter-based
//! stream `(s, t)`, so results do not depend on how trials are split
//! between workers.

mod cache;
mod deployment;
mod estimate;
mod params;
mod rng;
mod sir;

pub use crate::content::zipf_popularity;
pub use cache::{sample_cache_realization, CacheLayout};
pub use deployment::{draw_channels, sample_ppp, sample_ppp_square, Deployment};
pub use estimate::{
    estimate_coverage_mc, estimate_stp_mc, estimate_stp_mc_with, popularity_cdf, stp_trial,
    CoverageSweep, Estimate, StpCounts,
};
pub use params::{InterfererModel, NetworkParams, Scheme};
pub use rng::RngStream;
pub use sir::{simulate_sir, SirSample, TrialSampler, TrialSir};

use thiserror::Error;

use crate::content::ContentError;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid network parameter `{field}`: {reason}")]
    InvalidParams {
        field: &'static str,
        reason: &'static str,
    },
    #[error("serving rank {rank} is outside 1..={cluster_size}")]
    InvalidRank { rank: usize, cluster_size: usize },
    #[error("no valid deployment after {attempts} attempts (fewer than K SBSs inside the guard radius)")]
    ResampleExhausted { attempts: usize },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Content(#[from] ContentError),
}
