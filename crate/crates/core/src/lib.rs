//! Analysis and optimization of probabilistic caching in multi-antenna
//! small-cell networks.
//!
//! The crate has four layers:
//!
//! * [`numerics`]: incomplete Beta, tail integrals, adaptive quadrature,
//!   Laplace-transform derivative recursions and the small complex linear
//!   algebra used by zero-forcing.
//! * [`network`]: Monte Carlo ground truth. Poisson deployments, Rayleigh
//!   channels, MF/ZF beamformers, SIR samples and coverage/STP estimators.
//! * [`analysis`]: exact coverage integrals, Alzer-type bounds, closed forms,
//!   distance laws and the analytic successful transmission probability.
//! * [`optimizer`]: the KKT/bisection cache placement solver, the
//!   most-popular baseline and a brute-force oracle.
//!
//! Everything here is `no_std` + `alloc`. Parallel drivers, file formats
//! and the CLI live in the `multicache` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod content;
pub mod network;
pub mod numerics;
pub mod optimizer;

pub use analysis::{CoverageTable, Method};
pub use content::{zipf_popularity, CachePolicy, ContentParams};
pub use network::{NetworkParams, Scheme};

/// Converts an SIR target in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}
