use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use super::deployment::{effective, fill_cn, sample_ppp, zf_beamformer, Deployment};
use super::{InterfererModel, ModelError, NetworkParams, RngStream, Scheme};
use crate::numerics::ZfWorkspace;

/// Received signal and interference of the typical user for one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSample {
    pub signal_power: f64,
    pub interference_power: f64,
    pub sir: f64,
    pub serving_rank: usize,
}

impl SirSample {
    fn new(signal_power: f64, interference_power: f64, serving_rank: usize) -> Self {
        Self {
            signal_power,
            interference_power,
            sir: signal_power / interference_power,
            serving_rank,
        }
    }
}

fn path_loss(distance: f64, alpha: f64) -> f64 {
    libm::pow(distance, -alpha)
}

/// Realizes channels and beamformers on `deployment` with SBS rank `k`
/// serving the typical user, and returns its SIR.
///
/// Under ZF the other cluster members are excluded from the interference
/// sum; their beamformers null the typical user (their realized gains are at
/// roundoff level).
pub fn simulate_sir<R: Rng + ?Sized>(
    params: &NetworkParams,
    deployment: &mut Deployment,
    k: usize,
    scheme: Scheme,
    rng: &mut R,
) -> Result<SirSample, ModelError> {
    deployment.realize(params, scheme, k, rng)?;
    let first_interferer = match scheme {
        Scheme::Mf => 0,
        Scheme::Zf => params.cluster_size,
    };
    let signal = deployment.gains[k - 1] * path_loss(deployment.distances[k - 1], params.alpha);
    let terms: Vec<f64> = (first_interferer..deployment.len())
        .filter(|&i| i != k - 1)
        .map(|i| deployment.gains[i] * path_loss(deployment.distances[i], params.alpha))
        .collect();
    Ok(SirSample::new(signal, crate::content::pairwise_sum(&terms), k))
}

/// SIRs of one Monte Carlo trial for every serving rank `k = 1..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSir {
    pub sir: Vec<f64>,
    /// Serving-link gain of each cluster rank.
    pub serving_gain: Vec<f64>,
    /// `r_1..r_K`.
    pub cluster_distances: Vec<f64>,
    /// Gain toward the typical user of the nearest out-of-cluster SBS.
    pub interferer_gain: f64,
    /// Largest `|g · w|` over nulled users across the cluster (ZF only).
    pub nulling_residual: f64,
}

/// Draws complete trials for a fixed network and scheme.
///
/// Each SBS gets one channel toward the typical user. Rank `k`'s SIR uses
/// that SBS's serving-link gain and every other SBS's interfering gain, so
/// all K marginals come out of one deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSampler {
    params: NetworkParams,
    scheme: Scheme,
    model: InterfererModel,
}

const MAX_DEPLOYMENT_ATTEMPTS: usize = 32;

impl TrialSampler {
    pub fn new(params: NetworkParams, scheme: Scheme) -> Result<Self, ModelError> {
        params.validate_for(scheme)?;
        Ok(Self {
            params,
            scheme,
            model: InterfererModel::Explicit,
        })
    }

    pub fn with_model(mut self, model: InterfererModel) -> Self {
        self.model = model;
        self
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn model(&self) -> InterfererModel {
        self.model
    }

    /// Trial `trial` of the run seeded with `seed`.
    pub fn sample(&self, seed: u64, trial: u64) -> Result<TrialSir, ModelError> {
        let mut rng = RngStream::new(seed, trial).rng();
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialSir, ModelError> {
        let p = &self.params;
        let k_cluster = p.cluster_size;
        let mut d2 = Vec::new();
        let mut found = false;
        for _ in 0..MAX_DEPLOYMENT_ATTEMPTS {
            let positions = sample_ppp(p, rng);
            if positions.len() < k_cluster {
                continue;
            }
            d2.clear();
            d2.extend(positions.iter().map(|q| q[0] * q[0] + q[1] * q[1]));
            d2.select_nth_unstable_by(k_cluster - 1, f64::total_cmp);
            d2[..k_cluster].sort_unstable_by(f64::total_cmp);
            if d2[k_cluster - 1] <= p.guard_radius * p.guard_radius {
                found = true;
                break;
            }
        }
        if !found {
            return Err(ModelError::ResampleExhausted {
                attempts: MAX_DEPLOYMENT_ATTEMPTS,
            });
        }

        let half_alpha = 0.5 * p.alpha;
        let loss = |sq: f64| libm::pow(sq, -half_alpha);
        let mut gains = GainDrawer::new(p, self.scheme, self.model);

        let mut serving_gain = vec![0.0; k_cluster];
        let mut near_interf = vec![0.0; k_cluster];
        for i in 0..k_cluster {
            let (serve, interf) = gains.cluster_member(rng)?;
            serving_gain[i] = serve;
            near_interf[i] = interf * loss(d2[i]);
        }
        let mut far = Vec::with_capacity(d2.len() - k_cluster);
        for &sq in &d2[k_cluster..] {
            far.push((sq, gains.outsider(rng)?));
        }
        let interferer_gain = far
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map_or(0.0, |&(_, g)| g);
        let far_terms: Vec<f64> = far.iter().map(|&(sq, g)| g * loss(sq)).collect();
        let i_far = crate::content::pairwise_sum(&far_terms);

        let sir = (0..k_cluster)
            .map(|k| {
                let signal = serving_gain[k] * loss(d2[k]);
                let interference = match self.scheme {
                    Scheme::Mf => {
                        i_far
                            + near_interf
                                .iter()
                                .enumerate()
                                .filter(|&(j, _)| j != k)
                                .map(|(_, v)| v)
                                .sum::<f64>()
                    }
                    Scheme::Zf => i_far,
                };
                signal / interference
            })
            .collect();

        Ok(TrialSir {
            sir,
            serving_gain,
            cluster_distances: d2[..k_cluster].iter().map(|&s| libm::sqrt(s)).collect(),
            interferer_gain,
            nulling_residual: gains.nulling_residual,
        })
    }
}

/// Per-SBS gain generator with reusable scratch buffers.
struct GainDrawer {
    scheme: Scheme,
    model: InterfererModel,
    antennas: usize,
    shape: usize,
    h: Vec<Complex64>,
    own: Vec<Complex64>,
    nulled: Vec<Complex64>,
    w: Vec<Complex64>,
    conj_target: Vec<Complex64>,
    conj_cols: Vec<Complex64>,
    ws: ZfWorkspace,
    nulling_residual: f64,
}

impl GainDrawer {
    fn new(p: &NetworkParams, scheme: Scheme, model: InterfererModel) -> Self {
        let l = p.antennas;
        let zero = Complex64::new(0.0, 0.0);
        Self {
            scheme,
            model,
            antennas: l,
            shape: scheme.gain_shape(l, p.cluster_size),
            h: vec![zero; l],
            own: vec![zero; l],
            nulled: vec![zero; (p.cluster_size - 1) * l],
            w: vec![zero; l],
            conj_target: vec![zero; l],
            conj_cols: Vec::with_capacity((p.cluster_size - 1) * l),
            ws: ZfWorkspace::new(),
            nulling_residual: 0.0,
        }
    }

    fn gamma_sample<R: Rng + ?Sized>(shape: usize, rng: &mut R) -> f64 {
        (0..shape).map(|_| rng.sample::<f64, _>(Exp1)).sum()
    }

    /// Gain of an SBS toward the typical user while serving someone else,
    /// with no nulling of the typical user.
    fn outsider<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<f64, ModelError> {
        if self.model == InterfererModel::Fast {
            return Ok(rng.sample::<f64, _>(Exp1));
        }
        fill_cn(rng, &mut self.h);
        fill_cn(rng, &mut self.own);
        match self.scheme {
            Scheme::Mf => {
                let norm_sqr: f64 = self.own.iter().map(|z| z.norm_sqr()).sum();
                let dot: Complex64 = self.h.iter().zip(&self.own).map(|(a, b)| a * b.conj()).sum();
                Ok(dot.norm_sqr() / norm_sqr)
            }
            Scheme::Zf => {
                fill_cn(rng, &mut self.nulled);
                zf_beamformer(
                    &mut self.ws,
                    &self.own,
                    &mut self.nulled,
                    0,
                    self.antennas,
                    rng,
                    &mut self.conj_target,
                    &mut self.conj_cols,
                    &mut self.w,
                )?;
                Ok(effective(&self.h, &self.w).norm_sqr())
            }
        }
    }

    /// `(serving gain, interfering gain)` of a cluster member.
    ///
    /// Under ZF a non-serving cluster member nulls the typical user, so its
    /// interfering gain is reported as 0.
    fn cluster_member<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(f64, f64), ModelError> {
        if self.model == InterfererModel::Fast {
            let serve = Self::gamma_sample(self.shape, rng);
            let interf = match self.scheme {
                Scheme::Mf => rng.sample::<f64, _>(Exp1),
                Scheme::Zf => 0.0,
            };
            return Ok((serve, interf));
        }
        fill_cn(rng, &mut self.h);
        match self.scheme {
            Scheme::Mf => {
                let serve: f64 = self.h.iter().map(|z| z.norm_sqr()).sum();
                fill_cn(rng, &mut self.own);
                let norm_sqr: f64 = self.own.iter().map(|z| z.norm_sqr()).sum();
                let dot: Complex64 = self.h.iter().zip(&self.own).map(|(a, b)| a * b.conj()).sum();
                Ok((serve, dot.norm_sqr() / norm_sqr))
            }
            Scheme::Zf => {
                fill_cn(rng, &mut self.nulled);
                zf_beamformer(
                    &mut self.ws,
                    &self.h,
                    &mut self.nulled,
                    0,
                    self.antennas,
                    rng,
                    &mut self.conj_target,
                    &mut self.conj_cols,
                    &mut self.w,
                )?;
                let residual = self
                    .nulled
                    .chunks(self.antennas)
                    .map(|g| effective(g, &self.w).norm())
                    .fold(0.0, f64::max);
                self.nulling_residual = self.nulling_residual.max(residual);
                Ok((effective(&self.h, &self.w).norm_sqr(), 0.0))
            }
        }
    }
}
