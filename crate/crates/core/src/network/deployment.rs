use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{ModelError, NetworkParams, Scheme};
use crate::numerics::{ComplexVector, NumericsError, ZfWorkspace};

/// Draws from a homogeneous PPP of intensity `lambda` on `[-w, w]^2`.
pub fn sample_ppp_square<R: Rng + ?Sized>(
    lambda: f64,
    half_width: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let side = 2.0 * half_width;
    let mean = lambda * side * side;
    if !(mean > 0.0) || !mean.is_finite() {
        return Vec::new();
    }
    let count = match Poisson::new(mean) {
        Ok(p) => p.sample(rng) as usize,
        Err(_) => return Vec::new(),
    };
    (0..count)
        .map(|_| {
            [
                rng.random_range(-half_width..half_width),
                rng.random_range(-half_width..half_width),
            ]
        })
        .collect()
}

/// SBS positions for one deployment; the typical user sits at the origin.
pub fn sample_ppp<R: Rng + ?Sized>(params: &NetworkParams, rng: &mut R) -> Vec<[f64; 2]> {
    sample_ppp_square(params.lambda_b, params.region_half_width, rng)
}

pub(crate) fn fill_cn<R: Rng + ?Sized>(rng: &mut R, out: &mut [Complex64]) {
    for z in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
    }
}

/// I.i.d. CN(0, I_L) row channels, one per SBS.
pub fn draw_channels<R: Rng + ?Sized>(
    n_sbs: usize,
    antennas: usize,
    rng: &mut R,
) -> Vec<ComplexVector> {
    (0..n_sbs)
        .map(|_| {
            let mut v = ComplexVector::zeros(antennas);
            fill_cn(rng, &mut v.0);
            v
        })
        .collect()
}

/// `h · w` without conjugation: the effective scalar channel of row `h`
/// through beamformer `w`.
pub(crate) fn effective(h: &[Complex64], w: &[Complex64]) -> Complex64 {
    h.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub(crate) fn conj_into(src: &[Complex64], dst: &mut [Complex64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = s.conj();
    }
}

const MAX_DEGENERATE_REDRAWS: usize = 32;

/// Zero-forcing beamformer for a user with row channel `target`, nulling the
/// row channels stored contiguously in `nulled`. Redraws the columns in
/// `fresh_from..` when the draw is degenerate.
#[allow(clippy::too_many_arguments)]
pub(crate) fn zf_beamformer<R: Rng + ?Sized>(
    ws: &mut ZfWorkspace,
    target: &[Complex64],
    nulled: &mut [Complex64],
    fresh_from: usize,
    antennas: usize,
    rng: &mut R,
    conj_target: &mut [Complex64],
    conj_cols: &mut Vec<Complex64>,
    out: &mut [Complex64],
) -> Result<(), ModelError> {
    let n_cols = nulled.len() / antennas;
    conj_into(target, conj_target);
    for _ in 0..MAX_DEGENERATE_REDRAWS {
        conj_cols.clear();
        conj_cols.extend(nulled.iter().map(|z| z.conj()));
        match ws.project(conj_target, conj_cols, n_cols, out) {
            Ok(_) => return Ok(()),
            Err(NumericsError::RankDeficient { .. }) => {
                fill_cn(rng, &mut nulled[fresh_from * antennas..]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(ModelError::Numerics(NumericsError::RankDeficient { estimate: 0.0 }))
}

/// One realized deployment: SBSs sorted by distance from the typical user,
/// with their channels toward it, beamformers and effective gains.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub positions: Vec<[f64; 2]>,
    /// `r_1 ≤ r_2 ≤ …`.
    pub distances: Vec<f64>,
    pub antennas: usize,
    /// Row channel `h_{i0}` of SBS `i`, stored at `i*L..(i+1)*L`.
    pub channels: Vec<Complex64>,
    /// Unit beamformer `w_i`, same layout.
    pub beamformers: Vec<Complex64>,
    /// `|h_{i0} w_i|^2`.
    pub gains: Vec<f64>,
    pub serving_rank: Option<usize>,
    pub scheme: Option<Scheme>,
    /// `max_j |g_j · w_k|` over the users the serving SBS nulls (0 for MF).
    pub nulling_residual: f64,
}

impl Deployment {
    pub fn from_positions(mut positions: Vec<[f64; 2]>) -> Self {
        positions.sort_by(|a, b| {
            (a[0] * a[0] + a[1] * a[1]).total_cmp(&(b[0] * b[0] + b[1] * b[1]))
        });
        let distances = positions
            .iter()
            .map(|p| libm::hypot(p[0], p[1]))
            .collect();
        Self {
            positions,
            distances,
            antennas: 0,
            channels: Vec::new(),
            beamformers: Vec::new(),
            gains: Vec::new(),
            serving_rank: None,
            scheme: None,
            nulling_residual: 0.0,
        }
    }

    /// Samples positions until at least K SBSs lie inside the guard radius.
    pub fn sample<R: Rng + ?Sized>(params: &NetworkParams, rng: &mut R) -> Result<Self, ModelError> {
        params.validate()?;
        for _ in 0..MAX_DEGENERATE_REDRAWS {
            let d = Self::from_positions(sample_ppp(params, rng));
            if d.len() >= params.cluster_size
                && d.distances[params.cluster_size - 1] <= params.guard_radius
            {
                return Ok(d);
            }
        }
        Err(ModelError::ResampleExhausted {
            attempts: MAX_DEGENERATE_REDRAWS,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn channel(&self, i: usize) -> &[Complex64] {
        &self.channels[i * self.antennas..(i + 1) * self.antennas]
    }

    pub fn beamformer(&self, i: usize) -> &[Complex64] {
        &self.beamformers[i * self.antennas..(i + 1) * self.antennas]
    }

    /// Draws channels and builds every beamformer explicitly, with the SBS of
    /// rank `serving_rank` (1-based) serving the typical user.
    ///
    /// MF: each SBS matches its own user's channel. ZF: the cluster of the K
    /// nearest SBSs serves K users jointly; every cluster SBS nulls the other
    /// K-1 cluster users (the typical user included), and SBSs outside the
    /// cluster zero-force within their own clusters.
    pub fn realize<R: Rng + ?Sized>(
        &mut self,
        params: &NetworkParams,
        scheme: Scheme,
        serving_rank: usize,
        rng: &mut R,
    ) -> Result<(), ModelError> {
        params.validate_for(scheme)?;
        let k_cluster = params.cluster_size;
        if serving_rank == 0 || serving_rank > k_cluster {
            return Err(ModelError::InvalidRank {
                rank: serving_rank,
                cluster_size: k_cluster,
            });
        }
        let l = params.antennas;
        let n = self.len();
        self.antennas = l;
        self.channels = vec![Complex64::new(0.0, 0.0); n * l];
        self.beamformers = vec![Complex64::new(0.0, 0.0); n * l];
        self.gains = vec![0.0; n];
        self.serving_rank = Some(serving_rank);
        self.scheme = Some(scheme);
        self.nulling_residual = 0.0;

        fill_cn(rng, &mut self.channels);
        let mut ws = ZfWorkspace::new();
        let mut own = vec![Complex64::new(0.0, 0.0); l];
        let mut nulled = vec![Complex64::new(0.0, 0.0); (k_cluster - 1) * l];
        let mut conj_target = vec![Complex64::new(0.0, 0.0); l];
        let mut conj_cols = Vec::with_capacity(nulled.len());

        for i in 0..n {
            let h = &self.channels[i * l..(i + 1) * l];
            let w = &mut self.beamformers[i * l..(i + 1) * l];
            let serving = i + 1 == serving_rank;
            match scheme {
                Scheme::Mf => {
                    let target: &[Complex64] = if serving {
                        h
                    } else {
                        fill_cn(rng, &mut own);
                        &own
                    };
                    let norm = libm::sqrt(target.iter().map(|z| z.norm_sqr()).sum::<f64>());
                    for (wi, ti) in w.iter_mut().zip(target) {
                        *wi = ti.conj() / norm;
                    }
                }
                Scheme::Zf => {
                    let in_cluster = i < k_cluster;
                    if serving {
                        fill_cn(rng, &mut nulled);
                        zf_beamformer(
                            &mut ws, h, &mut nulled, 0, l, rng, &mut conj_target,
                            &mut conj_cols, w,
                        )?;
                        self.nulling_residual = nulled
                            .chunks(l)
                            .map(|g| effective(g, w).norm())
                            .fold(0.0, f64::max);
                    } else if in_cluster {
                        // Null the typical user plus K-2 other cluster users.
                        nulled[..l].copy_from_slice(h);
                        fill_cn(rng, &mut nulled[l..]);
                        fill_cn(rng, &mut own);
                        zf_beamformer(
                            &mut ws, &own, &mut nulled, 1, l, rng, &mut conj_target,
                            &mut conj_cols, w,
                        )?;
                    } else {
                        fill_cn(rng, &mut nulled);
                        fill_cn(rng, &mut own);
                        zf_beamformer(
                            &mut ws, &own, &mut nulled, 0, l, rng, &mut conj_target,
                            &mut conj_cols, w,
                        )?;
                    }
                }
            }
            self.gains[i] = effective(h, w).norm_sqr();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::RngStream;

    #[test]
    fn zero_area_is_empty() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_ppp_square(5e-5, 0.0, &mut rng).is_empty());
    }

    #[test]
    fn positions_inside_window_and_sorted() {
        let params = NetworkParams::default();
        let mut rng = RngStream::new(3, 9).rng();
        let d = Deployment::sample(&params, &mut rng).unwrap();
        assert!(d.len() > 500 && d.len() < 1100);
        assert!(d.positions.iter().all(|p| p[0].abs() <= 2000.0 && p[1].abs() <= 2000.0));
        assert!(d.distances.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn channel_replay_is_bit_identical() {
        let a = draw_channels(5, 4, &mut RngStream::new(11, 2).rng());
        let b = draw_channels(5, 4, &mut RngStream::new(11, 2).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn realized_zf_nulls_cluster() {
        let params = NetworkParams { antennas: 4, cluster_size: 3, ..Default::default() };
        let mut rng = RngStream::new(5, 1).rng();
        let mut d = Deployment::sample(&params, &mut rng).unwrap();
        d.realize(&params, Scheme::Zf, 2, &mut rng).unwrap();
        assert!(d.nulling_residual <= 1e-12);
        // Non-serving cluster members null the typical user.
        assert!(d.gains[0] < 1e-24 && d.gains[2] < 1e-24);
        for i in 0..d.len() {
            let w = d.beamformer(i);
            let n: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_validation() {
        let params = NetworkParams::default();
        let mut rng = RngStream::new(5, 1).rng();
        let mut d = Deployment::sample(&params, &mut rng).unwrap();
        assert!(matches!(
            d.realize(&params, Scheme::Mf, 3, &mut rng),
            Err(ModelError::InvalidRank { .. })
        ));
    }
}
