//! Rician MIMO channel generation and stream extraction.
//!
//! A channel draw superimposes one line-of-sight ray and `nlos_paths` scattered
//! rays between uniform linear arrays, normalized so the expected squared
//! Frobenius norm equals M*K for every Rician factor. Streams are the singular
//! values of the matrix; `scale_to_snr` rescales them so the per-antenna SNR
//! P * sum(s_i^2) / (M * K * sigma2) hits an exact target.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fmt::sig12;

/// Relative cutoff below which singular values count as numerical rank loss.
const RANK_CUTOFF: f64 = 1e-12;

/// Geometry and fading parameters of one channel draw.
#[derive(Clone, Debug)]
pub struct RicianConfig {
    /// Receive antennas.
    pub m: usize,
    /// Transmit antennas.
    pub k: usize,
    /// Rician factor, linear scale; 0 is pure scattering.
    pub kappa: f64,
    pub nlos_paths: usize,
    /// Element spacing in wavelengths.
    pub antenna_spacing: f64,
}

impl RicianConfig {
    pub fn new(m: usize, k: usize, kappa: f64) -> Self {
        RicianConfig {
            m,
            k,
            kappa,
            nlos_paths: 200,
            antenna_spacing: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::invalid("antenna counts must be positive"));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::invalid(format!(
                "rician factor must be finite and >= 0, got {}",
                self.kappa
            )));
        }
        if self.nlos_paths == 0 {
            return Err(Error::invalid("at least one scattered path is required"));
        }
        if !(self.antenna_spacing > 0.0) || !self.antenna_spacing.is_finite() {
            return Err(Error::invalid(format!(
                "antenna spacing must be positive, got {}",
                self.antenna_spacing
            )));
        }
        Ok(())
    }
}

/// One channel draw: the matrix, its descending positive singular values after
/// rank truncation, and the corresponding semi-unitary factors.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub matrix: DMatrix<Complex64>,
    pub singulars: Vec<f64>,
    /// M x r left factor.
    pub left_vectors: Option<DMatrix<Complex64>>,
    /// K x r right factor.
    pub right_vectors: Option<DMatrix<Complex64>>,
}

impl ChannelRealization {
    /// Decomposes `matrix`, retaining the factors.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::invalid("cannot decompose an all-zero matrix"));
        }
        let svd = matrix.clone().svd(true, true);
        let values = &svd.singular_values;
        let rank = truncated_rank(values.as_slice());
        let singulars = values.as_slice()[..rank].to_vec();
        let left = svd.u.expect("left factor requested").columns(0, rank).into_owned();
        let right = svd
            .v_t
            .expect("right factor requested")
            .rows(0, rank)
            .adjoint();
        Ok(ChannelRealization {
            matrix,
            singulars,
            left_vectors: Some(left),
            right_vectors: Some(right),
        })
    }

    /// One-line comma-separated singular-value record (12 significant digits).
    pub fn singulars_record(&self) -> String {
        self.singulars
            .iter()
            .map(|s| sig12(*s))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn truncated_rank(descending: &[f64]) -> usize {
    let cutoff = RANK_CUTOFF * descending[0];
    descending.iter().take_while(|&&s| s >= cutoff && s > 0.0).count()
}

/// Unit-norm uniform-linear-array steering vector for azimuth `theta`.
fn steering(theta: f64, elements: usize, spacing: f64) -> DVector<Complex64> {
    let amplitude = 1.0 / (elements as f64).sqrt();
    let phase_step = 2.0 * PI * spacing * theta.sin();
    DVector::from_iterator(
        elements,
        (0..elements).map(|i| Complex64::from_polar(amplitude, phase_step * i as f64)),
    )
}

/// Draws one Rician channel. Deterministic given (config, seed): the generator
/// is consumed in the fixed order LOS angles (rx, tx), then per scattered path
/// (rx angle, tx angle, gain_re, gain_im). All azimuths are i.i.d. uniform on
/// [-pi/2, pi/2]; path gains are i.i.d. CN(0, 1).
pub fn generate_rician(config: &RicianConfig, seed: u64) -> Result<ChannelRealization> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = |rng: &mut ChaCha8Rng| (rng.random::<f64>() - 0.5) * PI;

    let (m, k) = (config.m, config.k);
    let mk = (m * k) as f64;
    let mut h = DMatrix::<Complex64>::zeros(m, k);

    let theta_los = angle(&mut rng);
    let phi_los = angle(&mut rng);
    let los_gain = (config.kappa / (config.kappa + 1.0) * mk).sqrt();
    if los_gain > 0.0 {
        h.gerc(
            Complex64::new(los_gain, 0.0),
            &steering(theta_los, m, config.antenna_spacing),
            &steering(phi_los, k, config.antenna_spacing),
            Complex64::new(0.0, 0.0),
        );
    }

    let paths = config.nlos_paths;
    let nlos_scale = (mk / (paths as f64 * (config.kappa + 1.0))).sqrt();
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..paths {
        let theta = angle(&mut rng);
        let phi = angle(&mut rng);
        let g_re: f64 = rng.sample(StandardNormal);
        let g_im: f64 = rng.sample(StandardNormal);
        let gain = Complex64::new(g_re, g_im) * FRAC_1_SQRT_2 * nlos_scale;
        h.gerc(
            gain,
            &steering(theta, m, config.antenna_spacing),
            &steering(phi, k, config.antenna_spacing),
            one,
        );
    }

    ChannelRealization::from_matrix(h)
}

/// Descending positive singular values of `matrix` after rank truncation.
pub fn svd_streams(matrix: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if matrix.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
        return Err(Error::invalid("cannot decompose an all-zero matrix"));
    }
    let svd = matrix.clone().svd(false, false);
    let values = svd.singular_values;
    let rank = truncated_rank(values.as_slice());
    Ok(values.as_slice()[..rank].to_vec())
}

/// Per-antenna SNR of a stream set: P * sum(s_i^2) / (M * K * sigma2).
pub fn snr(singulars: &[f64], power_budget: f64, noise_var: f64, m: usize, k: usize) -> f64 {
    let sum_sq: f64 = singulars.iter().map(|s| s * s).sum();
    power_budget * sum_sq / ((m * k) as f64 * noise_var)
}

/// Rescales singular values by the unique positive factor that makes the
/// per-antenna SNR equal `target_snr` (linear).
pub fn scale_to_snr(
    singulars: &[f64],
    power_budget: f64,
    noise_var: f64,
    target_snr: f64,
    m: usize,
    k: usize,
) -> Result<Vec<f64>> {
    if singulars.is_empty() {
        return Err(Error::invalid("no singular values to scale"));
    }
    if !(target_snr > 0.0) || !target_snr.is_finite() {
        return Err(Error::invalid(format!(
            "target SNR must be positive and finite, got {target_snr}"
        )));
    }
    if !(power_budget > 0.0) || !(noise_var > 0.0) {
        return Err(Error::invalid(
            "power budget and noise variance must be positive",
        ));
    }
    let sum_sq: f64 = singulars.iter().map(|s| s * s).sum();
    if !(sum_sq > 0.0) {
        return Err(Error::invalid("singular values must not all be zero"));
    }
    let factor = (target_snr * (m * k) as f64 * noise_var / (power_budget * sum_sq)).sqrt();
    Ok(singulars.iter().map(|s| factor * s).collect())
}
