//! Scalar Lloyd-Max quantization of Gaussian signals.
//!
//! Provides:
//! - fixed-point design of the minimum-MSE scalar quantizer for a unit-variance
//!   real Gaussian input (closed-form truncated-Gaussian cell moments, no
//!   numeric integration),
//! - the bits -> distortion-factor model that combines the designed low-bit
//!   values with the high-rate asymptote (sqrt(3)*pi/2) * 2^(-2b),
//! - a seeded Monte-Carlo estimate of the Bussgang decomposition statistics
//!   (gain, residual cross-correlation, output power) of the deployed
//!   quantizer on a noisy complex observation.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf;

use crate::error::{Error, Result};
use crate::fmt::sig12;

/// Largest supported quantizer resolution in bits per real sample.
pub const MAX_BITS: u32 = 12;

// ---------------------------------------------------------------------------
// Standard-normal helpers
// ---------------------------------------------------------------------------

fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// x * pdf(x), with the correct zero limit at the infinite endpoints.
fn xpdf(x: f64) -> f64 {
    if x.is_finite() {
        x * pdf(x)
    } else {
        0.0
    }
}

/// P(X <= x); accurate in the lower tail.
fn cdf_lower(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erf::erfc(-x / SQRT_2)
}

/// P(X > x); accurate in the upper tail.
fn cdf_upper(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    0.5 * erf::erfc(x / SQRT_2)
}

/// Standard-normal quantile, used only to seed the design iteration.
fn quantile(p: f64) -> f64 {
    SQRT_2 * erf::erf_inv(2.0 * p - 1.0)
}

/// Probability mass of [a, b]; complementary forms avoid cancellation in the tails.
fn cell_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        cdf_upper(a) - cdf_upper(b)
    } else if b <= 0.0 {
        cdf_lower(b) - cdf_lower(a)
    } else {
        1.0 - cdf_lower(a) - cdf_upper(b)
    }
}

/// (mass, first moment, second moment) of the unit Gaussian over [a, b].
fn cell_moments(a: f64, b: f64) -> (f64, f64, f64) {
    let z = cell_mass(a, b);
    let m1 = pdf_at(a) - pdf_at(b);
    let m2 = z + xpdf(a) - xpdf(b);
    (z, m1, m2)
}

fn pdf_at(x: f64) -> f64 {
    if x.is_finite() {
        pdf(x)
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Codebook design
// ---------------------------------------------------------------------------

/// A b-bit minimum-MSE scalar quantizer for a unit-variance real Gaussian.
///
/// `levels` are the 2^b representation values (ascending), `thresholds` the
/// 2^b - 1 decision boundaries between them (ascending, midpoints of adjacent
/// levels), and `distortion` the normalized mean-square error achieved on the
/// unit-variance source.
#[derive(Clone, Debug)]
pub struct LloydMaxCodebook {
    pub bits: u32,
    pub levels: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub distortion: f64,
}

impl LloydMaxCodebook {
    /// Plain-text record (bits, levels, thresholds, distortion) with 12
    /// significant digits, one `key = value` line each.
    pub fn export_record(&self) -> String {
        let join = |vals: &[f64]| {
            vals.iter()
                .map(|v| sig12(*v))
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "bits = {}\nlevels = {}\nthresholds = {}\ndistortion = {}\n",
            self.bits,
            join(&self.levels),
            join(&self.thresholds),
            sig12(self.distortion),
        )
    }
}

/// Exact mean-square error of a (levels, thresholds) pair on the unit Gaussian,
/// from closed-form cell moments. Does not assume the centroid condition.
fn codebook_mse(levels: &[f64], thresholds: &[f64]) -> f64 {
    let n = levels.len();
    let mut d = 0.0;
    for (j, &level) in levels.iter().enumerate() {
        let a = if j == 0 { f64::NEG_INFINITY } else { thresholds[j - 1] };
        let b = if j == n - 1 { f64::INFINITY } else { thresholds[j] };
        let (z, m1, m2) = cell_moments(a, b);
        d += m2 - 2.0 * level * m1 + level * level * z;
    }
    d
}

/// Designs the optimal `bits`-bit scalar quantizer for a unit-variance real
/// Gaussian by Lloyd's fixed-point iteration.
///
/// Levels start at the quantile midpoints of the source, then thresholds
/// (midpoint rule) and levels (cell centroid rule) are updated alternately
/// until the relative distortion change drops below `tolerance`. Hitting
/// `max_iterations` first returns a diagnostic error carrying the last iterate.
pub fn design_lloyd_max(
    bits: u32,
    tolerance: f64,
    max_iterations: usize,
) -> Result<LloydMaxCodebook> {
    if bits < 1 || bits > MAX_BITS {
        return Err(Error::invalid(format!(
            "quantizer bits must lie in 1..={MAX_BITS}, got {bits}"
        )));
    }
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(Error::invalid(format!(
            "design tolerance must be positive and finite, got {tolerance}"
        )));
    }
    if max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be at least 1"));
    }

    let n = 1usize << bits;
    let mut levels: Vec<f64> = (0..n)
        .map(|j| quantile((2 * j + 1) as f64 / (2 * n) as f64))
        .collect();
    let mut thresholds = vec![0.0; n - 1];
    let mut previous = f64::INFINITY;
    let mut residual = f64::INFINITY;

    for _ in 0..max_iterations {
        for j in 0..n - 1 {
            thresholds[j] = 0.5 * (levels[j] + levels[j + 1]);
        }
        // Centroid update; with l = m1/z the cell's error is m2 - l*m1.
        let mut distortion = 0.0;
        for j in 0..n {
            let a = if j == 0 { f64::NEG_INFINITY } else { thresholds[j - 1] };
            let b = if j == n - 1 { f64::INFINITY } else { thresholds[j] };
            let (z, m1, m2) = cell_moments(a, b);
            let level = m1 / z;
            levels[j] = level;
            distortion += m2 - level * m1;
        }
        residual = (previous - distortion).abs() / distortion;
        previous = distortion;
        if residual < tolerance {
            // Each level is the exact centroid of its current cell, so the
            // accumulated m2 - l*m1 terms already equal the MSE of exactly
            // this (levels, thresholds) pair; publish it unchanged.
            return Ok(LloydMaxCodebook {
                bits,
                levels,
                thresholds,
                distortion,
            });
        }
    }

    Err(Error::DesignNotConverged {
        iterations: max_iterations,
        residual,
        last: Box::new(LloydMaxCodebook {
            bits,
            levels: levels.clone(),
            thresholds: thresholds.clone(),
            distortion: codebook_mse(&levels, &thresholds),
        }),
    })
}

/// Maps a sample to the representation level of its cell.
/// A sample exactly on a threshold belongs to the upper cell.
pub fn quantize(codebook: &LloydMaxCodebook, sample: f64) -> f64 {
    let idx = codebook.thresholds.partition_point(|t| *t <= sample);
    codebook.levels[idx]
}

// ---------------------------------------------------------------------------
// Distortion-factor model
// ---------------------------------------------------------------------------

/// The constant of the high-rate distortion asymptote, sqrt(3)*pi/2.
pub fn high_rate_constant() -> f64 {
    3.0_f64.sqrt() * PI / 2.0
}

/// bits -> distortion factor. Self-computed Lloyd-Max values for 1..=5 bits,
/// the high-rate asymptote beyond, and 1 at zero bits (nothing conveyed).
#[derive(Clone, Copy, Debug)]
pub struct DistortionModel {
    table: [f64; 5],
}

impl DistortionModel {
    /// Designs the 1..=5-bit codebooks and tabulates their distortion.
    pub fn new() -> Result<Self> {
        let mut table = [0.0; 5];
        for (i, slot) in table.iter_mut().enumerate() {
            *slot = design_lloyd_max(i as u32 + 1, 1e-10, 10_000)?.distortion;
        }
        Ok(DistortionModel { table })
    }

    pub fn distortion_factor(&self, bits: u32) -> f64 {
        match bits {
            0 => 1.0,
            1..=5 => self.table[bits as usize - 1],
            _ => high_rate_constant() * (-2.0 * bits as f64).exp2(),
        }
    }

    /// The tabulated low-resolution distortion factors (1..=5 bits).
    pub fn table(&self) -> &[f64; 5] {
        &self.table
    }
}

// ---------------------------------------------------------------------------
// Bussgang statistics
// ---------------------------------------------------------------------------

/// Empirical second-order statistics of the quantizer output decomposed as
/// z = B*y + eta on y = h*x + n.
#[derive(Clone, Debug)]
pub struct BussgangReport {
    /// Estimate of the linear gain B = E{z y*} / E{|y|^2}.
    pub estimated_gain: Complex64,
    /// Estimate of E{eta x*}, normalized by sqrt(P * C_eta).
    pub cross_correlation_x_eta: Complex64,
    /// Estimate of C_z / ((1 - beta) * C_y).
    pub output_power_ratio: f64,
    pub sample_count: u64,
}

/// Draws x ~ CN(0, P) and n ~ CN(0, noise_var), forms y = h*x + n, quantizes
/// the in-phase and quadrature parts independently (each normalized by the
/// per-dimension standard deviation sqrt(C_y / 2)), and reports the empirical
/// Bussgang statistics of z against y and x. Deterministic given `seed`.
///
/// Per sample the generator is consumed in the fixed order
/// (x_re, x_im, n_re, n_im).
pub fn bussgang_check(
    codebook: &LloydMaxCodebook,
    signal_power: f64,
    channel: Complex64,
    noise_var: f64,
    sample_count: u64,
    seed: u64,
) -> Result<BussgangReport> {
    if !(signal_power > 0.0) || !signal_power.is_finite() {
        return Err(Error::invalid(format!(
            "signal power must be positive and finite, got {signal_power}"
        )));
    }
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(Error::invalid(format!(
            "noise variance must be positive and finite, got {noise_var}"
        )));
    }
    if sample_count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }

    let beta = codebook.distortion;
    let c_y = channel.norm_sqr() * signal_power + noise_var;
    let dim_std = (c_y / 2.0).sqrt();
    let x_scale = (signal_power / 2.0).sqrt();
    let n_scale = (noise_var / 2.0).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };

    let mut sum_zy = Complex64::new(0.0, 0.0);
    let mut sum_yy = 0.0;
    let mut sum_eta_x = Complex64::new(0.0, 0.0);
    let mut sum_zz = 0.0;
    let mut sum_eta_eta = 0.0;

    for _ in 0..sample_count {
        let x = Complex64::new(normal(), normal()) * x_scale;
        let n = Complex64::new(normal(), normal()) * n_scale;
        let y = channel * x + n;
        let z = Complex64::new(
            dim_std * quantize(codebook, y.re / dim_std),
            dim_std * quantize(codebook, y.im / dim_std),
        );
        let eta = z - y * (1.0 - beta);

        sum_zy += z * y.conj();
        sum_yy += y.norm_sqr();
        sum_eta_x += eta * x.conj();
        sum_zz += z.norm_sqr();
        sum_eta_eta += eta.norm_sqr();
    }

    let count = sample_count as f64;
    let c_eta_hat = sum_eta_eta / count;
    let cross_norm = (signal_power * c_eta_hat).sqrt();
    Ok(BussgangReport {
        estimated_gain: sum_zy / sum_yy,
        cross_correlation_x_eta: if cross_norm > 0.0 {
            (sum_eta_x / count) / cross_norm
        } else {
            Complex64::new(0.0, 0.0)
        },
        output_power_ratio: (sum_zz / count) / ((1.0 - beta) * (sum_yy / count)),
        sample_count,
    })
}
