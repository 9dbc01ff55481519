//! Achievable-rate bound for quantized parallel streams.
//!
//! A stream with power p on a subchannel with singular value s, noise variance
//! sigma2 and distortion factor beta carries
//! log2(1 + (1-beta)*p*s^2 / (beta*p*s^2 + sigma2)) bits per channel use; the
//! sum over streams is the link rate. Rates are evaluated through ln_1p in the
//! natural-log domain so the small-argument and saturated regimes stay exact.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quantizer::DistortionModel;

/// Per-stream outcome of an allocation: powers, integer bits, the distortion
/// factors they imply, and the per-stream plus total rates.
#[derive(Clone, Debug)]
pub struct StreamAllocation {
    pub powers: Vec<f64>,
    pub bits: Vec<u32>,
    pub distortions: Vec<f64>,
    pub stream_rates: Vec<f64>,
    pub sum_rate: f64,
    /// Streams carrying both power and bits.
    pub active_count: usize,
}

impl StreamAllocation {
    /// Evaluates an allocation on the given subchannels: distortion factors
    /// from the model, per-stream rates, their sum, and the active count.
    pub fn evaluate(
        powers: Vec<f64>,
        bits: Vec<u32>,
        singulars: &[f64],
        noise_var: f64,
        model: &DistortionModel,
    ) -> Result<Self> {
        if powers.len() != bits.len() || powers.len() != singulars.len() {
            return Err(Error::invalid(format!(
                "allocation lengths disagree: {} powers, {} bit counts, {} singular values",
                powers.len(),
                bits.len(),
                singulars.len()
            )));
        }
        check_noise(noise_var)?;
        for &p in &powers {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::invalid(format!("stream power must be >= 0, got {p}")));
            }
        }
        let distortions: Vec<f64> = bits.iter().map(|&b| model.distortion_factor(b)).collect();
        let stream_rates: Vec<f64> = powers
            .iter()
            .zip(singulars)
            .zip(&distortions)
            .map(|((&p, &s), &beta)| stream_rate_unchecked(p, s * s, noise_var, beta))
            .collect();
        let sum_rate = stream_rates.iter().sum();
        let active_count = powers
            .iter()
            .zip(&bits)
            .filter(|(&p, &b)| p > 0.0 && b > 0)
            .count();
        Ok(StreamAllocation {
            powers,
            bits,
            distortions,
            stream_rates,
            sum_rate,
            active_count,
        })
    }
}

fn check_noise(noise_var: f64) -> Result<()> {
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(Error::invalid(format!(
            "noise variance must be positive and finite, got {noise_var}"
        )));
    }
    Ok(())
}

/// Rate of one stream; `s2` is the squared singular value.
/// Zero power, a dead subchannel, or a fully opaque quantizer all yield zero.
pub(crate) fn stream_rate_unchecked(power: f64, s2: f64, noise_var: f64, beta: f64) -> f64 {
    if power <= 0.0 || s2 <= 0.0 || beta >= 1.0 {
        return 0.0;
    }
    let x = power * s2 / noise_var;
    let arg = (1.0 - beta) * x / (beta * x + 1.0);
    arg.ln_1p() / LN_2
}

/// Achievable rate of a single quantized stream, in bits per channel use.
pub fn stream_rate(power: f64, singular: f64, noise_var: f64, distortion: f64) -> Result<f64> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::invalid(format!("power must be >= 0, got {power}")));
    }
    if !(singular >= 0.0) || !singular.is_finite() {
        return Err(Error::invalid(format!(
            "singular value must be >= 0, got {singular}"
        )));
    }
    check_noise(noise_var)?;
    if !(0.0..=1.0).contains(&distortion) {
        return Err(Error::invalid(format!(
            "distortion factor must lie in [0, 1], got {distortion}"
        )));
    }
    Ok(stream_rate_unchecked(
        power,
        singular * singular,
        noise_var,
        distortion,
    ))
}

/// Sum of the per-stream rates of `alloc` over the leading subchannels.
pub fn sum_rate(alloc: &StreamAllocation, singulars: &[f64], noise_var: f64) -> Result<f64> {
    if alloc.powers.len() > singulars.len() {
        return Err(Error::invalid(format!(
            "allocation covers {} streams but only {} singular values given",
            alloc.powers.len(),
            singulars.len()
        )));
    }
    check_noise(noise_var)?;
    let mut total = 0.0;
    for i in 0..alloc.powers.len() {
        total += stream_rate_unchecked(
            alloc.powers[i],
            singulars[i] * singulars[i],
            noise_var,
            alloc.distortions[i],
        );
    }
    Ok(total)
}

/// Unquantized (infinite-resolution) sum rate of the given powers.
pub fn ideal_rate(powers: &[f64], singulars: &[f64], noise_var: f64) -> Result<f64> {
    if powers.len() > singulars.len() {
        return Err(Error::invalid(format!(
            "{} powers but only {} singular values given",
            powers.len(),
            singulars.len()
        )));
    }
    check_noise(noise_var)?;
    let mut total = 0.0;
    for (p, s) in powers.iter().zip(singulars) {
        total += stream_rate_unchecked(*p, s * s, noise_var, 0.0);
    }
    Ok(total)
}
