//! Bit and power allocation across quantized parallel streams.
//!
//! Solvers:
//! - `water_fill`: classical water-filling, exact active-set scan.
//! - `bit_waterlevel` + `round_and_fix`: continuous bit levels matched to the
//!   powers, rounded to integers with greedy repair of the budget.
//! - `jbp_alloc`: joint bit-and-power allocation; scans candidate stream
//!   counts, water-fills, levels bits, keeps the best exact sum rate.
//! - `quantized_water_fill`: distortion-aware power allocation through the
//!   inverse marginal-rate function, bisecting the water level.
//! - `ub_alloc`: uniform bits over a candidate stream count, distortion-aware
//!   powers, silent-stream bit redistribution.
//! - `greedy_alloc`: one bit at a time to the stream with the best marginal
//!   rate, re-solving powers for every tentative placement.
//! - `unaware_wf_alloc`: baseline that ignores quantization when allocating.
//! - `brute_force_alloc`: guarded exhaustive search over bit compositions,
//!   used as the optimality oracle for small instances.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quantizer::DistortionModel;
use crate::rate::{stream_rate_unchecked, StreamAllocation};

// ---------------------------------------------------------------------------
// Problem and solver plumbing
// ---------------------------------------------------------------------------

/// One allocation instance: subchannel gains and the two budgets.
#[derive(Clone, Debug)]
pub struct AllocationProblem {
    /// Descending positive singular values.
    pub singulars: Vec<f64>,
    pub power_budget: f64,
    pub noise_var: f64,
    pub bit_budget: u32,
    pub model: DistortionModel,
}

impl AllocationProblem {
    pub fn new(
        singulars: Vec<f64>,
        power_budget: f64,
        noise_var: f64,
        bit_budget: u32,
        model: DistortionModel,
    ) -> Result<Self> {
        let problem = AllocationProblem {
            singulars,
            power_budget,
            noise_var,
            bit_budget,
            model,
        };
        problem.validate()?;
        Ok(problem)
    }

    fn validate(&self) -> Result<()> {
        if self.singulars.is_empty() {
            return Err(Error::invalid("at least one stream is required"));
        }
        for pair in self.singulars.windows(2) {
            if !(pair[1] <= pair[0]) {
                return Err(Error::invalid(format!(
                    "singular values must be descending, got {} before {}",
                    pair[0], pair[1]
                )));
            }
        }
        let last = *self.singulars.last().unwrap();
        if !(last > 0.0) || !self.singulars[0].is_finite() {
            return Err(Error::invalid(
                "singular values must be positive and finite",
            ));
        }
        if !(self.power_budget > 0.0) || !self.power_budget.is_finite() {
            return Err(Error::invalid(format!(
                "power budget must be positive and finite, got {}",
                self.power_budget
            )));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be positive and finite, got {}",
                self.noise_var
            )));
        }
        Ok(())
    }
}

/// Bisection controls for the distortion-aware power solver.
#[derive(Clone, Copy, Debug)]
pub struct SolverSettings {
    /// Absolute tolerance on the power-budget residual.
    pub bisection_tolerance: f64,
    pub max_bisection_iterations: usize,
    /// Multiplier used while expanding the water-level bracket.
    pub bracket_growth_factor: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            bisection_tolerance: 1e-10,
            max_bisection_iterations: 200,
            bracket_growth_factor: 2.0,
        }
    }
}

/// Count of budget-equation solves performed inside an allocation call
/// (water levels for power, water levels for bits).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub budget_solves: u64,
}

// ---------------------------------------------------------------------------
// Classical water-filling and bit levels
// ---------------------------------------------------------------------------

/// Classical water-filling: p_i = max(0, level - noise_var / s_i^2) with the
/// level chosen so the powers sum to the budget. Solved exactly by scanning
/// active prefixes of the descending streams.
pub fn water_fill(singulars: &[f64], power_budget: f64, noise_var: f64) -> Result<Vec<f64>> {
    check_streams(singulars)?;
    if !(power_budget > 0.0) || !(noise_var > 0.0) {
        return Err(Error::invalid(
            "power budget and noise variance must be positive",
        ));
    }
    let floors: Vec<f64> = singulars.iter().map(|s| noise_var / (s * s)).collect();
    // Floors ascend, so the active set is a prefix; take the largest prefix
    // whose implied water level still clears its own last floor.
    let mut prefix_sum = 0.0;
    let mut active = 1;
    let mut level = power_budget + floors[0];
    for m in 1..=floors.len() {
        prefix_sum += floors[m - 1];
        let candidate = (power_budget + prefix_sum) / m as f64;
        if candidate > floors[m - 1] {
            active = m;
            level = candidate;
        }
    }
    Ok((0..floors.len())
        .map(|i| if i < active { level - floors[i] } else { 0.0 })
        .collect())
}

/// Continuous bit levels b_i = max(0, mu + log2(sqrt(p_i * s_i^2))) with mu
/// chosen so the levels sum to `bit_budget`. The budget function is piecewise
/// linear in mu, so the active set is found by an exact sorted scan.
pub fn bit_waterlevel(powers: &[f64], singulars: &[f64], bit_budget: u32) -> Result<Vec<f64>> {
    if powers.len() != singulars.len() || powers.is_empty() {
        return Err(Error::invalid(format!(
            "got {} powers for {} streams",
            powers.len(),
            singulars.len()
        )));
    }
    let offsets: Vec<f64> = powers
        .iter()
        .zip(singulars)
        .map(|(&p, &s)| {
            let gain = p * s * s;
            if gain > 0.0 {
                0.5 * gain.log2()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    if offsets.iter().all(|c| *c == f64::NEG_INFINITY) {
        return Err(Error::invalid("every stream carries zero power"));
    }
    if bit_budget == 0 {
        return Ok(vec![0.0; powers.len()]);
    }

    let mut order: Vec<usize> = (0..offsets.len()).collect();
    order.sort_by(|&a, &b| offsets[b].partial_cmp(&offsets[a]).unwrap());

    let budget = bit_budget as f64;
    let mut offset_sum = 0.0;
    for count in 1..=order.len() {
        let c_last = offsets[order[count - 1]];
        if c_last == f64::NEG_INFINITY {
            break;
        }
        offset_sum += c_last;
        let mu = (budget - offset_sum) / count as f64;
        let next_inactive = count == order.len() || mu + offsets[order[count]] <= 0.0;
        if mu + c_last >= 0.0 && next_inactive {
            let mut bits = vec![0.0; offsets.len()];
            for &i in &order[..count] {
                bits[i] = mu + offsets[i];
            }
            return Ok(bits);
        }
    }
    // Unreachable for a valid piecewise-linear budget function; keep a
    // diagnostic rather than a panic in case of pathological inputs.
    Err(Error::invalid("no bit water level clears the budget"))
}

/// Rounds continuous bit levels to integers, then repairs the budget one bit
/// at a time by exact rate deltas: surplus bits leave the stream losing the
/// least rate, missing bits join the stream gaining the most. Ties resolve
/// toward the lower (stronger) index.
pub fn round_and_fix(
    real_bits: &[f64],
    bit_budget: u32,
    powers: &[f64],
    singulars: &[f64],
    noise_var: f64,
    model: &DistortionModel,
) -> Result<Vec<u32>> {
    if real_bits.len() != powers.len() || real_bits.len() != singulars.len() {
        return Err(Error::invalid("bit, power, and stream counts must agree"));
    }
    let total: f64 = real_bits.iter().sum();
    if (total - bit_budget as f64).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "continuous bits sum to {total}, expected the budget {bit_budget}"
        )));
    }
    let s2: Vec<f64> = singulars.iter().map(|s| s * s).collect();
    let rate = |i: usize, b: i64| -> f64 {
        stream_rate_unchecked(powers[i], s2[i], noise_var, model.distortion_factor(b as u32))
    };

    let mut bits: Vec<i64> = real_bits.iter().map(|b| b.round().max(0.0) as i64).collect();
    let mut surplus: i64 = bits.iter().sum::<i64>() - bit_budget as i64;
    while surplus > 0 {
        let mut choice: Option<(usize, f64)> = None;
        for i in 0..bits.len() {
            if bits[i] == 0 {
                continue;
            }
            let loss = rate(i, bits[i]) - rate(i, bits[i] - 1);
            if choice.map_or(true, |(_, best)| loss < best) {
                choice = Some((i, loss));
            }
        }
        let (i, _) = choice.expect("a positive surplus implies a nonzero stream");
        bits[i] -= 1;
        surplus -= 1;
    }
    while surplus < 0 {
        let mut choice: Option<(usize, f64)> = None;
        for i in 0..bits.len() {
            let gain = rate(i, bits[i] + 1) - rate(i, bits[i]);
            if choice.map_or(true, |(_, best)| gain > best) {
                choice = Some((i, gain));
            }
        }
        let (i, _) = choice.expect("at least one stream exists");
        bits[i] += 1;
        surplus += 1;
    }
    Ok(bits.into_iter().map(|b| b as u32).collect())
}

// ---------------------------------------------------------------------------
// Joint bit-and-power allocation
// ---------------------------------------------------------------------------

/// Joint allocation: for every candidate count of leading streams, water-fill
/// the power, level and round the bits, and keep the candidate with the best
/// exact sum rate (ties prefer fewer streams). Budgets hold exactly.
pub fn jbp_alloc(problem: &AllocationProblem, settings: &SolverSettings) -> Result<StreamAllocation> {
    jbp_alloc_with_stats(problem, settings).map(|(alloc, _)| alloc)
}

/// `jbp_alloc` plus the number of budget solves (two per candidate count:
/// one power water level, one bit water level).
pub fn jbp_alloc_with_stats(
    problem: &AllocationProblem,
    _settings: &SolverSettings,
) -> Result<(StreamAllocation, SolveStats)> {
    problem.validate()?;
    let mut stats = SolveStats::default();
    let mut best: Option<StreamAllocation> = None;
    for r_prime in 1..=problem.singulars.len() {
        let subset = &problem.singulars[..r_prime];
        let powers = water_fill(subset, problem.power_budget, problem.noise_var)?;
        stats.budget_solves += 1;
        let real_bits = bit_waterlevel(&powers, subset, problem.bit_budget)?;
        stats.budget_solves += 1;
        let bits = round_and_fix(
            &real_bits,
            problem.bit_budget,
            &powers,
            subset,
            problem.noise_var,
            &problem.model,
        )?;
        let candidate =
            StreamAllocation::evaluate(powers, bits, subset, problem.noise_var, &problem.model)?;
        if best.as_ref().map_or(true, |b| candidate.sum_rate > b.sum_rate) {
            best = Some(candidate);
        }
    }
    Ok((best.expect("at least one candidate"), stats))
}

// ---------------------------------------------------------------------------
// Distortion-aware water-filling
// ---------------------------------------------------------------------------

/// Derivative of the per-stream rate g(x) = log2((1 + x) / (beta*x + 1)) with
/// respect to the normalized receive power x = p * s^2 / noise_var.
pub fn g_prime(x: f64, beta: f64) -> f64 {
    (1.0 - beta) / ((1.0 + x) * (beta * x + 1.0) * LN_2)
}

/// Inverse of `g_prime` on x >= 0. Returns 0 when `y` is at or above the slope
/// at the origin (no positive solution).
pub fn g_prime_inverse(y: f64, beta: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("slope must be positive, got {y}")));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::invalid(format!(
            "distortion factor must lie in [0, 1), got {beta}"
        )));
    }
    Ok(g_prime_inverse_raw(y, beta))
}

fn g_prime_inverse_raw(y: f64, beta: f64) -> f64 {
    let c = (1.0 - beta) / (y * LN_2);
    if c <= 1.0 {
        return 0.0;
    }
    // Root of beta*x^2 + (1+beta)*x + (1-c) = 0, written so it stays stable
    // both as beta -> 0 and as c -> 1.
    let disc = (1.0 - beta) * (1.0 - beta) + 4.0 * beta * c;
    2.0 * (c - 1.0) / (1.0 + beta + disc.sqrt())
}

/// Distortion-aware water-filling: p_i = max(0, (noise/s_i^2) *
/// g_prime_inverse(noise / (nu * s_i^2), beta_i)) with the level nu bisected
/// until the total power meets the budget. Total power is increasing in nu, so
/// the bracket grows geometrically from the smallest activation level.
pub fn quantized_water_fill(
    singulars: &[f64],
    noise_var: f64,
    distortions: &[f64],
    power_budget: f64,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    check_streams(singulars)?;
    if distortions.len() != singulars.len() {
        return Err(Error::invalid(format!(
            "got {} distortion factors for {} streams",
            distortions.len(),
            singulars.len()
        )));
    }
    for &beta in distortions {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid(format!(
                "distortion factors must lie in [0, 1) for power allocation, got {beta}"
            )));
        }
    }
    if !(power_budget > 0.0) || !(noise_var > 0.0) {
        return Err(Error::invalid(
            "power budget and noise variance must be positive",
        ));
    }
    if !(settings.bisection_tolerance > 0.0) || settings.bracket_growth_factor <= 1.0 {
        return Err(Error::invalid(
            "bisection tolerance must be positive and bracket growth above 1",
        ));
    }

    let s2: Vec<f64> = singulars.iter().map(|s| s * s).collect();
    let powers_at = |nu: f64, out: &mut Vec<f64>| -> f64 {
        out.clear();
        let mut total = 0.0;
        for i in 0..s2.len() {
            let slope = noise_var / (nu * s2[i]);
            let p = noise_var / s2[i] * g_prime_inverse_raw(slope, distortions[i]);
            out.push(p);
            total += p;
        }
        total
    };

    // Stream i activates once nu exceeds noise*ln2 / (s_i^2 * (1 - beta_i));
    // start at the smallest such level, where the total power is exactly zero.
    let mut low = f64::INFINITY;
    for i in 0..s2.len() {
        low = low.min(noise_var * LN_2 / (s2[i] * (1.0 - distortions[i])));
    }
    let mut scratch = Vec::with_capacity(s2.len());
    let mut high = low;
    let mut bracketed = false;
    for _ in 0..settings.max_bisection_iterations {
        high *= settings.bracket_growth_factor;
        if powers_at(high, &mut scratch) >= power_budget {
            bracketed = true;
            break;
        }
        low = high;
    }
    if !bracketed {
        return Err(Error::BisectionNotConverged {
            iterations: settings.max_bisection_iterations,
            residual: power_budget - powers_at(high, &mut scratch),
        });
    }

    let mut residual = f64::INFINITY;
    for _ in 0..settings.max_bisection_iterations {
        let mid = 0.5 * (low + high);
        let total = powers_at(mid, &mut scratch);
        residual = total - power_budget;
        if residual.abs() <= settings.bisection_tolerance {
            return Ok(scratch);
        }
        if residual > 0.0 {
            high = mid;
        } else {
            low = mid;
        }
    }
    Err(Error::BisectionNotConverged {
        iterations: settings.max_bisection_iterations,
        residual,
    })
}

/// Distortion-aware powers for a full bit vector: streams with zero bits take
/// no power; the rest share the budget through `quantized_water_fill`. With no
/// quantized stream at all, classical water-filling keeps the power budget
/// intact (the rate is zero regardless).
fn powers_for_bits(
    singulars: &[f64],
    noise_var: f64,
    bits: &[u32],
    power_budget: f64,
    model: &DistortionModel,
    settings: &SolverSettings,
) -> Result<Vec<f64>> {
    let active: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] > 0).collect();
    if active.is_empty() {
        return water_fill(singulars, power_budget, noise_var);
    }
    let sub_s: Vec<f64> = active.iter().map(|&i| singulars[i]).collect();
    let sub_beta: Vec<f64> = active
        .iter()
        .map(|&i| model.distortion_factor(bits[i]))
        .collect();
    let sub_powers = quantized_water_fill(&sub_s, noise_var, &sub_beta, power_budget, settings)?;
    let mut powers = vec![0.0; bits.len()];
    for (slot, &i) in active.iter().enumerate() {
        powers[i] = sub_powers[slot];
    }
    Ok(powers)
}

// ---------------------------------------------------------------------------
// Uniform-bit allocation
// ---------------------------------------------------------------------------

/// Budget split into `count` near-equal integers, remainder to the leading
/// (strongest) entries.
fn uniform_bits(bit_budget: u32, count: usize) -> Vec<u32> {
    let base = bit_budget / count as u32;
    let extra = (bit_budget % count as u32) as usize;
    (0..count)
        .map(|i| base + u32::from(i < extra))
        .collect()
}

/// Uniform-bit allocation: for every candidate stream count, spread the bits
/// evenly (remainder to the strongest streams), solve distortion-aware powers,
/// and if some streams receive no power, hand their bits back to the live ones
/// and re-solve the powers once. Returns the best candidate by exact sum rate.
pub fn ub_alloc(problem: &AllocationProblem, settings: &SolverSettings) -> Result<StreamAllocation> {
    problem.validate()?;
    let mut best: Option<StreamAllocation> = None;
    for r_prime in 1..=problem.singulars.len() {
        let subset = &problem.singulars[..r_prime];
        let mut bits = uniform_bits(problem.bit_budget, r_prime);
        let mut powers = powers_for_bits(
            subset,
            problem.noise_var,
            &bits,
            problem.power_budget,
            &problem.model,
            settings,
        )?;

        let freed: u32 = bits
            .iter()
            .zip(&powers)
            .filter(|(_, &p)| p == 0.0)
            .map(|(&b, _)| b)
            .sum();
        if freed > 0 {
            let live: Vec<usize> = (0..r_prime).filter(|&i| powers[i] > 0.0).collect();
            if !live.is_empty() {
                for i in 0..r_prime {
                    if powers[i] == 0.0 {
                        bits[i] = 0;
                    }
                }
                let per = freed / live.len() as u32;
                let extra = (freed % live.len() as u32) as usize;
                for (slot, &i) in live.iter().enumerate() {
                    bits[i] += per + u32::from(slot < extra);
                }
                powers = powers_for_bits(
                    subset,
                    problem.noise_var,
                    &bits,
                    problem.power_budget,
                    &problem.model,
                    settings,
                )?;
            }
        }

        let candidate =
            StreamAllocation::evaluate(powers, bits, subset, problem.noise_var, &problem.model)?;
        if best.as_ref().map_or(true, |b| candidate.sum_rate > b.sum_rate) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one candidate"))
}

// ---------------------------------------------------------------------------
// Greedy allocation
// ---------------------------------------------------------------------------

/// Greedy bit placement: see `greedy_alloc_with_stats`.
pub fn greedy_alloc(
    problem: &AllocationProblem,
    settings: &SolverSettings,
) -> Result<StreamAllocation> {
    greedy_alloc_with_stats(problem, settings).map(|(alloc, _)| alloc)
}

/// Places the bit budget one bit at a time: every round tries each stream,
/// re-solves the distortion-aware powers for the tentative bit vector, and
/// commits the placement with the best sum rate (ties to the stronger stream).
/// Performs exactly bit_budget * r budget solves.
pub fn greedy_alloc_with_stats(
    problem: &AllocationProblem,
    settings: &SolverSettings,
) -> Result<(StreamAllocation, SolveStats)> {
    problem.validate()?;
    let r = problem.singulars.len();
    let mut stats = SolveStats::default();
    let mut bits = vec![0u32; r];
    let mut committed: Option<Vec<f64>> = None;

    for _ in 0..problem.bit_budget {
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for i in 0..r {
            bits[i] += 1;
            let powers = powers_for_bits(
                &problem.singulars,
                problem.noise_var,
                &bits,
                problem.power_budget,
                &problem.model,
                settings,
            )?;
            stats.budget_solves += 1;
            let rate = exact_rate(&powers, &bits, problem);
            bits[i] -= 1;
            if best.as_ref().map_or(true, |(_, r0, _)| rate > *r0) {
                best = Some((i, rate, powers));
            }
        }
        let (i, _, powers) = best.expect("at least one stream");
        bits[i] += 1;
        committed = Some(powers);
    }

    let powers = match committed {
        Some(p) => p,
        // Zero bit budget: no solve ran; keep the power budget on the streams.
        None => water_fill(&problem.singulars, problem.power_budget, problem.noise_var)?,
    };
    let alloc = StreamAllocation::evaluate(
        powers,
        bits,
        &problem.singulars,
        problem.noise_var,
        &problem.model,
    )?;
    Ok((alloc, stats))
}

fn exact_rate(powers: &[f64], bits: &[u32], problem: &AllocationProblem) -> f64 {
    powers
        .iter()
        .zip(bits)
        .zip(&problem.singulars)
        .map(|((&p, &b), &s)| {
            stream_rate_unchecked(
                p,
                s * s,
                problem.noise_var,
                problem.model.distortion_factor(b),
            )
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Quantization-unaware baseline
// ---------------------------------------------------------------------------

/// Classical water-filling with the distortion ignored; bits spread uniformly
/// over the powered streams (remainder to the strongest). The reported rate
/// still uses the true quantized model.
pub fn unaware_wf_alloc(
    problem: &AllocationProblem,
    _settings: &SolverSettings,
) -> Result<StreamAllocation> {
    problem.validate()?;
    let powers = water_fill(&problem.singulars, problem.power_budget, problem.noise_var)?;
    let live = powers.iter().filter(|&&p| p > 0.0).count();
    let spread = uniform_bits(problem.bit_budget, live);
    let mut bits = vec![0u32; powers.len()];
    bits[..live].copy_from_slice(&spread);
    StreamAllocation::evaluate(
        powers,
        bits,
        &problem.singulars,
        problem.noise_var,
        &problem.model,
    )
}

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Exhaustive search over every integer bit composition of the budget, with
/// powers from the distortion-aware solver refined by a simplex grid of the
/// given resolution (the better of the two is kept per composition). Guarded
/// to r <= 4 streams and budgets <= 16 bits.
pub fn brute_force_alloc(
    problem: &AllocationProblem,
    power_grid_resolution: u32,
) -> Result<StreamAllocation> {
    problem.validate()?;
    let r = problem.singulars.len();
    if r > 4 || problem.bit_budget > 16 {
        return Err(Error::invalid(format!(
            "exhaustive search is guarded to at most 4 streams and 16 bits, got r={r}, b_tot={}",
            problem.bit_budget
        )));
    }
    if power_grid_resolution == 0 {
        return Err(Error::invalid("power grid resolution must be positive"));
    }
    let settings = SolverSettings::default();

    let mut best: Option<StreamAllocation> = None;
    let mut composition = vec![0u32; r];
    enumerate_compositions(problem.bit_budget, 0, &mut composition, &mut |bits| {
        let solved = powers_for_bits(
            &problem.singulars,
            problem.noise_var,
            bits,
            problem.power_budget,
            &problem.model,
            &settings,
        )?;
        let mut top_powers = solved;
        let mut top_rate = exact_rate(&top_powers, bits, problem);

        // Simplex grid refinement over the bit-carrying streams.
        let carriers: Vec<usize> = (0..r).filter(|&i| bits[i] > 0).collect();
        if !carriers.is_empty() {
            let mut grid_point = vec![0u32; carriers.len()];
            enumerate_compositions(
                power_grid_resolution,
                0,
                &mut grid_point,
                &mut |weights| {
                    let mut powers = vec![0.0; r];
                    for (slot, &i) in carriers.iter().enumerate() {
                        powers[i] = problem.power_budget * weights[slot] as f64
                            / power_grid_resolution as f64;
                    }
                    let rate = exact_rate(&powers, bits, problem);
                    if rate > top_rate {
                        top_rate = rate;
                        top_powers = powers;
                    }
                    Ok(())
                },
            )?;
        }

        if best.as_ref().map_or(true, |b| top_rate > b.sum_rate) {
            best = Some(StreamAllocation::evaluate(
                top_powers,
                bits.to_vec(),
                &problem.singulars,
                problem.noise_var,
                &problem.model,
            )?);
        }
        Ok(())
    })?;
    Ok(best.expect("the composition set is never empty"))
}

/// Visits every way to split `remaining` into the slots from `slot` onward.
fn enumerate_compositions(
    remaining: u32,
    slot: usize,
    scratch: &mut Vec<u32>,
    visit: &mut impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if slot + 1 == scratch.len() {
        scratch[slot] = remaining;
        return visit(scratch);
    }
    for take in 0..=remaining {
        scratch[slot] = take;
        enumerate_compositions(remaining - take, slot + 1, scratch, visit)?;
    }
    Ok(())
}

fn check_streams(singulars: &[f64]) -> Result<()> {
    if singulars.is_empty() {
        return Err(Error::invalid("at least one stream is required"));
    }
    for &s in singulars {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::invalid(format!(
                "singular values must be positive and finite, got {s}"
            )));
        }
    }
    Ok(())
}
