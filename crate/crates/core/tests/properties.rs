//! Property-based invariants for the quantizer, the rate law, and the
//! allocation solvers, checked over randomized instances.

use std::sync::OnceLock;

use proptest::prelude::*;

use streamquant::allocation::{
    bit_waterlevel, g_prime, g_prime_inverse, greedy_alloc_with_stats, jbp_alloc_with_stats,
    quantized_water_fill, ub_alloc, unaware_wf_alloc, water_fill, AllocationProblem,
    SolverSettings,
};
use streamquant::quantizer::{design_lloyd_max, quantize, DistortionModel, LloydMaxCodebook};
use streamquant::rate::{ideal_rate, stream_rate};

fn model() -> &'static DistortionModel {
    static MODEL: OnceLock<DistortionModel> = OnceLock::new();
    MODEL.get_or_init(|| DistortionModel::new().unwrap())
}

fn codebook(bits: u32) -> &'static LloydMaxCodebook {
    static BOOKS: OnceLock<Vec<LloydMaxCodebook>> = OnceLock::new();
    &BOOKS.get_or_init(|| {
        (1..=6)
            .map(|b| design_lloyd_max(b, 1e-10, 10_000).unwrap())
            .collect()
    })[(bits - 1) as usize]
}

/// Descending positive singular values of the given stream count.
fn singulars_strategy(count: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..8.0, count).prop_map(|mut s| {
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    })
}

fn problem_strategy() -> impl Strategy<Value = AllocationProblem> {
    (1usize..=5)
        .prop_flat_map(|r| {
            (
                singulars_strategy(r),
                0.2f64..20.0,
                0.05f64..4.0,
                0u32..=14,
            )
        })
        .prop_map(|(singulars, power, noise, bits)| {
            AllocationProblem::new(singulars, power, noise, bits, *model()).unwrap()
        })
}

proptest! {
    // -- rate law -------------------------------------------------------------

    #[test]
    fn stream_rate_respects_both_ceilings(
        p in 0.0f64..50.0,
        s in 0.01f64..20.0,
        noise in 0.01f64..5.0,
        bits in 0u32..=10,
    ) {
        let beta = model().distortion_factor(bits);
        let rate = stream_rate(p, s, noise, beta).unwrap();
        prop_assert!(rate >= 0.0);
        let shannon = (p * s * s / noise).ln_1p() / std::f64::consts::LN_2;
        prop_assert!(rate <= shannon + 1e-12, "rate {rate} above Shannon {shannon}");
        if beta > 0.0 {
            let cap = (1.0 / beta).log2();
            prop_assert!(rate <= cap + 1e-12, "rate {rate} above resolution cap {cap}");
        }
    }

    #[test]
    fn stream_rate_is_monotone_in_power_and_resolution(
        p in 0.01f64..20.0,
        extra in 0.01f64..5.0,
        s in 0.1f64..10.0,
        noise in 0.05f64..4.0,
        bits in 1u32..=9,
    ) {
        let beta_lo = model().distortion_factor(bits);
        let beta_hi = model().distortion_factor(bits + 1);
        let base = stream_rate(p, s, noise, beta_lo).unwrap();
        prop_assert!(stream_rate(p + extra, s, noise, beta_lo).unwrap() >= base);
        prop_assert!(stream_rate(p, s, noise, beta_hi).unwrap() >= base);
        prop_assert!(stream_rate(p, s, noise + extra, beta_lo).unwrap() <= base);
    }

    // -- quantizer ------------------------------------------------------------

    #[test]
    fn quantize_picks_the_cell_containing_the_sample(
        sample in -6.0f64..6.0,
        bits in 1u32..=6,
    ) {
        let cb = codebook(bits);
        let level = quantize(cb, sample);
        let idx = cb.levels.iter().position(|l| *l == level).unwrap();
        if idx > 0 {
            prop_assert!(sample >= cb.thresholds[idx - 1]);
        }
        if idx < cb.thresholds.len() {
            prop_assert!(sample < cb.thresholds[idx]);
        }
        // Midpoint thresholds make the cell rule the nearest-neighbor rule.
        let nearest = cb
            .levels
            .iter()
            .map(|l| (sample - l).abs())
            .fold(f64::INFINITY, f64::min);
        prop_assert!((sample - level).abs() <= nearest + 1e-6);
    }

    // -- classical water-filling ------------------------------------------------

    #[test]
    fn water_fill_budget_and_kkt_hold(
        singulars in singulars_strategy(4),
        power in 0.05f64..30.0,
        noise in 0.05f64..4.0,
    ) {
        let p = water_fill(&singulars, power, noise).unwrap();
        let total: f64 = p.iter().sum();
        prop_assert!((total - power).abs() <= 1e-9 * power);
        let level = p
            .iter()
            .zip(&singulars)
            .filter(|(&pi, _)| pi > 0.0)
            .map(|(&pi, &si)| pi + noise / (si * si))
            .fold(f64::NEG_INFINITY, f64::max);
        for (&pi, &si) in p.iter().zip(&singulars) {
            let floor = noise / (si * si);
            if pi > 0.0 {
                prop_assert!((pi + floor - level).abs() <= 1e-9 * level.max(1.0));
            } else {
                prop_assert!(floor >= level - 1e-9 * level.max(1.0));
            }
        }
        // Active streams form a prefix of the descending-gain order.
        let first_off = p.iter().position(|&pi| pi == 0.0).unwrap_or(p.len());
        prop_assert!(p[first_off..].iter().all(|&pi| pi == 0.0));
    }

    // -- continuous bit level -----------------------------------------------------

    #[test]
    fn bit_waterlevel_budget_and_marginals_hold(
        singulars in singulars_strategy(4),
        power in 0.5f64..20.0,
        budget in 0u32..=24,
    ) {
        let powers = water_fill(&singulars, power, 1.0).unwrap();
        let bits = bit_waterlevel(&powers, &singulars, budget).unwrap();
        prop_assert!((bits.iter().sum::<f64>() - f64::from(budget)).abs() < 1e-6);
        prop_assert!(bits.iter().all(|&b| b >= 0.0));
        // Active streams share one level mu = b_i - offset_i.
        let mut mu = f64::NAN;
        for (&b, (&pi, &si)) in bits.iter().zip(powers.iter().zip(&singulars)) {
            if b > 0.0 && pi > 0.0 {
                let this = b - 0.5 * (pi * si * si).log2();
                if mu.is_nan() {
                    mu = this;
                } else {
                    prop_assert!((this - mu).abs() < 1e-9, "levels {this} vs {mu}");
                }
            }
        }
    }

    // -- marginal utility of the quantized rate --------------------------------

    #[test]
    fn quantized_rate_is_concave_in_received_snr(
        beta_bits in 0u32..=10,
        x0 in 1e-3f64..1e3,
    ) {
        let beta = model().distortion_factor(beta_bits + 1);
        let g = |x: f64| ((1.0 - beta) * x / (beta * x + 1.0)).ln_1p();
        let h = 0.1 * x0;
        for i in 0..12 {
            let x = x0 + f64::from(i) * h;
            let second = g(x + 2.0 * h) - 2.0 * g(x + h) + g(x);
            prop_assert!(second <= 1e-12, "second difference {second} at x={x}");
        }
    }

    #[test]
    fn g_prime_inverse_round_trips(
        bits in 0u32..=10,
        x in 1e-6f64..1e6,
    ) {
        let beta = model().distortion_factor(bits + 1);
        let y = g_prime(x, beta);
        prop_assert!(y > 0.0);
        let back = g_prime_inverse(y, beta).unwrap();
        prop_assert!(
            (back - x).abs() <= 1e-6 * x.max(1.0),
            "inverse({y}) = {back}, expected {x} at beta {beta}"
        );
        // Marginal utility strictly falls with received SNR.
        prop_assert!(g_prime(x * 1.01, beta) < y);
    }

    // -- quantization-aware water-filling ----------------------------------------

    #[test]
    fn quantized_water_fill_degenerates_to_classical(
        singulars in singulars_strategy(3),
        power in 0.1f64..20.0,
        noise in 0.1f64..3.0,
    ) {
        let classical = water_fill(&singulars, power, noise).unwrap();
        let zero_beta = vec![0.0; singulars.len()];
        let quantized =
            quantized_water_fill(&singulars, noise, &zero_beta, power, &SolverSettings::default())
                .unwrap();
        for (c, q) in classical.iter().zip(&quantized) {
            prop_assert!((c - q).abs() < 1e-8, "classical {c} vs quantized {q}");
        }
    }

    #[test]
    fn quantized_water_fill_budget_holds_for_mixed_resolutions(
        singulars in singulars_strategy(4),
        power in 0.1f64..20.0,
        bit_choices in prop::collection::vec(1u32..=8, 4),
    ) {
        let betas: Vec<f64> = bit_choices
            .iter()
            .map(|&b| model().distortion_factor(b))
            .collect();
        let p = quantized_water_fill(&singulars, 1.0, &betas, power, &SolverSettings::default())
            .unwrap();
        prop_assert!((p.iter().sum::<f64>() - power).abs() <= 1e-9 * power.max(1.0));
        prop_assert!(p.iter().all(|&pi| pi >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // -- whole-scheme invariants ---------------------------------------------------

    #[test]
    fn every_scheme_honors_budgets_and_the_ideal_bound(problem in problem_strategy()) {
        let settings = SolverSettings::default();
        let ideal_powers =
            water_fill(&problem.singulars, problem.power_budget, problem.noise_var).unwrap();
        let bound = ideal_rate(&ideal_powers, &problem.singulars, problem.noise_var).unwrap();
        let allocs = [
            jbp_alloc_with_stats(&problem, &settings).unwrap().0,
            ub_alloc(&problem, &settings).unwrap(),
            greedy_alloc_with_stats(&problem, &settings).unwrap().0,
            unaware_wf_alloc(&problem, &settings).unwrap(),
        ];
        for alloc in &allocs {
            prop_assert_eq!(alloc.bits.iter().sum::<u32>(), problem.bit_budget);
            let total: f64 = alloc.powers.iter().sum();
            prop_assert!(
                (total - problem.power_budget).abs() <= 1e-9 * problem.power_budget,
                "power {} vs budget {}", total, problem.power_budget
            );
            prop_assert!(alloc.sum_rate <= bound + 1e-9, "{} above {}", alloc.sum_rate, bound);
            prop_assert!(alloc.sum_rate >= 0.0);
        }
    }

    #[test]
    fn solver_invocation_counts_are_exact(problem in problem_strategy()) {
        let settings = SolverSettings::default();
        let r = problem.singulars.len();
        let (_, jbp_stats) = jbp_alloc_with_stats(&problem, &settings).unwrap();
        prop_assert_eq!(jbp_stats.budget_solves, 2 * r as u64);
        let (_, greedy_stats) = greedy_alloc_with_stats(&problem, &settings).unwrap();
        prop_assert_eq!(
            greedy_stats.budget_solves,
            u64::from(problem.bit_budget) * r as u64
        );
    }
}
