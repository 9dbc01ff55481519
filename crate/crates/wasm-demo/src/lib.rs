//! Browser bindings for the quantized-MIMO rate simulator.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page can surface them without exceptions
//! crossing the boundary. The heavy lifting stays in the core crate.

use serde_json::json;
use wasm_bindgen::prelude::*;

use streamquant::allocation::{
    brute_force_alloc, greedy_alloc, jbp_alloc, ub_alloc, unaware_wf_alloc, water_fill,
    AllocationProblem, SolverSettings,
};
use streamquant::quantizer::{design_lloyd_max, DistortionModel};
use streamquant::rate::ideal_rate;
use streamquant::simulation::{run_sweep_sequential, Scheme, SweepConfig};

fn or_error(result: Result<serde_json::Value, String>) -> String {
    match result {
        Ok(value) => value.to_string(),
        Err(message) => json!({ "error": message }).to_string(),
    }
}

/// Designs a Lloyd-Max codebook for a unit Gaussian and returns its levels,
/// thresholds, and distortion for plotting the quantizer staircase.
#[wasm_bindgen]
pub fn design_quantizer(bits: u32) -> String {
    or_error(design_quantizer_impl(bits))
}

fn design_quantizer_impl(bits: u32) -> Result<serde_json::Value, String> {
    if !(1..=8).contains(&bits) {
        return Err("the demo designs 1 to 8 bit quantizers".to_string());
    }
    // High resolutions converge slowly; a 1e-9 stop keeps 8 bits interactive
    // while staying far below what the plot can resolve.
    let codebook = design_lloyd_max(bits, 1e-9, 60_000).map_err(|e| e.to_string())?;
    Ok(json!({
        "bits": codebook.bits,
        "levels": codebook.levels,
        "thresholds": codebook.thresholds,
        "distortion": codebook.distortion,
    }))
}

/// Solves one bit/power allocation instance and returns the per-stream
/// split plus the ideal water-filling bound for the same streams.
#[wasm_bindgen]
pub fn allocate_streams(
    singulars_csv: &str,
    power: f64,
    noise: f64,
    bit_budget: u32,
    scheme: &str,
) -> String {
    or_error(allocate_streams_impl(
        singulars_csv,
        power,
        noise,
        bit_budget,
        scheme,
    ))
}

fn allocate_streams_impl(
    singulars_csv: &str,
    power: f64,
    noise: f64,
    bit_budget: u32,
    scheme: &str,
) -> Result<serde_json::Value, String> {
    let mut singulars = singulars_csv
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", v.trim()))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    singulars.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    if singulars.len() > 8 {
        return Err("the demo handles at most 8 streams".to_string());
    }
    let scheme = Scheme::parse(scheme).map_err(|e| e.to_string())?;
    let model = DistortionModel::new().map_err(|e| e.to_string())?;
    let problem = AllocationProblem::new(singulars.clone(), power, noise, bit_budget, model)
        .map_err(|e| e.to_string())?;
    let settings = SolverSettings::default();
    let alloc = match scheme {
        Scheme::Jbp => jbp_alloc(&problem, &settings),
        Scheme::Ub => ub_alloc(&problem, &settings),
        Scheme::Greedy => greedy_alloc(&problem, &settings),
        Scheme::UnawareWf => unaware_wf_alloc(&problem, &settings),
        Scheme::Oracle => brute_force_alloc(&problem, 16),
        Scheme::Ideal => return Err("pick jbp, ub, greedy, unaware_wf, or oracle".to_string()),
    }
    .map_err(|e| e.to_string())?;
    let ideal = {
        let p = water_fill(&singulars, power, noise).map_err(|e| e.to_string())?;
        ideal_rate(&p, &singulars, noise).map_err(|e| e.to_string())?
    };
    Ok(json!({
        "singulars": singulars,
        "powers": alloc.powers,
        "bits": alloc.bits,
        "stream_rates": alloc.stream_rates,
        "sum_rate": alloc.sum_rate,
        "active_streams": alloc.active_count,
        "ideal_rate": ideal,
    }))
}

/// Runs a small Monte-Carlo sweep (16x4 antennas) and returns the mean
/// sum rate of each scheme over a bit-budget grid, for the curves plot.
#[wasm_bindgen]
pub fn sweep_curves(kappa_db: f64, snr_db: f64, realizations: u32, seed: u32) -> String {
    or_error(sweep_curves_impl(kappa_db, snr_db, realizations, seed))
}

fn sweep_curves_impl(
    kappa_db: f64,
    snr_db: f64,
    realizations: u32,
    seed: u32,
) -> Result<serde_json::Value, String> {
    if !(1..=64).contains(&realizations) {
        return Err("realizations must lie in 1..=64".to_string());
    }
    let config = SweepConfig {
        m: 16,
        k: 4,
        kappa_db,
        snr_db,
        bit_budgets: (1..=12).map(|i| 4 * i).collect(),
        realizations: realizations as usize,
        master_seed: u64::from(seed),
        schemes: vec![Scheme::Ideal, Scheme::Jbp, Scheme::Ub, Scheme::UnawareWf],
        ..SweepConfig::default()
    };
    let result = run_sweep_sequential(&config).map_err(|e| e.to_string())?;
    let curves: Vec<serde_json::Value> = config
        .schemes
        .iter()
        .map(|&scheme| {
            let rates: Vec<f64> = result
                .rows
                .iter()
                .filter(|row| row.scheme == scheme)
                .map(|row| row.mean_sum_rate)
                .collect();
            json!({ "scheme": scheme.label(), "rates": rates })
        })
        .collect();
    Ok(json!({
        "budgets": config.bit_budgets,
        "curves": curves,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantizer_json_has_the_plot_fields() {
        let value: serde_json::Value =
            serde_json::from_str(&design_quantizer(3)).unwrap();
        assert_eq!(value["bits"], 3);
        assert_eq!(value["levels"].as_array().unwrap().len(), 8);
        assert_eq!(value["thresholds"].as_array().unwrap().len(), 7);
        let d = value["distortion"].as_f64().unwrap();
        assert!((d - 0.0345478).abs() < 1e-6, "distortion {d}");
    }

    #[test]
    fn out_of_range_bits_report_an_error_value() {
        let value: serde_json::Value =
            serde_json::from_str(&design_quantizer(11)).unwrap();
        assert!(value["error"].as_str().unwrap().contains("1 to 8"));
    }

    #[test]
    fn allocation_json_covers_every_stream() {
        let text = allocate_streams("4, 2, 1", 3.0, 1.0, 9, "jbp");
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let bits: Vec<u64> = value["bits"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| b.as_u64().unwrap())
            .collect();
        assert_eq!(bits.iter().sum::<u64>(), 9);
        assert!(value["sum_rate"].as_f64().unwrap() > 0.0);
        assert!(value["ideal_rate"].as_f64().unwrap() >= value["sum_rate"].as_f64().unwrap());
    }

    #[test]
    fn malformed_streams_are_rejected_gracefully() {
        let value: serde_json::Value =
            serde_json::from_str(&allocate_streams("4, soup", 1.0, 1.0, 4, "jbp")).unwrap();
        assert!(value["error"].as_str().unwrap().contains("soup"));
    }

    #[test]
    fn sweep_json_is_deterministic_and_complete() {
        let first = sweep_curves(0.0, 10.0, 3, 7);
        let second = sweep_curves(0.0, 10.0, 3, 7);
        assert_eq!(first, second);
        let value: serde_json::Value = serde_json::from_str(&first).unwrap();
        assert_eq!(value["budgets"].as_array().unwrap().len(), 12);
        let curves = value["curves"].as_array().unwrap();
        assert_eq!(curves.len(), 4);
        for curve in curves {
            assert_eq!(curve["rates"].as_array().unwrap().len(), 12);
        }
    }
}
