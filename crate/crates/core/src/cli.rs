//! Command-line front end.
//!
//! Subcommands: `design-quantizer`, `validate-bussgang`, `allocate`, `sweep`,
//! `oracle-check`. Sweeps are described by a flat `key = value` config file
//! (`#` starts a comment) whose keys mirror the `SweepConfig` fields; results
//! are written as CSV with the stable schema from the simulation module.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::allocation::{
    brute_force_alloc, greedy_alloc, jbp_alloc, ub_alloc, unaware_wf_alloc, AllocationProblem,
    SolverSettings,
};
use crate::fmt::sig12;
use crate::quantizer::{bussgang_check, design_lloyd_max, DistortionModel};
use crate::rate::StreamAllocation;
use crate::simulation::{db_to_linear, run_sweep, Scheme, SweepConfig};

#[derive(Parser)]
#[command(
    name = "streamquant",
    version,
    about = "Sum-rate simulator for MIMO links with quantized fronthaul",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a Lloyd-Max quantizer and print its codebook record.
    DesignQuantizer {
        /// Resolution in bits per real sample (1..=12).
        #[arg(long)]
        bits: u32,
        /// Relative distortion-change stopping tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
    },
    /// Estimate the Bussgang statistics of a designed quantizer by Monte Carlo.
    ValidateBussgang {
        #[arg(long)]
        bits: u32,
        /// SNR of the probe observation in dB (unit channel, unit signal power).
        #[arg(long, default_value_t = 10.0)]
        snr_db: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Allocate bits and power on an inline problem instance.
    Allocate {
        /// Descending singular values, comma separated.
        #[arg(long, value_delimiter = ',')]
        singulars: Vec<f64>,
        /// Power budget.
        #[arg(long)]
        power: f64,
        /// Noise variance.
        #[arg(long)]
        noise: f64,
        /// Total bit budget.
        #[arg(long)]
        bits: u32,
        /// One of: jbp, ub, greedy, unaware_wf, oracle.
        #[arg(long)]
        scheme: String,
    },
    /// Run a Monte-Carlo sweep described by a config file and emit CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Measure per-scheme wall clock (the ms column is machine-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Sweep with the exhaustive oracle and verify it dominates every heuristic.
    OracleCheck {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `argv` and runs the selected command, writing to the given streams.
/// Returns the process exit code: 0 on success, 2 on usage errors, 1 on
/// runtime failures (each reported as a one-line diagnostic on `err`).
pub fn parse_and_dispatch<O: Write, E: Write>(
    argv: impl IntoIterator<Item = String>,
    out: &mut O,
    err: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(parse_err) => {
            let kind = parse_err.kind();
            if kind == ErrorKind::DisplayHelp || kind == ErrorKind::DisplayVersion {
                let _ = write!(out, "{parse_err}");
                return 0;
            }
            let _ = write!(err, "{parse_err}");
            return 2;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            1
        }
    }
}

fn run<O: Write>(command: Command, out: &mut O) -> Result<(), String> {
    match command {
        Command::DesignQuantizer {
            bits,
            tolerance,
            max_iterations,
        } => {
            let codebook =
                design_lloyd_max(bits, tolerance, max_iterations).map_err(|e| e.to_string())?;
            write!(out, "{}", codebook.export_record()).map_err(|e| e.to_string())
        }
        Command::ValidateBussgang {
            bits,
            snr_db,
            samples,
            seed,
        } => {
            let codebook = design_lloyd_max(bits, 1e-10, 10_000).map_err(|e| e.to_string())?;
            let noise_var = 1.0 / db_to_linear(snr_db);
            let report = bussgang_check(
                &codebook,
                1.0,
                Complex64::new(1.0, 0.0),
                noise_var,
                samples,
                seed,
            )
            .map_err(|e| e.to_string())?;
            let expected = 1.0 - codebook.distortion;
            let gain_err = (report.estimated_gain - Complex64::new(expected, 0.0)).norm();
            writeln!(out, "bits = {bits}")
                .and_then(|_| writeln!(out, "samples = {samples}"))
                .and_then(|_| writeln!(out, "expected_gain = {}", sig12(expected)))
                .and_then(|_| {
                    writeln!(
                        out,
                        "estimated_gain = {} {}i",
                        sig12(report.estimated_gain.re),
                        sig12(report.estimated_gain.im)
                    )
                })
                .and_then(|_| writeln!(out, "gain_error = {}", sig12(gain_err)))
                .and_then(|_| {
                    writeln!(
                        out,
                        "cross_correlation = {}",
                        sig12(report.cross_correlation_x_eta.norm())
                    )
                })
                .and_then(|_| {
                    writeln!(
                        out,
                        "output_power_ratio = {}",
                        sig12(report.output_power_ratio)
                    )
                })
                .map_err(|e| e.to_string())
        }
        Command::Allocate {
            singulars,
            power,
            noise,
            bits,
            scheme,
        } => {
            let scheme = Scheme::parse(&scheme).map_err(|e| e.to_string())?;
            let model = DistortionModel::new().map_err(|e| e.to_string())?;
            let problem = AllocationProblem::new(singulars, power, noise, bits, model)
                .map_err(|e| e.to_string())?;
            let settings = SolverSettings::default();
            let alloc = match scheme {
                Scheme::Jbp => jbp_alloc(&problem, &settings),
                Scheme::Ub => ub_alloc(&problem, &settings),
                Scheme::Greedy => greedy_alloc(&problem, &settings),
                Scheme::UnawareWf => unaware_wf_alloc(&problem, &settings),
                Scheme::Oracle => brute_force_alloc(&problem, 16),
                Scheme::Ideal => {
                    return Err("`ideal` is a bound, not a bit allocation; \
                         pick jbp, ub, greedy, unaware_wf, or oracle"
                        .to_string())
                }
            }
            .map_err(|e| e.to_string())?;
            write_allocation(out, &problem, &alloc).map_err(|e| e.to_string())
        }
        Command::Sweep {
            config,
            output,
            timing,
        } => {
            let mut sweep_config = load_config(&config)?;
            sweep_config.timing |= timing;
            let result = run_sweep(&sweep_config).map_err(|e| e.to_string())?;
            let csv = result.to_csv();
            match output {
                Some(path) => {
                    fs::write(&path, &csv)
                        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                    write!(out, "{}", result.summarize()).map_err(|e| e.to_string())?;
                    writeln!(out, "wrote {}", path.display()).map_err(|e| e.to_string())
                }
                None => write!(out, "{csv}").map_err(|e| e.to_string()),
            }
        }
        Command::OracleCheck { config } => {
            let mut sweep_config = load_config(&config)?;
            // The oracle bounds every heuristic realization by realization.
            sweep_config.schemes = Scheme::ALL.to_vec();
            sweep_config.record_realizations = true;
            let result = run_sweep(&sweep_config).map_err(|e| e.to_string())?;
            let matrix = result
                .per_realization
                .as_ref()
                .expect("recording was requested");
            let mut worst: f64 = 0.0;
            for (row_idx, row) in result.rows.iter().enumerate() {
                if row.scheme == Scheme::Oracle || row.scheme == Scheme::Ideal {
                    continue;
                }
                let oracle_idx = result
                    .rows
                    .iter()
                    .position(|r| r.b_tot == row.b_tot && r.scheme == Scheme::Oracle)
                    .expect("oracle rows are present");
                for (j, (&heuristic, &oracle)) in
                    matrix[row_idx].iter().zip(&matrix[oracle_idx]).enumerate()
                {
                    let gap = heuristic - oracle;
                    worst = worst.max(gap);
                    if gap > 1e-9 {
                        return Err(format!(
                            "{} beats the exhaustive oracle by {gap:.3e} at b_tot = {} \
                             (realization {j}); the search is not exhaustive enough",
                            row.scheme.label(),
                            row.b_tot
                        ));
                    }
                }
            }
            write!(out, "{}", result.summarize()).map_err(|e| e.to_string())?;
            writeln!(
                out,
                "oracle dominates every heuristic on {} realizations (worst excess {})",
                sweep_config.realizations,
                sig12(worst)
            )
            .map_err(|e| e.to_string())
        }
    }
}

fn write_allocation<O: Write>(
    out: &mut O,
    problem: &AllocationProblem,
    alloc: &StreamAllocation,
) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<8} {:>14} {:>14} {:>6} {:>14} {:>14}",
        "stream", "singular", "power", "bits", "distortion", "rate"
    )?;
    for i in 0..alloc.powers.len() {
        writeln!(
            out,
            "{:<8} {:>14} {:>14} {:>6} {:>14} {:>14}",
            i,
            sig12(problem.singulars[i]),
            sig12(alloc.powers[i]),
            alloc.bits[i],
            sig12(alloc.distortions[i]),
            sig12(alloc.stream_rates[i]),
        )?;
    }
    writeln!(out, "total_power = {}", sig12(alloc.powers.iter().sum()))?;
    writeln!(out, "total_bits = {}", alloc.bits.iter().sum::<u32>())?;
    writeln!(out, "active_streams = {}", alloc.active_count)?;
    writeln!(out, "sum_rate = {}", sig12(alloc.sum_rate))
}

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------

fn load_config(path: &Path) -> Result<SweepConfig, String> {
    if !path.exists() {
        return Err(format!("config not found: {}", path.display()));
    }
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_sweep_config(&text)
}

/// Parses the flat `key = value` sweep description. Unknown keys and
/// malformed values are rejected by name.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, String> {
    let mut config = SweepConfig::default();
    for (line_no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", line_no + 1))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "m" => config.m = parse_value(key, value)?,
            "k" => config.k = parse_value(key, value)?,
            "kappa_db" => config.kappa_db = parse_value(key, value)?,
            "snr_db" => config.snr_db = parse_value(key, value)?,
            "p" => config.p = parse_value(key, value)?,
            "sigma2" => config.sigma2 = parse_value(key, value)?,
            "bit_budgets" => {
                config.bit_budgets = value
                    .split(',')
                    .map(|v| parse_value::<u32>(key, v.trim()))
                    .collect::<Result<_, _>>()?
            }
            "realizations" => config.realizations = parse_value(key, value)?,
            "master_seed" => config.master_seed = parse_value(key, value)?,
            "schemes" => {
                config.schemes = value
                    .split(',')
                    .map(|v| Scheme::parse(v.trim()).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?
            }
            "nlos_paths" => config.nlos_paths = parse_value(key, value)?,
            "antenna_spacing" => config.antenna_spacing = parse_value(key, value)?,
            "timing" => config.timing = parse_value(key, value)?,
            "oracle_power_grid" => config.oracle_power_grid = parse_value(key, value)?,
            _ => return Err(format!("unknown config key `{key}` (line {})", line_no + 1)),
        }
    }
    Ok(config)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value for `{key}`: `{value}` ({e})"))
}
