//! End-to-end coverage of the command-line interface: argument handling,
//! config parsing, output formats, and exit codes.

use std::fs;
use std::path::PathBuf;
use std::process;

use streamquant::cli::parse_and_dispatch;
use streamquant::fmt::sig12;
use streamquant::simulation::CSV_HEADER;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("streamquant".to_string()).chain(args.iter().map(|s| s.to_string()));
    let code = parse_and_dispatch(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("streamquant_cli_{}_{name}", process::id()))
}

#[test]
fn help_lists_all_subcommands() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    for sub in [
        "design-quantizer",
        "validate-bussgang",
        "allocate",
        "sweep",
        "oracle-check",
    ] {
        assert!(out.contains(sub), "help output is missing `{sub}`");
    }
}

#[test]
fn design_quantizer_prints_the_codebook_record() {
    let (code, out, _) = run(&["design-quantizer", "--bits", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("bits = 3"));
    assert!(
        out.contains("distortion = 0.034547760837"),
        "unexpected record: {out}"
    );
    let levels_line = out.lines().find(|l| l.starts_with("levels = ")).unwrap();
    assert_eq!(levels_line.trim_start_matches("levels = ").split(',').count(), 8);
}

#[test]
fn validate_bussgang_reports_near_theory_gain() {
    let (code, out, _) = run(&[
        "validate-bussgang",
        "--bits",
        "3",
        "--samples",
        "200000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{out}");
    let gain_error: f64 = out
        .lines()
        .find(|l| l.starts_with("gain_error = "))
        .and_then(|l| l.trim_start_matches("gain_error = ").parse().ok())
        .unwrap();
    assert!(gain_error < 0.01, "gain error {gain_error} too large");
}

#[test]
fn allocate_honors_both_budgets() {
    let (code, out, _) = run(&[
        "allocate",
        "--singulars",
        "4,2,1",
        "--power",
        "3",
        "--noise",
        "1",
        "--bits",
        "9",
        "--scheme",
        "jbp",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("total_bits = 9"), "{out}");
    let power_line = out.lines().find(|l| l.starts_with("total_power = ")).unwrap();
    let total: f64 = power_line.trim_start_matches("total_power = ").parse().unwrap();
    assert!((total - 3.0).abs() < 1e-8, "total power {total}");
}

#[test]
fn allocate_rejects_the_bound_pseudo_scheme() {
    let (code, _, err) = run(&[
        "allocate", "--singulars", "2,1", "--power", "1", "--noise", "1", "--bits", "4",
        "--scheme", "ideal",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("not a bit allocation"), "{err}");
}

#[test]
fn sweep_writes_csv_that_round_trips_at_twelve_digits() {
    let config_path = temp_path("sweep.cfg");
    let csv_path = temp_path("sweep.csv");
    fs::write(
        &config_path,
        "m = 16\nk = 4\nsnr_db = 10\nbit_budgets = 8, 16\nrealizations = 4\n\
         master_seed = 11\nschemes = ideal, jbp, unaware_wf\n",
    )
    .unwrap();

    let (code, out, err) = run(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.contains("vs_ideal"), "summary missing: {out}");

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8, "bad row: {line}");
        for field in &fields[4..] {
            let value: f64 = field.parse().unwrap();
            assert_eq!(
                sig12(value),
                *field,
                "field `{field}` does not round-trip at 12 significant digits"
            );
        }
    }
    assert_eq!(rows, 2 * 3, "one row per (budget, scheme)");

    fs::remove_file(&config_path).ok();
    fs::remove_file(&csv_path).ok();
}

#[test]
fn sweep_without_output_streams_csv_to_stdout() {
    let config_path = temp_path("stdout.cfg");
    fs::write(
        &config_path,
        "m = 8\nk = 4\nbit_budgets = 8\nrealizations = 2\nschemes = ideal, jbp\n",
    )
    .unwrap();
    let (code, out, _) = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with(CSV_HEADER));
    assert_eq!(out.lines().count(), 3);
    fs::remove_file(&config_path).ok();
}

#[test]
fn missing_and_malformed_configs_fail_cleanly() {
    let (code, _, err) = run(&["sweep", "--config", "/nonexistent/nowhere.cfg"]);
    assert_eq!(code, 1);
    assert!(err.contains("config not found"), "{err}");

    let config_path = temp_path("bad.cfg");
    fs::write(&config_path, "m = 8\nwavelength = 3\n").unwrap();
    let (code, _, err) = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown config key `wavelength`"), "{err}");

    fs::write(&config_path, "m = eight\n").unwrap();
    let (code, _, err) = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("invalid value for `m`"), "{err}");
    fs::remove_file(&config_path).ok();
}

#[test]
fn oracle_check_passes_on_a_guarded_geometry() {
    let config_path = temp_path("oracle.cfg");
    fs::write(
        &config_path,
        "m = 4\nk = 2\nbit_budgets = 4, 8\nrealizations = 3\nmaster_seed = 5\n",
    )
    .unwrap();
    let (code, out, err) = run(&["oracle-check", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.contains("oracle dominates every heuristic"), "{out}");
    fs::remove_file(&config_path).ok();
}

#[test]
fn oracle_check_rejects_unguarded_budgets() {
    let config_path = temp_path("oracle_big.cfg");
    fs::write(&config_path, "m = 4\nk = 2\nbit_budgets = 24\nrealizations = 2\n").unwrap();
    let (code, _, err) = run(&["oracle-check", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("error:"), "{err}");
    fs::remove_file(&config_path).ok();
}

#[test]
fn installed_binary_behaves_like_the_library_dispatch() {
    let exe = env!("CARGO_BIN_EXE_streamquant");
    let output = process::Command::new(exe)
        .args(["design-quantizer", "--bits", "1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    // One-bit design: levels at +/- sqrt(2/pi).
    assert!(text.contains("0.797884560803"), "{text}");

    let failure = process::Command::new(exe)
        .args(["sweep", "--config", "/nonexistent/missing.cfg"])
        .output()
        .unwrap();
    assert_eq!(failure.status.code(), Some(1));
}
