use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use atomflux::oracle::read_trajectory;
use atomflux::{FitError, FrequencyGrid64, NoiseSpectra64, TransitionSpec64};
use atomflux_cli::commands::{self, ConstantsReport, FitReport, SimulateDocument, SpectraDocument};
use atomflux_cli::output::{parse_csv, PSD_HEADER, SPECTRA_HEADER};
use atomflux_cli::{CliError, RunConfig};

const GOLDEN_SPECTRA: &str = "tests/golden/spectra_default.csv";

fn atomflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomflux"))
        .args(args)
        .env_remove("ATOMFLUX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN_SPECTRA)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const SMALL_SIM: &[&str] = &[
    "simulate",
    "--segment-length",
    "1024",
    "--n-steps",
    "8192",
    "--ensembles",
    "12",
    "--burn-in",
    "2000",
    "--tolerance",
    "1",
];

#[test]
fn constants_si_report() {
    let out = atomflux(&["constants", "--units", "si", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r: ConstantsReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rel(r.omega0, 4.15e16) < 0.01);
    assert!(rel(r.omega_vib, 5.19e15) < 0.01);
    assert_eq!(r.omega_vib, r.omega0 / 8.0);
    assert_eq!(r.gamma_sp, 4.69e8);
    assert_eq!(r.einstein_a, 9.38e8);

    let text = atomflux(&["constants", "--units", "si"]);
    assert_eq!(text.status.code(), Some(0));
    assert!(stdout(&text).contains("9.380000e8 rad/s"));
}

#[test]
fn constants_normalized_report() {
    for (n, w0) in [("2", 8.0), ("3", 27.0)] {
        let out = atomflux(&["constants", "--n-upper", n, "--format", "json"]);
        let r: ConstantsReport = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(r.omega_vib, 1.0);
        assert_eq!(r.omega0, w0);
    }
}

#[test]
fn zero_atomic_number_is_config_error() {
    let out = atomflux(&["constants", "--z", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("atomic number must be ≥ 1"), "{}", stderr(&out));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"grid": {"points": 8}}"#).unwrap();
    let out = atomflux(&["spectra", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grid.points"));

    fs::write(&bad, "{not json").unwrap();
    assert_eq!(
        atomflux(&["spectra", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(atomflux(&["spectra", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(atomflux(&["spectra", "--n-upper", "1"]).status.code(), Some(2));
    assert_eq!(atomflux(&["constants", "--isotope", "Li-7"]).status.code(), Some(2));
    assert_eq!(atomflux(&["--threads", "0", "constants"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        atomflux(&["spectra", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let out = atomflux(&["spectra", "-o", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(
        &path,
        r#"{"schema_version": 1, "units": "SI", "transition": {"n_upper": 3}, "output": {"format": "json"}}"#,
    )
    .unwrap();
    let out = atomflux(&["constants", "--config", path.to_str().unwrap()]);
    let r: ConstantsReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r.n_upper, 3);
    assert_eq!(r.omega_vib, r.omega0 / 27.0);

    let out = atomflux(&[
        "constants",
        "--config",
        path.to_str().unwrap(),
        "--n-upper",
        "4",
        "--units",
        "normalized",
    ]);
    let r: ConstantsReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((r.n_upper, r.omega_vib, r.omega0), (4, 1.0, 64.0));
}

#[test]
fn default_spectra_match_golden_file() {
    let out = atomflux(&["spectra"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = golden_path();
    if std::env::var_os("ATOMFLUX_BLESS").is_some() {
        fs::write(&golden, &out.stdout).unwrap();
    }
    let expected = fs::read(&golden).expect("golden file present; run with ATOMFLUX_BLESS=1 to create it");
    assert!(
        out.stdout == expected,
        "spectra output differs from {}",
        golden.display()
    );
}

#[test]
fn csv_round_trips_at_full_precision() {
    let out = atomflux(&["spectra"]);
    let (header, rows) = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(header, SPECTRA_HEADER);
    assert!(!stdout(&out).contains('\r'));
    let (_, spectra) = commands::compute_spectra(&RunConfig::default()).unwrap();
    assert_eq!(rows.len(), spectra.len());
    for (row, p) in rows.iter().zip(spectra.points()) {
        let expected = [p.omega, p.n_x, p.n_u, p.n_k, p.n_uk, p.n_sp];
        for (a, b) in row.iter().zip(expected) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn json_round_trips_without_loss() {
    let out = atomflux(&["spectra", "--format", "json", "--points", "64", "--no-refine"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: SpectraDocument = serde_json::from_str(&stdout(&out)).unwrap();
    let mut cfg = RunConfig::default();
    cfg.grid.points = 64;
    cfg.grid.auto_refine = false;
    let (t, spectra) = commands::compute_spectra(&cfg).unwrap();
    assert_eq!(doc.transition, t);
    assert_eq!(doc.spectra, spectra);
    assert_eq!(doc.schema_version, 1);
    let again = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    assert_eq!(again, stdout(&out));
}

#[test]
fn single_point_at_omega_vib() {
    let out = atomflux(&["spectra", "--omega", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[0][3], 0.0);
    assert_eq!(rows[0][4], 0.0);
    assert!(rows[0][2] > 0.0);
}

#[test]
fn output_independent_of_thread_count() {
    let one = atomflux(&["--threads", "1", "spectra"]);
    let many = Command::new(env!("CARGO_BIN_EXE_atomflux"))
        .arg("spectra")
        .env("ATOMFLUX_THREADS", "7")
        .output()
        .unwrap();
    let default = atomflux(&["spectra"]);
    assert!(one.stdout == many.stdout && one.stdout == default.stdout);
}

#[test]
fn fit_ratio_in_normalized_units() {
    let out = atomflux(&["fit", "--gamma-ratio", "1e-3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r: FitReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((r.ratio - 1.0).abs() < 0.005, "{}", r.ratio);
    assert!((r.peak_omega - 2.0).abs() < 1e-3);
}

#[test]
fn fit_si_linewidth() {
    let out = atomflux(&["fit", "--units", "si", "--format", "json"]);
    let r: FitReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rel(r.fwhm, 9.38e8) < 0.01, "{}", r.fwhm);
}

#[test]
fn flat_spectrum_fails_with_no_peak() {
    let t = TransitionSpec64::normalized(2, 1e-3, 1.0).unwrap();
    let grid = FrequencyGrid64::uniform(0.0, 3.0, 301, t.units).unwrap();
    let mut spectra = NoiseSpectra64::compute(grid, &t);
    spectra.n_sp.iter_mut().for_each(|v| *v = 1.0);
    let err = commands::fit_report(&spectra, &t).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(matches!(&err, CliError::Fit(e @ FitError::NoPeak(_)) if e.name() == "NoPeak"));
    assert!(err.to_string().contains("NoPeak"));
}

#[test]
fn fit_failure_exit_code() {
    // too few samples across the line
    let out = atomflux(&["fit", "--points", "16", "--no-refine"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn default_simulation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let psd = dir.path().join("psd.csv");
    let report = dir.path().join("report.json");
    let out = atomflux(&[
        "simulate",
        "-o",
        psd.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (header, rows) = parse_csv(&fs::read_to_string(&psd).unwrap()).unwrap();
    assert_eq!(header, PSD_HEADER);
    assert_eq!(rows.len(), 16384 / 2 + 1);
    let v: atomflux::ValidationReport64 = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert!(v.passed && v.rms_relative_deviation < 0.05);
}

#[test]
fn simulation_is_reproducible_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<PathBuf> = (0..3).map(|i| dir.path().join(format!("psd{i}.csv"))).collect();
    for (f, threads) in files.iter().zip(["1", "4", "4"]) {
        let mut args = vec!["--threads", threads];
        args.extend_from_slice(SMALL_SIM);
        args.extend_from_slice(&["-o", f.to_str().unwrap()]);
        assert_eq!(atomflux(&args).status.code(), Some(0));
    }
    let bytes: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
    assert!(bytes[0] == bytes[1] && bytes[1] == bytes[2]);

    let mut other = SMALL_SIM.to_vec();
    other.extend_from_slice(&["--seed", "43"]);
    assert_ne!(atomflux(&other).stdout, bytes[0]);
}

#[test]
fn simulation_tolerance_failure_exit_5() {
    let mut args = SMALL_SIM[..SMALL_SIM.len() - 2].to_vec();
    args.extend_from_slice(&["--tolerance", "1e-4"]);
    let out = atomflux(&args);
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout(&out).starts_with(PSD_HEADER));
}

#[test]
fn simulation_resolution_guard() {
    let out = atomflux(&["simulate", "--dt", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("resolution guard"), "{}", stderr(&out));
}

#[test]
fn simulation_json_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("traj.bin");
    let mut args = SMALL_SIM.to_vec();
    args.extend_from_slice(&[
        "--format",
        "json",
        "--dump-trajectory",
        dump.to_str().unwrap(),
        "--dump-ensemble",
        "3",
    ]);
    let out = atomflux(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: SimulateDocument = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc.config.n_ensembles, 12);
    assert_eq!(doc.psd.s_xx.len(), 513);

    let (header, traj) = read_trajectory(fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(header.ensemble, 3);
    assert_eq!(header.config, doc.config);
    assert_eq!(traj.len(), 8192);
    let direct = atomflux::integrate_langevin(&doc.config, 3).unwrap();
    assert_eq!(traj, direct);

    let mut bad = SMALL_SIM.to_vec();
    bad.extend_from_slice(&["--dump-trajectory", dump.to_str().unwrap(), "--dump-ensemble", "12"]);
    assert_eq!(atomflux(&bad).status.code(), Some(2));
}

#[test]
fn help_and_version() {
    assert_eq!(atomflux(&["--help"]).status.code(), Some(0));
    assert_eq!(atomflux(&["--version"]).status.code(), Some(0));
    assert_eq!(atomflux(&[]).status.code(), Some(2));
}
