use std::fs::File;
use std::io::{self, BufWriter, Write};

use atomflux::oracle::{integrate_langevin, write_trajectory, EnsembleStatistics};
use atomflux::{
    fit_emission_line, simulate, validate_against_analytic, Isotope, LorentzianFit64, NoiseSpectra64, PsdEstimate64,
    SimConfig64, TransitionSpec64, UnitSystem, ValidationOptions, ValidationReport64,
};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig, SCHEMA_VERSION};
use crate::error::CliError;
use crate::output::{format_float, write_json, write_psd_csv, write_spectra_csv, Sink};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub schema_version: u32,
    pub kind: String,
    pub units: UnitSystem,
    pub z: u32,
    pub isotope: Option<Isotope>,
    pub nuclear_mass: f64,
    pub reduced_mass: f64,
    pub n_upper: u32,
    /// In the run's unit system.
    pub omega0: f64,
    pub omega_vib: f64,
    pub gamma_sp: f64,
    pub einstein_a: f64,
    /// Always rad/s.
    pub omega0_si: f64,
    pub omega_vib_si: f64,
    pub gamma_sp_si: f64,
    pub linewidth_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraDocument {
    pub schema_version: u32,
    pub kind: String,
    pub transition: TransitionSpec64,
    pub spectra: NoiseSpectra64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub kind: String,
    pub units: UnitSystem,
    pub peak_omega: f64,
    pub peak_height: f64,
    pub fwhm: f64,
    pub einstein_a: f64,
    /// fwhm / (2γ_sp)
    pub ratio: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateDocument {
    pub schema_version: u32,
    pub kind: String,
    pub config: SimConfig64,
    pub variance: EnsembleStatistics<f64>,
    pub psd: PsdEstimate64,
    pub validation: ValidationReport64,
}

fn unit_label(units: UnitSystem) -> &'static str {
    match units {
        UnitSystem::Si => "rad/s",
        UnitSystem::Normalized => "(units of omega_vib)",
    }
}

pub fn constants_report(cfg: &RunConfig) -> Result<ConstantsReport, CliError> {
    let r = cfg.resolve()?;
    let t = &r.transition;
    Ok(ConstantsReport {
        schema_version: SCHEMA_VERSION,
        kind: "constants".into(),
        units: t.units,
        z: r.atom.z,
        isotope: r.isotope,
        nuclear_mass: r.atom.nuclear_mass,
        reduced_mass: r.atom.reduced_mass,
        n_upper: t.n_upper,
        omega0: t.omega0,
        omega_vib: t.omega_vib,
        gamma_sp: t.gamma_sp,
        einstein_a: t.einstein_a(),
        omega0_si: r.omega0_si,
        omega_vib_si: r.omega_vib_si,
        gamma_sp_si: t.linewidth_ratio() * r.omega_vib_si,
        linewidth_ratio: t.linewidth_ratio(),
    })
}

pub fn render_constants(out: &mut dyn Write, c: &ConstantsReport) -> io::Result<()> {
    let unit = unit_label(c.units);
    let name = c
        .isotope
        .map_or_else(|| format!("M = {:e} kg", c.nuclear_mass), |i| i.to_string());
    writeln!(out, "atom              {name} (Z = {})", c.z)?;
    writeln!(out, "reduced mass      {:.6e} kg", c.reduced_mass)?;
    writeln!(out, "omega0            {:.6e} {unit}", c.omega0)?;
    writeln!(out, "omega_vib (n={})   {:.6e} {unit}", c.n_upper, c.omega_vib)?;
    writeln!(out, "gamma_sp          {:.6e} {unit}", c.gamma_sp)?;
    writeln!(out, "A = 2 gamma_sp    {:.6e} {unit}", c.einstein_a)?;
    writeln!(out, "gamma/omega_vib   {:.6e}", c.linewidth_ratio)
}

pub fn compute_spectra(cfg: &RunConfig) -> Result<(TransitionSpec64, NoiseSpectra64), CliError> {
    let t = cfg.resolve()?.transition;
    let grid = cfg.build_grid(&t)?;
    Ok((t, NoiseSpectra64::compute(grid, &t)))
}

/// Fits the emission line of already computed spectra.
pub fn fit_report(spectra: &NoiseSpectra64, t: &TransitionSpec64) -> Result<FitReport, CliError> {
    let fit: LorentzianFit64 = fit_emission_line(spectra, t)?;
    Ok(FitReport {
        schema_version: SCHEMA_VERSION,
        kind: "fit".into(),
        units: t.units,
        peak_omega: fit.peak_omega,
        peak_height: fit.peak_height,
        fwhm: fit.fwhm,
        einstein_a: t.einstein_a(),
        ratio: fit.fwhm / t.einstein_a(),
        residual: fit.residual,
    })
}

pub fn render_fit(out: &mut dyn Write, f: &FitReport) -> io::Result<()> {
    let unit = unit_label(f.units);
    writeln!(out, "peak omega        {:.9e} {unit}", f.peak_omega)?;
    writeln!(out, "peak height       {:.6e}", f.peak_height)?;
    writeln!(out, "fwhm              {:.6e} {unit}", f.fwhm)?;
    writeln!(out, "2 gamma_sp        {:.6e} {unit}", f.einstein_a)?;
    writeln!(out, "fwhm/(2 gamma_sp) {:.4}", f.ratio)?;
    writeln!(out, "residual          {:.3e}", f.residual)
}

pub fn simulate_document(cfg: &RunConfig, tolerance: f64) -> Result<SimulateDocument, CliError> {
    let sim = cfg.sim_config();
    let outcome = simulate(&sim)?;
    let n = cfg.transition.n_upper.max(2);
    let omega0 = sim.omega_vib * f64::from(n).powi(3);
    let t = TransitionSpec64::from_parts(n, sim.gamma_sp, 1.0, omega0, sim.mu, UnitSystem::Normalized)?;
    let opts = ValidationOptions {
        tolerance,
        ..ValidationOptions::default()
    };
    let validation = validate_against_analytic(&outcome.psd, &t, &opts)?;
    Ok(SimulateDocument {
        schema_version: SCHEMA_VERSION,
        kind: "simulate".into(),
        config: sim,
        variance: outcome.variance,
        psd: outcome.psd,
        validation,
    })
}

pub fn render_validation(out: &mut dyn Write, d: &SimulateDocument) -> io::Result<()> {
    let v = &d.validation;
    writeln!(
        out,
        "validation: rms deviation {:.4} over [{}, {}] rad/s ({} bins), peak ratio {:.4}, tolerance {}: {}",
        v.rms_relative_deviation,
        format_float(v.omega_lo),
        format_float(v.omega_hi),
        v.bins,
        v.peak_height_ratio,
        v.tolerance,
        if v.passed { "pass" } else { "FAIL" }
    )?;
    let expected = d.config.stationary_variance();
    writeln!(
        out,
        "variance: {:.6} ± {:.6} (expected {:.6}, z = {:.2})",
        d.variance.mean,
        d.variance.stderr,
        expected,
        d.variance.z_score(expected)
    )
}

pub fn dump_trajectory(cfg: &RunConfig, ensemble: usize, path: &std::path::Path) -> Result<(), CliError> {
    let sim = cfg.sim_config();
    if ensemble >= sim.n_ensembles {
        return Err(CliError::Config(format!(
            "dump ensemble {ensemble} out of range (n_ensembles = {})",
            sim.n_ensembles
        )));
    }
    let traj = integrate_langevin(&sim, ensemble)?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trajectory(BufWriter::new(file), &sim, ensemble, &traj).map_err(|e| match CliError::from(e) {
        CliError::Io { source, .. } => CliError::io(path, source),
        other => other,
    })
}

pub fn run_constants(cfg: &RunConfig) -> Result<(), CliError> {
    let report = constants_report(cfg)?;
    let sink = Sink::open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Json => sink.emit(|w| write_json(w, &report)),
        Format::Csv => sink.emit(|w| render_constants(w, &report)),
    }
}

pub fn run_spectra(cfg: &RunConfig) -> Result<(), CliError> {
    let (t, spectra) = compute_spectra(cfg)?;
    if let Some(msg) = t.broad_line_warning() {
        eprintln!("warning: {msg}");
    }
    let sink = Sink::open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Csv => sink.emit(|w| write_spectra_csv(w, &spectra)),
        Format::Json => {
            let doc = SpectraDocument {
                schema_version: SCHEMA_VERSION,
                kind: "spectra".into(),
                transition: t,
                spectra,
            };
            sink.emit(|w| write_json(w, &doc))
        }
    }
}

pub fn run_fit(cfg: &RunConfig) -> Result<(), CliError> {
    let (t, spectra) = compute_spectra(cfg)?;
    let report = fit_report(&spectra, &t)?;
    let sink = Sink::open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Json => sink.emit(|w| write_json(w, &report)),
        Format::Csv => sink.emit(|w| render_fit(w, &report)),
    }
}

pub struct SimulateExtras<'a> {
    pub tolerance: f64,
    pub report: Option<&'a std::path::Path>,
    pub dump: Option<(&'a std::path::Path, usize)>,
}

pub fn run_simulate(cfg: &RunConfig, extras: &SimulateExtras) -> Result<(), CliError> {
    let doc = simulate_document(cfg, extras.tolerance)?;
    if let Some((path, ensemble)) = extras.dump {
        dump_trajectory(cfg, ensemble, path)?;
    }
    let sink = Sink::open(cfg.output.path.as_deref())?;
    match cfg.output.format {
        Format::Csv => sink.emit(|w| write_psd_csv(w, &doc.psd))?,
        Format::Json => sink.emit(|w| write_json(w, &doc))?,
    }
    if let Some(path) = extras.report {
        Sink::open(Some(path))?.emit(|w| write_json(w, &doc.validation))?;
    }
    let mut err = io::stderr().lock();
    let _ = render_validation(&mut err, &doc);
    if doc.validation.passed {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "rms deviation {:.4} exceeds {}",
            doc.validation.rms_relative_deviation, doc.validation.tolerance
        )))
    }
}
