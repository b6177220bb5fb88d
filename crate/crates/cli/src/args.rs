use std::path::PathBuf;

use atomflux::oracle::Integrator;
use atomflux::{Isotope, UnitSystem};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "atomflux",
    version,
    about = "Vibrational Langevin spectra of hydrogen-like atoms"
)]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Upper bound on worker threads.
    #[arg(long, global = true, env = "ATOMFLUX_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ω₀, ω_vib, γ_sp and A = 2γ_sp for the configured transition.
    Constants(CommonArgs),
    /// Noise-flux spectra N_x, N_U, N_K, N_UK, N_SP on the frequency grid.
    Spectra(CommonArgs),
    /// Lorentzian fit of the emission line N_SP.
    Fit(CommonArgs),
    /// Stochastic time-domain check of the position spectrum.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Si,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    SemiImplicitEuler,
    EulerMaruyama,
    Exact,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Atomic number.
    #[arg(long)]
    pub z: Option<u32>,
    /// Named nucleus: H-1, D-2 or He-4.
    #[arg(long, conflicts_with = "nuclear_mass")]
    pub isotope: Option<String>,
    /// Nuclear mass in kg.
    #[arg(long)]
    pub nuclear_mass: Option<f64>,
    #[arg(long)]
    pub n_upper: Option<u32>,
    /// Spontaneous decay rate in rad/s.
    #[arg(long)]
    pub gamma_sp: Option<f64>,
    /// Decay rate as a fraction of ω_vib.
    #[arg(long)]
    pub gamma_ratio: Option<f64>,
    /// Initial amplitude ⟨x(0)⟩.
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    #[arg(long)]
    pub grid_min: Option<f64>,
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Dense sampling around the resonances.
    #[arg(long, overrides_with = "no_refine")]
    pub refine: bool,
    #[arg(long)]
    pub no_refine: bool,
    /// Explicit frequency list, comma separated.
    #[arg(long = "omega", value_delimiter = ',', num_args = 1..)]
    pub omegas: Option<Vec<f64>>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ensembles: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub segment_length: Option<usize>,
    /// Oscillator frequency of the simulated run.
    #[arg(long)]
    pub sim_omega: Option<f64>,
    /// Decay rate of the simulated run.
    #[arg(long)]
    pub sim_gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub integrator: Option<IntegratorArg>,
    /// RMS relative deviation allowed by the validation.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    /// Also write the validation report as JSON.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Write the raw trajectory of one ensemble member.
    #[arg(long, value_name = "FILE")]
    pub dump_trajectory: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub dump_ensemble: usize,
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(z) = self.z {
            cfg.atom.z = Some(z);
        }
        if let Some(iso) = &self.isotope {
            cfg.atom.isotope = Some(iso.parse::<Isotope>()?);
            cfg.atom.nuclear_mass = None;
        }
        if let Some(m) = self.nuclear_mass {
            cfg.atom.nuclear_mass = Some(m);
        }
        let t = &mut cfg.transition;
        if let Some(n) = self.n_upper {
            t.n_upper = n;
        }
        if let Some(g) = self.gamma_sp {
            t.gamma_sp = g;
            t.gamma_ratio = None;
        }
        if let Some(r) = self.gamma_ratio {
            t.gamma_ratio = Some(r);
        }
        if let Some(x0) = self.x0 {
            t.x0 = Some(x0);
        }
        if let Some(u) = self.units {
            cfg.units = match u {
                UnitsArg::Si => UnitSystem::Si,
                UnitsArg::Normalized => UnitSystem::Normalized,
            };
        }
        let g = &mut cfg.grid;
        if let Some(v) = self.grid_min {
            g.min = Some(v);
        }
        if let Some(v) = self.grid_max {
            g.max = Some(v);
        }
        if let Some(p) = self.points {
            g.points = p;
        }
        if self.refine {
            g.auto_refine = true;
        }
        if self.no_refine {
            g.auto_refine = false;
        }
        if let Some(w) = &self.omegas {
            g.omegas = Some(w.clone());
        }
        if let Some(p) = &self.output {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        Ok(())
    }
}

impl SimulateArgs {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        self.common.apply(cfg)?;
        let mut sim = cfg.sim_config();
        let d = sim;
        if let Some(v) = self.seed {
            sim.seed = v;
        }
        if let Some(v) = self.ensembles {
            sim.n_ensembles = v;
        }
        if let Some(v) = self.dt {
            sim.dt = v;
        }
        if let Some(v) = self.n_steps {
            sim.n_steps = v;
        }
        if let Some(v) = self.burn_in {
            sim.burn_in = v;
        }
        if let Some(v) = self.segment_length {
            sim.welch.segment_length = v;
        }
        if let Some(v) = self.sim_omega {
            sim.omega_vib = v;
        }
        if let Some(v) = self.sim_gamma {
            sim.gamma_sp = v;
        }
        if let Some(v) = self.integrator {
            sim.integrator = match v {
                IntegratorArg::SemiImplicitEuler => Integrator::SemiImplicitEuler,
                IntegratorArg::EulerMaruyama => Integrator::EulerMaruyama,
                IntegratorArg::Exact => Integrator::Exact,
            };
        }
        if cfg.sim.is_some() || sim != d {
            cfg.sim = Some(sim);
        }
        Ok(())
    }
}
