use std::fs;
use std::path::{Path, PathBuf};

use atomflux::spectra::REFINE_POINTS;
use atomflux::{
    AtomSpec64, FrequencyGrid64, Isotope, PhysicalConstants64, SimConfig64, TransitionSpec64, UnitSystem,
    VibrationalLadder,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_GRID_POINTS: usize = 16;
/// γ_sp of hydrogen 2P in rad/s.
pub const DEFAULT_GAMMA_SP: f64 = 4.69e8;
/// Default x0 for SI runs, in metres.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomConfig {
    /// Defaults to the isotope's atomic number.
    pub z: Option<u32>,
    pub isotope: Option<Isotope>,
    /// Nuclear mass in kg; takes precedence over `isotope`.
    pub nuclear_mass: Option<f64>,
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self {
            z: None,
            isotope: Some(Isotope::Hydrogen1),
            nuclear_mass: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransitionConfig {
    pub n_upper: u32,
    /// Always in rad/s.
    pub gamma_sp: f64,
    /// γ_sp/ω_vib; overrides `gamma_sp` when set.
    pub gamma_ratio: Option<f64>,
    /// 1 in normalized units, the Bohr radius in SI when unset.
    pub x0: Option<f64>,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            n_upper: 2,
            gamma_sp: DEFAULT_GAMMA_SP,
            gamma_ratio: None,
            x0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Defaults to 0.
    pub min: Option<f64>,
    /// Defaults to 3ω_vib.
    pub max: Option<f64>,
    pub points: usize,
    pub auto_refine: bool,
    /// Explicit frequencies; replaces min/max/points entirely.
    pub omegas: Option<Vec<f64>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            min: None,
            max: None,
            points: 2001,
            auto_refine: true,
            omegas: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Standard output when unset.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub atom: AtomConfig,
    pub transition: TransitionConfig,
    pub grid: GridConfig,
    pub units: UnitSystem,
    pub output: OutputConfig,
    pub sim: Option<SimConfig64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            atom: AtomConfig::default(),
            transition: TransitionConfig::default(),
            grid: GridConfig::default(),
            units: UnitSystem::Normalized,
            output: OutputConfig::default(),
            sim: None,
        }
    }
}

/// A config with every derived quantity in place.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub constants: PhysicalConstants64,
    pub atom: AtomSpec64,
    pub isotope: Option<Isotope>,
    /// ω₀ and ω_vib in rad/s regardless of the unit system.
    pub omega0_si: f64,
    pub omega_vib_si: f64,
    pub transition: TransitionSpec64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let constants = PhysicalConstants64::codata2018();
        let (mass, isotope) = match (self.atom.nuclear_mass, self.atom.isotope) {
            (Some(m), _) => (m, None),
            (None, Some(iso)) => (iso.nuclear_mass(), Some(iso)),
            (None, None) => {
                return Err(CliError::Config(
                    "atom needs either a nuclear_mass or a named isotope".into(),
                ))
            }
        };
        let z = self.atom.z.or(isotope.map(Isotope::atomic_number)).unwrap_or(1);
        let atom = AtomSpec64::new(z, mass, &constants)?;
        let ladder = VibrationalLadder::new(&atom, &constants);
        let omega_vib_si = ladder.omega_vib(self.transition.n_upper)?;
        let t = &self.transition;
        let transition = match self.units {
            UnitSystem::Si => {
                let gamma = t.gamma_ratio.map_or(t.gamma_sp, |r| r * omega_vib_si);
                TransitionSpec64::si(&atom, &constants, t.n_upper, gamma, t.x0.unwrap_or(BOHR_RADIUS))?
            }
            UnitSystem::Normalized => {
                let ratio = t.gamma_ratio.unwrap_or(t.gamma_sp / omega_vib_si);
                TransitionSpec64::normalized(t.n_upper, ratio, t.x0.unwrap_or(1.0))?
            }
        };
        Ok(Resolved {
            constants,
            atom,
            isotope,
            omega0_si: ladder.omega0,
            omega_vib_si,
            transition,
        })
    }

    pub fn build_grid(&self, t: &TransitionSpec64) -> Result<FrequencyGrid64, CliError> {
        if let Some(omegas) = &self.grid.omegas {
            return Ok(FrequencyGrid64::new(omegas.clone(), t.units)?);
        }
        let g = &self.grid;
        if g.points < MIN_GRID_POINTS {
            return Err(CliError::Config(format!(
                "grid.points must be ≥ {MIN_GRID_POINTS}, got {}",
                g.points
            )));
        }
        let min = g.min.unwrap_or(0.0);
        let max = g.max.unwrap_or(3.0 * t.omega_vib);
        let grid = if g.auto_refine {
            FrequencyGrid64::refined(min, max, g.points, t, REFINE_POINTS)?
        } else {
            FrequencyGrid64::uniform(min, max, g.points, t.units)?
        };
        Ok(grid)
    }

    /// The sim block, or the default normalized run when absent.
    pub fn sim_config(&self) -> SimConfig64 {
        self.sim.unwrap_or_default()
    }
}
