//! Time-domain check of the analytic spectra.
//!
//! The Langevin equation
//!
//! ```text
//! δẍ + 2γ δẋ + ω_vib² δx = Γ(t)/μ,    ⟨Γ(t)Γ(t′)⟩ = q·δ(t − t′),  q = 2γ
//! ```
//!
//! is integrated for an ensemble of independent realisations, each started
//! from rest and run through a burn-in before recording.
//!
//! Under the unitary transform `f(ω) = (2π)^{-1/2} ∫ f(t) e^{-iωt} dt` a
//! delta-correlated force of intensity q has `⟨Γ(ω)Γ*(ω′)⟩ = q·δ(ω − ω′)`, so
//! the frequency-domain correlation `2γ·δ(ω − ω′)` fixes q = 2γ. The two-sided
//! position spectral density (per rad/s, with `⟨δx²⟩ = ∫ S dω`) is then
//! `(q/2π)|D(ω)|²/μ² = (γ/πμ²)|D(ω)|²`, whose integral over all ω is the
//! stationary variance `1/(2ω_vib²μ²)`.
//!
//! Position spectra are estimated with Welch's method and compared against
//! that transfer-function density.

mod dump;
mod integrate;
mod psd;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;

pub use dump::{read_trajectory, write_trajectory, TrajectoryHeader, TRAJECTORY_MAGIC};
pub use integrate::{
    ensemble_rng, integrate_langevin, simulate, EnsembleStatistics, Integrator, OscillatorState, Propagator,
    SimulationOutcome, Trajectory,
};
pub use psd::{estimate_psd, hann_window, PsdEstimate, Sidedness, WelchEstimator};
pub use validate::{validate_against_analytic, BandDeviation, ValidationOptions, ValidationReport};

/// ω_vib·dt must not exceed this.
pub const MAX_PHASE_PER_STEP: f64 = 0.05;
/// γ·dt must not exceed this.
pub const MAX_DAMPING_PER_STEP: f64 = 0.01;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("trajectory dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Serialize")
)]
pub struct WelchConfig<T> {
    pub segment_length: usize,
    pub overlap_fraction: T,
    pub window: Window,
    /// Subtract each segment's mean before windowing.
    pub detrend: bool,
}

impl<T: Real> Default for WelchConfig<T> {
    fn default() -> Self {
        Self {
            segment_length: 16_384,
            overlap_fraction: T::lit(0.5),
            window: Window::Hann,
            detrend: true,
        }
    }
}

/// Parameters of one stochastic validation run, in normalized units by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    bound(deserialize = "T: Real + Deserialize<'de>", serialize = "T: Serialize")
)]
pub struct SimConfig<T> {
    pub omega_vib: T,
    pub gamma_sp: T,
    pub mu: T,
    pub dt: T,
    /// Recorded samples per ensemble member, after burn-in.
    pub n_steps: usize,
    pub n_ensembles: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub integrator: Integrator,
    pub welch: WelchConfig<T>,
}

impl<T: Real> Default for SimConfig<T> {
    /// γ = 0.05ω_vib, 200 members, seed 42; sixteen 50%-overlapping segments
    /// of 16384 samples at dt = 0.05, burn-in 10/γ.
    fn default() -> Self {
        let welch = WelchConfig::<T>::default();
        Self {
            omega_vib: T::one(),
            gamma_sp: T::lit(0.05),
            mu: T::one(),
            dt: T::lit(0.05),
            n_steps: welch.segment_length / 2 * 17,
            n_ensembles: 200,
            seed: 42,
            burn_in: 4_000,
            integrator: Integrator::default(),
            welch,
        }
    }
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::InvalidConfig(msg));
        let positive = |v: T| v.is_finite() && v > T::zero();
        if !positive(self.omega_vib) {
            return bad("omega_vib must be positive".into());
        }
        if !positive(self.mu) {
            return bad("mu must be positive".into());
        }
        if !positive(self.dt) {
            return bad("dt must be positive".into());
        }
        if !(self.gamma_sp.is_finite() && self.gamma_sp >= T::zero()) {
            return bad("gamma_sp must be ≥ 0".into());
        }
        if self.omega_vib * self.dt > T::lit(MAX_PHASE_PER_STEP) {
            return bad(format!(
                "resolution guard: dt·omega_vib = {:e} exceeds {MAX_PHASE_PER_STEP}",
                (self.omega_vib * self.dt).as_f64()
            ));
        }
        if self.gamma_sp * self.dt > T::lit(MAX_DAMPING_PER_STEP) {
            return bad(format!(
                "resolution guard: dt·gamma_sp = {:e} exceeds {MAX_DAMPING_PER_STEP}",
                (self.gamma_sp * self.dt).as_f64()
            ));
        }
        if self.n_ensembles == 0 {
            return bad("n_ensembles must be ≥ 1".into());
        }
        if self.welch.segment_length < 2 {
            return bad("segment_length must be ≥ 2".into());
        }
        if self.n_steps < 4 * self.welch.segment_length {
            return bad(format!(
                "n_steps = {} must be at least 4·segment_length = {}",
                self.n_steps,
                4 * self.welch.segment_length
            ));
        }
        let overlap = self.welch.overlap_fraction;
        if !(overlap >= T::zero() && overlap < T::one()) {
            return bad("overlap_fraction must lie in [0, 1)".into());
        }
        Ok(())
    }

    /// Stationary variance 1/(2ω_vib²μ²) of the continuous process.
    pub fn stationary_variance(&self) -> T {
        let w = self.omega_vib * self.mu;
        (T::lit(2.0) * w * w).recip()
    }
}
