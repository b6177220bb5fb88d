//! Frequency-domain solution of the damped vibrational oscillator and the
//! noise-flux spectra derived from it.
//!
//! All fluxes are built from the positional flux
//!
//! ```text
//! N_x(ω) = (γ/πμ²) / [ω²(ω − 2ω_vib)² + 4γ²(ω − ω_vib)²]
//! ```
//!
//! which equals `(γ/πμ²)·|D(ω − ω_vib)|²` for the oscillator transfer function
//! `D(ω) = 1/(ω_vib² − ω² + 2iγω)`. With `u = ω − ω_vib` and `a = ½μ²x₀²`:
//!
//! ```text
//! N_U  = a·ω₀⁴·N_x
//! N_K  = a·ω₀²·u²·N_x
//! N_UK = N_KU = −a·ω₀³·u·N_x
//! N_SP = N_U + N_K + N_UK + N_KU = a·ω₀²·(ω₀ − u)²·N_x
//! ```
//!
//! Only the positive-frequency branch `δx(ω − ω_vib)` is carried.

mod grid;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::{AtomError, AtomSpec, VibrationalLadder};
use crate::constants::PhysicalConstants;
use crate::real::Real;

#[cfg(test)]
pub(crate) use grid::linspace as grid_linspace;
pub use grid::{FrequencyGrid, REFINE_HALF_WIDTH, REFINE_POINTS};

/// γ_sp/ω_vib above which the narrow-line picture is questionable.
pub const BROAD_LINE_RATIO: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("upper level must be ≥ 2, got {0}")]
    InvalidUpperLevel(u32),
    #[error("decay rate γ_sp must be finite and positive")]
    InvalidDecayRate,
    #[error("initial amplitude x0 must be finite")]
    InvalidAmplitude,
    #[error("temperature must be ≥ 0 K")]
    NegativeTemperature,
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Atom(#[from] AtomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[serde(rename = "SI", alias = "si")]
    Si,
    /// μ = 1, ω_vib = 1, everything else as a ratio.
    #[default]
    Normalized,
}

/// One radiating transition n_upper → lower.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionSpec<T> {
    pub n_upper: u32,
    /// Half of the Einstein A coefficient.
    pub gamma_sp: T,
    pub x0: T,
    pub omega_vib: T,
    pub omega0: T,
    pub mu: T,
    pub units: UnitSystem,
}

impl<T: Real> TransitionSpec<T> {
    /// Builds a transition from its independent parameters; ω_vib = ω₀/n³.
    pub fn from_parts(
        n_upper: u32,
        gamma_sp: T,
        x0: T,
        omega0: T,
        mu: T,
        units: UnitSystem,
    ) -> Result<Self, SpectraError> {
        if n_upper < 2 {
            return Err(SpectraError::InvalidUpperLevel(n_upper));
        }
        if !(gamma_sp.is_finite() && gamma_sp > T::zero()) {
            return Err(SpectraError::InvalidDecayRate);
        }
        if !x0.is_finite() {
            return Err(SpectraError::InvalidAmplitude);
        }
        let omega_vib = VibrationalLadder::from_omega0(omega0).omega_vib(n_upper)?;
        Ok(Self {
            n_upper,
            gamma_sp,
            x0,
            omega_vib,
            omega0,
            mu,
            units,
        })
    }

    /// SI transition of a physical atom. `x0` is in metres and has no default.
    pub fn si(
        atom: &AtomSpec<T>,
        constants: &PhysicalConstants<T>,
        n_upper: u32,
        gamma_sp: T,
        x0: T,
    ) -> Result<Self, SpectraError> {
        let ladder = VibrationalLadder::new(atom, constants);
        Self::from_parts(n_upper, gamma_sp, x0, ladder.omega0, atom.reduced_mass, UnitSystem::Si)
    }

    /// μ = 1, ω_vib = 1, ω₀ = n³; `gamma_ratio` is γ_sp/ω_vib.
    pub fn normalized(n_upper: u32, gamma_ratio: T, x0: T) -> Result<Self, SpectraError> {
        let n = T::from_u32(n_upper).unwrap();
        Self::from_parts(n_upper, gamma_ratio, x0, n * n * n, T::one(), UnitSystem::Normalized)
    }

    /// Same transition with x0 replaced.
    pub fn with_amplitude(self, x0: T) -> Self {
        Self { x0, ..self }
    }

    pub fn with_decay_rate(self, gamma_sp: T) -> Self {
        Self { gamma_sp, ..self }
    }

    /// A = 2γ_sp, the predicted Lorentzian FWHM.
    pub fn einstein_a(&self) -> T {
        T::lit(2.0) * self.gamma_sp
    }

    pub fn linewidth_ratio(&self) -> T {
        self.gamma_sp / self.omega_vib
    }

    pub fn broad_line_warning(&self) -> Option<String> {
        let ratio = self.linewidth_ratio();
        (ratio > T::lit(BROAD_LINE_RATIO)).then(|| {
            format!("γ_sp/ω_vib = {ratio:e} exceeds {BROAD_LINE_RATIO}; the Lorentzian line picture is degraded")
        })
    }

    /// Stationary points of the N_x denominator in increasing order: the two
    /// resonances ω_vib ∓ √(ω_vib² − 2γ²) (when they exist) and the minimum at
    /// ω_vib.
    pub fn stationary_points(&self) -> Vec<T> {
        let w = self.omega_vib;
        let g2 = self.gamma_sp * self.gamma_sp;
        let disc = w * w - T::lit(2.0) * g2;
        if disc > T::zero() {
            let s = disc.sqrt();
            // w − s without cancellation
            let lower = T::lit(2.0) * g2 / (w + s);
            vec![lower, w, w + s]
        } else {
            vec![w]
        }
    }

    /// Location of the fully resolved upper resonance near 2ω_vib.
    pub fn upper_resonance(&self) -> T {
        *self.stationary_points().last().unwrap()
    }
}

/// D(ω) = 1/(−ω² + ω_vib² + 2iγω).
pub fn transfer_function<T: Real>(omega: T, t: &TransitionSpec<T>) -> Complex<T> {
    let w = t.omega_vib;
    let denom = Complex::new(w * w - omega * omega, T::lit(2.0) * t.gamma_sp * omega);
    denom.inv()
}

/// |D(ω)|² from the expanded real form (ω_vib² − ω²)² + 4γ²ω².
pub fn transfer_modulus_sq<T: Real>(omega: T, t: &TransitionSpec<T>) -> T {
    let w = t.omega_vib;
    let re = w * w - omega * omega;
    let im = T::lit(2.0) * t.gamma_sp * omega;
    (re * re + im * im).recip()
}

/// ⟨δx(ω)⟩ = (Γ_x(ω)/μ)·D(ω).
pub fn position_fluctuation<T: Real>(omega: T, force: Complex<T>, t: &TransitionSpec<T>) -> Complex<T> {
    force.unscale(t.mu) * transfer_function(omega, t)
}

/// ⟨δp(ω)⟩ = iμω·⟨δx(ω)⟩.
pub fn momentum_fluctuation<T: Real>(omega: T, delta_x: Complex<T>, t: &TransitionSpec<T>) -> Complex<T> {
    Complex::new(T::zero(), t.mu * omega) * delta_x
}

/// Operator ordering of a Langevin-force correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// ⟨Γ*Γ⟩ = 2γ·n̄
    Normal,
    /// ⟨ΓΓ*⟩ = 2γ·(n̄ + 1)
    Antinormal,
}

/// Occupancy factor n̄ = ħω[½ + (e^{ħω/k_BT} − 1)⁻¹], evaluated exactly as
/// written. It carries units of energy; T = 0 leaves the zero-point term ħω/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonOccupancy<T> {
    pub omega: T,
    pub temperature: T,
    pub nbar: T,
}

impl<T: Real> PhotonOccupancy<T> {
    pub fn new(omega: T, temperature: T, constants: &PhysicalConstants<T>) -> Result<Self, SpectraError> {
        if !(temperature >= T::zero()) {
            return Err(SpectraError::NegativeTemperature);
        }
        let quantum = constants.hbar * omega;
        let thermal = if temperature == T::zero() {
            T::zero()
        } else {
            (quantum / (constants.k_b * temperature)).exp_m1().recip()
        };
        Ok(Self {
            omega,
            temperature,
            nbar: quantum * (T::lit(0.5) + thermal),
        })
    }

    /// The n̄ ≈ 0 limit used by every spectrum.
    pub fn negligible(omega: T) -> Self {
        Self {
            omega,
            temperature: T::zero(),
            nbar: T::zero(),
        }
    }
}

/// Coefficient of δ(ω − ω′) in the Langevin-force correlation.
pub fn correlation_amplitude<T: Real>(gamma_sp: T, occupancy: &PhotonOccupancy<T>, ordering: Ordering) -> T {
    let two_gamma = T::lit(2.0) * gamma_sp;
    match ordering {
        Ordering::Normal => two_gamma * occupancy.nbar,
        Ordering::Antinormal => two_gamma * (occupancy.nbar + T::one()),
    }
}

/// All five fluxes at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPoint<T> {
    pub omega: T,
    pub n_x: T,
    pub n_u: T,
    pub n_k: T,
    pub n_uk: T,
    pub n_sp: T,
}

/// Positional flux N_x(ω) from its closed form.
pub fn positional_flux_at<T: Real>(omega: T, t: &TransitionSpec<T>) -> T {
    let w = t.omega_vib;
    let g = t.gamma_sp;
    let u = omega - w;
    let v = omega - T::lit(2.0) * w;
    let denom = omega * omega * v * v + T::lit(4.0) * g * g * u * u;
    g / (T::PI() * t.mu * t.mu) / denom
}

/// Every flux at `omega`.
///
/// The x₀-independent shapes are formed first and multiplied by x₀² last, so
/// rescaling x₀ by s rescales every energy flux by exactly s² whenever s² and
/// x₀² are representable.
pub fn flux_point<T: Real>(omega: T, t: &TransitionSpec<T>) -> FluxPoint<T> {
    let n_x = positional_flux_at(omega, t);
    let u = omega - t.omega_vib;
    let w0 = t.omega0;
    let w0_sq = w0 * w0;
    let base = T::lit(0.5) * t.mu * t.mu * n_x;
    let u_shape = base * (w0_sq * w0_sq);
    let k_shape = base * w0_sq * (u * u);
    let uk_shape = base * (w0_sq * w0) * (t.omega_vib - omega);
    let sp_shape = u_shape + k_shape + uk_shape + uk_shape;
    let amp = t.x0 * t.x0;
    FluxPoint {
        omega,
        n_x,
        n_u: u_shape * amp,
        n_k: k_shape * amp,
        n_uk: uk_shape * amp,
        n_sp: sp_shape * amp,
    }
}

/// N_SP from the completed square ½μ²ω₀²x₀²(ω₀ − (ω − ω_vib))²·N_x.
pub fn spontaneous_emission_closed_form<T: Real>(omega: T, t: &TransitionSpec<T>) -> T {
    let d = t.omega0 - (omega - t.omega_vib);
    T::lit(0.5) * t.mu * t.mu * t.omega0 * t.omega0 * t.x0 * t.x0 * d * d * positional_flux_at(omega, t)
}

fn map_grid<T: Real, F>(grid: &FrequencyGrid<T>, f: F) -> Vec<T>
where
    F: Fn(T) -> T + Sync + Send,
{
    grid.omegas().par_iter().map(|&w| f(w)).collect()
}

pub fn positional_noise_flux<T: Real>(grid: &FrequencyGrid<T>, t: &TransitionSpec<T>) -> Vec<T> {
    map_grid(grid, |w| positional_flux_at(w, t))
}

pub fn potential_noise_flux<T: Real>(grid: &FrequencyGrid<T>, t: &TransitionSpec<T>) -> Vec<T> {
    map_grid(grid, |w| flux_point(w, t).n_u)
}

pub fn kinetic_noise_flux<T: Real>(grid: &FrequencyGrid<T>, t: &TransitionSpec<T>) -> Vec<T> {
    map_grid(grid, |w| flux_point(w, t).n_k)
}

/// N_UK = N_KU; negative above ω_vib.
pub fn interchange_noise_flux<T: Real>(grid: &FrequencyGrid<T>, t: &TransitionSpec<T>) -> Vec<T> {
    map_grid(grid, |w| flux_point(w, t).n_uk)
}

pub fn spontaneous_emission_flux<T: Real>(grid: &FrequencyGrid<T>, t: &TransitionSpec<T>) -> Vec<T> {
    map_grid(grid, |w| flux_point(w, t).n_sp)
}

/// The five flux spectra on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectra<T> {
    pub grid: FrequencyGrid<T>,
    pub n_x: Vec<T>,
    pub n_u: Vec<T>,
    pub n_k: Vec<T>,
    pub n_uk: Vec<T>,
    pub n_sp: Vec<T>,
}

impl<T: Real> NoiseSpectra<T> {
    /// Evaluates every flux on `grid`, data-parallel over grid points.
    pub fn compute(grid: FrequencyGrid<T>, t: &TransitionSpec<T>) -> Self {
        let points: Vec<FluxPoint<T>> = grid.omegas().par_iter().map(|&w| flux_point(w, t)).collect();
        let n = points.len();
        let mut out = Self {
            grid,
            n_x: Vec::with_capacity(n),
            n_u: Vec::with_capacity(n),
            n_k: Vec::with_capacity(n),
            n_uk: Vec::with_capacity(n),
            n_sp: Vec::with_capacity(n),
        };
        for p in points {
            out.n_x.push(p.n_x);
            out.n_u.push(p.n_u);
            out.n_k.push(p.n_k);
            out.n_uk.push(p.n_uk);
            out.n_sp.push(p.n_sp);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn point(&self, i: usize) -> FluxPoint<T> {
        FluxPoint {
            omega: self.grid.omegas()[i],
            n_x: self.n_x[i],
            n_u: self.n_u[i],
            n_k: self.n_k[i],
            n_uk: self.n_uk[i],
            n_sp: self.n_sp[i],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = FluxPoint<T>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Largest |N_SP − (N_U + N_K + 2N_UK)|/N_SP over the grid.
    pub fn max_conservation_error(&self) -> T {
        self.points()
            .filter(|p| p.n_sp != T::zero())
            .map(|p| ((p.n_sp - (p.n_u + p.n_k + p.n_uk + p.n_uk)) / p.n_sp).abs())
            .fold(T::zero(), T::max)
    }

    /// Index range of grid points strictly above ω_vib, where the fully
    /// resolved emission line lives.
    pub fn upper_branch(&self, t: &TransitionSpec<T>) -> std::ops::Range<usize> {
        let start = self.grid.omegas().partition_point(|&w| w <= t.omega_vib);
        start..self.len()
    }
}
