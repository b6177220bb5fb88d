//! Hydrogen-like atom: reduced mass, the energy power series about `n = 1`
//! and the ladder of vibrational frequencies that follows from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{Isotope, PhysicalConstants};
use crate::real::Real;

/// Ratio |last term / running sum| below which a partial sum is reported as
/// converged.
pub const SERIES_CONVERGENCE_RATIO: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomError {
    #[error("atomic number must be ≥ 1")]
    InvalidAtomicNumber,
    #[error("nuclear mass must be finite and positive")]
    InvalidNuclearMass,
    #[error("physical constant `{0}` must be finite and positive")]
    InvalidConstant(&'static str),
    #[error("level number must be ≥ 1, got {0}")]
    InvalidLevel(String),
    #[error("unknown isotope `{0}` (known: H-1, D-2, He-4)")]
    UnknownIsotope(String),
}

/// Physical identity of a one-electron atom or ion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec<T> {
    pub z: u32,
    pub nuclear_mass: T,
    pub reduced_mass: T,
}

impl<T: Real> AtomSpec<T> {
    pub fn new(z: u32, nuclear_mass: T, constants: &PhysicalConstants<T>) -> Result<Self, AtomError> {
        if z == 0 {
            return Err(AtomError::InvalidAtomicNumber);
        }
        if !(nuclear_mass.is_finite() && nuclear_mass > T::zero()) {
            return Err(AtomError::InvalidNuclearMass);
        }
        constants.validate()?;
        let m_e = constants.m_e;
        Ok(Self {
            z,
            nuclear_mass,
            reduced_mass: m_e * nuclear_mass / (m_e + nuclear_mass),
        })
    }

    pub fn from_isotope(isotope: Isotope, constants: &PhysicalConstants<T>) -> Result<Self, AtomError> {
        Self::new(isotope.atomic_number(), T::lit(isotope.nuclear_mass()), constants)
    }

    /// ¹H with the proton mass from `constants`.
    pub fn hydrogen(constants: &PhysicalConstants<T>) -> Result<Self, AtomError> {
        Self::new(1, constants.m_p, constants)
    }

    /// Same atom with its reduced mass replaced; used to probe the `μ` scaling
    /// of the frequencies independently of any nucleus.
    pub fn with_reduced_mass(self, reduced_mass: T) -> Self {
        Self { reduced_mass, ..self }
    }

    /// ½μc²(Zα)², the magnitude of the ground-state energy.
    pub fn energy_scale(&self, constants: &PhysicalConstants<T>) -> T {
        let za = T::from_u32(self.z).unwrap() * constants.alpha;
        T::lit(0.5) * self.reduced_mass * constants.c * constants.c * za * za
    }
}

/// ω₀ = μc²(Zα)²/ħ.
pub fn fundamental_frequency<T: Real>(atom: &AtomSpec<T>, constants: &PhysicalConstants<T>) -> T {
    let za = T::from_u32(atom.z).unwrap() * constants.alpha;
    atom.reduced_mass * constants.c * constants.c * za * za / constants.hbar
}

/// ω_vib(n) = ω₀/n³.
pub fn vibrational_frequency<T: Real>(
    atom: &AtomSpec<T>,
    constants: &PhysicalConstants<T>,
    n: u32,
) -> Result<T, AtomError> {
    VibrationalLadder::new(atom, constants).omega_vib(n)
}

/// The vibrational frequencies of one atom, all derived from ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VibrationalLadder<T> {
    pub omega0: T,
    /// Phase term 3ω₀ of the second-order equation of motion. Reported, never applied.
    pub beta2: T,
}

impl<T: Real> VibrationalLadder<T> {
    pub fn new(atom: &AtomSpec<T>, constants: &PhysicalConstants<T>) -> Self {
        Self::from_omega0(fundamental_frequency(atom, constants))
    }

    pub fn from_omega0(omega0: T) -> Self {
        Self {
            omega0,
            beta2: T::lit(3.0) * omega0,
        }
    }

    pub fn omega_vib(&self, n: u32) -> Result<T, AtomError> {
        if n == 0 {
            return Err(AtomError::InvalidLevel(n.to_string()));
        }
        let n = T::from_u32(n).unwrap();
        Ok(self.omega0 / (n * n * n))
    }

    pub fn second_order(&self, n: T) -> SecondOrderFrequency<T> {
        second_order_vibrational_frequency(self.omega0, n)
    }
}

/// Output of [`second_order_vibrational_frequency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderFrequency<T> {
    pub omega: T,
    pub beta2: T,
}

/// (4 − 3n)·ω₀, the degree-1 Taylor polynomial of ω₀/n³ about n = 1.
///
/// Only meaningful close to n = 1; the value is negative for n > 4/3 and is
/// returned as-is. `n` is real so the expansion can be probed between levels.
pub fn second_order_vibrational_frequency<T: Real>(omega0: T, n: T) -> SecondOrderFrequency<T> {
    debug_assert!(n >= T::one(), "level must be ≥ 1");
    SecondOrderFrequency {
        omega: (T::lit(4.0) - T::lit(3.0) * n) * omega0,
        beta2: T::lit(3.0) * omega0,
    }
}

/// E_n = −½μc²(Zα)²/n², with real `n > 0` allowed.
pub fn energy_closed_form<T: Real>(atom: &AtomSpec<T>, constants: &PhysicalConstants<T>, n: T) -> Result<T, AtomError> {
    if !(n.is_finite() && n > T::zero()) {
        return Err(AtomError::InvalidLevel(format!("{n}")));
    }
    Ok(-atom.energy_scale(constants) / (n * n))
}

/// Truncated energy series together with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum<T> {
    pub value: T,
    pub k_max: u32,
    /// |last retained term| / |running sum|.
    pub last_term_ratio: T,
    /// |n − 1| < 1, i.e. the infinite series converges at all.
    pub within_radius: bool,
}

impl<T: Real> SeriesSum<T> {
    pub fn converged(&self) -> bool {
        self.within_radius && self.last_term_ratio <= T::lit(SERIES_CONVERGENCE_RATIO)
    }
}

/// Coefficients c_k = ½μc²(Zα)²·(−1)^{k+1}(k+1) of the energy series in
/// powers of (n − 1), for k = 0..=k_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation<T> {
    pub k_max: u32,
    pub coefficients: Vec<T>,
}

impl<T: Real> SeriesTruncation<T> {
    pub fn new(atom: &AtomSpec<T>, constants: &PhysicalConstants<T>, k_max: u32) -> Self {
        let scale = atom.energy_scale(constants);
        let coefficients = (0..=k_max).map(|k| scale * series_weight::<T>(k)).collect();
        Self { k_max, coefficients }
    }

    /// Horner evaluation at x = n − 1.
    pub fn evaluate(&self, n: T) -> T {
        let x = n - T::one();
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }
}

#[inline]
fn series_weight<T: Real>(k: u32) -> T {
    let magnitude = T::from_u32(k + 1).unwrap();
    if k.is_multiple_of(2) {
        -magnitude
    } else {
        magnitude
    }
}

/// ½μc²(Zα)²·Σ_{k=0}^{k_max} (−1)^{k+1}(k+1)(n − 1)^k.
///
/// Divergence (|n − 1| ≥ 1) is reported through [`SeriesSum`], not an error.
pub fn energy_series_partial_sum<T: Real>(
    atom: &AtomSpec<T>,
    constants: &PhysicalConstants<T>,
    n: T,
    k_max: u32,
) -> SeriesSum<T> {
    let x = n - T::one();
    let mut power = T::one();
    let mut sum = T::zero();
    let mut last = T::zero();
    for k in 0..=k_max {
        last = series_weight::<T>(k) * power;
        sum = sum + last;
        power = power * x;
    }
    let last_term_ratio = if sum == T::zero() {
        T::infinity()
    } else {
        (last / sum).abs()
    };
    SeriesSum {
        value: atom.energy_scale(constants) * sum,
        k_max,
        last_term_ratio,
        within_radius: x.abs() < T::one(),
    }
}
