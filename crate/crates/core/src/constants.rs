//! Physical constants and the built-in isotope table.
//!
//! Values are CODATA 2018 (Tiesinga et al., Rev. Mod. Phys. 93, 025010, 2021),
//! SI units throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atom::AtomError;
use crate::real::Real;

/// Reduced Planck constant ħ (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Fine-structure constant α.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
/// Boltzmann constant (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Proton mass (kg).
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
/// Deuteron mass (kg).
pub const DEUTERON_MASS: f64 = 3.343_583_772_4e-27;
/// Alpha particle (⁴He nucleus) mass (kg).
pub const ALPHA_PARTICLE_MASS: f64 = 6.644_657_335_7e-27;

/// The set of constants every formula in the crate draws on.
///
/// Overridable so reproducibility tests can pin alternative tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub c: T,
    pub alpha: T,
    pub k_b: T,
    pub m_e: T,
    pub m_p: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn codata2018() -> Self {
        Self {
            hbar: T::lit(HBAR),
            c: T::lit(SPEED_OF_LIGHT),
            alpha: T::lit(FINE_STRUCTURE),
            k_b: T::lit(BOLTZMANN),
            m_e: T::lit(ELECTRON_MASS),
            m_p: T::lit(PROTON_MASS),
        }
    }

    /// Checks that every constant is finite and strictly positive.
    pub fn validate(&self) -> Result<(), AtomError> {
        let fields = [
            ("hbar", self.hbar),
            ("c", self.c),
            ("alpha", self.alpha),
            ("k_b", self.k_b),
            ("m_e", self.m_e),
            ("m_p", self.m_p),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > T::zero()) {
                return Err(AtomError::InvalidConstant(name));
            }
        }
        Ok(())
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Nuclei with a built-in mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Isotope {
    #[serde(rename = "H-1")]
    Hydrogen1,
    #[serde(rename = "D-2")]
    Deuterium2,
    #[serde(rename = "He-4")]
    Helium4,
}

impl Isotope {
    pub const ALL: [Isotope; 3] = [Isotope::Hydrogen1, Isotope::Deuterium2, Isotope::Helium4];

    pub fn atomic_number(self) -> u32 {
        match self {
            Isotope::Hydrogen1 | Isotope::Deuterium2 => 1,
            Isotope::Helium4 => 2,
        }
    }

    /// Nuclear (not atomic) mass in kg.
    pub fn nuclear_mass(self) -> f64 {
        match self {
            Isotope::Hydrogen1 => PROTON_MASS,
            Isotope::Deuterium2 => DEUTERON_MASS,
            Isotope::Helium4 => ALPHA_PARTICLE_MASS,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Isotope::Hydrogen1 => "H-1",
            Isotope::Deuterium2 => "D-2",
            Isotope::Helium4 => "He-4",
        }
    }
}

impl fmt::Display for Isotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Isotope {
    type Err = AtomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Isotope::ALL
            .into_iter()
            .find(|iso| iso.symbol().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| AtomError::UnknownIsotope(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_structure_matches_codata() {
        let c = PhysicalConstants::<f64>::codata2018();
        assert!((c.alpha - 7.297e-3).abs() / 7.297e-3 < 1e-4);
        assert!((c.alpha - 1.0 / 137.035_999_084).abs() / c.alpha < 1e-9);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_non_positive_constant() {
        let mut c = PhysicalConstants::<f64>::codata2018();
        c.hbar = 0.0;
        assert!(matches!(c.validate(), Err(AtomError::InvalidConstant("hbar"))));
        c.hbar = f64::NAN;
        assert!(c.validate().is_err());
    }

    #[test]
    fn isotope_lookup() {
        assert_eq!("H-1".parse::<Isotope>().unwrap(), Isotope::Hydrogen1);
        assert_eq!("he-4".parse::<Isotope>().unwrap(), Isotope::Helium4);
        assert_eq!(Isotope::Helium4.atomic_number(), 2);
        assert!("Li-7".parse::<Isotope>().is_err());
        let json = serde_json::to_string(&Isotope::Deuterium2).unwrap();
        assert_eq!(json, "\"D-2\"");
    }
}
