use serde::{Deserialize, Serialize};

use super::{SpectraError, TransitionSpec, UnitSystem};
use crate::real::Real;

/// Samples per refinement window.
pub const REFINE_POINTS: usize = 10_000;
/// Half-width of each refinement window, in units of γ_sp.
pub const REFINE_HALF_WIDTH: f64 = 50.0;

/// Strictly increasing sampling of angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid<T> {
    omegas: Vec<T>,
    unit_system: UnitSystem,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(omegas: Vec<T>, unit_system: UnitSystem) -> Result<Self, SpectraError> {
        if omegas.is_empty() {
            return Err(SpectraError::InvalidGrid("grid is empty".into()));
        }
        if let Some(i) = omegas.iter().position(|w| !w.is_finite()) {
            return Err(SpectraError::InvalidGrid(format!("non-finite frequency at index {i}")));
        }
        if let Some(i) = omegas.windows(2).position(|w| w[1] <= w[0]) {
            return Err(SpectraError::InvalidGrid(format!(
                "frequencies not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { omegas, unit_system })
    }

    /// `points` evenly spaced samples with both end points included.
    pub fn uniform(min: T, max: T, points: usize, unit_system: UnitSystem) -> Result<Self, SpectraError> {
        if points < 2 || !(max > min) {
            return Err(SpectraError::InvalidGrid(format!(
                "uniform grid needs max > min and at least 2 points (got {points})"
            )));
        }
        Self::new(linspace(min, max, points), unit_system)
    }

    /// Uniform base grid over `[min, max]` merged with dense windows of
    /// [`REFINE_POINTS`] samples spanning ±[`REFINE_HALF_WIDTH`]·γ_sp around
    /// each stationary point of the positional-flux denominator. ω_vib itself
    /// is always a grid point when it lies in range.
    pub fn refined(
        min: T,
        max: T,
        points: usize,
        transition: &TransitionSpec<T>,
        refine_points: usize,
    ) -> Result<Self, SpectraError> {
        let base = Self::uniform(min, max, points, transition.units)?;
        let mut omegas = base.omegas;
        let half = T::lit(REFINE_HALF_WIDTH) * transition.gamma_sp;
        for centre in transition.stationary_points() {
            let lo = (centre - half).max(min);
            let hi = (centre + half).min(max);
            if hi > lo && refine_points >= 2 {
                omegas.extend(linspace(lo, hi, refine_points));
            }
        }
        let w = transition.omega_vib;
        if w >= min && w <= max {
            omegas.push(w);
        }
        omegas.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
        omegas.dedup();
        Self::new(omegas, transition.units)
    }

    /// Default window `[0, 3ω_vib]` with refinement around the resonances.
    pub fn auto(transition: &TransitionSpec<T>, points: usize) -> Result<Self, SpectraError> {
        Self::refined(
            T::zero(),
            T::lit(3.0) * transition.omega_vib,
            points,
            transition,
            REFINE_POINTS,
        )
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.unit_system
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn into_omegas(self) -> Vec<T> {
        self.omegas
    }
}

pub(crate) fn linspace<T: Real>(min: T, max: T, points: usize) -> Vec<T> {
    let last = T::from_usize(points - 1).unwrap();
    let span = max - min;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                max
            } else {
                min + span * T::from_usize(i).unwrap() / last
            }
        })
        .collect()
}
