//! Vibrational Langevin model of hydrogen-like atoms.
//!
//! * [`atom`]: reduced mass, the energy series about `n = 1` and the
//!   vibrational frequency ladder `ω_vib = ω₀/n³`.
//! * [`spectra`]: the oscillator transfer function and the positional,
//!   potential, kinetic, interchange and spontaneous-emission noise fluxes.
//! * [`fit`]: Lorentzian peak and FWHM extraction.
//! * [`oracle`]: stochastic time-domain integration of the Langevin equation
//!   and Welch spectral estimation, used to check the analytic spectra.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

// NaN must fail validation, so negated comparisons are deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atom;
pub mod constants;
pub mod fit;
pub mod oracle;
pub mod real;
pub mod spectra;

pub use atom::{
    energy_closed_form, energy_series_partial_sum, fundamental_frequency, second_order_vibrational_frequency,
    vibrational_frequency, AtomError, AtomSpec, SecondOrderFrequency, SeriesSum, SeriesTruncation, VibrationalLadder,
};
pub use constants::{Isotope, PhysicalConstants};
pub use fit::{fit_emission_line, fit_lorentzian, FitError, LorentzianFit};
pub use oracle::{
    estimate_psd, integrate_langevin, simulate, validate_against_analytic, Integrator, OracleError, PsdEstimate,
    SimConfig, SimulationOutcome, Trajectory, ValidationOptions, ValidationReport, WelchConfig,
};
pub use real::Real;
pub use spectra::{
    correlation_amplitude, flux_point, interchange_noise_flux, kinetic_noise_flux, momentum_fluctuation,
    positional_noise_flux, potential_noise_flux, spontaneous_emission_closed_form, spontaneous_emission_flux,
    transfer_function, FluxPoint, FrequencyGrid, NoiseSpectra, Ordering, PhotonOccupancy, SpectraError, TransitionSpec,
    UnitSystem,
};

pub type PhysicalConstants64 = PhysicalConstants<f64>;
pub type AtomSpec64 = AtomSpec<f64>;
pub type TransitionSpec64 = TransitionSpec<f64>;
pub type FrequencyGrid64 = FrequencyGrid<f64>;
pub type NoiseSpectra64 = NoiseSpectra<f64>;
pub type LorentzianFit64 = LorentzianFit<f64>;
pub type SimConfig64 = SimConfig<f64>;
pub type PsdEstimate64 = PsdEstimate<f64>;
pub type ValidationReport64 = ValidationReport<f64>;

pub type TransitionSpec32 = TransitionSpec<f32>;
pub type NoiseSpectra32 = NoiseSpectra<f32>;
pub type SimConfig32 = SimConfig<f32>;
