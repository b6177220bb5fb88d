use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{OracleError, WelchConfig, Window};
use crate::real::Real;
use crate::spectra::{FrequencyGrid, UnitSystem};

/// How `s_xx` relates to the full frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    /// Two-sided density S(ω) = S(−ω), stored for ω ≥ 0 only.
    TwoSided,
    /// Density folded onto ω ≥ 0 (interior bins doubled).
    OneSided,
}

/// Periodic Hann window `½ − ½cos(2πi/n)`.
pub fn hann_window<T: Real>(n: usize) -> Vec<T> {
    let len = T::from_usize(n).unwrap();
    (0..n)
        .map(|i| {
            let phase = T::TAU() * T::from_usize(i).unwrap() / len;
            T::lit(0.5) - T::lit(0.5) * phase.cos()
        })
        .collect()
}

/// Welch averaging of windowed, overlapping periodograms.
///
/// Each segment contributes `dt/(2π Σw²)·|X_k|²`, a two-sided density per
/// rad/s whose sum over all `n` bins times `Δω = 2π/(n·dt)` equals the
/// window-weighted mean square of the segment.
#[derive(Clone)]
pub struct WelchEstimator<T: Real> {
    segment_length: usize,
    hop: usize,
    window: Vec<T>,
    scale: T,
    d_omega: T,
    detrend: bool,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for WelchEstimator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WelchEstimator")
            .field("segment_length", &self.segment_length)
            .field("hop", &self.hop)
            .field("d_omega", &self.d_omega)
            .finish()
    }
}

impl<T: Real> WelchEstimator<T> {
    pub fn new(cfg: &WelchConfig<T>, dt: T) -> Result<Self, OracleError> {
        let n = cfg.segment_length;
        if n < 2 {
            return Err(OracleError::InvalidConfig("segment_length must be ≥ 2".into()));
        }
        if !(cfg.overlap_fraction >= T::zero() && cfg.overlap_fraction < T::one()) {
            return Err(OracleError::InvalidConfig("overlap_fraction must lie in [0, 1)".into()));
        }
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(OracleError::InvalidConfig("dt must be positive".into()));
        }
        let window = match cfg.window {
            Window::Hann => hann_window::<T>(n),
        };
        let power = window.iter().fold(T::zero(), |a, &w| a + w * w);
        let len = T::from_usize(n).unwrap();
        let hop = (len * (T::one() - cfg.overlap_fraction))
            .round()
            .to_usize()
            .unwrap_or(n)
            .clamp(1, n);
        Ok(Self {
            segment_length: n,
            hop,
            window,
            scale: dt / (T::TAU() * power),
            d_omega: T::TAU() / (len * dt),
            detrend: cfg.detrend,
            fft: FftPlanner::new().plan_fft_forward(n),
        })
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Bins k = 0..=n/2.
    pub fn bins(&self) -> usize {
        self.segment_length / 2 + 1
    }

    pub fn d_omega(&self) -> T {
        self.d_omega
    }

    pub fn omegas(&self) -> Vec<T> {
        (0..self.bins())
            .map(|k| T::from_usize(k).unwrap() * self.d_omega)
            .collect()
    }

    pub fn segment_count(&self, samples: usize) -> usize {
        if samples < self.segment_length {
            0
        } else {
            (samples - self.segment_length) / self.hop + 1
        }
    }

    /// One periodogram per segment, in segment order.
    pub fn segment_periodograms(&self, x: &[T]) -> Result<Vec<Vec<T>>, OracleError> {
        let count = self.segment_count(x.len());
        if count == 0 {
            return Err(OracleError::InsufficientData(format!(
                "{} samples is shorter than one segment of {}",
                x.len(),
                self.segment_length
            )));
        }
        let mut buffer = vec![Complex::new(T::zero(), T::zero()); self.segment_length];
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); self.fft.get_inplace_scratch_len()];
        let out = (0..count)
            .map(|s| {
                let seg = &x[s * self.hop..s * self.hop + self.segment_length];
                self.transform(seg, &mut buffer, &mut scratch);
                buffer[..self.bins()]
                    .iter()
                    .map(|c| c.norm_sqr() * self.scale)
                    .collect()
            })
            .collect();
        Ok(out)
    }

    /// Segment-averaged periodogram of `x`.
    pub fn periodogram(&self, x: &[T]) -> Result<Vec<T>, OracleError> {
        let segments = self.segment_periodograms(x)?;
        let count = T::from_usize(segments.len()).unwrap();
        let mut acc = vec![T::zero(); self.bins()];
        for seg in &segments {
            for (a, &p) in acc.iter_mut().zip(seg) {
                *a = *a + p;
            }
        }
        acc.iter_mut().for_each(|a| *a = *a / count);
        Ok(acc)
    }

    fn transform(&self, seg: &[T], buffer: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        let mean = if self.detrend {
            seg.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize(seg.len()).unwrap()
        } else {
            T::zero()
        };
        for ((b, &s), &w) in buffer.iter_mut().zip(seg).zip(&self.window) {
            *b = Complex::new((s - mean) * w, T::zero());
        }
        self.fft.process_with_scratch(buffer, scratch);
    }
}

/// Averaged spectral density of δx with per-bin standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate<T> {
    pub grid: FrequencyGrid<T>,
    pub sidedness: Sidedness,
    pub s_xx: Vec<T>,
    pub stderr: Vec<T>,
    pub segment_length: usize,
    /// Independent averages the standard error is taken over.
    pub averages: usize,
    pub segments_per_average: usize,
}

impl<T: Real> PsdEstimate<T> {
    /// Mean and standard error over equally weighted periodograms.
    pub(crate) fn from_averages(
        welch: &WelchEstimator<T>,
        periodograms: &[Vec<T>],
        segments_per_average: usize,
    ) -> Self {
        let m = periodograms.len();
        let count = T::from_usize(m).unwrap();
        let bins = welch.bins();
        let mut mean = vec![T::zero(); bins];
        for p in periodograms {
            for (a, &v) in mean.iter_mut().zip(p) {
                *a = *a + v;
            }
        }
        mean.iter_mut().for_each(|a| *a = *a / count);
        let stderr = if m > 1 {
            let mut ss = vec![T::zero(); bins];
            for p in periodograms {
                for ((a, &v), &mu) in ss.iter_mut().zip(p).zip(&mean) {
                    *a = *a + (v - mu) * (v - mu);
                }
            }
            ss.into_iter()
                .map(|s| (s / (count - T::one()) / count).sqrt())
                .collect()
        } else {
            vec![T::zero(); bins]
        };
        Self {
            grid: FrequencyGrid::new(welch.omegas(), UnitSystem::Normalized).expect("bin frequencies increase"),
            sidedness: Sidedness::TwoSided,
            s_xx: mean,
            stderr,
            segment_length: welch.segment_length(),
            averages: m,
            segments_per_average,
        }
    }

    pub fn d_omega(&self) -> T {
        if self.grid.len() > 1 {
            self.grid.omegas()[1] - self.grid.omegas()[0]
        } else {
            T::zero()
        }
    }

    fn is_nyquist(&self, k: usize) -> bool {
        self.segment_length.is_multiple_of(2) && k == self.segment_length / 2
    }

    /// ∫ s_xx dω over the whole frequency axis.
    pub fn total_power(&self) -> T {
        let sum = self.s_xx.iter().enumerate().fold(T::zero(), |acc, (k, &s)| {
            let weight = match self.sidedness {
                Sidedness::TwoSided if k != 0 && !self.is_nyquist(k) => T::lit(2.0),
                _ => T::one(),
            };
            acc + weight * s
        });
        sum * self.d_omega()
    }

    /// Same estimate folded onto ω ≥ 0.
    pub fn folded(&self) -> Self {
        if self.sidedness == Sidedness::OneSided {
            return self.clone();
        }
        let factor = |k: usize| {
            if k == 0 || self.is_nyquist(k) {
                T::one()
            } else {
                T::lit(2.0)
            }
        };
        Self {
            sidedness: Sidedness::OneSided,
            s_xx: self.s_xx.iter().enumerate().map(|(k, &s)| s * factor(k)).collect(),
            stderr: self.stderr.iter().enumerate().map(|(k, &s)| s * factor(k)).collect(),
            ..self.clone()
        }
    }
}

/// Welch estimate over several trajectories (each an independent average);
/// a single trajectory is averaged over its segments instead.
pub fn estimate_psd<T: Real>(
    trajectories: &[&[T]],
    welch_cfg: &WelchConfig<T>,
    dt: T,
) -> Result<PsdEstimate<T>, OracleError> {
    let welch = WelchEstimator::new(welch_cfg, dt)?;
    match trajectories {
        [] => Err(OracleError::InsufficientData("no trajectories".into())),
        [single] => {
            let segments = welch.segment_periodograms(single)?;
            Ok(PsdEstimate::from_averages(&welch, &segments, 1))
        }
        many => {
            let per = many
                .iter()
                .map(|x| welch.periodogram(x))
                .collect::<Result<Vec<_>, _>>()?;
            let segments = welch.segment_count(many.iter().map(|x| x.len()).min().unwrap());
            Ok(PsdEstimate::from_averages(&welch, &per, segments))
        }
    }
}
