//! Peak location and full width at half maximum of a sampled line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;
use crate::spectra::{NoiseSpectra, TransitionSpec};

/// Minimum number of contiguous samples above half height.
pub const MIN_SAMPLES_ABOVE_HALF: usize = 5;
/// The residual window spans centre ± this many FWHMs.
pub const RESIDUAL_WINDOW_FWHM: f64 = 5.0;

const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("NoPeak: {0}")]
    NoPeak(String),
    #[error("InsufficientResolution: only {0} samples above half height (need {MIN_SAMPLES_ABOVE_HALF})")]
    InsufficientResolution(usize),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl FitError {
    /// Stable variant name for reports.
    pub fn name(&self) -> &'static str {
        match self {
            FitError::NoPeak(_) => "NoPeak",
            FitError::InsufficientResolution(_) => "InsufficientResolution",
            FitError::InvalidInput(_) => "InvalidInput",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit<T> {
    pub peak_omega: T,
    pub peak_height: T,
    pub fwhm: T,
    /// Relative RMS deviation from the best-fit Lorentzian over centre ± 5·FWHM.
    pub residual: T,
}

/// Locates the maximum of `values` and measures its width.
///
/// The peak position and height come from a parabola through the logarithms
/// of the three samples around the maximum; the FWHM from linear
/// interpolation of the two half-height crossings.
pub fn fit_lorentzian<T: Real>(omegas: &[T], values: &[T]) -> Result<LorentzianFit<T>, FitError> {
    if omegas.len() != values.len() {
        return Err(FitError::InvalidInput(format!(
            "{} frequencies but {} values",
            omegas.len(),
            values.len()
        )));
    }
    if values.len() < 3 {
        return Err(FitError::NoPeak("fewer than three samples".into()));
    }
    if values.iter().chain(omegas).any(|v| !v.is_finite()) {
        return Err(FitError::InvalidInput("non-finite sample".into()));
    }

    let imax = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    if imax == 0 || imax + 1 == values.len() {
        return Err(FitError::NoPeak("maximum lies on the grid edge".into()));
    }
    let vmax = values[imax];
    if !(vmax > T::zero()) || !(vmax > values[imax - 1] || vmax > values[imax + 1]) {
        return Err(FitError::NoPeak("no isolated positive maximum".into()));
    }

    let (peak_omega, peak_height) = log_parabola_vertex(omegas, values, imax);
    let half = peak_height * T::lit(0.5);

    let mut left = imax;
    while values[left] > half {
        if left == 0 {
            return Err(FitError::NoPeak("left half-height crossing outside grid".into()));
        }
        left -= 1;
    }
    let mut right = imax;
    while values[right] > half {
        if right + 1 == values.len() {
            return Err(FitError::NoPeak("right half-height crossing outside grid".into()));
        }
        right += 1;
    }
    let above = right - left - 1;
    if above < MIN_SAMPLES_ABOVE_HALF {
        return Err(FitError::InsufficientResolution(above));
    }

    let lo = crossing(omegas[left], values[left], omegas[left + 1], values[left + 1], half);
    let hi = crossing(omegas[right - 1], values[right - 1], omegas[right], values[right], half);
    let fwhm = hi - lo;

    let residual = residual_against_best_fit(omegas, values, peak_omega, peak_height, fwhm);
    Ok(LorentzianFit {
        peak_omega,
        peak_height,
        fwhm,
        residual,
    })
}

/// Fits the emission line N_SP on the upper resonance (ω > ω_vib).
///
/// The companion resonance near ω ≈ 0 is truncated by the ω ≥ 0 grid edge and
/// cannot be measured.
pub fn fit_emission_line<T: Real>(
    spectra: &NoiseSpectra<T>,
    t: &TransitionSpec<T>,
) -> Result<LorentzianFit<T>, FitError> {
    let range = spectra.upper_branch(t);
    fit_lorentzian(&spectra.grid.omegas()[range.clone()], &spectra.n_sp[range])
}

fn crossing<T: Real>(x0: T, y0: T, x1: T, y1: T, level: T) -> T {
    if y1 == y0 {
        return (x0 + x1) * T::lit(0.5);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

fn log_parabola_vertex<T: Real>(omegas: &[T], values: &[T], i: usize) -> (T, T) {
    let (x0, x1, x2) = (omegas[i - 1], omegas[i], omegas[i + 1]);
    let (v0, v1, v2) = (values[i - 1], values[i], values[i + 1]);
    if !(v0 > T::zero() && v2 > T::zero()) {
        return (x1, v1);
    }
    let (y0, y1, y2) = (v0.ln(), v1.ln(), v2.ln());
    // divided differences in coordinates relative to x1
    let h0 = x0 - x1;
    let h2 = x2 - x1;
    let d0 = (y0 - y1) / h0;
    let d2 = (y2 - y1) / h2;
    let a = (d2 - d0) / (h2 - h0);
    if !(a < T::zero()) {
        return (x1, v1);
    }
    let b = d0 - a * h0;
    let shift = (-b / (T::lit(2.0) * a)).max(h0).min(h2);
    let peak = y1 + b * shift + a * shift * shift;
    (x1 + shift, peak.exp())
}

/// Relative RMS of `values` against a Levenberg-Marquardt fit of
/// `A/((ω − c)² + h²)` over `centre ± 5·fwhm`.
fn residual_against_best_fit<T: Real>(omegas: &[T], values: &[T], centre: T, height: T, fwhm: T) -> T {
    let half_width = fwhm * T::lit(0.5);
    let reach = T::lit(RESIDUAL_WINDOW_FWHM) * fwhm;
    let (xs, ys): (Vec<T>, Vec<T>) = omegas
        .iter()
        .zip(values)
        .filter(|(&w, _)| (w - centre).abs() <= reach)
        .map(|(&w, &v)| ((w - centre) / half_width, v / height))
        .unzip();
    let params = levenberg_marquardt(&xs, &ys, [T::one(), T::zero(), T::one()]);
    let (mut num, mut den) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        let r = y - lorentz(params, x);
        num = num + r * r;
        den = den + y * y;
    }
    if den == T::zero() {
        T::zero()
    } else {
        (num / den).sqrt()
    }
}

#[inline]
fn lorentz<T: Real>([amp, centre, half]: [T; 3], x: T) -> T {
    let d = x - centre;
    amp / (d * d + half * half)
}

fn cost<T: Real>(p: [T; 3], xs: &[T], ys: &[T]) -> T {
    xs.iter().zip(ys).fold(T::zero(), |acc, (&x, &y)| {
        let r = y - lorentz(p, x);
        acc + r * r
    })
}

fn levenberg_marquardt<T: Real>(xs: &[T], ys: &[T], mut p: [T; 3]) -> [T; 3] {
    let mut lambda = T::lit(1e-3);
    let mut current = cost(p, xs, ys);
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (&x, &y) in xs.iter().zip(ys) {
            let d = x - p[1];
            let denom = d * d + p[2] * p[2];
            let f = p[0] / denom;
            let grad = [
                denom.recip(),
                T::lit(2.0) * f * d / denom,
                -T::lit(2.0) * f * p[2] / denom,
            ];
            let r = y - f;
            for i in 0..3 {
                jtr[i] = jtr[i] + grad[i] * r;
                for j in 0..3 {
                    jtj[i][j] = jtj[i][j] + grad[i] * grad[j];
                }
            }
        }
        let mut improved = false;
        while lambda < T::lit(1e12) {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = row[i] * (T::one() + lambda);
            }
            let Some(step) = solve3(a, jtr) else {
                lambda = lambda * T::lit(10.0);
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = cost(trial, xs, ys);
            if trial_cost.is_finite() && trial_cost <= current {
                let gain = current - trial_cost;
                p = trial;
                lambda = (lambda * T::lit(0.1)).max(T::lit(1e-12));
                improved = gain > current * T::epsilon();
                current = trial_cost;
                break;
            }
            lambda = lambda * T::lit(10.0);
        }
        if !improved {
            break;
        }
    }
    p
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col] == T::zero() || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] = a[row][k] - factor * a[col][k];
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc = acc - a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
