use serde::{Deserialize, Serialize};

use super::psd::PsdEstimate;
use super::OracleError;
use crate::real::Real;
use crate::spectra::{positional_flux_at, TransitionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions<T> {
    /// Comparison band as multiples of ω_vib.
    pub band: (T, T),
    /// Pass threshold on the RMS relative deviation.
    pub tolerance: T,
    /// Number of equal-width sub-bands reported separately.
    pub sub_bands: usize,
}

impl<T: Real> Default for ValidationOptions<T> {
    fn default() -> Self {
        Self {
            band: (T::lit(0.2), T::lit(2.0)),
            tolerance: T::lit(0.05),
            sub_bands: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandDeviation<T> {
    pub omega_lo: T,
    pub omega_hi: T,
    pub bins: usize,
    pub mean_relative_deviation: T,
    pub rms_relative_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport<T> {
    pub omega_lo: T,
    pub omega_hi: T,
    pub bins: usize,
    /// sqrt(mean(((s_xx − analytic)/analytic)²)) over the band.
    pub rms_relative_deviation: T,
    pub max_relative_deviation: T,
    /// max(s_xx)/max(analytic) within the band.
    pub peak_height_ratio: T,
    pub tolerance: T,
    pub passed: bool,
    pub bands: Vec<BandDeviation<T>>,
}

/// Compares an estimated position spectrum with the transfer-function density
/// `(γ/πμ²)|D(ω)|²`, evaluated as the positional flux `N_x(ω + ω_vib)`.
pub fn validate_against_analytic<T: Real>(
    psd: &PsdEstimate<T>,
    t: &TransitionSpec<T>,
    opts: &ValidationOptions<T>,
) -> Result<ValidationReport<T>, OracleError> {
    let two_sided = match psd.sidedness {
        super::Sidedness::TwoSided => psd.clone(),
        super::Sidedness::OneSided => {
            return Err(OracleError::InvalidConfig(
                "validation expects a two-sided estimate".into(),
            ))
        }
    };
    let lo = opts.band.0 * t.omega_vib;
    let hi = opts.band.1 * t.omega_vib;
    let rows: Vec<(T, T, T)> = two_sided
        .grid
        .omegas()
        .iter()
        .zip(&two_sided.s_xx)
        .filter(|(&w, _)| w >= lo && w <= hi)
        .map(|(&w, &s)| {
            let analytic = positional_flux_at(w + t.omega_vib, t);
            (w, s, analytic)
        })
        .collect();
    if rows.is_empty() || !(hi > lo) {
        return Err(OracleError::InsufficientData(format!(
            "no spectral bins in [{:e}, {:e}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }

    let deviation = |&(_, s, a): &(T, T, T)| (s - a) / a;
    let rms = |rows: &[(T, T, T)]| {
        let ss = rows.iter().map(deviation).fold(T::zero(), |acc, d| acc + d * d);
        (ss / T::from_usize(rows.len()).unwrap()).sqrt()
    };
    let max_dev = rows.iter().map(|r| deviation(r).abs()).fold(T::zero(), T::max);
    let peak_est = rows.iter().map(|r| r.1).fold(T::neg_infinity(), T::max);
    let peak_ana = rows.iter().map(|r| r.2).fold(T::neg_infinity(), T::max);

    let sub = opts.sub_bands.max(1);
    let width = (hi - lo) / T::from_usize(sub).unwrap();
    let bands = (0..sub)
        .map(|b| {
            let b_lo = lo + width * T::from_usize(b).unwrap();
            let b_hi = if b + 1 == sub { hi } else { b_lo + width };
            let members: Vec<(T, T, T)> = rows
                .iter()
                .copied()
                .filter(|&(w, _, _)| w >= b_lo && (w < b_hi || (b + 1 == sub && w <= b_hi)))
                .collect();
            let n = members.len();
            let (mean, rms_dev) = if n == 0 {
                (T::zero(), T::zero())
            } else {
                let sum = members.iter().map(deviation).fold(T::zero(), |a, d| a + d);
                (sum / T::from_usize(n).unwrap(), rms(&members))
            };
            BandDeviation {
                omega_lo: b_lo,
                omega_hi: b_hi,
                bins: n,
                mean_relative_deviation: mean,
                rms_relative_deviation: rms_dev,
            }
        })
        .collect();

    let rms_all = rms(&rows);
    Ok(ValidationReport {
        omega_lo: lo,
        omega_hi: hi,
        bins: rows.len(),
        rms_relative_deviation: rms_all,
        max_relative_deviation: max_dev,
        peak_height_ratio: peak_est / peak_ana,
        tolerance: opts.tolerance,
        passed: rms_all <= opts.tolerance,
        bands,
    })
}
