use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::psd::{PsdEstimate, WelchEstimator};
use super::{OracleError, SimConfig};
use crate::real::Real;

/// Time-stepping scheme for the Langevin equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Euler-Maruyama with the velocity updated first and the position
    /// advanced with the new velocity. The update matrix has determinant
    /// exactly 1 − 2γdt, so the damping rate is reproduced to O(γdt).
    #[default]
    SemiImplicitEuler,
    /// Plain explicit Euler-Maruyama. Its amplification factor
    /// |1 + iω dt| adds an anti-damping of ω²dt/2 per unit time.
    EulerMaruyama,
    /// Exact transition matrix of the 2×2 linear drift with exactly
    /// sampled Gaussian increments.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OscillatorState<T> {
    pub x: T,
    pub v: T,
}

impl<T: Real> OscillatorState<T> {
    pub fn new(x: T, v: T) -> Self {
        Self { x, v }
    }

    /// ½(v² + ω²x²) per unit mass.
    pub fn energy(&self, omega: T) -> T {
        T::lit(0.5) * (self.v * self.v + omega * omega * self.x * self.x)
    }
}

/// Sampled (δx, δv) path at spacing `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub dt: T,
    pub x: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    fn with_capacity(dt: T, n: usize) -> Self {
        Self {
            dt,
            x: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, s: OscillatorState<T>) {
        self.x.push(s.x);
        self.v.push(s.v);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn state(&self, i: usize) -> OscillatorState<T> {
        OscillatorState::new(self.x[i], self.v[i])
    }
}

#[derive(Debug, Clone, Copy)]
enum Scheme<T> {
    Euler {
        dt: T,
        omega_sq: T,
        two_gamma: T,
        noise: T,
        semi_implicit: bool,
    },
    Exact {
        phi: [[T; 2]; 2],
        // lower Cholesky factor of the per-step noise covariance
        l11: T,
        l21: T,
        l22: T,
    },
}

/// One-step map of the oscillator for a fixed parameter set.
#[derive(Debug, Clone, Copy)]
pub struct Propagator<T> {
    scheme: Scheme<T>,
    dt: T,
}

impl<T: Real> Propagator<T> {
    pub fn new(omega_vib: T, gamma_sp: T, mu: T, dt: T, integrator: Integrator) -> Self {
        // noise intensity q = 2γ on the force, so σ² = q/μ² on the acceleration
        let sigma_sq = T::lit(2.0) * gamma_sp / (mu * mu);
        let scheme = match integrator {
            Integrator::SemiImplicitEuler | Integrator::EulerMaruyama => Scheme::Euler {
                dt,
                omega_sq: omega_vib * omega_vib,
                two_gamma: T::lit(2.0) * gamma_sp,
                noise: (sigma_sq * dt).sqrt(),
                semi_implicit: integrator == Integrator::SemiImplicitEuler,
            },
            Integrator::Exact => exact_scheme(omega_vib, gamma_sp, mu, dt),
        };
        Self { scheme, dt }
    }

    pub fn from_config(cfg: &SimConfig<T>) -> Self {
        Self::new(cfg.omega_vib, cfg.gamma_sp, cfg.mu, cfg.dt, cfg.integrator)
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Advances one step with the two standard normal draws `z`.
    #[inline]
    pub fn step_with(&self, s: OscillatorState<T>, z: [T; 2]) -> OscillatorState<T> {
        match self.scheme {
            Scheme::Euler {
                dt,
                omega_sq,
                two_gamma,
                noise,
                semi_implicit,
            } => {
                let accel = -two_gamma * s.v - omega_sq * s.x;
                let v = s.v + accel * dt + noise * z[0];
                let x = if semi_implicit { s.x + v * dt } else { s.x + s.v * dt };
                OscillatorState { x, v }
            }
            Scheme::Exact { phi, l11, l21, l22 } => OscillatorState {
                x: phi[0][0] * s.x + phi[0][1] * s.v + l11 * z[0],
                v: phi[1][0] * s.x + phi[1][1] * s.v + l21 * z[0] + l22 * z[1],
            },
        }
    }

    /// Noise-free step.
    #[inline]
    pub fn step_deterministic(&self, s: OscillatorState<T>) -> OscillatorState<T> {
        self.step_with(s, [T::zero(); 2])
    }

    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, s: OscillatorState<T>, rng: &mut R) -> OscillatorState<T>
    where
        StandardNormal: Distribution<T>,
    {
        let z0 = StandardNormal.sample(rng);
        let z1 = match self.scheme {
            Scheme::Exact { .. } => StandardNormal.sample(rng),
            Scheme::Euler { .. } => T::zero(),
        };
        self.step_with(s, [z0, z1])
    }

    /// `n` noise-free steps from `initial`; the initial state is not recorded.
    pub fn run_deterministic(&self, initial: OscillatorState<T>, n: usize) -> Trajectory<T> {
        let mut out = Trajectory::with_capacity(self.dt, n);
        let mut s = initial;
        for _ in 0..n {
            s = self.step_deterministic(s);
            out.push(s);
        }
        out
    }
}

fn exact_scheme<T: Real>(omega: T, gamma: T, mu: T, dt: T) -> Scheme<T> {
    let two = T::lit(2.0);
    let omega_sq = omega * omega;
    let disc = omega_sq - gamma * gamma;
    // c(t), s(t) with x(t) = e^{-γt}[(c + γs)x₀ + s·v₀]
    let (c, s) = if disc > T::zero() {
        let wd = disc.sqrt();
        ((wd * dt).cos(), (wd * dt).sin() / wd)
    } else if disc < T::zero() {
        let k = (-disc).sqrt();
        ((k * dt).cosh(), (k * dt).sinh() / k)
    } else {
        (T::one(), dt)
    };
    let e = (-gamma * dt).exp();
    let phi = [[e * (c + gamma * s), e * s], [-e * omega_sq * s, e * (c - gamma * s)]];
    if gamma == T::zero() {
        return Scheme::Exact {
            phi,
            l11: T::zero(),
            l21: T::zero(),
            l22: T::zero(),
        };
    }
    // Σ = P∞ − Φ P∞ Φᵀ with the stationary covariance P∞ = diag(1/(2ω²μ²), 1/(2μ²))
    let pxx = (two * omega_sq * mu * mu).recip();
    let pvv = (two * mu * mu).recip();
    let sxx = pxx - (phi[0][0] * phi[0][0] * pxx + phi[0][1] * phi[0][1] * pvv);
    let sxv = -(phi[0][0] * phi[1][0] * pxx + phi[0][1] * phi[1][1] * pvv);
    let svv = pvv - (phi[1][0] * phi[1][0] * pxx + phi[1][1] * phi[1][1] * pvv);
    let l11 = sxx.max(T::zero()).sqrt();
    let l21 = if l11 > T::zero() { sxv / l11 } else { T::zero() };
    let l22 = (svv - l21 * l21).max(T::zero()).sqrt();
    Scheme::Exact { phi, l11, l21, l22 }
}

/// Private stream for one ensemble member: ChaCha8 keyed by `seed`, stream
/// number `ensemble`. Independent of how members are scheduled on threads.
pub fn ensemble_rng(seed: u64, ensemble: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ensemble as u64);
    rng
}

/// Integrates member `ensemble` from rest, discards `burn_in` steps and
/// records the next `n_steps` states.
pub fn integrate_langevin<T: Real>(cfg: &SimConfig<T>, ensemble: usize) -> Result<Trajectory<T>, OracleError>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    Ok(run_member(cfg, &Propagator::from_config(cfg), ensemble))
}

fn run_member<T: Real>(cfg: &SimConfig<T>, prop: &Propagator<T>, ensemble: usize) -> Trajectory<T>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = ensemble_rng(cfg.seed, ensemble);
    let mut s = OscillatorState::default();
    for _ in 0..cfg.burn_in {
        s = prop.step(s, &mut rng);
    }
    let mut out = Trajectory::with_capacity(cfg.dt, cfg.n_steps);
    for _ in 0..cfg.n_steps {
        s = prop.step(s, &mut rng);
        out.push(s);
    }
    out
}

/// Per-member reductions kept after the trajectory is dropped.
#[derive(Debug, Clone, PartialEq)]
struct MemberSummary<T> {
    periodogram: Vec<T>,
    variance: T,
    quarter_means: [T; 4],
}

/// Mean and standard error of a statistic across ensemble members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStatistics<T> {
    pub mean: T,
    pub stderr: T,
}

impl<T: Real> EnsembleStatistics<T> {
    pub fn from_samples(samples: impl ExactSizeIterator<Item = T> + Clone) -> Self {
        let n = samples.len();
        let count = T::from_usize(n).unwrap();
        let mean = samples.clone().fold(T::zero(), |a, b| a + b) / count;
        let stderr = if n > 1 {
            let ss = samples.fold(T::zero(), |a, b| a + (b - mean) * (b - mean));
            (ss / (count - T::one()) / count).sqrt()
        } else {
            T::zero()
        };
        Self { mean, stderr }
    }

    /// |mean − target| in units of the standard error.
    pub fn z_score(&self, target: T) -> T {
        (self.mean - target).abs() / self.stderr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome<T> {
    pub psd: PsdEstimate<T>,
    /// Sample variance of δx per member, aggregated.
    pub variance: EnsembleStatistics<T>,
    /// Mean of δx over each quarter of the recorded trajectory.
    pub quarter_means: [EnsembleStatistics<T>; 4],
}

/// Runs every ensemble member (in parallel on the current rayon pool) and
/// reduces them in member order, so results do not depend on thread count.
pub fn simulate<T: Real>(cfg: &SimConfig<T>) -> Result<SimulationOutcome<T>, OracleError>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    let prop = Propagator::from_config(cfg);
    let welch = WelchEstimator::new(&cfg.welch, cfg.dt)?;
    let members: Vec<MemberSummary<T>> = (0..cfg.n_ensembles)
        .into_par_iter()
        .map(|e| {
            let traj = run_member(cfg, &prop, e);
            Ok(MemberSummary {
                periodogram: welch.periodogram(&traj.x)?,
                variance: sample_variance(&traj.x),
                quarter_means: quarter_means(&traj.x),
            })
        })
        .collect::<Result<_, OracleError>>()?;

    let psd = if members.len() > 1 {
        let per_member: Vec<Vec<T>> = members.iter().map(|m| m.periodogram.clone()).collect();
        PsdEstimate::from_averages(&welch, &per_member, welch.segment_count(cfg.n_steps))
    } else {
        // a single member: spread across its own segments
        let traj = run_member(cfg, &prop, 0);
        let segments = welch.segment_periodograms(&traj.x)?;
        PsdEstimate::from_averages(&welch, &segments, 1)
    };
    let variance = EnsembleStatistics::from_samples(members.iter().map(|m| m.variance));
    let quarter_means =
        std::array::from_fn(|q| EnsembleStatistics::from_samples(members.iter().map(|m| m.quarter_means[q])));
    Ok(SimulationOutcome {
        psd,
        variance,
        quarter_means,
    })
}

fn sample_variance<T: Real>(x: &[T]) -> T {
    let n = T::from_usize(x.len()).unwrap();
    let mean = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    x.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / (n - T::one())
}

fn quarter_means<T: Real>(x: &[T]) -> [T; 4] {
    let q = x.len() / 4;
    std::array::from_fn(|i| {
        let chunk = &x[i * q..(i + 1) * q];
        chunk.iter().fold(T::zero(), |a, &b| a + b) / T::from_usize(chunk.len()).unwrap()
    })
}
