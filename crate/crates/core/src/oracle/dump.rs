//! Raw trajectory dump.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic     8 bytes   "AFXTRAJ1"
//! hdr_len   u64       length of the JSON header in bytes
//! header    hdr_len   UTF-8 JSON: TrajectoryHeader
//! samples   16·n      (x: f64, v: f64) per recorded step
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::integrate::Trajectory;
use super::{OracleError, SimConfig, WelchConfig};
use crate::real::Real;

pub const TRAJECTORY_MAGIC: &[u8; 8] = b"AFXTRAJ1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    pub ensemble: usize,
    pub samples: usize,
    pub columns: Vec<String>,
    pub config: SimConfig<f64>,
}

fn widen<T: Real>(cfg: &SimConfig<T>) -> SimConfig<f64> {
    SimConfig {
        omega_vib: cfg.omega_vib.as_f64(),
        gamma_sp: cfg.gamma_sp.as_f64(),
        mu: cfg.mu.as_f64(),
        dt: cfg.dt.as_f64(),
        n_steps: cfg.n_steps,
        n_ensembles: cfg.n_ensembles,
        seed: cfg.seed,
        burn_in: cfg.burn_in,
        integrator: cfg.integrator,
        welch: WelchConfig {
            segment_length: cfg.welch.segment_length,
            overlap_fraction: cfg.welch.overlap_fraction.as_f64(),
            window: cfg.welch.window,
            detrend: cfg.welch.detrend,
        },
    }
}

pub fn write_trajectory<W: Write, T: Real>(
    mut out: W,
    cfg: &SimConfig<T>,
    ensemble: usize,
    trajectory: &Trajectory<T>,
) -> Result<(), OracleError> {
    let header = TrajectoryHeader {
        ensemble,
        samples: trajectory.len(),
        columns: vec!["x".into(), "v".into()],
        config: widen(cfg),
    };
    let json = serde_json::to_vec(&header).map_err(|e| OracleError::Format(e.to_string()))?;
    out.write_all(TRAJECTORY_MAGIC)?;
    out.write_all(&(json.len() as u64).to_le_bytes())?;
    out.write_all(&json)?;
    let mut buf = Vec::with_capacity(16 * trajectory.len());
    for (x, v) in trajectory.x.iter().zip(&trajectory.v) {
        buf.extend_from_slice(&x.as_f64().to_le_bytes());
        buf.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(mut input: R) -> Result<(TrajectoryHeader, Trajectory<f64>), OracleError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != TRAJECTORY_MAGIC {
        return Err(OracleError::Format("bad magic".into()));
    }
    let mut len = [0u8; 8];
    input.read_exact(&mut len)?;
    let len = usize::try_from(u64::from_le_bytes(len)).map_err(|_| OracleError::Format("header too large".into()))?;
    let mut json = vec![0u8; len];
    input.read_exact(&mut json)?;
    let header: TrajectoryHeader = serde_json::from_slice(&json).map_err(|e| OracleError::Format(e.to_string()))?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != 16 * header.samples {
        return Err(OracleError::Format(format!(
            "expected {} sample bytes, found {}",
            16 * header.samples,
            body.len()
        )));
    }
    let mut trajectory = Trajectory {
        dt: header.config.dt,
        x: Vec::with_capacity(header.samples),
        v: Vec::with_capacity(header.samples),
    };
    for pair in body.chunks_exact(16) {
        trajectory.x.push(f64::from_le_bytes(pair[..8].try_into().unwrap()));
        trajectory.v.push(f64::from_le_bytes(pair[8..].try_into().unwrap()));
    }
    Ok((header, trajectory))
}
