use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Classical spin vectors of M subensembles, in raw spin units (|S_i| = N_i/2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MFState {
    pub spins: Vec<Vec3>,
    pub time: f64,
}

impl MFState {
    pub fn m(&self) -> usize {
        self.spins.len()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.spins.iter().map(norm).collect()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.spins.iter().flatten().copied().collect()
    }

    pub fn from_flat(y: &[f64], time: f64) -> Self {
        MFState {
            spins: y.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
            time,
        }
    }
}

/// Symmetric observable O_S = Σ S_i and the M−1 modulated modes
/// O_k = √M Σ_i (v_k)_i S_i. For M = 2 the single mode is O_A = S₁ − S₂.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorObservables {
    pub o_sym: Vec3,
    pub o_modes: Vec<Vec3>,
}

/// Squared norms Σ_α (O^α)² of each sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorNorms {
    pub sym: f64,
    pub modes: Vec<f64>,
}

impl SectorObservables {
    /// The antisymmetric vector when M = 2.
    pub fn o_anti(&self) -> Option<Vec3> {
        match self.o_modes.as_slice() {
            [a] => Some(*a),
            _ => None,
        }
    }

    pub fn m(&self) -> usize {
        self.o_modes.len() + 1
    }

    pub fn norms(&self) -> SectorNorms {
        SectorNorms {
            sym: dot(&self.o_sym, &self.o_sym),
            modes: self.o_modes.iter().map(|v| dot(v, v)).collect(),
        }
    }

    /// Layout: O_S first, then each mode.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = self.o_sym.to_vec();
        for v in &self.o_modes {
            out.extend_from_slice(v);
        }
        out
    }

    pub fn from_flat(y: &[f64]) -> Self {
        let mut chunks = y.chunks_exact(3).map(|c| [c[0], c[1], c[2]]);
        let o_sym = chunks.next().unwrap_or([0.0; 3]);
        SectorObservables {
            o_sym,
            o_modes: chunks.collect(),
        }
    }
}

/// Orthonormal basis of R^M with the uniform vector first, completed by the
/// Helmert vectors (1, …, 1, −k, 0, …)/√(k(k+1)).
pub fn mode_basis(m: usize) -> Result<Vec<Vec<f64>>> {
    if m < 2 {
        return Err(Error::domain(format!("mode basis needs M >= 2, got {m}")));
    }
    let mut out = vec![vec![1.0 / (m as f64).sqrt(); m]];
    for k in 1..m {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut v = vec![0.0; m];
        for x in v.iter_mut().take(k) {
            *x = 1.0 / norm;
        }
        v[k] = -(k as f64) / norm;
        out.push(v);
    }
    Ok(out)
}

pub fn project(state: &MFState) -> Result<SectorObservables> {
    let m = state.m();
    if m == 1 {
        return Ok(SectorObservables {
            o_sym: state.spins[0],
            o_modes: vec![],
        });
    }
    let basis = mode_basis(m)?;
    let scale = (m as f64).sqrt();
    let combine = |v: &[f64]| {
        let mut o = [0.0; 3];
        for (w, s) in v.iter().zip(&state.spins) {
            for a in 0..3 {
                o[a] += scale * w * s[a];
            }
        }
        o
    };
    let mut o_sym = [0.0; 3];
    for s in &state.spins {
        for a in 0..3 {
            o_sym[a] += s[a];
        }
    }
    Ok(SectorObservables {
        o_sym,
        o_modes: basis[1..].iter().map(|v| combine(v)).collect(),
    })
}

/// Inverse of [`project`].
pub fn reconstruct(obs: &SectorObservables, time: f64) -> Result<MFState> {
    let m = obs.m();
    if m == 1 {
        return Ok(MFState {
            spins: vec![obs.o_sym],
            time,
        });
    }
    let basis = mode_basis(m)?;
    let scale = (m as f64).sqrt();
    let spins = (0..m)
        .map(|i| {
            let mut s = [0.0; 3];
            for a in 0..3 {
                s[a] = obs.o_sym[a] / m as f64
                    + obs
                        .o_modes
                        .iter()
                        .zip(&basis[1..])
                        .map(|(o, v)| v[i] * o[a] / scale)
                        .sum::<f64>();
            }
            s
        })
        .collect();
    Ok(MFState { spins, time })
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
