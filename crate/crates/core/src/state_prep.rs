//! Product coherent initial states and their distribution over total-spin sectors.
//!
//! Conventions: |0⟩ is spin-down (m = −½), so θ = 0 is the ground state of Ŝ_z.
//! The relative azimuth is φ_A = φ₂ − φ₁.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::angular_momentum::{couple_basis, BlockMatrix, CoupledBasisMap, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{dagger, hermitian_eigenvalues, kron, C64};
use crate::meanfield::MFState;

/// Density matrices between total-spin sectors.
pub type BlockDensityMatrix = BlockMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentParams {
    pub theta: f64,
    pub phi: f64,
}

impl CoherentParams {
    /// Validates θ ∈ [0, π] and reduces φ into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::domain(format!(
                "coherent angles out of range: θ={theta}, φ={phi}"
            )));
        }
        Ok(CoherentParams {
            theta,
            phi: phi.rem_euclid(2.0 * std::f64::consts::PI),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub n_spins: u32,
    pub params: CoherentParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub subensembles: Vec<EnsembleMember>,
}

impl EnsembleSpec {
    pub fn new(subensembles: Vec<EnsembleMember>) -> Result<Self> {
        if subensembles.is_empty() {
            return Err(Error::domain("an ensemble needs at least one subensemble"));
        }
        if let Some(m) = subensembles.iter().find(|m| m.n_spins == 0) {
            return Err(Error::domain(format!(
                "subensemble with {} spins",
                m.n_spins
            )));
        }
        for m in &subensembles {
            CoherentParams::new(m.params.theta, m.params.phi)?;
        }
        Ok(EnsembleSpec { subensembles })
    }

    /// Two equal halves at θ = π/2 with φ₁ = 0 and φ₂ = φ_A.
    pub fn split_equator(n_half: u32, phi_a: f64) -> Result<Self> {
        let half = std::f64::consts::FRAC_PI_2;
        EnsembleSpec::new(vec![
            EnsembleMember {
                n_spins: n_half,
                params: CoherentParams::new(half, 0.0)?,
            },
            EnsembleMember {
                n_spins: n_half,
                params: CoherentParams::new(half, phi_a)?,
            },
        ])
    }

    pub fn n_total(&self) -> u32 {
        self.subensembles.iter().map(|m| m.n_spins).sum()
    }

    pub fn m(&self) -> usize {
        self.subensembles.len()
    }
}

/// Amplitudes of the spin coherent state on |j, m⟩, m descending.
pub fn coherent_amplitudes(j: SpinQuantum, p: CoherentParams) -> Array1<C64> {
    let n = j.twice() as usize;
    let (ch, sh) = ((p.theta / 2.0).cos(), (p.theta / 2.0).sin());
    let mut binom = vec![1.0f64; n + 1];
    for k in 1..=n {
        binom[k] = binom[k - 1] * (n + 1 - k) as f64 / k as f64;
    }
    Array1::from_shape_fn(n + 1, |k| {
        // k = j − m, so j + m = n − k
        let up = (n - k) as i32;
        let mag = binom[n - k].sqrt() * ch.powi(k as i32) * sh.powi(up);
        C64::from_polar(mag, -p.phi * up as f64)
    })
}

fn two_spins(spec: &EnsembleSpec) -> Result<(&EnsembleMember, &EnsembleMember)> {
    match spec.subensembles.as_slice() {
        [a, b] => Ok((a, b)),
        other => Err(Error::Unsupported(format!(
            "exact block states need two subensembles, got {}",
            other.len()
        ))),
    }
}

/// Product coherent state of two subensembles in the coupled block basis.
pub fn initial_block_state(spec: &EnsembleSpec) -> Result<BlockDensityMatrix> {
    let (a, b) = two_spins(spec)?;
    let map = couple_basis(
        SpinQuantum::from_spin_count(a.n_spins),
        SpinQuantum::from_spin_count(b.n_spins),
    );
    Ok(block_state_with_map(spec, &map)?.0)
}

/// As [`initial_block_state`], reusing a coupling map; also returns the uncoupled vector.
pub fn block_state_with_map(
    spec: &EnsembleSpec,
    map: &CoupledBasisMap,
) -> Result<(BlockDensityMatrix, Array1<C64>)> {
    let (a, b) = two_spins(spec)?;
    let (j1, j2) = (
        SpinQuantum::from_spin_count(a.n_spins),
        SpinQuantum::from_spin_count(b.n_spins),
    );
    if (j1, j2) != (map.j1, map.j2) {
        return Err(Error::domain("coupling map does not match the ensemble"));
    }
    let psi1 = coherent_amplitudes(j1, a.params);
    let psi2 = coherent_amplitudes(j2, b.params);
    let psi = kron(
        &psi1.view().insert_axis(ndarray::Axis(1)),
        &psi2.view().insert_axis(ndarray::Axis(1)),
    )
    .column(0)
    .to_owned();
    let parts = map.couple_vector(psi.as_slice().expect("contiguous"));
    let mut rho = BlockMatrix::new(j1, j2);
    for (i, &s) in map.sectors().iter().enumerate() {
        for (k, &sp) in map.sectors().iter().enumerate() {
            let col = parts[i].view().insert_axis(ndarray::Axis(1)).to_owned();
            let row = dagger(&parts[k].view().insert_axis(ndarray::Axis(1)));
            rho.insert(s, sp, col.dot(&row))?;
        }
    }
    Ok((rho, psi))
}

/// p_d(S) = Tr ρ_{S,S}, sectors descending.
pub fn diag_distribution(rho: &BlockDensityMatrix) -> Vec<(SpinQuantum, f64)> {
    rho.sectors()
        .into_iter()
        .map(|s| {
            let p = rho
                .get(s, s)
                .map(|b| b.diag().iter().map(|z| z.re).sum())
                .unwrap_or(0.0);
            (s, p)
        })
        .collect()
}

/// p_off(S, S') = Tr(ρ†_{S,S'} ρ_{S,S'}) for every ordered pair S ≠ S'.
pub fn offdiag_distribution(rho: &BlockDensityMatrix) -> Vec<(SpinQuantum, SpinQuantum, f64)> {
    let sectors = rho.sectors();
    let mut out = Vec::new();
    for &s in &sectors {
        for &sp in &sectors {
            if s == sp {
                continue;
            }
            let w = rho
                .get(s, sp)
                .map(|b| b.iter().map(|z| z.norm_sqr()).sum())
                .unwrap_or(0.0);
            out.push((s, sp, w));
        }
    }
    out
}

/// Σ_S S · p_d(S).
pub fn mean_spin(diag: &[(SpinQuantum, f64)]) -> f64 {
    diag.iter().map(|(s, p)| s.value() * p).sum()
}

/// Σ_S p_off(S, S−1).
pub fn nearest_neighbour_weight(off: &[(SpinQuantum, SpinQuantum, f64)]) -> f64 {
    off.iter()
        .filter(|(s, sp, _)| s.twice() == sp.twice() + 2)
        .map(|(_, _, w)| w)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityDiagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

/// Trace, Hermiticity pairing, and positivity of the assembled matrix.
pub fn density_diagnostics(rho: &BlockDensityMatrix) -> Result<DensityDiagnostics> {
    let trace: f64 = diag_distribution(rho).iter().map(|(_, p)| p).sum();
    let mut herm: f64 = 0.0;
    for ((s, sp), b) in rho.iter() {
        let other = rho.block(*sp, *s);
        herm = herm.max(crate::linalg::max_abs(&(b - &dagger(&other.view())).view()));
    }
    let dense: Array2<C64> = rho.to_dense();
    let ev = hermitian_eigenvalues(&dense.view())?;
    Ok(DensityDiagnostics {
        trace_error: (trace - 1.0).abs(),
        hermiticity_error: herm,
        min_eigenvalue: ev.iter().cloned().fold(f64::INFINITY, f64::min),
    })
}

/// Classical spin vectors (N_i/2)(sinθ cosφ, sinθ sinφ, −cosθ); any number of subensembles.
pub fn mf_initial_vectors(spec: &EnsembleSpec) -> MFState {
    let spins = spec
        .subensembles
        .iter()
        .map(|m| {
            let r = m.n_spins as f64 / 2.0;
            let (t, f) = (m.params.theta, m.params.phi);
            [r * t.sin() * f.cos(), r * t.sin() * f.sin(), -r * t.cos()]
        })
        .collect();
    MFState { spins, time: 0.0 }
}
