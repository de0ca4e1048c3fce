use serde::{Deserialize, Serialize};

use super::state::{cross, MFState, SectorObservables, Vec3};
use crate::error::Result;
use crate::models::{dicke_alpha, DickeParams};

/// How the J_y coupling combines α₊ and α₋.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JyConvention {
    /// J_y = −2g Im(α₊ α₋)/√N.
    #[default]
    Product,
    /// J_y = −2g Im(α₊ − α₋)/√N.
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DickeCouplings {
    pub omega_z: f64,
    pub jx: f64,
    pub jy: f64,
}

impl DickeCouplings {
    pub fn from_params(p: &DickeParams, conv: JyConvention) -> Result<Self> {
        p.validate()?;
        let (ap, am) = dicke_alpha(p)?;
        let sq = (p.n_total as f64).sqrt();
        let jy = match conv {
            JyConvention::Product => -2.0 * p.g * (ap * am).im / sq,
            JyConvention::Difference => -2.0 * p.g * (ap - am).im / sq,
        };
        Ok(DickeCouplings {
            omega_z: p.omega_z,
            jx: 2.0 * p.g * (ap + am).re / sq,
            jy,
        })
    }

    /// τ = (J_x O_Sx + J_y O_Sy, 0, ω_z).
    pub fn torque(&self, o_sym: &Vec3) -> Vec3 {
        [self.jx * o_sym[0] + self.jy * o_sym[1], 0.0, self.omega_z]
    }
}

/// Every sector vector, the symmetric one included, precesses about the
/// torque set by the symmetric sector.
pub fn dicke_mf_rhs(state: &SectorObservables, c: &DickeCouplings) -> SectorObservables {
    let tau = c.torque(&state.o_sym);
    SectorObservables {
        o_sym: cross(&tau, &state.o_sym),
        o_modes: state.o_modes.iter().map(|v| cross(&tau, v)).collect(),
    }
}

/// dS_i/dt = τ × S_i for each subensemble.
pub fn torque_rhs(state: &MFState, c: &DickeCouplings) -> Vec<Vec3> {
    let mut o = [0.0; 3];
    for s in &state.spins {
        for a in 0..3 {
            o[a] += s[a];
        }
    }
    let tau = c.torque(&o);
    state.spins.iter().map(|s| cross(&tau, s)).collect()
}

/// √(ω_z² + (J_x O_x + J_y O_y)²) of the symmetric steady state.
pub fn dressed_frequency(steady_sym: &Vec3, c: &DickeCouplings) -> f64 {
    let h = c.jx * steady_sym[0] + c.jy * steady_sym[1];
    (c.omega_z * c.omega_z + h * h).sqrt()
}
