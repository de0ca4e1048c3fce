use serde::{Deserialize, Serialize};

use super::state::{MFState, SectorObservables, Vec3};
use crate::error::{Error, Result};
use crate::models::BTCParams;

/// Source term in the z equation of the non-symmetric sectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntisymmetricField {
    /// ω O_{k,y}: each sector precesses about the same field as the spins.
    #[default]
    Derived,
    /// ω O_{S,y}, the symmetric component.
    AsPrinted,
}

/// Couplings in raw spin units (|O_S| up to N/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BtcCouplings {
    pub omega_x: f64,
    /// 2κ/N.
    pub kappa_n: f64,
    /// 4J_xx/N: the mean-field shift of the x field per unit O_Sx.
    pub jxx_n: f64,
    pub field: AntisymmetricField,
}

impl BtcCouplings {
    pub fn from_params(p: &BTCParams, field: AntisymmetricField) -> Result<Self> {
        p.validate()?;
        let n = p.n_total as f64;
        Ok(BtcCouplings {
            omega_x: p.omega_x,
            kappa_n: 2.0 * p.kappa / n,
            jxx_n: 4.0 * p.j_xx / n,
            field,
        })
    }

    /// x field including the factorized (Ŝx)² term.
    pub fn effective_field(&self, o_sym: &Vec3) -> f64 {
        self.omega_x + self.jxx_n * o_sym[0]
    }
}

fn sector(v: &Vec3, o: &Vec3, k: f64, w: f64) -> Vec3 {
    [
        k * v[2] * o[0],
        k * v[2] * o[1] - w * v[2],
        -k * (v[0] * o[0] + v[1] * o[1]) + w * v[1],
    ]
}

/// Mean-field equations for the symmetric sector and each mode.
///
/// With H = ω_x Ŝx + (2J_xx/N)(Ŝx)² the interaction enters through the
/// factorized field w = ω_x + (4J_xx/N) O_Sx; at J_xx = 0 this is ω_x.
pub fn btc_mf_rhs(state: &SectorObservables, c: &BtcCouplings) -> SectorObservables {
    let o = state.o_sym;
    let k = c.kappa_n;
    let w = c.effective_field(&o);
    let o_modes = state
        .o_modes
        .iter()
        .map(|v| {
            let mut d = sector(v, &o, k, w);
            if c.field == AntisymmetricField::AsPrinted {
                d[2] += w * (o[1] - v[1]);
            }
            d
        })
        .collect();
    SectorObservables {
        o_sym: sector(&o, &o, k, w),
        o_modes,
    }
}

/// Per-subensemble form of the derived equations.
pub fn btc_spin_rhs(state: &MFState, c: &BtcCouplings) -> Result<Vec<Vec3>> {
    if c.field != AntisymmetricField::Derived {
        return Err(Error::Unsupported(
            "the printed antisymmetric field has no per-subensemble form".into(),
        ));
    }
    let mut o = [0.0; 3];
    for s in &state.spins {
        for a in 0..3 {
            o[a] += s[a];
        }
    }
    let w = c.effective_field(&o);
    Ok(state
        .spins
        .iter()
        .map(|s| sector(s, &o, c.kappa_n, w))
        .collect())
}
