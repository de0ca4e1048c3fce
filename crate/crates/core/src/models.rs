//! The effective (cavity-eliminated) Dicke model and the boundary time crystal.

use serde::{Deserialize, Serialize};

use crate::angular_momentum::{Axis, Component};
use crate::error::{Error, Result};
use crate::linalg::{c, C64, I};
use crate::liouville::{AnticommutatorOrdering, HamiltonianTerm, JumpOperator, LindbladSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParams {
    pub omega_z: f64,
    pub omega_0: f64,
    pub kappa: f64,
    pub g: f64,
    pub n_total: u32,
}

impl DickeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !(self.omega_0 > 0.0) {
            return Err(Error::domain("dicke: kappa and omega_0 must be positive"));
        }
        if self.n_total < 2 {
            return Err(Error::domain("dicke: n_total must be at least 2"));
        }
        if ![self.omega_z, self.omega_0, self.kappa, self.g]
            .iter()
            .all(|x| x.is_finite())
        {
            return Err(Error::domain("dicke: parameters must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BTCParams {
    pub omega_x: f64,
    pub kappa: f64,
    #[serde(default)]
    pub j_xx: f64,
    pub n_total: u32,
}

impl BTCParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::domain("btc: kappa must be positive"));
        }
        if self.n_total == 0 {
            return Err(Error::domain("btc: n_total must be positive"));
        }
        if !self.omega_x.is_finite() || !self.j_xx.is_finite() {
            return Err(Error::domain("btc: parameters must be finite"));
        }
        Ok(())
    }
}

/// α± = −g / (2√N (ω₀ ± ω_z − iκ)).
pub fn dicke_alpha(p: &DickeParams) -> Result<(C64, C64)> {
    if p.n_total == 0 {
        return Err(Error::domain("dicke: n_total must be positive"));
    }
    let pre = -p.g / (2.0 * (p.n_total as f64).sqrt());
    let den_p = C64::new(p.omega_0 + p.omega_z, -p.kappa);
    let den_m = C64::new(p.omega_0 - p.omega_z, -p.kappa);
    if den_p.norm() == 0.0 || den_m.norm() == 0.0 {
        return Err(Error::domain("dicke: vanishing denominator in alpha"));
    }
    Ok((c(pre) / den_p, c(pre) / den_m))
}

/// Spin-only Lindbladian with H = ω_z Ŝz + g/(2√N)(Ŝx D + D† Ŝx) and a
/// single jump D = α₊Ŝ₊ + α₋Ŝ₋ at rate κ.
///
/// Writing D = a Ŝx + b Ŝy with a = α₊+α₋, b = i(α₊−α₋), the coupling
/// expands to 2Re(a) ŜxŜx + b ŜxŜy + b̄ ŜyŜx.
pub fn dicke_effective_spec(p: &DickeParams) -> Result<LindbladSpec> {
    p.validate()?;
    let (ap, am) = dicke_alpha(p)?;
    let cpl = p.g / (2.0 * (p.n_total as f64).sqrt());
    let a = ap + am;
    let b = I * (ap - am);
    let spec = LindbladSpec::new(p.n_total)
        .with_term(HamiltonianTerm::new(vec![Axis::Z], p.omega_z))
        .with_term(HamiltonianTerm::new(
            vec![Axis::X, Axis::X],
            2.0 * a.re * cpl,
        ))
        .with_term(HamiltonianTerm::complex(vec![Axis::X, Axis::Y], b * cpl))
        .with_term(HamiltonianTerm::complex(
            vec![Axis::Y, Axis::X],
            b.conj() * cpl,
        ))
        .with_jump(
            JumpOperator {
                terms: vec![(Component::Plus, ap), (Component::Minus, am)],
            },
            p.kappa,
        );
    Ok(spec)
}

/// Superradiant threshold √(ω_z(ω₀²+κ²)/ω₀), shifted by √(N/(2·norm_s)) when
/// the symmetric sector has magnitude `norm_s` (raw spin units).
pub fn dicke_gcr(p: &DickeParams, norm_s: Option<f64>) -> Result<f64> {
    let g2 = p.omega_z * (p.omega_0 * p.omega_0 + p.kappa * p.kappa) / p.omega_0;
    let shift = match norm_s {
        None => 1.0,
        Some(ns) if ns > 0.0 => p.n_total as f64 / (2.0 * ns),
        Some(ns) => return Err(Error::domain(format!("norm_s must be positive, got {ns}"))),
    };
    Ok((g2 * shift).sqrt())
}

/// H = ω_x Ŝx + (2J_xx/N) ŜxŜx with collective decay Ŝ₋ at rate 2κ/N.
pub fn btc_spec(p: &BTCParams, ordering: AnticommutatorOrdering) -> Result<LindbladSpec> {
    p.validate()?;
    let mut spec = LindbladSpec::new(p.n_total)
        .with_term(HamiltonianTerm::new(vec![Axis::X], p.omega_x))
        .with_jump(
            JumpOperator::single(Component::Minus),
            2.0 * p.kappa / p.n_total as f64,
        );
    if p.j_xx != 0.0 {
        spec = spec.with_term(HamiltonianTerm::new(vec![Axis::X, Axis::X], 2.0 * p.j_xx).scaled());
    }
    spec.ordering = ordering;
    Ok(spec)
}

/// The ω_x at which the steady state gives way to a limit cycle; known in
/// closed form only without interactions.
pub fn btc_critical(p: &BTCParams) -> Result<f64> {
    if p.j_xx != 0.0 {
        return Err(Error::NotApplicable(
            "btc threshold has no closed form for j_xx != 0; scan numerically".into(),
        ));
    }
    Ok(p.kappa)
}
