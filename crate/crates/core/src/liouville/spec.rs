//! Declarative collective Lindbladians.
//!
//! ```text
//! L[ρ] = −i[H, ρ] + Σ_ab Γ_ab ( L_a ρ L_b† − ½ {K_ab, ρ} )
//! ```
//! with K_ab = L_b† L_a in the standard ordering. `H` is a sum of ordered
//! monomials of collective operators, optionally scaled by 1/N^{p−1}.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::angular_momentum::{build_collective_ops, Axis, CollectiveOps, Component, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{c, dagger, hermitian_eigenvalues, hermiticity_error, identity, max_abs, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    /// Ordered product Ŝ^{a₁} Ŝ^{a₂} ⋯
    pub axes: Vec<Axis>,
    /// Complex coefficients are allowed as long as the total H is Hermitian.
    pub coefficient: C64,
    /// Multiply by 1/N^{p−1} for a product of p operators.
    pub n_power_scaling: bool,
}

impl HamiltonianTerm {
    pub fn new(axes: Vec<Axis>, coefficient: f64) -> Self {
        HamiltonianTerm {
            axes,
            coefficient: c(coefficient),
            n_power_scaling: false,
        }
    }

    pub fn complex(axes: Vec<Axis>, coefficient: C64) -> Self {
        HamiltonianTerm {
            axes,
            coefficient,
            n_power_scaling: false,
        }
    }

    pub fn scaled(mut self) -> Self {
        self.n_power_scaling = true;
        self
    }
}

/// A jump operator written as Σ c_k Ŝ^{k}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpOperator {
    pub terms: Vec<(Component, C64)>,
}

impl JumpOperator {
    pub fn single(comp: Component) -> Self {
        JumpOperator {
            terms: vec![(comp, c(1.0))],
        }
    }

    pub fn matrix(&self, ops: &CollectiveOps) -> Array2<C64> {
        let d = ops.sector.dim();
        let mut m = Array2::zeros((d, d));
        for (comp, w) in &self.terms {
            m.scaled_add(*w, ops.get(*comp));
        }
        m
    }
}

/// Ordering of the anticommutator term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnticommutatorOrdering {
    /// {L_b† L_a, ρ}: trace preserving.
    #[default]
    Standard,
    /// {L_a L_b†, ρ}: not trace preserving unless the jumps are normal.
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladSpec {
    pub hamiltonian: Vec<HamiltonianTerm>,
    pub jumps: Vec<JumpOperator>,
    /// Hermitian positive semidefinite rate matrix over `jumps`.
    pub rates: Vec<Vec<C64>>,
    pub n_total: u32,
    pub ordering: AnticommutatorOrdering,
}

/// Left/right matrices of the generator on one sector.
pub(crate) struct SectorMatrices {
    pub h: Array2<C64>,
    pub jumps: Vec<Array2<C64>>,
}

impl LindbladSpec {
    pub fn new(n_total: u32) -> Self {
        LindbladSpec {
            hamiltonian: vec![],
            jumps: vec![],
            rates: vec![],
            n_total,
            ordering: AnticommutatorOrdering::Standard,
        }
    }

    pub fn with_term(mut self, t: HamiltonianTerm) -> Self {
        self.hamiltonian.push(t);
        self
    }

    /// Adds a jump uncorrelated with the existing ones.
    pub fn with_jump(mut self, jump: JumpOperator, rate: f64) -> Self {
        let n = self.jumps.len();
        for row in &mut self.rates {
            row.push(c(0.0));
        }
        let mut row = vec![c(0.0); n + 1];
        row[n] = c(rate);
        self.rates.push(row);
        self.jumps.push(jump);
        self
    }

    pub fn rate_matrix(&self) -> Array2<C64> {
        let n = self.jumps.len();
        Array2::from_shape_fn((n, n), |(a, b)| self.rates[a][b])
    }

    /// Checks shapes, N, and that Γ is Hermitian PSD.
    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::domain("n_total must be positive"));
        }
        let n = self.jumps.len();
        if self.rates.len() != n || self.rates.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!("rate matrix must be {n}x{n}")));
        }
        if self.hamiltonian.iter().any(|t| t.axes.is_empty()) {
            return Err(Error::domain(
                "Hamiltonian monomials need at least one operator",
            ));
        }
        if n == 0 {
            return Ok(());
        }
        let g = self.rate_matrix();
        let scale = max_abs(&g.view()).max(1e-300);
        if hermiticity_error(&g.view()) > 1e-12 * scale {
            return Err(Error::domain("rate matrix is not Hermitian"));
        }
        let ev = hermitian_eigenvalues(&g.view())?;
        if ev.iter().any(|&x| x < -1e-12 * scale) {
            return Err(Error::domain(format!(
                "rate matrix is not positive semidefinite (min eigenvalue {:e})",
                ev.iter().cloned().fold(f64::INFINITY, f64::min)
            )));
        }
        Ok(())
    }

    pub fn hamiltonian_matrix(&self, s: SpinQuantum) -> Array2<C64> {
        self.hamiltonian_with(&build_collective_ops(s))
    }

    fn hamiltonian_with(&self, ops: &CollectiveOps) -> Array2<C64> {
        let d = ops.sector.dim();
        let mut h = Array2::zeros((d, d));
        for t in &self.hamiltonian {
            let mut m = identity(d);
            for a in &t.axes {
                m = m.dot(ops.get((*a).into()));
            }
            let mut w = t.coefficient;
            if t.n_power_scaling {
                w /= (self.n_total as f64).powi(t.axes.len() as i32 - 1);
            }
            h.scaled_add(w, &m);
        }
        h
    }

    pub(crate) fn sector_matrices(&self, s: SpinQuantum) -> SectorMatrices {
        let ops = build_collective_ops(s);
        SectorMatrices {
            h: self.hamiltonian_with(&ops),
            jumps: self.jumps.iter().map(|j| j.matrix(&ops)).collect(),
        }
    }

    /// The Hermitian-part error of H on a sector, relative to its size.
    pub fn hamiltonian_hermiticity(&self, s: SpinQuantum) -> f64 {
        let h = self.hamiltonian_matrix(s);
        hermiticity_error(&h.view()) / max_abs(&h.view()).max(1.0)
    }

    /// K_ab according to the ordering.
    pub(crate) fn anticommutator_operator(
        &self,
        la: &Array2<C64>,
        lb: &Array2<C64>,
    ) -> Array2<C64> {
        match self.ordering {
            AnticommutatorOrdering::Standard => dagger(&lb.view()).dot(la),
            AnticommutatorOrdering::Reversed => la.dot(&dagger(&lb.view())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_psd_rates_are_rejected() {
        let mut s = LindbladSpec::new(4)
            .with_jump(JumpOperator::single(Component::Minus), 1.0)
            .with_jump(JumpOperator::single(Component::Z), 1.0);
        s.rates[0][1] = c(2.0);
        s.rates[1][0] = c(2.0);
        assert!(s.validate().is_err());
        s.rates[0][1] = c(0.5);
        s.rates[1][0] = c(0.5);
        assert!(s.validate().is_ok());
        s.rates[1][0] = c(0.4);
        assert!(s.validate().is_err());
    }

    #[test]
    fn scaled_monomial() {
        let s = LindbladSpec::new(4)
            .with_term(HamiltonianTerm::new(vec![Axis::Z, Axis::Z], 8.0).scaled());
        let h = s.hamiltonian_matrix(SpinQuantum::from_twice(2));
        assert_eq!(h[[0, 0]], c(2.0));
        assert_eq!(h[[1, 1]], c(0.0));
    }
}
