use std::collections::BTreeMap;

use ndarray::{s, Array2};

use super::coupling::CoupledBasisMap;
use super::ops::{build_collective_ops, Component};
use super::spin::SpinQuantum;
use crate::error::{Error, Result};
use crate::linalg::{c, dagger, max_abs, C64};

pub type SectorPair = (SpinQuantum, SpinQuantum);

/// A matrix on the coupled space of j1 ⊗ j2, stored as blocks between
/// total-spin sectors. Block (S, S') has shape (2S+1) × (2S'+1); absent keys
/// are identically zero. Keys iterate in ascending (S, S') order.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    pub j1: SpinQuantum,
    pub j2: SpinQuantum,
    blocks: BTreeMap<SectorPair, Array2<C64>>,
}

/// Operators expressed in the coupled basis.
pub type BlockOperator = BlockMatrix;

impl BlockMatrix {
    pub fn new(j1: SpinQuantum, j2: SpinQuantum) -> Self {
        BlockMatrix {
            j1,
            j2,
            blocks: BTreeMap::new(),
        }
    }

    pub fn sectors(&self) -> Vec<SpinQuantum> {
        SpinQuantum::coupled_sectors(self.j1, self.j2)
    }

    pub fn is_sector(&self, s: SpinQuantum) -> bool {
        let t = s.twice();
        t >= self.j1.twice().abs_diff(self.j2.twice())
            && t <= self.j1.twice() + self.j2.twice()
            && (t + self.j1.twice() + self.j2.twice()) % 2 == 0
    }

    pub fn insert(&mut self, s: SpinQuantum, sp: SpinQuantum, m: Array2<C64>) -> Result<()> {
        if !self.is_sector(s) || !self.is_sector(sp) {
            return Err(Error::domain(format!(
                "({s}, {sp}) is not a sector pair of {} ⊗ {}",
                self.j1, self.j2
            )));
        }
        if m.dim() != (s.dim(), sp.dim()) {
            return Err(Error::domain(format!(
                "block ({s}, {sp}) must be {}x{}, got {:?}",
                s.dim(),
                sp.dim(),
                m.dim()
            )));
        }
        self.blocks.insert((s, sp), m);
        Ok(())
    }

    pub(crate) fn block_mut_or_zero(
        &mut self,
        s: SpinQuantum,
        sp: SpinQuantum,
    ) -> &mut Array2<C64> {
        self.blocks
            .entry((s, sp))
            .or_insert_with(|| Array2::zeros((s.dim(), sp.dim())))
    }

    pub fn get(&self, s: SpinQuantum, sp: SpinQuantum) -> Option<&Array2<C64>> {
        self.blocks.get(&(s, sp))
    }

    /// The block, materializing zeros when absent.
    pub fn block(&self, s: SpinQuantum, sp: SpinQuantum) -> Array2<C64> {
        self.get(s, sp)
            .cloned()
            .unwrap_or_else(|| Array2::zeros((s.dim(), sp.dim())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SectorPair, &Array2<C64>)> {
        self.blocks.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &SectorPair> {
        self.blocks.keys()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn into_blocks(self) -> BTreeMap<SectorPair, Array2<C64>> {
        self.blocks
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.j1 != other.j1 || self.j2 != other.j2 {
            return Err(Error::domain(format!(
                "incompatible couplings {} ⊗ {} and {} ⊗ {}",
                self.j1, self.j2, other.j1, other.j2
            )));
        }
        Ok(())
    }

    /// `self + w * other`.
    pub fn add_scaled(&self, other: &Self, w: C64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for ((s, sp), m) in &other.blocks {
            let b = out.block_mut_or_zero(*s, *sp);
            b.zip_mut_with(m, |x, y| *x += w * y);
        }
        Ok(out)
    }

    pub fn scale(&self, w: C64) -> Self {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            m.mapv_inplace(|x| x * w);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = BlockMatrix::new(self.j1, self.j2);
        for ((s, sp), m) in &self.blocks {
            out.blocks.insert((*sp, *s), dagger(&m.view()));
        }
        out
    }

    /// Block-wise matrix product.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = BlockMatrix::new(self.j1, self.j2);
        for ((s, mid), a) in &self.blocks {
            for ((mid2, sp), b) in other.blocks.range((*mid, SpinQuantum::ZERO)..) {
                if mid2 != mid {
                    break;
                }
                let p = a.dot(b);
                let t = out.block_mut_or_zero(*s, *sp);
                *t += &p;
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add_scaled(&ba, c(-1.0))
    }

    /// Largest |entry| over blocks whose key satisfies `pred`.
    pub fn max_abs_where(&self, pred: impl Fn(SpinQuantum, SpinQuantum) -> bool) -> f64 {
        self.blocks
            .iter()
            .filter(|((s, sp), _)| pred(*s, *sp))
            .fold(0.0, |acc, (_, m)| acc.max(max_abs(&m.view())))
    }

    /// Offset of each sector (descending S) in the dense coupled ordering.
    fn offsets(&self) -> Vec<(SpinQuantum, usize)> {
        let mut acc = 0;
        self.sectors()
            .into_iter()
            .map(|s| {
                let o = acc;
                acc += s.dim();
                (s, o)
            })
            .collect()
    }

    pub fn dense_dim(&self) -> usize {
        self.sectors().iter().map(|s| s.dim()).sum()
    }

    /// Assembles the dense matrix in the coupled ordering (S descending, M descending).
    pub fn to_dense(&self) -> Array2<C64> {
        let n = self.dense_dim();
        let offs: BTreeMap<SpinQuantum, usize> = self.offsets().into_iter().collect();
        let mut out = Array2::zeros((n, n));
        for ((s, sp), m) in &self.blocks {
            let (r0, c0) = (offs[s], offs[sp]);
            out.slice_mut(s![r0..r0 + s.dim(), c0..c0 + sp.dim()])
                .assign(m);
        }
        out
    }

    /// Partitions a dense coupled-basis matrix into blocks, keeping every pair.
    pub fn from_dense(j1: SpinQuantum, j2: SpinQuantum, dense: &Array2<C64>) -> Result<Self> {
        let mut out = BlockMatrix::new(j1, j2);
        let offs = out.offsets();
        let n = out.dense_dim();
        if dense.dim() != (n, n) {
            return Err(Error::domain(format!(
                "dense matrix {:?} does not match coupled dimension {n}",
                dense.dim()
            )));
        }
        for &(s, r0) in &offs {
            for &(sp, c0) in &offs {
                let b = dense
                    .slice(s![r0..r0 + s.dim(), c0..c0 + sp.dim()])
                    .to_owned();
                out.blocks.insert((s, sp), b);
            }
        }
        Ok(out)
    }

    /// Identity on every sector.
    pub fn identity(map: &CoupledBasisMap) -> Self {
        let mut out = BlockMatrix::new(map.j1, map.j2);
        for &s in map.sectors() {
            out.blocks.insert((s, s), crate::linalg::identity(s.dim()));
        }
        out
    }
}

/// Which subensemble an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subensemble {
    First,
    Second,
}

/// Nonzero entries (row, col, value) of a collective component on one multiplet.
fn component_entries(j: SpinQuantum, comp: Component) -> Vec<(usize, usize, C64)> {
    let ops = build_collective_ops(j);
    let m = ops.get(comp);
    m.indexed_iter()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|((a, b), v)| (a, b, *v))
        .collect()
}

/// The spin operator of one subensemble expressed in the coupled basis.
pub fn subensemble_operator(
    which: Subensemble,
    comp: Component,
    map: &CoupledBasisMap,
) -> BlockOperator {
    let (d1, d2) = (map.j1.dim(), map.j2.dim());
    let mut entries = Vec::new();
    match which {
        Subensemble::First => {
            for (a, b, v) in component_entries(map.j1, comp) {
                for k2 in 0..d2 {
                    entries.push((a * d2 + k2, b * d2 + k2, v));
                }
            }
        }
        Subensemble::Second => {
            for (a, b, v) in component_entries(map.j2, comp) {
                for k1 in 0..d1 {
                    entries.push((k1 * d2 + a, k1 * d2 + b, v));
                }
            }
        }
    }
    map.conjugate(entries)
}

/// Ô_S = Ŝ₁ + Ŝ₂ for the given component.
pub fn symmetric_observable(comp: Component, map: &CoupledBasisMap) -> BlockOperator {
    let a = subensemble_operator(Subensemble::First, comp, map);
    let b = subensemble_operator(Subensemble::Second, comp, map);
    a.add_scaled(&b, c(1.0)).expect("same coupling")
}

/// Ô_A = Ŝ₁ − Ŝ₂ for the given component.
pub fn antisymmetric_observable(comp: Component, map: &CoupledBasisMap) -> BlockOperator {
    let a = subensemble_operator(Subensemble::First, comp, map);
    let b = subensemble_operator(Subensemble::Second, comp, map);
    a.add_scaled(&b, c(-1.0)).expect("same coupling")
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct OverlapWeight {
    pub s: SpinQuantum,
    pub s_tilde: SpinQuantum,
    pub weight: f64,
}

/// Σ |⟨S, m| op |S̃, m̃⟩| for every ordered sector pair, in ascending key order.
pub fn offdiag_overlap_profile(op: &BlockOperator) -> Vec<OverlapWeight> {
    let mut sectors = op.sectors();
    sectors.reverse();
    let mut out = Vec::new();
    for &s in &sectors {
        for &st in &sectors {
            let weight = op
                .get(s, st)
                .map(|m| m.iter().map(|z| z.norm()).sum())
                .unwrap_or(0.0);
            out.push(OverlapWeight {
                s,
                s_tilde: st,
                weight,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::coupling::couple_basis;
    use super::*;
    use crate::linalg::kron;

    fn sq(t: u32) -> SpinQuantum {
        SpinQuantum::from_twice(t)
    }

    #[test]
    fn first_spin_z_on_triplet() {
        let map = couple_basis(SpinQuantum::HALF, SpinQuantum::HALF);
        let op = subensemble_operator(Subensemble::First, Component::Z, &map);
        let t = op.block(sq(2), sq(2));
        assert!((t[[0, 0]].re - 0.5).abs() < 1e-15);
        assert!(t[[1, 1]].norm() < 1e-15);
        assert!((t[[2, 2]].re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_conjugation() {
        let (j1, j2) = (sq(3), sq(2));
        let map = couple_basis(j1, j2);
        let u = map.unitary();
        let ops1 = build_collective_ops(j1);
        let id2 = crate::linalg::identity(j2.dim());
        for comp in [Component::X, Component::Y, Component::Z, Component::Plus] {
            let full = kron(&ops1.get(comp).view(), &id2.view());
            let dense = u.dot(&full).dot(&dagger(&u.view()));
            let blocks = subensemble_operator(Subensemble::First, comp, &map).to_dense();
            assert!(max_abs(&(dense - blocks).view()) < 1e-13);
        }
    }

    #[test]
    fn trivial_partner_reproduces_collective_ops() {
        let map = couple_basis(sq(4), sq(0));
        let op = subensemble_operator(Subensemble::First, Component::X, &map);
        let e = op.block(sq(4), sq(4)) - build_collective_ops(sq(4)).sx;
        assert!(max_abs(&e.view()) < 1e-14);
        assert_eq!(op.len(), 1);
    }

    #[test]
    fn selection_rules_equal_spins() {
        let map = couple_basis(sq(6), sq(6));
        for comp in [Component::X, Component::Y, Component::Z] {
            let sym = symmetric_observable(comp, &map);
            assert!(sym.max_abs_where(|a, b| a != b) < 1e-12);
            let anti = antisymmetric_observable(comp, &map);
            assert!(anti.max_abs_where(|a, b| a == b) < 1e-12);
            assert!(anti.max_abs_where(|a, b| a.twice().abs_diff(b.twice()) >= 4) < 1e-12);
            assert!(anti.max_abs_where(|a, b| a.twice().abs_diff(b.twice()) == 2) > 0.1);
        }
    }

    #[test]
    fn ladder_commutator_shifts_projection() {
        let map = couple_basis(sq(4), sq(4));
        let oz = symmetric_observable(Component::Z, &map);
        for (comp, sign) in [(Component::Plus, 1.0), (Component::Minus, -1.0)] {
            let a = antisymmetric_observable(comp, &map);
            let comm = oz.commutator(&a).unwrap();
            let diff = comm.add_scaled(&a, c(-sign)).unwrap();
            assert!(diff.max_abs_where(|_, _| true) < 1e-12);
        }
    }

    #[test]
    fn symmetric_blocks_are_collective_ops() {
        let map = couple_basis(sq(5), sq(3));
        for comp in [Component::X, Component::Y, Component::Z] {
            let sym = symmetric_observable(comp, &map);
            for &s in map.sectors() {
                let e = sym.block(s, s) - build_collective_ops(s).get(comp);
                assert!(max_abs(&e.view()) < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_profile_is_nearest_neighbour() {
        let map = couple_basis(sq(30), sq(30));
        let prof = offdiag_overlap_profile(&antisymmetric_observable(Component::X, &map));
        assert_eq!(prof.len(), 31 * 31);
        for w in prof {
            let gap = w.s.twice().abs_diff(w.s_tilde.twice());
            if gap == 2 {
                assert!(w.weight > 1e-3);
            } else {
                assert!(w.weight < 1e-9, "{:?}", w);
            }
        }
    }
}
