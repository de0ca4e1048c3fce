//! Coupling of two angular momenta j1 ⊗ j2 into total-spin sectors.
//!
//! Ordering conventions used throughout the crate:
//! * uncoupled index `u = k1 * (2 j2 + 1) + k2`, where `k = j − m` (projections descend);
//! * coupled index runs over sectors with S descending, then M descending inside a sector.
//!
//! The transform is block-diagonal in M = m1 + m2, so it is stored as one small
//! real orthogonal matrix per M rather than as the dense unitary.

use ndarray::{Array1, Array2};

use super::block_operator::BlockMatrix;
use super::cg::{cg_exact, table_size, with_tables};
use super::spin::SpinQuantum;
use crate::linalg::{c, C64};

/// The coupling matrix restricted to fixed total projection M.
#[derive(Clone, Debug)]
pub struct MBlock {
    pub twice_m: i32,
    /// Sectors with S ≥ |M|, descending.
    pub sectors: Vec<usize>,
    /// Uncoupled indices with m1 + m2 = M, by descending m1.
    pub uncoupled: Vec<usize>,
    /// `matrix[(r, p)] = ⟨j1 m1; j2 m2 | S_r M⟩`.
    pub matrix: Array2<f64>,
}

#[derive(Clone, Debug)]
pub struct CoupledBasisMap {
    pub j1: SpinQuantum,
    pub j2: SpinQuantum,
    sectors: Vec<SpinQuantum>,
    offsets: Vec<usize>,
    blocks: Vec<MBlock>,
    /// For each uncoupled index: (M block, position inside that block).
    position: Vec<(usize, usize)>,
}

pub fn couple_basis(j1: SpinQuantum, j2: SpinQuantum) -> CoupledBasisMap {
    let sectors = SpinQuantum::coupled_sectors(j1, j2);
    let mut offsets = Vec::with_capacity(sectors.len());
    let mut acc = 0;
    for s in &sectors {
        offsets.push(acc);
        acc += s.dim();
    }
    let (d1, d2) = (j1.dim(), j2.dim());
    let tmax = (j1.twice() + j2.twice()) as i32;
    let mut blocks = Vec::new();
    let mut position = vec![(0, 0); d1 * d2];
    with_tables(table_size(j1, j2), |t| {
        let mut tm = tmax;
        while tm >= -tmax {
            let mut uncoupled = Vec::new();
            let mut projections = Vec::new();
            for k1 in 0..d1 {
                let tm1 = j1.twice_m(k1);
                if let Some(k2) = j2.index_of(tm - tm1) {
                    position[k1 * d2 + k2] = (blocks.len(), uncoupled.len());
                    uncoupled.push(k1 * d2 + k2);
                    projections.push((tm1, tm - tm1));
                }
            }
            let secs: Vec<usize> = (0..sectors.len())
                .filter(|&i| sectors[i].twice() as i32 >= tm.abs())
                .collect();
            let matrix = Array2::from_shape_fn((secs.len(), uncoupled.len()), |(r, p)| {
                let (tm1, tm2) = projections[p];
                cg_exact(t, j1, tm1, j2, tm2, sectors[secs[r]], tm)
            });
            blocks.push(MBlock {
                twice_m: tm,
                sectors: secs,
                uncoupled,
                matrix,
            });
            tm -= 2;
        }
    });
    CoupledBasisMap {
        j1,
        j2,
        sectors,
        offsets,
        blocks,
        position,
    }
}

impl CoupledBasisMap {
    pub fn dim(&self) -> usize {
        self.j1.dim() * self.j2.dim()
    }

    /// Sectors in descending order.
    pub fn sectors(&self) -> &[SpinQuantum] {
        &self.sectors
    }

    pub fn sector_index(&self, s: SpinQuantum) -> Option<usize> {
        self.sectors.iter().position(|&x| x == s)
    }

    pub fn blocks(&self) -> &[MBlock] {
        &self.blocks
    }

    /// Row of the dense unitary holding |S, M⟩.
    pub fn coupled_index(&self, s: SpinQuantum, twice_m: i32) -> Option<usize> {
        let i = self.sector_index(s)?;
        Some(self.offsets[i] + s.index_of(twice_m)?)
    }

    pub fn uncoupled_index(&self, k1: usize, k2: usize) -> usize {
        k1 * self.j2.dim() + k2
    }

    /// Dense coupled-from-uncoupled unitary (real in the Condon–Shortley convention).
    pub fn unitary(&self) -> Array2<C64> {
        let n = self.dim();
        let mut u = Array2::zeros((n, n));
        for b in &self.blocks {
            for (r, &si) in b.sectors.iter().enumerate() {
                let s = self.sectors[si];
                let row = self.offsets[si] + s.index_of(b.twice_m).expect("sector admits M");
                for (p, &col) in b.uncoupled.iter().enumerate() {
                    u[[row, col]] = c(b.matrix[[r, p]]);
                }
            }
        }
        u
    }

    /// Splits an uncoupled state vector into per-sector amplitude vectors.
    pub fn couple_vector(&self, psi: &[C64]) -> Vec<Array1<C64>> {
        assert_eq!(
            psi.len(),
            self.dim(),
            "state length must match the product dimension"
        );
        let mut out: Vec<Array1<C64>> = self
            .sectors
            .iter()
            .map(|s| Array1::zeros(s.dim()))
            .collect();
        for b in &self.blocks {
            for (r, &si) in b.sectors.iter().enumerate() {
                let k = self.sectors[si]
                    .index_of(b.twice_m)
                    .expect("sector admits M");
                out[si][k] = b
                    .uncoupled
                    .iter()
                    .enumerate()
                    .map(|(p, &u)| psi[u] * b.matrix[[r, p]])
                    .sum();
            }
        }
        out
    }

    /// Inverse of [`couple_vector`](Self::couple_vector).
    pub fn uncouple_vector(&self, parts: &[Array1<C64>]) -> Array1<C64> {
        let mut psi = Array1::zeros(self.dim());
        for b in &self.blocks {
            for (p, &u) in b.uncoupled.iter().enumerate() {
                psi[u] = b
                    .sectors
                    .iter()
                    .enumerate()
                    .map(|(r, &si)| {
                        let k = self.sectors[si]
                            .index_of(b.twice_m)
                            .expect("sector admits M");
                        parts[si][k] * b.matrix[[r, p]]
                    })
                    .sum();
            }
        }
        psi
    }

    /// Expresses an operator given by its nonzero uncoupled entries
    /// `(row, col, value)` in the coupled basis, as sector blocks.
    ///
    /// Entries are grouped by the pair of M blocks they connect and conjugated
    /// with small dense products, so the cost stays polynomial in j.
    pub fn conjugate(&self, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> BlockMatrix {
        use std::collections::BTreeMap;
        let mut grouped: BTreeMap<(usize, usize), Array2<C64>> = BTreeMap::new();
        for (u, v, val) in entries {
            let (bu, pu) = self.position[u];
            let (bv, pv) = self.position[v];
            let shape = (
                self.blocks[bu].uncoupled.len(),
                self.blocks[bv].uncoupled.len(),
            );
            grouped
                .entry((bu, bv))
                .or_insert_with(|| Array2::zeros(shape))[[pu, pv]] += val;
        }
        let mut out = BlockMatrix::new(self.j1, self.j2);
        for ((bu, bv), sub) in grouped {
            let (a, b) = (&self.blocks[bu], &self.blocks[bv]);
            let left = a.matrix.mapv(c);
            let right = b.matrix.t().mapv(c);
            let r = left.dot(&sub).dot(&right);
            for (ri, &si) in a.sectors.iter().enumerate() {
                let s = self.sectors[si];
                let ki = s.index_of(a.twice_m).expect("sector admits M");
                for (rj, &sj) in b.sectors.iter().enumerate() {
                    let sp = self.sectors[sj];
                    let kj = sp.index_of(b.twice_m).expect("sector admits M");
                    out.block_mut_or_zero(s, sp)[[ki, kj]] += r[[ri, rj]];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, identity, max_abs};

    fn sq(t: u32) -> SpinQuantum {
        SpinQuantum::from_twice(t)
    }

    /// Independent construction: start from the stretched state of each sector,
    /// lower with J₋ and orthogonalize against higher sectors (Gram–Schmidt).
    fn lowering_oracle(j1: SpinQuantum, j2: SpinQuantum) -> Array2<f64> {
        use crate::angular_momentum::ops::raising_element;
        let (d1, d2) = (j1.dim(), j2.dim());
        let n = d1 * d2;
        let lower = |v: &Array1<f64>| {
            let mut out = Array1::<f64>::zeros(n);
            for k1 in 0..d1 {
                for k2 in 0..d2 {
                    let x = v[k1 * d2 + k2];
                    if x == 0.0 {
                        continue;
                    }
                    if k1 + 1 < d1 {
                        out[(k1 + 1) * d2 + k2] += x * raising_element(j1, j1.twice_m(k1 + 1));
                    }
                    if k2 + 1 < d2 {
                        out[k1 * d2 + k2 + 1] += x * raising_element(j2, j2.twice_m(k2 + 1));
                    }
                }
            }
            out
        };
        let mut rows: Vec<(i32, Array1<f64>)> = Vec::new();
        let mut result = Vec::new();
        for s in SpinQuantum::coupled_sectors(j1, j2) {
            let ts = s.twice() as i32;
            // Stretched state |S, S>: support on m1 + m2 = S, orthogonal to
            // every previously built state with the same M.
            let mut top = None;
            for k1 in 0..d1 {
                let tm1 = j1.twice_m(k1);
                if let Some(k2) = j2.index_of(ts - tm1) {
                    let mut v = Array1::zeros(n);
                    v[k1 * d2 + k2] = 1.0;
                    for (tm, w) in &rows {
                        if *tm == ts {
                            let p = w.dot(&v);
                            v = v - w * p;
                        }
                    }
                    let nv = v.dot(&v).sqrt();
                    if nv > 1e-8 {
                        top = Some(v / nv);
                        break;
                    }
                }
            }
            let mut v = top.expect("stretched state exists");
            // Condon–Shortley: ⟨j1 j1; j2 (S − j1) | S S⟩ > 0.
            let k2 = j2.index_of(ts - j1.twice() as i32);
            let lead = match k2 {
                Some(k2) => v[k2],
                None => 0.0,
            };
            if lead < 0.0 {
                v = -v;
            }
            let mut tm = ts;
            loop {
                rows.push((tm, v.clone()));
                result.push(v.clone());
                if tm == -ts {
                    break;
                }
                let w = lower(&v);
                let nw = w.dot(&w).sqrt();
                v = w / nw;
                tm -= 2;
            }
        }
        let mut u = Array2::zeros((n, n));
        for (i, r) in result.iter().enumerate() {
            u.row_mut(i).assign(r);
        }
        u
    }

    #[test]
    fn two_spin_halves() {
        let m = couple_basis(SpinQuantum::HALF, SpinQuantum::HALF);
        let u = m.unitary();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = m.coupled_index(sq(0), 0).unwrap();
        assert_eq!(singlet, 3);
        let expect = [0.0, r, -r, 0.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((u[[singlet, k]].re - e).abs() < 1e-15);
        }
        assert_eq!(m.sectors(), &[sq(2), sq(0)]);
    }

    #[test]
    fn trivial_second_spin_gives_identity() {
        let m = couple_basis(sq(5), sq(0));
        let u = m.unitary();
        assert!(max_abs(&(u - identity(6)).view()) < 1e-15);
    }

    #[test]
    fn spin_one_pair_dimensions() {
        let m = couple_basis(sq(2), sq(2));
        assert_eq!(m.sectors(), &[sq(4), sq(2), sq(0)]);
        assert_eq!(m.dim(), 9);
    }

    #[test]
    fn matches_lowering_oracle() {
        for (a, b) in [(1, 1), (2, 1), (3, 2), (4, 4), (5, 2), (6, 3)] {
            let (j1, j2) = (sq(a), sq(b));
            let u = couple_basis(j1, j2).unitary().mapv(|z| z.re);
            let o = lowering_oracle(j1, j2);
            let err = (&u - &o).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(err < 1e-12, "j1={a}/2 j2={b}/2 err={err}");
        }
    }

    #[test]
    fn unitary_and_vector_round_trip() {
        let m = couple_basis(sq(7), sq(4));
        let u = m.unitary();
        let e = u.dot(&dagger(&u.view())) - identity(m.dim());
        assert!(max_abs(&e.view()) < 1e-12);
        let psi: Vec<C64> = (0..m.dim())
            .map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let parts = m.couple_vector(&psi);
        let back = m.uncouple_vector(&parts);
        for k in 0..m.dim() {
            assert!((back[k] - psi[k]).norm() < 1e-13);
        }
        let dense = u.dot(&Array1::from(psi.clone()));
        let idx = m.coupled_index(sq(5), 1).unwrap();
        assert!(
            (dense[idx] - parts[m.sector_index(sq(5)).unwrap()][sq(5).index_of(1).unwrap()]).norm()
                < 1e-13
        );
    }
}
