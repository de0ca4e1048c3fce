//! The Lindblad generator restricted to one (S, S') block.
//!
//! Blocks are vectorized by column stacking, vec(X)[i + j·d_S] = X[i, j], so
//! that vec(A X B) = (Bᵀ ⊗ A) vec(X).

use ndarray::{linalg::general_mat_mul, Array2, ArrayView2, ArrayViewMut2, ShapeBuilder};

use super::spec::LindbladSpec;
use crate::angular_momentum::{SectorPair, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{c, dagger, C64, I};

/// Matrix-free form: L(X) = G X + X R + Σ γ A X B.
#[derive(Clone, Debug)]
pub struct BlockGenerator {
    pub s: SpinQuantum,
    pub sp: SpinQuantum,
    left: Array2<C64>,
    right: Array2<C64>,
    sandwich: Vec<(C64, Array2<C64>, Array2<C64>)>,
}

/// Dense generator of one block.
#[derive(Clone, Debug)]
pub struct BlockSuperoperator {
    pub sector_pair: SectorPair,
    pub matrix: Array2<C64>,
}

impl BlockGenerator {
    pub fn new(spec: &LindbladSpec, s: SpinQuantum, sp: SpinQuantum) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_total;
        if s.twice() > n || sp.twice() > n || (n - s.twice()) % 2 != 0 || (n - sp.twice()) % 2 != 0
        {
            return Err(Error::domain(format!(
                "({s}, {sp}) is not a sector pair for N = {n}"
            )));
        }
        let left_m = spec.sector_matrices(s);
        let right_m = if s == sp {
            None
        } else {
            Some(spec.sector_matrices(sp))
        };
        let right_m = right_m.as_ref().unwrap_or(&left_m);
        let gamma = spec.rate_matrix();

        let mut left = left_m.h.mapv(|z| -I * z);
        let mut right = right_m.h.mapv(|z| I * z);
        let mut sandwich = Vec::new();
        let nj = spec.jumps.len();
        for a in 0..nj {
            for b in 0..nj {
                let g = gamma[[a, b]];
                if g == c(0.0) {
                    continue;
                }
                let k_left = spec.anticommutator_operator(&left_m.jumps[a], &left_m.jumps[b]);
                let k_right = spec.anticommutator_operator(&right_m.jumps[a], &right_m.jumps[b]);
                left.scaled_add(-0.5 * g, &k_left);
                right.scaled_add(-0.5 * g, &k_right);
                sandwich.push((g, left_m.jumps[a].clone(), dagger(&right_m.jumps[b].view())));
            }
        }
        Ok(BlockGenerator {
            s,
            sp,
            left,
            right,
            sandwich,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.s.dim(), self.sp.dim())
    }

    pub fn dim(&self) -> usize {
        self.s.dim() * self.sp.dim()
    }

    /// Writes L(X) into `out`; both are column-stacked vectors.
    pub fn apply_vec(&self, x: &[C64], out: &mut [C64]) {
        let (r, cl) = self.shape();
        let xv = ArrayView2::from_shape((r, cl).f(), x).expect("length matches block");
        let mut ov = ArrayViewMut2::from_shape((r, cl).f(), out).expect("length matches block");
        let one = c(1.0);
        general_mat_mul(one, &self.left, &xv, c(0.0), &mut ov);
        general_mat_mul(one, &xv, &self.right, one, &mut ov);
        for (g, a, b) in &self.sandwich {
            let ax = a.dot(&xv);
            general_mat_mul(*g, &ax, b, one, &mut ov);
        }
    }

    pub fn apply(&self, x: &Array2<C64>) -> Array2<C64> {
        let v = crate::linalg::vectorize(&x.view());
        let mut out = vec![c(0.0); v.len()];
        self.apply_vec(v.as_slice().expect("contiguous"), &mut out);
        crate::linalg::unvectorize(&out, self.s.dim(), self.sp.dim())
    }

    /// Nonzero entries of the superoperator, sorted by (row, col) and merged.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let (r, cl) = self.shape();
        let nz = |m: &Array2<C64>| -> Vec<(usize, usize, C64)> {
            m.indexed_iter()
                .filter(|(_, v)| **v != c(0.0))
                .map(|((i, j), v)| (i, j, *v))
                .collect()
        };
        let mut t = Vec::new();
        for (i, k, v) in nz(&self.left) {
            for j in 0..cl {
                t.push((i + j * r, k + j * r, v));
            }
        }
        for (l, j, v) in nz(&self.right) {
            for i in 0..r {
                t.push((i + j * r, i + l * r, v));
            }
        }
        for (g, a, b) in &self.sandwich {
            let (na, nb) = (nz(a), nz(b));
            for &(i, k, av) in &na {
                for &(l, j, bv) in &nb {
                    t.push((i + j * r, k + l * r, *g * av * bv));
                }
            }
        }
        t.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(t.len());
        for (i, j, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|x| x.2 != c(0.0));
        merged
    }

    /// Index sets of the connected components of the sparsity graph, each
    /// sorted, ordered by their smallest index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(self.dim(), &self.triplets())
    }

    pub fn dense(&self) -> Array2<C64> {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for (i, j, v) in self.triplets() {
            m[[i, j]] = v;
        }
        m
    }
}

pub(crate) fn components_of(d: usize, triplets: &[(usize, usize, C64)]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j, _) in triplets {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..d {
        let r = find(&mut parent, x);
        groups.entry(r).or_default().push(x);
    }
    groups.into_values().collect()
}

/// Dense restriction of a sparse operator to an index set.
pub(crate) fn dense_restriction(
    triplets: &[(usize, usize, C64)],
    d: usize,
    idx: &[usize],
) -> Array2<C64> {
    let mut pos = vec![usize::MAX; d];
    for (k, &i) in idx.iter().enumerate() {
        pos[i] = k;
    }
    let n = idx.len();
    let mut m = Array2::zeros((n, n));
    for &(i, j, v) in triplets {
        if pos[i] != usize::MAX && pos[j] != usize::MAX {
            m[[pos[i], pos[j]]] = v;
        }
    }
    m
}

pub fn build_block_superoperator(
    spec: &LindbladSpec,
    s: SpinQuantum,
    sp: SpinQuantum,
) -> Result<BlockSuperoperator> {
    let g = BlockGenerator::new(spec, s, sp)?;
    Ok(BlockSuperoperator {
        sector_pair: (s, sp),
        matrix: g.dense(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular_momentum::{Axis, Component};
    use crate::linalg::{kron, max_abs, trace, vectorize};
    use crate::liouville::spec::{HamiltonianTerm, JumpOperator};

    fn sq(t: u32) -> SpinQuantum {
        SpinQuantum::from_twice(t)
    }

    fn mixed_spec() -> LindbladSpec {
        LindbladSpec::new(6)
            .with_term(HamiltonianTerm::new(vec![Axis::X], 0.7))
            .with_term(HamiltonianTerm::new(vec![Axis::Z, Axis::Z], 0.3).scaled())
            .with_jump(JumpOperator::single(Component::Minus), 0.4)
            .with_jump(
                JumpOperator {
                    terms: vec![
                        (Component::Z, c(1.0)),
                        (Component::Plus, C64::new(0.2, 0.1)),
                    ],
                },
                0.25,
            )
    }

    #[test]
    fn sparse_matches_kronecker_formula() {
        let spec = mixed_spec();
        let (s, sp) = (sq(6), sq(4));
        let g = BlockGenerator::new(&spec, s, sp).unwrap();
        let (hs, hsp) = (spec.hamiltonian_matrix(s), spec.hamiltonian_matrix(sp));
        let ms = spec.sector_matrices(s);
        let msp = spec.sector_matrices(sp);
        let (is, isp) = (
            crate::linalg::identity(s.dim()),
            crate::linalg::identity(sp.dim()),
        );
        let mut l = (kron(&isp.view(), &hs.view()) - kron(&hsp.t(), &is.view())).mapv(|z| -I * z);
        for (k, rate) in [(0usize, 0.4), (1, 0.25)] {
            let (a, b) = (&ms.jumps[k], &msp.jumps[k]);
            let kl = dagger(&a.view()).dot(a);
            let kr = dagger(&b.view()).dot(b);
            l = l + kron(&b.mapv(|z| z.conj()).view(), &a.view()).mapv(|z| z * rate)
                - kron(&isp.view(), &kl.view()).mapv(|z| z * 0.5 * rate)
                - kron(&kr.t(), &is.view()).mapv(|z| z * 0.5 * rate);
        }
        assert!(max_abs(&(g.dense() - &l).view()) < 1e-13);

        let x = Array2::from_shape_fn((s.dim(), sp.dim()), |(i, j)| {
            C64::new((i + 2 * j) as f64 * 0.1, (i as f64) - 0.3 * j as f64)
        });
        let via_apply = vectorize(&g.apply(&x).view());
        let via_dense = l.dot(&vectorize(&x.view()));
        assert!(max_abs(&(via_apply - via_dense).insert_axis(ndarray::Axis(1)).view()) < 1e-12);
    }

    #[test]
    fn diagonal_block_is_trace_annihilating() {
        let spec = mixed_spec();
        let s = sq(4);
        let g = BlockGenerator::new(&spec, s, s).unwrap();
        let x = Array2::from_shape_fn((5, 5), |(i, j)| {
            C64::new((i * j) as f64 + 1.0, i as f64 - j as f64)
        });
        let x = &x + &dagger(&x.view());
        assert!(trace(&g.apply(&x).view()).norm() < 1e-12);
    }

    #[test]
    fn pure_dephasing_spectrum() {
        let spec = LindbladSpec::new(4).with_jump(JumpOperator::single(Component::Z), 0.8);
        let g = BlockGenerator::new(&spec, sq(4), sq(4)).unwrap();
        let d = g.dense();
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                if i != j {
                    assert_eq!(d[[i, j]], c(0.0));
                }
            }
        }
        for (k, l) in (0..5).flat_map(|k| (0..5).map(move |l| (k, l))) {
            let dm = (k as f64) - (l as f64);
            assert!((d[[k + 5 * l, k + 5 * l]].re + 0.4 * dm * dm).abs() < 1e-14);
        }
    }

    #[test]
    fn parity_splits_dicke_like_generator() {
        let spec = LindbladSpec::new(8)
            .with_term(HamiltonianTerm::new(vec![Axis::X, Axis::X], 0.3))
            .with_term(HamiltonianTerm::new(vec![Axis::Z], 0.1))
            .with_jump(
                JumpOperator {
                    terms: vec![(Component::Plus, c(0.2)), (Component::Minus, c(0.5))],
                },
                1.0,
            );
        let g = BlockGenerator::new(&spec, sq(8), sq(6)).unwrap();
        assert_eq!(g.components().len(), 2);
        assert!(BlockGenerator::new(&spec, sq(8), sq(5)).is_err());
    }
}
