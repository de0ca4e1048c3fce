//! Brute-force Lindblad evolution on the full 2ⁿ-dimensional space.
//!
//! Qubit basis states are bit strings with spin 0 as the most significant
//! bit and bit value 0 meaning up, so index 0 is all spins up. This matches
//! the descending-m ordering of the collective operators.

use ndarray::Array2;

use crate::angular_momentum::{couple_basis, BlockMatrix, Component, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{c, dagger, hermitian_eigenvalues, kron, trace, C64, I};
use crate::liouville::{AnticommutatorOrdering, LindbladSpec};
use crate::ode::{as_complex, as_complex_mut, as_real, integrate, IntegrationControls};
use crate::state_prep::{coherent_amplitudes, BlockDensityMatrix, EnsembleSpec};

pub const MAX_OPERATOR_SPINS: u32 = 10;
pub const MAX_EVOLUTION_SPINS: u32 = 8;
pub const LEAKAGE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct FullState {
    pub n: u32,
    pub rho: Array2<C64>,
}

impl FullState {
    /// Product of single-spin coherent states, spin by spin.
    pub fn product(spec: &EnsembleSpec) -> Result<Self> {
        let n = spec.n_total();
        if n > MAX_OPERATOR_SPINS {
            return Err(Error::Resource(format!("oracle state with {n} spins")));
        }
        let mut psi = Array2::from_elem((1, 1), c(1.0));
        for member in &spec.subensembles {
            let one = coherent_amplitudes(SpinQuantum::from_twice(1), member.params);
            let col = one.insert_axis(ndarray::Axis(1));
            for _ in 0..member.n_spins {
                psi = kron(&psi.view(), &col.view());
            }
        }
        let rho = psi.dot(&dagger(&psi.view()));
        Ok(FullState { n, rho })
    }
}

fn pauli(comp: Component) -> Array2<C64> {
    let z = c(0.0);
    let h = c(0.5);
    match comp {
        Component::X => ndarray::array![[z, h], [h, z]],
        Component::Y => ndarray::array![[z, -I * 0.5], [I * 0.5, z]],
        Component::Z => ndarray::array![[h, z], [z, -h]],
        Component::Plus => ndarray::array![[z, c(1.0)], [z, z]],
        Component::Minus => ndarray::array![[z, z], [c(1.0), z]],
    }
}

/// Σ_i σ_i/2 (or σ_i^± for the ladder components) on n spins.
pub fn full_collective_op(n: u32, comp: Component) -> Result<Array2<C64>> {
    if n == 0 || n > MAX_OPERATOR_SPINS {
        return Err(Error::Resource(format!(
            "full operators need 1 <= n <= {MAX_OPERATOR_SPINS}, got {n}"
        )));
    }
    let p = pauli(comp);
    let id = crate::linalg::identity(2);
    let d = 1usize << n;
    let mut out = Array2::zeros((d, d));
    for site in 0..n {
        let mut m = Array2::from_elem((1, 1), c(1.0));
        for k in 0..n {
            let factor = if k == site { p.view() } else { id.view() };
            m = kron(&m.view(), &factor);
        }
        out += &m;
    }
    Ok(out)
}

struct FullGenerator {
    d: usize,
    h: Array2<C64>,
    jumps: Vec<Array2<C64>>,
    rates: Array2<C64>,
    anti: Array2<C64>,
}

impl FullGenerator {
    fn new(spec: &LindbladSpec, n: u32) -> Result<Self> {
        spec.validate()?;
        let ops: Vec<Array2<C64>> = [
            Component::X,
            Component::Y,
            Component::Z,
            Component::Plus,
            Component::Minus,
        ]
        .iter()
        .map(|&k| full_collective_op(n, k))
        .collect::<Result<_>>()?;
        let get = |k: Component| &ops[k as usize];
        let d = 1usize << n;
        let mut h = Array2::zeros((d, d));
        for t in &spec.hamiltonian {
            let mut m = crate::linalg::identity(d);
            for a in &t.axes {
                m = m.dot(get((*a).into()));
            }
            let mut w = t.coefficient;
            if t.n_power_scaling {
                w /= (spec.n_total as f64).powi(t.axes.len() as i32 - 1);
            }
            h.scaled_add(w, &m);
        }
        let jumps: Vec<Array2<C64>> = spec
            .jumps
            .iter()
            .map(|j| {
                let mut m = Array2::zeros((d, d));
                for (k, w) in &j.terms {
                    m.scaled_add(*w, get(*k));
                }
                m
            })
            .collect();
        let rates = spec.rate_matrix();
        let mut anti = Array2::zeros((d, d));
        for a in 0..jumps.len() {
            for b in 0..jumps.len() {
                let g = rates[[a, b]];
                if g == c(0.0) {
                    continue;
                }
                let k = match spec.ordering {
                    AnticommutatorOrdering::Standard => dagger(&jumps[b].view()).dot(&jumps[a]),
                    AnticommutatorOrdering::Reversed => jumps[a].dot(&dagger(&jumps[b].view())),
                };
                anti.scaled_add(g * 0.5, &k);
            }
        }
        Ok(FullGenerator {
            d,
            h,
            jumps,
            rates,
            anti,
        })
    }

    fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let mut out = (self.h.dot(rho) - rho.dot(&self.h)).mapv(|z| -I * z);
        out -= &self.anti.dot(rho);
        out -= &rho.dot(&self.anti);
        for a in 0..self.jumps.len() {
            let left = self.jumps[a].dot(rho);
            for b in 0..self.jumps.len() {
                let g = self.rates[[a, b]];
                if g != c(0.0) {
                    out.scaled_add(g, &left.dot(&dagger(&self.jumps[b].view())));
                }
            }
        }
        out
    }
}

/// Integrates the full Lindblad equation (rtol 1e−10, atol 1e−12).
pub fn full_lindblad_evolve(
    spec: &LindbladSpec,
    rho0: &FullState,
    times: &[f64],
) -> Result<Vec<FullState>> {
    if rho0.n > MAX_EVOLUTION_SPINS {
        return Err(Error::Resource(format!(
            "dense oracle evolution is limited to {MAX_EVOLUTION_SPINS} spins, got {}",
            rho0.n
        )));
    }
    if spec.n_total != rho0.n {
        return Err(Error::domain(
            "Lindbladian and state disagree on the number of spins",
        ));
    }
    let gen = FullGenerator::new(spec, rho0.n)?;
    let d = gen.d;
    let sys = (2 * d * d, |_t: f64, y: &[f64], dy: &mut [f64]| {
        let rho = Array2::from_shape_vec((d, d), as_complex(y).to_vec()).expect("shape");
        as_complex_mut(dy).copy_from_slice(gen.apply(&rho).as_slice().expect("standard layout"));
    });
    let rho_std = rho0.rho.as_standard_layout().to_owned();
    let y0 = as_real(rho_std.as_slice().expect("standard layout")).to_vec();
    let mut out = Vec::with_capacity(times.len());
    integrate(
        &sys,
        &y0,
        times,
        &IntegrationControls::new(1e-10, 1e-12),
        |_, _, y| {
            out.push(FullState {
                n: rho0.n,
                rho: Array2::from_shape_vec((d, d), as_complex(y).to_vec()).expect("shape"),
            });
            Ok(())
        },
    )?;
    Ok(out)
}

/// Isometry from the symmetric (Dicke) subspace of n spins into the qubit space.
fn dicke_isometry(n: u32) -> Array2<C64> {
    let d = 1usize << n;
    let mut v = Array2::zeros((d, n as usize + 1));
    let mut counts = vec![0usize; n as usize + 1];
    for b in 0..d {
        counts[b.count_ones() as usize] += 1;
    }
    for b in 0..d {
        let k = b.count_ones() as usize;
        v[[b, k]] = c(1.0 / (counts[k] as f64).sqrt());
    }
    v
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub blocks: BlockDensityMatrix,
    /// Weight outside the product of the two symmetric subspaces.
    pub leakage: f64,
}

/// Restricts to the symmetric subspace of each subensemble, changes to the
/// coupled basis, and splits into (S, S') blocks.
pub fn project_full_to_blocks(rho: &FullState, split: (u32, u32)) -> Result<Projection> {
    let (n1, n2) = split;
    if n1 + n2 != rho.n || n1 == 0 || n2 == 0 {
        return Err(Error::domain(format!(
            "split {split:?} does not partition {} spins",
            rho.n
        )));
    }
    let v = kron(&dicke_isometry(n1).view(), &dicke_isometry(n2).view());
    let inner = dagger(&v.view()).dot(&rho.rho).dot(&v);
    let total = trace(&rho.rho.view()).re;
    let leakage = (total - trace(&inner.view()).re).abs();
    if leakage > LEAKAGE_TOL {
        return Err(Error::Consistency(format!(
            "state leaks {leakage:e} out of the symmetric subspaces"
        )));
    }
    let map = couple_basis(
        SpinQuantum::from_spin_count(n1),
        SpinQuantum::from_spin_count(n2),
    );
    let u = map.unitary();
    let coupled = u.dot(&inner).dot(&dagger(&u.view()));
    Ok(Projection {
        blocks: BlockMatrix::from_dense(map.j1, map.j2, &coupled)?,
        leakage,
    })
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(rho: &FullState) -> Result<f64> {
    Ok(hermitian_eigenvalues(&rho.rho.view())?
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::state_prep::{initial_block_state, CoherentParams, EnsembleMember};

    #[test]
    fn single_and_pair_operators() {
        let sx = full_collective_op(1, Component::X).unwrap();
        assert_eq!(sx[[0, 1]], c(0.5));
        let sz = full_collective_op(2, Component::Z).unwrap();
        let diag: Vec<f64> = sz.diag().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, 0.0, 0.0, -1.0]);
        assert!(full_collective_op(11, Component::Z).is_err());
    }

    #[test]
    fn casimir_multiplicities_for_four_spins() {
        let ops: Vec<_> = [Component::X, Component::Y, Component::Z]
            .iter()
            .map(|&k| full_collective_op(4, k).unwrap())
            .collect();
        let cas = ops
            .iter()
            .fold(Array2::<C64>::zeros((16, 16)), |acc, o| acc + o.dot(o));
        let ev = hermitian_eigenvalues(&cas.view()).unwrap();
        let count = |v: f64| ev.iter().filter(|x| (*x - v).abs() < 1e-10).count();
        assert_eq!((count(6.0), count(2.0), count(0.0)), (5, 9, 2));
    }

    #[test]
    fn product_state_projects_onto_initial_blocks() {
        let p1 = CoherentParams::new(1.1, 0.3).unwrap();
        let p2 = CoherentParams::new(0.4, 2.5).unwrap();
        let spec = EnsembleSpec::new(vec![
            EnsembleMember {
                n_spins: 2,
                params: p1,
            },
            EnsembleMember {
                n_spins: 3,
                params: p2,
            },
        ])
        .unwrap();
        let full = FullState::product(&spec).unwrap();
        let proj = project_full_to_blocks(&full, (2, 3)).unwrap();
        assert!(proj.leakage < 1e-13);
        let direct = initial_block_state(&spec).unwrap();
        let diff = proj.blocks.to_dense() - direct.to_dense();
        assert!(max_abs(&diff.view()) < 1e-12);
    }

    #[test]
    fn non_symmetric_state_is_rejected() {
        let mut rho = Array2::zeros((4, 4));
        // singlet of two spins in the same subensemble
        let s = 0.5;
        rho[[1, 1]] = c(s);
        rho[[2, 2]] = c(s);
        rho[[1, 2]] = c(-s);
        rho[[2, 1]] = c(-s);
        let st = FullState { n: 2, rho };
        assert!(matches!(
            project_full_to_blocks(&st, (2, 0)),
            Err(Error::Domain(_))
        ));
        let st3 = FullState {
            n: 3,
            rho: kron(
                &st.rho.view(),
                &ndarray::array![[c(1.0), c(0.0)], [c(0.0), c(0.0)]].view(),
            ),
        };
        assert!(matches!(
            project_full_to_blocks(&st3, (2, 1)),
            Err(Error::Consistency(_))
        ));
    }
}
