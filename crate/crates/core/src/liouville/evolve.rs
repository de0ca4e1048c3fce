use ndarray::{Array1, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expm::expm;
use super::spec::LindbladSpec;
use super::superop::{dense_restriction, BlockGenerator};
use crate::angular_momentum::{SectorPair, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{c, unvectorize, vectorize, C64};
use crate::ode::{as_complex, as_complex_mut, as_real, integrate, IntegrationControls, OdeSystem};
use crate::state_prep::BlockDensityMatrix;

pub const DEFAULT_D_MAX: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMethod {
    /// Propagator up to `d_max`, adaptive integration beyond.
    #[default]
    Auto,
    Propagator,
    Ode,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub method: EvolutionMethod,
    pub d_max: usize,
    pub controls: IntegrationControls,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            method: EvolutionMethod::Auto,
            d_max: DEFAULT_D_MAX,
            controls: IntegrationControls::new(1e-8, 1e-10),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BlockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlockDensityMatrix>,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::domain("time grid must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain(
            "time grid must be finite and strictly increasing",
        ));
    }
    Ok(())
}

struct GeneratorSystem<'a>(&'a BlockGenerator);

impl OdeSystem for GeneratorSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.0.dim()
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        self.0.apply_vec(as_complex(y), as_complex_mut(dy));
    }
}

fn non_finite(t: f64, v: &Array1<C64>) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical {
            time: t,
            reason: "non-finite block entries".into(),
        });
    }
    Ok(())
}

/// Evolves a single (S, S') block, returning it at every grid time.
pub fn evolve_block(
    spec: &LindbladSpec,
    s: SpinQuantum,
    sp: SpinQuantum,
    x0: &Array2<C64>,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<Array2<C64>>> {
    check_grid(times)?;
    if x0.dim() != (s.dim(), sp.dim()) {
        return Err(Error::domain(format!(
            "block ({s}, {sp}) has wrong shape {:?}",
            x0.dim()
        )));
    }
    let gen = BlockGenerator::new(spec, s, sp)?;
    let d = gen.dim();
    let use_propagator = match opts.method {
        EvolutionMethod::Propagator => true,
        EvolutionMethod::Ode => false,
        EvolutionMethod::Auto => d <= opts.d_max,
    };
    let v0 = vectorize(&x0.view());
    let mut out = Vec::with_capacity(times.len());
    out.push(x0.clone());
    if use_propagator {
        let trip = gen.triplets();
        let comps = super::superop::components_of(d, &trip);
        let gens: Vec<Array2<C64>> = comps
            .iter()
            .map(|idx| dense_restriction(&trip, d, idx))
            .collect();
        let mut cache: Vec<(f64, Vec<Array2<C64>>)> = Vec::new();
        let mut v = v0;
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            let hit = cache.iter().position(|(h, _)| (h - dt).abs() <= 1e-12 * dt);
            let idx = match hit {
                Some(i) => i,
                None => {
                    let props = gens
                        .iter()
                        .map(|g| expm(&g.mapv(|z| z * dt)))
                        .collect::<Result<Vec<_>>>()?;
                    cache.push((dt, props));
                    cache.len() - 1
                }
            };
            let props = &cache[idx].1;
            let mut next = Array1::zeros(d);
            for (p, comp) in props.iter().zip(&comps) {
                let sub = Array1::from_iter(comp.iter().map(|&i| v[i]));
                let r = p.dot(&sub);
                for (k, &i) in comp.iter().enumerate() {
                    next[i] = r[k];
                }
            }
            non_finite(w[1], &next)?;
            v = next;
            out.push(unvectorize(
                v.as_slice().expect("contiguous"),
                s.dim(),
                sp.dim(),
            ));
        }
    } else {
        let sys = GeneratorSystem(&gen);
        let y0 = as_real(v0.as_slice().expect("contiguous")).to_vec();
        integrate(&sys, &y0, times, &opts.controls, |i, _t, y| {
            if i > 0 {
                out.push(unvectorize(as_complex(y), s.dim(), sp.dim()));
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// Evolves every block of `rho0` independently; blocks run in parallel and
/// results are assembled in sorted key order.
pub fn evolve_blocks(
    spec: &LindbladSpec,
    rho0: &BlockDensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<BlockTrajectory> {
    check_grid(times)?;
    let n = rho0.j1.twice() + rho0.j2.twice();
    if n != spec.n_total {
        return Err(Error::domain(format!(
            "state has {n} spins but the Lindbladian is for {}",
            spec.n_total
        )));
    }
    let keys: Vec<(SectorPair, Array2<C64>)> = rho0.iter().map(|(k, m)| (*k, m.clone())).collect();
    let evolved: Vec<Result<(SectorPair, Vec<Array2<C64>>)>> = keys
        .par_iter()
        .map(|((s, sp), m)| Ok(((*s, *sp), evolve_block(spec, *s, *sp, m, times, opts)?)))
        .collect();
    let mut states: Vec<BlockDensityMatrix> = times
        .iter()
        .map(|_| BlockDensityMatrix::new(rho0.j1, rho0.j2))
        .collect();
    for r in evolved {
        let ((s, sp), series) = r?;
        for (st, m) in states.iter_mut().zip(series) {
            st.insert(s, sp, m)?;
        }
    }
    Ok(BlockTrajectory {
        times: times.to_vec(),
        states,
    })
}

/// Full trace Σ_S Tr ρ_{S,S}.
pub fn block_trace(rho: &BlockDensityMatrix) -> C64 {
    rho.iter()
        .filter(|((s, sp), _)| s == sp)
        .map(|(_, m)| m.diag().iter().sum::<C64>())
        .fold(c(0.0), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular_momentum::{Axis, Component};
    use crate::linalg::max_abs;
    use crate::liouville::spec::{HamiltonianTerm, JumpOperator};
    use crate::ode::uniform_grid;

    fn sq(t: u32) -> SpinQuantum {
        SpinQuantum::from_twice(t)
    }

    fn spec() -> LindbladSpec {
        LindbladSpec::new(6)
            .with_term(HamiltonianTerm::new(vec![Axis::X], 1.1))
            .with_term(HamiltonianTerm::new(vec![Axis::X, Axis::X], 0.4).scaled())
            .with_jump(JumpOperator::single(Component::Minus), 1.0 / 3.0)
    }

    #[test]
    fn propagator_and_ode_agree() {
        let s = spec();
        let x0 = Array2::from_shape_fn((7, 5), |(i, j)| {
            C64::new(0.1 * i as f64, 0.05 * j as f64 - 0.1)
        });
        let times = uniform_grid(6.0, 60);
        let mut opts = EvolveOptions::default();
        opts.method = EvolutionMethod::Propagator;
        let a = evolve_block(&s, sq(6), sq(4), &x0, &times, &opts).unwrap();
        opts.method = EvolutionMethod::Ode;
        opts.controls = IntegrationControls::new(1e-11, 1e-13);
        let b = evolve_block(&s, sq(6), sq(4), &x0, &times, &opts).unwrap();
        assert_eq!(a[0], x0);
        for (p, q) in a.iter().zip(&b) {
            assert!(max_abs(&(p - q).view()) < 1e-8);
        }
    }

    #[test]
    fn grid_must_start_at_zero() {
        let x0 = Array2::zeros((7, 7));
        let e = evolve_block(
            &spec(),
            sq(6),
            sq(6),
            &x0,
            &[0.5, 1.0],
            &EvolveOptions::default(),
        );
        assert!(matches!(e, Err(Error::Domain(_))));
    }
}
