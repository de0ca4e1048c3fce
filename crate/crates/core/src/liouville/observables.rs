use crate::angular_momentum::{BlockOperator, SpinQuantum};
use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use crate::state_prep::BlockDensityMatrix;

fn check(op: &BlockOperator, rho: &BlockDensityMatrix) -> Result<()> {
    if op.j1 != rho.j1 || op.j2 != rho.j2 {
        return Err(Error::domain(format!(
            "operator on {} ⊗ {} applied to a state on {} ⊗ {}",
            op.j1, op.j2, rho.j1, rho.j2
        )));
    }
    Ok(())
}

/// Tr(op_{S',S} ρ_{S,S'}): the contribution of one block.
pub fn block_expectation(
    op: &BlockOperator,
    rho: &BlockDensityMatrix,
    s: SpinQuantum,
    sp: SpinQuantum,
) -> Result<C64> {
    check(op, rho)?;
    let (Some(o), Some(r)) = (op.get(sp, s), rho.get(s, sp)) else {
        return Ok(c(0.0));
    };
    let mut acc = c(0.0);
    for i in 0..o.nrows() {
        for k in 0..o.ncols() {
            acc += o[[i, k]] * r[[k, i]];
        }
    }
    Ok(acc)
}

/// Tr(op ρ) summed over all blocks.
pub fn expectation(op: &BlockOperator, rho: &BlockDensityMatrix) -> Result<C64> {
    check(op, rho)?;
    let mut acc = c(0.0);
    for (s, sp) in rho.keys() {
        acc += block_expectation(op, rho, *s, *sp)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular_momentum::{
        antisymmetric_observable, couple_basis, symmetric_observable, BlockMatrix, Component,
    };
    use crate::state_prep::{block_state_with_map, CoherentParams, EnsembleMember, EnsembleSpec};

    #[test]
    fn identity_and_symmetric_z() {
        let p = CoherentParams::new(0.0, 0.0).unwrap();
        let spec = EnsembleSpec::new(vec![
            EnsembleMember {
                n_spins: 3,
                params: p,
            },
            EnsembleMember {
                n_spins: 5,
                params: p,
            },
        ])
        .unwrap();
        let map = couple_basis(SpinQuantum::from_twice(3), SpinQuantum::from_twice(5));
        let (rho, _) = block_state_with_map(&spec, &map).unwrap();
        let id = BlockMatrix::identity(&map);
        assert!((expectation(&id, &rho).unwrap() - c(1.0)).norm() < 1e-14);
        let oz = symmetric_observable(Component::Z, &map);
        assert!((expectation(&oz, &rho).unwrap() - c(-4.0)).norm() < 1e-13);
    }

    #[test]
    fn antisymmetric_x_sees_only_neighbouring_blocks() {
        let spec = EnsembleSpec::split_equator(4, 2.0).unwrap();
        let map = couple_basis(SpinQuantum::from_twice(4), SpinQuantum::from_twice(4));
        let (rho, _) = block_state_with_map(&spec, &map).unwrap();
        let ax = antisymmetric_observable(Component::X, &map);
        let total = expectation(&ax, &rho).unwrap();
        let mut near = c(0.0);
        for (s, sp) in rho.keys() {
            let v = block_expectation(&ax, &rho, *s, *sp).unwrap();
            if s.twice().abs_diff(sp.twice()) == 2 {
                near += v;
            } else {
                assert!(v.norm() < 1e-12);
            }
        }
        assert!((total - near).norm() < 1e-12);
        // ⟨S1x − S2x⟩ = 2(1 − cos 2)
        assert!((total.re - 2.0 * (1.0 - 2f64.cos())).abs() < 1e-12);
    }
}
