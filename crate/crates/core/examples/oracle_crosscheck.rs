//! Compare the block engine with brute-force evolution on the full 2^N space.

use std::f64::consts::FRAC_PI_2;

use pibreak::linalg::trace_distance;
use pibreak::liouville::{evolve_blocks, AnticommutatorOrdering, EvolveOptions};
use pibreak::models::{btc_spec, BTCParams};
use pibreak::ode::uniform_grid;
use pibreak::oracle::{full_lindblad_evolve, min_eigenvalue, project_full_to_blocks, FullState};
use pibreak::state_prep::{initial_block_state, CoherentParams, EnsembleMember, EnsembleSpec};

fn main() -> pibreak::Result<()> {
    let ens = EnsembleSpec::new(vec![
        EnsembleMember {
            n_spins: 3,
            params: CoherentParams::new(FRAC_PI_2, 0.0)?,
        },
        EnsembleMember {
            n_spins: 2,
            params: CoherentParams::new(0.8, 2.0)?,
        },
    ])?;
    let p = BTCParams {
        omega_x: 1.5,
        kappa: 1.0,
        j_xx: 0.2,
        n_total: ens.n_total(),
    };
    let spec = btc_spec(&p, AnticommutatorOrdering::Standard)?;
    let times = uniform_grid(10.0, 10);
    let blocks = evolve_blocks(
        &spec,
        &initial_block_state(&ens)?,
        &times,
        &EvolveOptions::default(),
    )?;
    let full = full_lindblad_evolve(&spec, &FullState::product(&ens)?, &times)?;
    println!("    t   trace distance   leakage   min eigenvalue");
    for ((t, b), f) in times.iter().zip(&blocks.states).zip(&full) {
        let proj = project_full_to_blocks(f, (3, 2))?;
        let d = trace_distance(&b.to_dense().view(), &proj.blocks.to_dense().view())?;
        println!(
            "{t:5.1}   {d:.2e}         {:.1e}   {:.2e}",
            proj.leakage,
            min_eigenvalue(f)?
        );
    }
    Ok(())
}
