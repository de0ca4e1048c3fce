//! Evolve an inhomogeneous state block by block under the effective Dicke
//! model and follow the symmetric and antisymmetric magnetizations.

use std::f64::consts::FRAC_PI_2;

use pibreak::angular_momentum::{
    antisymmetric_observable, couple_basis, symmetric_observable, Component,
};
use pibreak::liouville::{block_trace, evolve_blocks, expectation, EvolveOptions};
use pibreak::models::{dicke_effective_spec, dicke_gcr, DickeParams};
use pibreak::ode::uniform_grid;
use pibreak::state_prep::{diag_distribution, initial_block_state, EnsembleSpec};

fn main() -> pibreak::Result<()> {
    let n_half = 6;
    let mut p = DickeParams {
        omega_z: 0.1,
        omega_0: 1.0,
        kappa: 1.0,
        g: 0.0,
        n_total: 2 * n_half,
    };
    p.g = 1.5 * dicke_gcr(&p, None)?;
    let spec = dicke_effective_spec(&p)?;

    let rho0 = initial_block_state(&EnsembleSpec::split_equator(n_half, FRAC_PI_2)?)?;
    let times = uniform_grid(60.0, 12);
    let traj = evolve_blocks(&spec, &rho0, &times, &EvolveOptions::default())?;

    let map = couple_basis(rho0.j1, rho0.j2);
    let sx = symmetric_observable(Component::X, &map);
    let sz = symmetric_observable(Component::Z, &map);
    let ax = antisymmetric_observable(Component::X, &map);
    println!("g = {:.4}, {} blocks", p.g, rho0.len());
    println!("     t   trace      <O_S,x>   <O_S,z>   <O_A,x>");
    for (t, rho) in times.iter().zip(&traj.states) {
        println!(
            "{t:6.1}  {:.10}  {:8.4}  {:8.4}  {:8.4}",
            block_trace(rho).re,
            expectation(&sx, rho)?.re,
            expectation(&sz, rho)?.re,
            expectation(&ax, rho)?.re
        );
    }

    let first = diag_distribution(&traj.states[0]);
    let last = diag_distribution(traj.states.last().unwrap());
    let drift = first
        .iter()
        .zip(&last)
        .map(|(a, b)| (a.1 - b.1).abs())
        .fold(0.0, f64::max);
    println!("largest change of any p_d(S): {drift:.1e}");
    Ok(())
}
