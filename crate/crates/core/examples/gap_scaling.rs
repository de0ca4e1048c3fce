//! Lindbladian gap of the (N/2, N/2 − 1) block in the superradiant phase,
//! and the decay of the antisymmetric signal that lives in that block.

use std::f64::consts::FRAC_PI_2;

use pibreak::analysis::TimeSeries;
use pibreak::angular_momentum::{antisymmetric_observable, couple_basis, Component, SpinQuantum};
use pibreak::liouville::{
    asymptotic_decay_rate, block_expectation, evolve_block, gap_scaling_scan, EvolveOptions,
};
use pibreak::models::{dicke_effective_spec, dicke_gcr, DickeParams};
use pibreak::ode::uniform_grid;
use pibreak::state_prep::{initial_block_state, EnsembleSpec};

fn params(n: u32) -> pibreak::Result<DickeParams> {
    let mut p = DickeParams {
        omega_z: 0.1,
        omega_0: 1.0,
        kappa: 1.0,
        g: 0.0,
        n_total: n,
    };
    p.g = 1.5 * dicke_gcr(&p, None)?;
    Ok(p)
}

fn main() -> pibreak::Result<()> {
    let family = [16u32, 24, 32, 40]
        .iter()
        .map(|&n| Ok((n, dicke_effective_spec(&params(n)?)?)))
        .collect::<pibreak::Result<Vec<_>>>()?;
    let scan = gap_scaling_scan(&family, |n| {
        (SpinQuantum::from_twice(n), SpinQuantum::from_twice(n - 2))
    })?;
    println!("   N   gap        |Im λ|");
    for r in &scan.rows {
        println!(
            "{:4}   {:.6}   {:.4}",
            r.n,
            r.gap,
            r.gap_imag.first().map_or(0.0, |x| x.abs())
        );
    }
    println!(
        "log-log exponent {:.3} (R² {:.3})",
        scan.exponent.unwrap(),
        scan.r_squared.unwrap()
    );

    let n = 32;
    let (s, sp) = (SpinQuantum::from_twice(n), SpinQuantum::from_twice(n - 2));
    let mut rho = initial_block_state(&EnsembleSpec::split_equator(n / 2, FRAC_PI_2)?)?;
    let ax = antisymmetric_observable(Component::X, &couple_basis(rho.j1, rho.j2));
    let dt = 0.5;
    let times = uniform_grid(1500.0, 3000);
    let block = evolve_block(
        &family[2].1,
        s,
        sp,
        &rho.block(s, sp),
        &times,
        &EvolveOptions::default(),
    )?;
    let mut signal = Vec::with_capacity(block.len());
    for b in block {
        rho.insert(s, sp, b)?;
        signal.push(block_expectation(&ax, &rho, s, sp)?.re);
    }
    let fit = asymptotic_decay_rate(&TimeSeries::new(dt, signal, "O_A,x")?)?;
    println!(
        "N = {n}: O_A,x decays at {:.6}, gap {:.6}",
        fit.rate, scan.rows[2].gap
    );
    Ok(())
}
