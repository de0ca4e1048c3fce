//! Couple two spins, inspect the block structure of the collective
//! observables and print the sector-to-sector overlap of O_A,x.

use pibreak::angular_momentum::{
    antisymmetric_observable, cg_coefficient, couple_basis, offdiag_overlap_profile,
    symmetric_observable, Component, SpinQuantum,
};

fn main() -> pibreak::Result<()> {
    let half = SpinQuantum::HALF;
    let c = cg_coefficient(half, 1, half, -1, SpinQuantum::from_twice(0), 0)?;
    println!(
        "<1/2 1/2; 1/2 -1/2 | 0 0> = {c:.6} (expected {:.6})",
        0.5f64.sqrt()
    );

    // N1 = N2 = 30 spins
    let j = SpinQuantum::from_spin_count(30);
    let map = couple_basis(j, j);
    println!(
        "coupled sectors S = {} .. {}, total dimension {}",
        map.sectors()[0],
        map.sectors().last().unwrap(),
        map.dim()
    );

    let sym = symmetric_observable(Component::X, &map);
    let anti = antisymmetric_observable(Component::X, &map);
    println!(
        "O_S,x largest off-diagonal entry: {:.1e}",
        sym.max_abs_where(|s, sp| s != sp)
    );
    println!(
        "O_A,x largest (S,S) entry:        {:.1e}",
        anti.max_abs_where(|s, sp| s == sp)
    );

    println!("\n  S    S'   weight of O_A,x");
    for w in offdiag_overlap_profile(&anti)
        .iter()
        .rev()
        .filter(|w| w.weight > 1e-12 && w.s.twice() > w.s_tilde.twice())
        .take(8)
    {
        println!(
            "{:>4} {:>4}   {:.4}",
            w.s.to_string(),
            w.s_tilde.to_string(),
            w.weight
        );
    }
    Ok(())
}
