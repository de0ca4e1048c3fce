//! Weights of two equatorial coherent halves over total-spin sectors as the
//! relative phase φ_A grows.

use std::f64::consts::PI;

use pibreak::state_prep::{
    diag_distribution, initial_block_state, mean_spin, nearest_neighbour_weight,
    offdiag_distribution, EnsembleSpec,
};

fn main() -> pibreak::Result<()> {
    let n_half = 16;
    println!("N1 = N2 = {n_half}, θ = π/2");
    println!("  φ_A/π   <S>     p_d(N/2)  Σ p_off(S,S-1)");
    for k in 0..=8 {
        let phi_a = k as f64 * PI / 8.0;
        let rho = initial_block_state(&EnsembleSpec::split_equator(n_half, phi_a)?)?;
        let pd = diag_distribution(&rho);
        let po = offdiag_distribution(&rho);
        println!(
            "  {:.3}  {:7.3}  {:.4}    {:.4}",
            k as f64 / 8.0,
            mean_spin(&pd),
            pd[0].1,
            nearest_neighbour_weight(&po)
        );
    }

    let rho = initial_block_state(&EnsembleSpec::split_equator(n_half, PI / 2.0)?)?;
    println!("\np_d(S) at φ_A = π/2:");
    for (s, p) in diag_distribution(&rho).iter().filter(|(_, p)| *p > 1e-3) {
        println!("  S = {s:>4}  {p:.4} {}", "#".repeat((p * 60.0) as usize));
    }
    Ok(())
}
