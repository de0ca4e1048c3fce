//! Boundary time crystal phases of an inhomogeneous ensemble: classification
//! across the drive, frequency locking, and beating once J_xx is switched on.

use std::f64::consts::FRAC_PI_4;

use pibreak::analysis::Window;
use pibreak::meanfield::{
    classify_trajectory, integrate_sectors, phase_scan, project, AntisymmetricField, BtcCouplings,
    MfModel, SectorObservables, TrajectoryOptions,
};
use pibreak::models::BTCParams;
use pibreak::state_prep::{mf_initial_vectors, EnsembleSpec};

const N_HALF: u32 = 50;

fn setup(omega_x: f64, j_xx: f64, phi2: f64) -> pibreak::Result<(MfModel, SectorObservables)> {
    let p = BTCParams {
        omega_x,
        kappa: 1.0,
        j_xx,
        n_total: 2 * N_HALF,
    };
    let model = MfModel::Btc(BtcCouplings::from_params(&p, AntisymmetricField::Derived)?);
    Ok((
        model,
        project(&mf_initial_vectors(&EnsembleSpec::split_equator(
            N_HALF, phi2,
        )?))?,
    ))
}

fn main() -> pibreak::Result<()> {
    let opts = TrajectoryOptions::new(4000.0, 1 << 15);
    let grid: Vec<(f64, f64)> = [0.0, FRAC_PI_4]
        .iter()
        .flat_map(|phi| (0..=5).map(move |k| (0.9 + 0.04 * k as f64, *phi)))
        .collect();
    println!("ω_x    φ₂      S_z           A_z");
    for point in phase_scan(
        &grid,
        |&(w, phi)| setup(w, 0.0, phi),
        &opts,
        0.5,
        Window::Hann,
    ) {
        let point = point?;
        let class = |l: &str| {
            point
                .observables
                .iter()
                .find(|c| c.label == l)
                .unwrap()
                .classification
                .as_str()
        };
        println!(
            "{:.2}   {:.3}   {:12}  {}",
            point.parameter.0,
            point.parameter.1,
            class("S_z"),
            class("A_z")
        );
    }

    for (w, jxx) in [(1.5, 0.0), (1.0, 0.1)] {
        let (model, init) = setup(w, jxx, FRAC_PI_4)?;
        let classes =
            classify_trajectory(&integrate_sectors(&model, &init, &opts)?, 0.5, Window::Hann)?;
        println!("\nω_x = {w}, J_xx = {jxx}");
        for c in classes
            .iter()
            .filter(|c| c.label.ends_with("_z") || c.label == "A_x")
        {
            let peaks: Vec<String> = c
                .peaks
                .iter()
                .take(3)
                .map(|p| format!("{:.4}", p.0))
                .collect();
            println!(
                "  {:4} {:12} peaks {}",
                c.label,
                c.classification.as_str(),
                peaks.join(", ")
            );
        }
    }
    Ok(())
}
