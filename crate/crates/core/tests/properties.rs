use std::f64::consts::PI;

use ndarray::Array2;
use proptest::prelude::*;

use pibreak::analysis::{spectrum, TimeSeries, Window};
use pibreak::angular_momentum::{build_collective_ops, cg_coefficient, couple_basis, SpinQuantum};
use pibreak::linalg::{c, dagger, max_abs, I};
use pibreak::liouville::{block_trace, evolve_blocks, AnticommutatorOrdering, EvolveOptions};
use pibreak::meanfield::{
    integrate_sectors, project, reconstruct, AntisymmetricField, BtcCouplings, DickeCouplings,
    JyConvention, MFState, MfModel, TrajectoryOptions,
};
use pibreak::models::{btc_spec, dicke_effective_spec, BTCParams, DickeParams};
use pibreak::ode::{uniform_grid, IntegrationControls};
use pibreak::state_prep::{
    diag_distribution, initial_block_state, mean_spin, offdiag_distribution, CoherentParams,
    EnsembleMember, EnsembleSpec,
};

fn sq(t: u32) -> SpinQuantum {
    SpinQuantum::from_twice(t)
}

fn two(n1: u32, a: (f64, f64), n2: u32, b: (f64, f64)) -> EnsembleSpec {
    EnsembleSpec::new(vec![
        EnsembleMember {
            n_spins: n1,
            params: CoherentParams::new(a.0, a.1).unwrap(),
        },
        EnsembleMember {
            n_spins: n2,
            params: CoherentParams::new(b.0, b.1).unwrap(),
        },
    ])
    .unwrap()
}

fn angles() -> impl Strategy<Value = (f64, f64)> {
    (0.0..=PI, 0.0..2.0 * PI)
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cg_rows_are_normalized(t1 in 0u32..40, t2 in 0u32..40, k1 in 0usize..41, k2 in 0usize..41) {
        let (j1, j2) = (sq(t1), sq(t2));
        let (k1, k2) = (k1 % j1.dim(), k2 % j2.dim());
        let (m1, m2) = (j1.twice_m(k1), j2.twice_m(k2));
        let total: f64 = SpinQuantum::coupled_sectors(j1, j2)
            .into_iter()
            .filter(|s| s.index_of(m1 + m2).is_some())
            .map(|s| cg_coefficient(j1, m1, j2, m2, s, m1 + m2).unwrap().powi(2))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_blocks_are_orthogonal(t1 in 0u32..30, t2 in 0u32..30) {
        for b in couple_basis(sq(t1), sq(t2)).blocks() {
            let e = b.matrix.dot(&b.matrix.t()) - Array2::<f64>::eye(b.matrix.nrows());
            prop_assert!(e.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn collective_algebra(t in 0u32..60) {
        let o = build_collective_ops(sq(t));
        let comm = o.sy.dot(&o.sz) - o.sz.dot(&o.sy) - o.sx.mapv(|z| I * z);
        prop_assert!(max_abs(&comm.view()) < 1e-11);
        let plus = &o.sx + &o.sy.mapv(|z| I * z);
        prop_assert!(max_abs(&(plus - &o.s_plus).view()) < 1e-12);
    }

    #[test]
    fn initial_distributions_are_consistent(n1 in 1u32..8, n2 in 1u32..8, a in angles(), b in angles()) {
        let rho = initial_block_state(&two(n1, a, n2, b)).unwrap();
        let pd = diag_distribution(&rho);
        prop_assert!((pd.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(pd.iter().all(|p| p.1 >= -1e-15));
        let s = mean_spin(&pd);
        prop_assert!(s <= (n1 + n2) as f64 / 2.0 + 1e-12);
        let po = offdiag_distribution(&rho);
        for (s, sp, w) in &po {
            let mirror = po.iter().find(|(x, y, _)| x == sp && y == s).unwrap().2;
            prop_assert!((w - mirror).abs() <= 1e-14 * w.max(1.0));
            // pure state: the off-diagonal weight factorizes
            let ps = pd.iter().find(|p| p.0 == *s).unwrap().1;
            let psp = pd.iter().find(|p| p.0 == *sp).unwrap().1;
            prop_assert!((w - ps * psp).abs() < 1e-12);
        }
    }

    #[test]
    fn block_dynamics_conserve_trace_and_sectors(
        n1 in 1u32..4, n2 in 1u32..4, a in angles(), b in angles(),
        g in 0.0..2.0f64, omega_x in 0.0..2.0f64, j_xx in -0.5..0.5f64, dicke in any::<bool>(),
    ) {
        let n = n1 + n2;
        let spec = if dicke {
            dicke_effective_spec(&DickeParams { omega_z: 0.1, omega_0: 1.0, kappa: 1.0, g, n_total: n }).unwrap()
        } else {
            btc_spec(&BTCParams { omega_x, kappa: 1.0, j_xx, n_total: n }, AnticommutatorOrdering::Standard).unwrap()
        };
        let rho0 = initial_block_state(&two(n1, a, n2, b)).unwrap();
        let p0 = diag_distribution(&rho0);
        let traj = evolve_blocks(&spec, &rho0, &uniform_grid(5.0, 5), &EvolveOptions::default()).unwrap();
        for st in &traj.states {
            prop_assert!((block_trace(st) - c(1.0)).norm() < 1e-8);
            for (x, y) in diag_distribution(st).iter().zip(&p0) {
                prop_assert!((x.1 - y.1).abs() < 1e-8);
            }
            for ((s, sp), m) in st.iter() {
                let mirror = st.block(*sp, *s);
                prop_assert!(max_abs(&(m - &dagger(&mirror.view())).view()) < 1e-9);
            }
        }
    }

    #[test]
    fn meanfield_sector_norms_are_conserved(
        spins in proptest::collection::vec(vec3(), 2..5), g in 0.2..1.0f64, omega_x in 0.5..1.5f64, dicke in any::<bool>(),
    ) {
        let m = spins.len() as u32;
        let model = if dicke {
            let p = DickeParams { omega_z: 0.1, omega_0: 1.0, kappa: 1.0, g, n_total: 4 * m };
            MfModel::Dicke(DickeCouplings::from_params(&p, JyConvention::Product).unwrap())
        } else {
            let p = BTCParams { omega_x, kappa: 1.0, j_xx: 0.1, n_total: 4 * m };
            MfModel::Btc(BtcCouplings::from_params(&p, AntisymmetricField::Derived).unwrap())
        };
        let init = project(&MFState { spins, time: 0.0 }).unwrap();
        let mut opts = TrajectoryOptions::new(200.0, 50);
        opts.controls = IntegrationControls::new(1e-11, 1e-13);
        let traj = integrate_sectors(&model, &init, &opts).unwrap();
        prop_assert!(traj.norm_drift().iter().all(|d| *d < 1e-8), "{:?}", traj.norm_drift());
    }

    #[test]
    fn sector_projection_round_trips(spins in proptest::collection::vec(vec3(), 1..6)) {
        let state = MFState { spins: spins.clone(), time: 0.0 };
        let back = reconstruct(&project(&state).unwrap(), 0.0).unwrap();
        for (a, b) in spins.iter().zip(&back.spins) {
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sinusoid_peak_within_a_bin(f in 0.05..2.0f64, phase in 0.0..6.28f64) {
        let s = TimeSeries::from_fn(0.05, 8192, "x", |t| (2.0 * PI * f * t + phase).sin()).unwrap();
        let r = spectrum(&s, Window::Hann).unwrap();
        prop_assert!((r.dominant().unwrap().frequency - f).abs() <= r.bin_width);
    }
}
