use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::btc::{btc_mf_rhs, btc_spin_rhs, BtcCouplings};
use super::dicke::{dicke_mf_rhs, torque_rhs, DickeCouplings, JyConvention};
use super::state::{norm, project, MFState, SectorObservables, Vec3};
use crate::analysis::{classify_series, Classification, TimeSeries, Window};
use crate::error::{Error, Result};
use crate::models::DickeParams;
use crate::ode::{integrate, IntegrationControls};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MfModel {
    Dicke(DickeCouplings),
    Btc(BtcCouplings),
}

impl MfModel {
    pub fn rhs(&self, s: &SectorObservables) -> SectorObservables {
        match self {
            MfModel::Dicke(c) => dicke_mf_rhs(s, c),
            MfModel::Btc(c) => btc_mf_rhs(s, c),
        }
    }

    pub fn spin_rhs(&self, s: &MFState) -> Result<Vec<Vec3>> {
        match self {
            MfModel::Dicke(c) => Ok(torque_rhs(s, c)),
            MfModel::Btc(c) => btc_spin_rhs(s, c),
        }
    }

    fn rhs_flat(&self, y: &[f64], dy: &mut [f64]) {
        let d = self.rhs(&SectorObservables::from_flat(y)).flatten();
        dy.copy_from_slice(&d);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryOptions {
    pub t_final: f64,
    /// Number of output intervals; the grid has `samples + 1` points.
    pub samples: usize,
    pub controls: IntegrationControls,
}

impl TrajectoryOptions {
    pub fn new(t_final: f64, samples: usize) -> Self {
        TrajectoryOptions {
            t_final,
            samples,
            controls: IntegrationControls::new(1e-10, 1e-12),
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::domain(format!(
                "t_final must be positive, got {}",
                self.t_final
            )));
        }
        if self.samples < 1 {
            return Err(Error::domain("need at least one output interval"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.samples as f64
    }
}

/// Sector observables sampled on a uniform grid.
#[derive(Clone, Debug)]
pub struct MfTrajectory {
    pub dt: f64,
    pub labels: Vec<String>,
    /// One column per label.
    pub columns: Vec<Vec<f64>>,
}

fn labels_for(m: usize) -> Vec<String> {
    let mut out: Vec<String> = ["S_x", "S_y", "S_z"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in 1..m {
        for ax in ["x", "y", "z"] {
            out.push(if m == 2 {
                format!("A_{ax}")
            } else {
                format!("A{k}_{ax}")
            });
        }
    }
    out
}

impl MfTrajectory {
    fn with_capacity(m: usize, dt: f64, n: usize) -> Self {
        let labels = labels_for(m);
        MfTrajectory {
            dt,
            columns: vec![Vec::with_capacity(n); labels.len()],
            labels,
        }
    }

    fn push(&mut self, row: &[f64]) {
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.push(*v);
        }
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| k as f64 * self.dt).collect()
    }

    pub fn m(&self) -> usize {
        self.labels.len() / 3
    }

    pub fn at(&self, k: usize) -> SectorObservables {
        let row: Vec<f64> = self.columns.iter().map(|c| c[k]).collect();
        SectorObservables::from_flat(&row)
    }

    pub fn last(&self) -> SectorObservables {
        self.at(self.len() - 1)
    }

    pub fn series(&self, label: &str) -> Result<TimeSeries> {
        let i = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::domain(format!("no observable '{label}'")))?;
        TimeSeries::new(self.dt, self.columns[i].clone(), label)
    }

    /// Largest relative change of each squared sector norm: symmetric first.
    pub fn norm_drift(&self) -> Vec<f64> {
        let n0 = self.at(0).norms();
        let mut refs = vec![n0.sym];
        refs.extend(n0.modes);
        let mut drift = vec![0.0f64; refs.len()];
        for k in 0..self.len() {
            let nk = self.at(k).norms();
            let cur = std::iter::once(nk.sym).chain(nk.modes);
            for ((d, r), v) in drift.iter_mut().zip(&refs).zip(cur) {
                *d = d.max((v - r).abs() / r.max(f64::MIN_POSITIVE));
            }
        }
        drift
    }
}

/// Integrates the sector equations from `init`.
pub fn integrate_sectors(
    model: &MfModel,
    init: &SectorObservables,
    opts: &TrajectoryOptions,
) -> Result<MfTrajectory> {
    opts.check()?;
    let y0 = init.flatten();
    let sys = (y0.len(), |_t: f64, y: &[f64], dy: &mut [f64]| {
        model.rhs_flat(y, dy)
    });
    let times = crate::ode::uniform_grid(opts.t_final, opts.samples);
    let mut traj = MfTrajectory::with_capacity(init.m(), opts.dt(), times.len());
    integrate(&sys, &y0, &times, &opts.controls, |_, _, y| {
        traj.push(y);
        Ok(())
    })?;
    Ok(traj)
}

/// Integrates the per-subensemble equations and records the projected
/// sector observables.
pub fn integrate_spins(
    model: &MfModel,
    init: &MFState,
    opts: &TrajectoryOptions,
) -> Result<MfTrajectory> {
    opts.check()?;
    model.spin_rhs(init)?;
    let y0 = init.flatten();
    let sys = (y0.len(), |t: f64, y: &[f64], dy: &mut [f64]| {
        let d = model
            .spin_rhs(&MFState::from_flat(y, t))
            .unwrap_or_default();
        for (o, v) in dy.chunks_exact_mut(3).zip(d) {
            o.copy_from_slice(&v);
        }
    });
    let times = crate::ode::uniform_grid(opts.t_final, opts.samples);
    let mut traj = MfTrajectory::with_capacity(init.m(), opts.dt(), times.len());
    integrate(&sys, &y0, &times, &opts.controls, |_, t, y| {
        traj.push(&project(&MFState::from_flat(y, t))?.flatten());
        Ok(())
    })?;
    Ok(traj)
}

#[derive(Clone, Debug, Serialize)]
pub struct ObservableClass {
    pub label: String,
    pub classification: Classification,
    /// Dominant frequency in cycles per unit time, when a peak exists.
    pub frequency: Option<f64>,
    pub bin_width: f64,
    pub peaks: Vec<(f64, f64)>,
}

/// Classifies every observable. The steady rule compares the tail range with
/// the initial norm of the observable's sector.
pub fn classify_trajectory(
    traj: &MfTrajectory,
    trim: f64,
    window: Window,
) -> Result<Vec<ObservableClass>> {
    let first = traj.at(0);
    let n0 = first.norms();
    let refs: Vec<f64> = std::iter::once(n0.sym)
        .chain(n0.modes)
        .map(f64::sqrt)
        .collect();
    traj.labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let s = traj.series(label)?;
            let (classification, report) =
                classify_series(&s, refs[i / 3].max(f64::MIN_POSITIVE), trim, window)?;
            let report = report.expect("classify_series always returns a report");
            Ok(ObservableClass {
                label: label.clone(),
                classification,
                frequency: report.dominant().map(|p| p.frequency),
                bin_width: report.bin_width,
                peaks: report
                    .peaks
                    .iter()
                    .map(|p| (p.frequency, p.power))
                    .collect(),
            })
        })
        .collect()
}

/// The whole symmetric sector is steady.
pub fn symmetric_is_steady(classes: &[ObservableClass]) -> bool {
    classes
        .iter()
        .filter(|c| c.label.starts_with("S_"))
        .all(|c| c.classification == Classification::Steady)
}

/// Superradiant when |O_Sx| over the last 20% exceeds 10⁻³ |O_S|.
pub fn is_superradiant(traj: &MfTrajectory) -> bool {
    let x = &traj.columns[0];
    let r = norm(&traj.at(0).o_sym);
    let start = x.len() - (x.len() / 5).max(1);
    x[start..].iter().fold(0.0f64, |m, v| m.max(v.abs())) > 1e-3 * r
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdResult {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Bisects g between a normal (`lo`) and a superradiant (`hi`) endpoint.
/// Only the symmetric sector is integrated since it is closed.
pub fn dicke_threshold(
    base: &DickeParams,
    conv: JyConvention,
    o_sym: Vec3,
    bracket: (f64, f64),
    rel_tol: f64,
    opts: &TrajectoryOptions,
) -> Result<ThresholdResult> {
    let init = SectorObservables {
        o_sym,
        o_modes: vec![],
    };
    let sr = |g: f64| -> Result<bool> {
        let c = DickeCouplings::from_params(&DickeParams { g, ..*base }, conv)?;
        Ok(is_superradiant(&integrate_sectors(
            &MfModel::Dicke(c),
            &init,
            opts,
        )?))
    };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(rel_tol > 0.0) {
        return Err(Error::domain(
            "threshold bracket must satisfy lo < hi with a positive tolerance",
        ));
    }
    if sr(lo)? || !sr(hi)? {
        return Err(Error::NotApplicable(format!(
            "bracket [{lo}, {hi}] does not straddle the superradiant transition"
        )));
    }
    let mut iterations = 0;
    while (hi - lo) > rel_tol * 0.5 * (hi + lo) {
        let mid = 0.5 * (lo + hi);
        if sr(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(ThresholdResult {
        estimate: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhasePoint<P> {
    pub parameter: P,
    pub observables: Vec<ObservableClass>,
    pub norm_drift: Vec<f64>,
}

/// Integrates and classifies every point of a parameter grid in parallel.
/// Results come back in grid order.
pub fn phase_scan<P, F>(
    points: &[P],
    build: F,
    opts: &TrajectoryOptions,
    trim: f64,
    window: Window,
) -> Vec<Result<PhasePoint<P>>>
where
    P: Clone + Send + Sync,
    F: Fn(&P) -> Result<(MfModel, SectorObservables)> + Sync,
{
    points
        .par_iter()
        .map(|p| {
            let (model, init) = build(p)?;
            let traj = integrate_sectors(&model, &init, opts)?;
            Ok(PhasePoint {
                parameter: p.clone(),
                observables: classify_trajectory(&traj, trim, window)?,
                norm_drift: traj.norm_drift(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::btc::AntisymmetricField;
    use crate::meanfield::state::dot;
    use crate::ode::ErrorScope;

    fn dicke(g: f64) -> MfModel {
        let p = DickeParams {
            omega_z: 0.1,
            omega_0: 1.0,
            kappa: 1.0,
            g,
            n_total: 10,
        };
        MfModel::Dicke(DickeCouplings::from_params(&p, JyConvention::Product).unwrap())
    }

    fn split(phi: f64) -> SectorObservables {
        let s1 = [2.5, 0.0, 0.0];
        let s2 = [2.5 * phi.cos(), 2.5 * phi.sin(), 0.0];
        project(&MFState {
            spins: vec![s1, s2],
            time: 0.0,
        })
        .unwrap()
    }

    #[test]
    fn labels() {
        assert_eq!(labels_for(2)[3], "A_x");
        assert_eq!(labels_for(3)[8], "A2_z");
    }

    #[test]
    fn sector_and_spin_integrations_agree() {
        let model = dicke(0.6);
        let st = MFState {
            spins: vec![[2.5, 0.0, 0.0], [1.0, 2.0, -1.0]],
            time: 0.0,
        };
        let opts = TrajectoryOptions::new(200.0, 200);
        let a = integrate_sectors(&model, &project(&st).unwrap(), &opts).unwrap();
        let b = integrate_spins(&model, &st, &opts).unwrap();
        for (ca, cb) in a.columns.iter().zip(&b.columns) {
            for (x, y) in ca.iter().zip(cb) {
                assert!((x - y).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn symmetric_sector_is_closed_bitwise() {
        let model = dicke(0.7);
        let mut opts = TrajectoryOptions::new(500.0, 500);
        opts.controls.error_scope = ErrorScope::Leading(3);
        let full = integrate_sectors(&model, &split(1.2), &opts).unwrap();
        let alone = integrate_sectors(
            &model,
            &SectorObservables {
                o_sym: split(1.2).o_sym,
                o_modes: vec![],
            },
            &opts,
        )
        .unwrap();
        for i in 0..3 {
            assert_eq!(full.columns[i], alone.columns[i]);
        }
    }

    #[test]
    fn normal_phase_antisymmetric_oscillation() {
        let traj = {
            let mut o = TrajectoryOptions::new(20000.0, 20000);
            o.controls = IntegrationControls::new(1e-12, 1e-14);
            integrate_sectors(&dicke(0.5), &split(2.0 * std::f64::consts::FRAC_PI_3), &o).unwrap()
        };
        let na = traj.at(0).norms().modes[0].sqrt();
        let ay = &traj.columns[4];
        let tail = &ay[ay.len() / 2..];
        let amp = tail.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(!is_superradiant(&traj));
        assert!((amp - na).abs() < 1e-2 * na, "{amp} vs {na}");
        assert!(traj.norm_drift().iter().all(|d| *d < 1e-8));
    }

    #[test]
    fn btc_limit_cycle_preserves_magnitudes() {
        let c = BtcCouplings {
            omega_x: 1.5,
            kappa_n: 0.2,
            jxx_n: 0.0,
            field: AntisymmetricField::Derived,
        };
        let init = MFState {
            spins: vec![[2.5, 0.0, 0.0], [2.5 * 0.7071, 2.5 * 0.7071, 0.0]],
            time: 0.0,
        };
        let traj = integrate_spins(
            &MfModel::Btc(c),
            &init,
            &TrajectoryOptions::new(300.0, 3000),
        )
        .unwrap();
        let last = traj.last();
        let o = last.o_sym;
        let a = last.o_modes[0];
        let s1: Vec3 = [
            (o[0] + a[0]) / 2.0,
            (o[1] + a[1]) / 2.0,
            (o[2] + a[2]) / 2.0,
        ];
        assert!((dot(&s1, &s1).sqrt() - 2.5).abs() < 1e-7);
    }
}
