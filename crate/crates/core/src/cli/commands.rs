use serde_json::{json, Value};

use super::config::{ModelKind, RunConfig, SweepParameter};
use super::output::{Cell, Table};
use crate::angular_momentum::{
    antisymmetric_observable, couple_basis, symmetric_observable, Component, SpinQuantum,
};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, trace_distance};
use crate::liouville::{
    block_spectrum_with_limit, block_trace, evolve_blocks, expectation, gap_scaling_scan,
    AnticommutatorOrdering, LindbladSpec,
};
use crate::meanfield::{
    classify_trajectory, dicke_threshold, dressed_frequency, integrate_sectors, is_superradiant,
    norm, phase_scan, project, BtcCouplings, DickeCouplings, MfModel, SectorObservables,
};
use crate::models::{btc_spec, dicke_effective_spec, dicke_gcr};
use crate::ode::uniform_grid;
use crate::oracle::{
    full_lindblad_evolve, min_eigenvalue, project_full_to_blocks, FullState, MAX_EVOLUTION_SPINS,
};
use crate::state_prep::{
    diag_distribution, initial_block_state, mean_spin, mf_initial_vectors,
    nearest_neighbour_weight, offdiag_distribution, EnsembleSpec,
};

pub struct Output {
    pub tables: Vec<Table>,
    pub summary: Value,
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing [{section}] section"))
}

fn spin(s: SpinQuantum) -> Cell {
    Cell::Float(s.value())
}

fn lindblad(cfg: &RunConfig, n_total: u32) -> Result<LindbladSpec> {
    match cfg.model_kind()? {
        ModelKind::Dicke => {
            let (p, _) = cfg.dicke(n_total)?.expect("checked");
            dicke_effective_spec(&p)
        }
        ModelKind::Btc => {
            let (p, b) = cfg.btc(n_total)?.expect("checked");
            btc_spec(&p, b.ordering)
        }
    }
}

fn mf_model(cfg: &RunConfig, n_total: u32) -> Result<MfModel> {
    match cfg.model_kind()? {
        ModelKind::Dicke => {
            let (p, conv) = cfg.dicke(n_total)?.expect("checked");
            Ok(MfModel::Dicke(DickeCouplings::from_params(&p, conv)?))
        }
        ModelKind::Btc => {
            let (p, b) = cfg.btc(n_total)?.expect("checked");
            Ok(MfModel::Btc(BtcCouplings::from_params(
                &p,
                b.antisymmetric_field,
            )?))
        }
    }
}

fn two_members(ens: &EnsembleSpec) -> Result<(u32, u32)> {
    match ens.subensembles[..] {
        [a, b] => Ok((a.n_spins, b.n_spins)),
        _ => Err(Error::Unsupported(format!(
            "the exact block engine needs two subensembles, got {}",
            ens.m()
        ))),
    }
}

pub fn decompose(cfg: &RunConfig) -> Result<Output> {
    let d = cfg.decompose.as_ref().ok_or_else(|| missing("decompose"))?;
    let grid = d.grid()?;
    let mut diag = Table::new("p_diag", &["phi_a", "S", "p_d"]);
    let mut off = Table::new("p_offdiag", &["phi_a", "S", "S_prime", "p_off"]);
    let mut summary = Table::new(
        "decompose_summary",
        &["phi_a", "mean_S", "nearest_neighbour_p_off"],
    );
    for &phi_a in &grid {
        let mut ens = EnsembleSpec::split_equator(d.n_half, phi_a)?;
        for m in &mut ens.subensembles {
            m.params.theta = d.theta;
        }
        let ens = EnsembleSpec::new(ens.subensembles)?;
        let rho = initial_block_state(&ens)?;
        let pd = diag_distribution(&rho);
        let po = offdiag_distribution(&rho);
        for (s, p) in &pd {
            diag.push(vec![phi_a.into(), spin(*s), (*p).into()]);
        }
        for (s, sp, p) in &po {
            off.push(vec![phi_a.into(), spin(*s), spin(*sp), (*p).into()]);
        }
        summary.push(vec![
            phi_a.into(),
            mean_spin(&pd).into(),
            nearest_neighbour_weight(&po).into(),
        ]);
    }
    Ok(Output {
        tables: vec![diag, off, summary],
        summary: json!({ "n_half": d.n_half, "grid_points": grid.len() }),
    })
}

pub fn evolve_exact(cfg: &RunConfig) -> Result<Output> {
    let ens = cfg.ensemble()?;
    two_members(&ens)?;
    let spec = lindblad(cfg, ens.n_total())?;
    let rho0 = initial_block_state(&ens)?;
    let times = uniform_grid(cfg.numerics.t_final, cfg.numerics.samples);
    let traj = evolve_blocks(&spec, &rho0, &times, &cfg.numerics.evolve_options())?;
    let map = couple_basis(rho0.j1, rho0.j2);
    let comps = [Component::X, Component::Y, Component::Z];
    let ops: Vec<_> = comps
        .iter()
        .map(|c| symmetric_observable(*c, &map))
        .chain(comps.iter().map(|c| antisymmetric_observable(*c, &map)))
        .collect();
    let mut obs = Table::new(
        "observables",
        &["t", "trace", "S_x", "S_y", "S_z", "A_x", "A_y", "A_z"],
    );
    let mut blocks = Table::new("block_norms", &["t", "S", "S_prime", "frobenius_sq"]);
    for (t, rho) in times.iter().zip(&traj.states) {
        let mut row = vec![Cell::Float(*t), Cell::Float(block_trace(rho).re)];
        for op in &ops {
            row.push(Cell::Float(expectation(op, rho)?.re));
        }
        obs.push(row);
        for ((s, sp), m) in rho.iter() {
            blocks.push(vec![
                (*t).into(),
                spin(*s),
                spin(*sp),
                frobenius_sq(&m.view()).into(),
            ]);
        }
    }
    Ok(Output {
        tables: vec![obs, blocks],
        summary: json!({ "n_total": ens.n_total(), "samples": times.len() }),
    })
}

pub fn gap_scan(cfg: &RunConfig) -> Result<Output> {
    let g = cfg.gap_scan.as_ref().ok_or_else(|| missing("gap_scan"))?;
    if cfg.dicke.is_none() {
        return Err(missing("dicke"));
    }
    if g.sizes.iter().any(|&n| n < 2 * g.sector_offset) {
        return Err(Error::Config(
            "[gap_scan] every size must be at least twice sector_offset".into(),
        ));
    }
    let family = g
        .sizes
        .iter()
        .map(|&n| Ok((n, dicke_effective_spec(&cfg.dicke(n)?.expect("checked").0)?)))
        .collect::<Result<Vec<_>>>()?;
    let off = 2 * g.sector_offset;
    let scan = gap_scaling_scan(&family, |n| {
        (SpinQuantum::from_twice(n), SpinQuantum::from_twice(n - off))
    })?;
    let mut rows = Table::new("gap_scan", &["n", "S", "S_prime", "gap", "gap_imag"]);
    for r in &scan.rows {
        let im = r
            .gap_imag
            .iter()
            .cloned()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let s = SpinQuantum::from_twice(r.n);
        rows.push(vec![
            r.n.into(),
            spin(s),
            spin(SpinQuantum::from_twice(r.n - off)),
            r.gap.into(),
            im.into(),
        ]);
    }
    let mut fit = Table::new("gap_fit", &["exponent", "r_squared"]);
    if let (Some(e), Some(r2)) = (scan.exponent, scan.r_squared) {
        fit.push(vec![e.into(), r2.into()]);
    }
    Ok(Output {
        tables: vec![rows, fit],
        summary: json!({ "exponent": scan.exponent, "r_squared": scan.r_squared, "failures": scan.failures }),
    })
}

pub fn meanfield(cfg: &RunConfig) -> Result<Output> {
    let ens = cfg.ensemble()?;
    let n = ens.n_total();
    let model = mf_model(cfg, n)?;
    let init = project(&mf_initial_vectors(&ens))?;
    let opts = cfg.numerics.trajectory_options();
    let traj = integrate_sectors(&model, &init, &opts)?;
    let mut cols = vec!["t"];
    cols.extend(traj.labels.iter().map(String::as_str));
    let mut series = Table::new("trajectory", &cols);
    for (k, t) in traj.times().into_iter().enumerate() {
        let mut row = vec![Cell::Float(t)];
        row.extend(traj.columns.iter().map(|c| Cell::Float(c[k])));
        series.push(row);
    }
    let classes = classify_trajectory(&traj, cfg.numerics.trim, cfg.numerics.window)?;
    let mut cls = Table::new(
        "classification",
        &["observable", "classification", "frequency", "bin_width"],
    );
    let mut peaks = Table::new("peaks", &["observable", "frequency", "power"]);
    for c in &classes {
        cls.push(vec![
            c.label.as_str().into(),
            c.classification.as_str().into(),
            c.frequency.unwrap_or(f64::NAN).into(),
            c.bin_width.into(),
        ]);
        for (f, p) in &c.peaks {
            peaks.push(vec![c.label.as_str().into(), (*f).into(), (*p).into()]);
        }
    }
    let mut drift = Table::new("norm_drift", &["sector", "relative_drift"]);
    for (i, d) in traj.norm_drift().into_iter().enumerate() {
        drift.push(vec![i.into(), d.into()]);
    }
    let mut tables = vec![series, cls, peaks, drift];
    let mut summary = json!({ "n_total": n, "m": ens.m() });
    if let MfModel::Dicke(c) = &model {
        let (p, conv) = cfg.dicke(n)?.expect("checked");
        let last = traj.last();
        summary["superradiant"] = json!(is_superradiant(&traj));
        summary["dressed_frequency"] = json!(dressed_frequency(&last.o_sym, c));
        if let Some(th) = cfg.meanfield.as_ref().and_then(|m| m.threshold.as_ref()) {
            let r = dicke_threshold(
                &p,
                conv,
                init.o_sym,
                (th.lower, th.upper),
                th.rel_tol,
                &opts,
            )?;
            let formula = dicke_gcr(&p, Some(norm(&init.o_sym)))?;
            let mut t = Table::new(
                "threshold",
                &["estimate", "lower", "upper", "iterations", "formula"],
            );
            t.push(vec![
                r.estimate.into(),
                r.lower.into(),
                r.upper.into(),
                r.iterations.into(),
                formula.into(),
            ]);
            tables.push(t);
        }
    } else if cfg
        .meanfield
        .as_ref()
        .is_some_and(|m| m.threshold.is_some())
    {
        return Err(Error::Config(
            "[meanfield.threshold] applies to the Dicke model only".into(),
        ));
    }
    Ok(Output { tables, summary })
}

pub fn phase_diagram(cfg: &RunConfig) -> Result<Output> {
    let pd = cfg
        .phase_diagram
        .as_ref()
        .ok_or_else(|| missing("phase_diagram"))?;
    let kind = cfg.model_kind()?;
    let fits = matches!(
        (kind, pd.parameter),
        (ModelKind::Btc, SweepParameter::OmegaX | SweepParameter::JXx)
            | (
                ModelKind::Dicke,
                SweepParameter::G | SweepParameter::GOverGcr
            )
    );
    if !fits {
        return Err(Error::Config(format!(
            "[phase_diagram] parameter {} does not belong to the configured model",
            pd.parameter.name()
        )));
    }
    let n = 2 * pd.n_half;
    let points: Vec<(f64, f64)> = pd
        .values
        .iter()
        .flat_map(|v| pd.phi_a.iter().map(move |a| (*v, *a)))
        .collect();
    let base = cfg.clone();
    // validate the base model once so config errors surface before the sweep
    mf_model(&base, n)?;
    let build = |&(v, phi_a): &(f64, f64)| -> Result<(MfModel, SectorObservables)> {
        let mut c = base.clone();
        match pd.parameter {
            SweepParameter::OmegaX => c.btc.as_mut().expect("checked").omega_x = v,
            SweepParameter::JXx => c.btc.as_mut().expect("checked").j_xx = v,
            SweepParameter::G => {
                let d = c.dicke.as_mut().expect("checked");
                (d.g, d.g_over_gcr) = (Some(v), None);
            }
            SweepParameter::GOverGcr => {
                let d = c.dicke.as_mut().expect("checked");
                (d.g, d.g_over_gcr) = (None, Some(v));
            }
        }
        let init = project(&mf_initial_vectors(&EnsembleSpec::split_equator(
            pd.n_half, phi_a,
        )?))?;
        Ok((mf_model(&c, n)?, init))
    };
    let results = phase_scan(
        &points,
        build,
        &cfg.numerics.trajectory_options(),
        cfg.numerics.trim,
        cfg.numerics.window,
    );
    let mut t = Table::new(
        "phase_diagram",
        &[
            pd.parameter.name(),
            "phi_a",
            "observable",
            "classification",
            "frequency",
        ],
    );
    for r in results {
        let p = r?;
        for c in &p.observables {
            t.push(vec![
                p.parameter.0.into(),
                p.parameter.1.into(),
                c.label.as_str().into(),
                c.classification.as_str().into(),
                c.frequency.unwrap_or(f64::NAN).into(),
            ]);
        }
    }
    Ok(Output {
        tables: vec![t],
        summary: json!({ "points": points.len(), "n_total": n }),
    })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Output> {
    let ens = cfg.ensemble()?;
    let (n1, n2) = two_members(&ens)?;
    let spec = lindblad(cfg, ens.n_total())?;
    let sectors =
        SpinQuantum::coupled_sectors(SpinQuantum::from_twice(n1), SpinQuantum::from_twice(n2));
    let pairs: Vec<(SpinQuantum, SpinQuantum)> =
        match cfg.spectrum.as_ref().and_then(|s| s.pairs.clone()) {
            Some(p) => p
                .iter()
                .map(|[a, b]| {
                    let (s, sp) = (SpinQuantum::from_f64(*a)?, SpinQuantum::from_f64(*b)?);
                    if !sectors.contains(&s) || !sectors.contains(&sp) {
                        return Err(Error::Config(format!(
                            "[spectrum] ({a}, {b}) is not a pair of coupled sectors"
                        )));
                    }
                    Ok((s, sp))
                })
                .collect::<Result<_>>()?,
            None => sectors
                .iter()
                .flat_map(|s| {
                    let below = sectors.iter().find(|t| t.twice() + 2 == s.twice());
                    std::iter::once((*s, *s)).chain(below.map(|t| (*s, *t)))
                })
                .collect(),
        };
    let mut eig = Table::new("eigenvalues", &["S", "S_prime", "re", "im"]);
    let mut gaps = Table::new(
        "gaps",
        &[
            "S",
            "S_prime",
            "gap",
            "gap_imag",
            "zero_modes",
            "gap_excluding_zero_modes",
        ],
    );
    for (s, sp) in pairs {
        let r = block_spectrum_with_limit(&spec, s, sp, cfg.numerics.d_max)?;
        for z in &r.eigenvalues {
            eig.push(vec![spin(s), spin(sp), z.re.into(), z.im.into()]);
        }
        let im = r
            .gap_imag
            .iter()
            .cloned()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        gaps.push(vec![
            spin(s),
            spin(sp),
            r.gap.into(),
            im.into(),
            r.zero_modes.into(),
            r.gap_excluding_zero_modes.unwrap_or(r.gap).into(),
        ]);
    }
    Ok(Output {
        tables: vec![eig, gaps],
        summary: json!({ "n_total": ens.n_total() }),
    })
}

/// Runs the block engine against the dense oracle. For the time crystal both
/// anticommutator orderings are checked, the configured one first.
pub fn validate(cfg: &RunConfig) -> Result<Output> {
    let ens = cfg.ensemble()?;
    let split = two_members(&ens)?;
    if ens.n_total() > MAX_EVOLUTION_SPINS {
        return Err(Error::Config(format!(
            "validation runs the dense oracle, which is limited to {MAX_EVOLUTION_SPINS} spins"
        )));
    }
    let tol = cfg.validate.clone().unwrap_or_default().tolerance;
    let spec = lindblad(cfg, ens.n_total())?;
    let mut specs = vec![spec.clone()];
    if cfg.model_kind()? == ModelKind::Btc {
        let mut other = spec;
        other.ordering = match other.ordering {
            AnticommutatorOrdering::Standard => AnticommutatorOrdering::Reversed,
            AnticommutatorOrdering::Reversed => AnticommutatorOrdering::Standard,
        };
        specs.push(other);
    }
    let times = uniform_grid(cfg.numerics.t_final, cfg.numerics.samples);
    let rho0 = initial_block_state(&ens)?;
    let full0 = FullState::product(&ens)?;
    let mut t = Table::new(
        "validate",
        &[
            "ordering",
            "t",
            "trace_distance",
            "leakage",
            "min_eigenvalue",
            "trace",
        ],
    );
    let mut worst = 0.0f64;
    for spec in &specs {
        let name = match spec.ordering {
            AnticommutatorOrdering::Standard => "standard",
            AnticommutatorOrdering::Reversed => "reversed",
        };
        let blocks = evolve_blocks(spec, &rho0, &times, &cfg.numerics.evolve_options())?;
        let full = full_lindblad_evolve(spec, &full0, &times)?;
        for ((time, b), f) in times.iter().zip(&blocks.states).zip(&full) {
            let p = project_full_to_blocks(f, split)?;
            let d = trace_distance(&b.to_dense().view(), &p.blocks.to_dense().view())?;
            worst = worst.max(d);
            t.push(vec![
                name.into(),
                (*time).into(),
                d.into(),
                p.leakage.into(),
                min_eigenvalue(f)?.into(),
                block_trace(b).re.into(),
            ]);
        }
    }
    if worst > tol {
        return Err(Error::Consistency(format!(
            "block engine and dense oracle differ by trace distance {worst:e} > {tol:e}"
        )));
    }
    Ok(Output {
        tables: vec![t],
        summary: json!({ "max_trace_distance": worst, "tolerance": tol }),
    })
}
