use ndarray_linalg::EigVals;
use rayon::prelude::*;
use serde::Serialize;

use super::evolve::DEFAULT_D_MAX;
use super::spec::LindbladSpec;
use super::superop::{dense_restriction, BlockGenerator};
use crate::analysis::fit_power_law;
use crate::angular_momentum::SpinQuantum;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Eigenvalues with |Re λ| below this are treated as stationary.
pub const ZERO_MODE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub sector_pair: (SpinQuantum, SpinQuantum),
    /// Sorted by real part, descending, then imaginary part.
    pub eigenvalues: Vec<C64>,
    pub gap: f64,
    /// Imaginary parts of the eigenvalues attaining the gap.
    pub gap_imag: Vec<f64>,
    pub zero_modes: usize,
    /// Off-diagonal blocks only: the gap with stationary modes excluded,
    /// when that differs from `gap`.
    pub gap_excluding_zero_modes: Option<f64>,
}

fn sort_eigs(v: &mut [C64]) {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
}

fn gap_of(eigs: &[C64], exclude_zero: bool) -> Option<(f64, Vec<f64>)> {
    let pool: Vec<&C64> = eigs
        .iter()
        .filter(|z| !exclude_zero || z.re.abs() >= ZERO_MODE_TOL)
        .collect();
    let max_re = pool.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if !max_re.is_finite() {
        return None;
    }
    let tol = 1e-8 * max_re.abs().max(1e-6);
    let imag = pool
        .iter()
        .filter(|z| (z.re - max_re).abs() <= tol)
        .map(|z| z.im)
        .collect();
    Some((-max_re, imag))
}

/// Dense spectrum of the generator on block (S, S').
///
/// For S = S' the stationary eigenvalues are excluded from the gap. For
/// S ≠ S' nothing is excluded, and the alternative is reported when the two
/// conventions differ.
pub fn block_spectrum(
    spec: &LindbladSpec,
    s: SpinQuantum,
    sp: SpinQuantum,
) -> Result<SpectralResult> {
    block_spectrum_with_limit(spec, s, sp, DEFAULT_D_MAX)
}

pub fn block_spectrum_with_limit(
    spec: &LindbladSpec,
    s: SpinQuantum,
    sp: SpinQuantum,
    d_max: usize,
) -> Result<SpectralResult> {
    let gen = BlockGenerator::new(spec, s, sp)?;
    let d = gen.dim();
    if d > d_max {
        return Err(Error::Resource(format!(
            "block ({s}, {sp}) has dimension {d} > {d_max}; use time evolution and decay fits"
        )));
    }
    let trip = gen.triplets();
    let comps = super::superop::components_of(d, &trip);
    let mut eigenvalues = Vec::with_capacity(d);
    for idx in &comps {
        let m = dense_restriction(&trip, d, idx);
        let ev = m.eigvals().map_err(|e| Error::EigenSolver(e.to_string()))?;
        if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::EigenSolver("non-finite eigenvalue".into()));
        }
        eigenvalues.extend(ev.iter().copied());
    }
    sort_eigs(&mut eigenvalues);
    let zero_modes = eigenvalues
        .iter()
        .filter(|z| z.re.abs() < ZERO_MODE_TOL)
        .count();
    let diagonal = s == sp;
    let (gap, gap_imag) = gap_of(&eigenvalues, diagonal).unwrap_or((0.0, vec![]));
    let gap_excluding_zero_modes = if diagonal || zero_modes == 0 {
        None
    } else {
        gap_of(&eigenvalues, true).map(|g| g.0)
    };
    Ok(SpectralResult {
        sector_pair: (s, sp),
        eigenvalues,
        gap: gap.max(0.0),
        gap_imag,
        zero_modes,
        gap_excluding_zero_modes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRow {
    pub n: u32,
    pub gap: f64,
    pub gap_imag: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapScan {
    pub rows: Vec<GapRow>,
    /// Log–log slope of gap against N, when at least two members succeeded.
    pub exponent: Option<f64>,
    pub r_squared: Option<f64>,
    pub failures: Vec<(u32, String)>,
}

/// Spectra of one block per family member, in parallel; failed members are
/// listed instead of aborting the scan.
pub fn gap_scaling_scan(
    family: &[(u32, LindbladSpec)],
    sector_rule: impl Fn(u32) -> (SpinQuantum, SpinQuantum) + Sync,
) -> Result<GapScan> {
    if family.len() < 4 {
        return Err(Error::domain(format!(
            "a scaling scan needs at least 4 sizes, got {}",
            family.len()
        )));
    }
    let results: Vec<(u32, Result<SpectralResult>)> = family
        .par_iter()
        .map(|(n, spec)| {
            let (s, sp) = sector_rule(*n);
            (*n, block_spectrum(spec, s, sp))
        })
        .collect();
    Ok(scan_from_results(results))
}

pub(crate) fn scan_from_results(results: Vec<(u32, Result<SpectralResult>)>) -> GapScan {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(sr) => rows.push(GapRow {
                n,
                gap: sr.gap,
                gap_imag: sr.gap_imag,
            }),
            Err(e) => failures.push((n, e.to_string())),
        }
    }
    rows.sort_by_key(|r| r.n);
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let fit = fit_power_law(&ns, &gaps).ok();
    GapScan {
        exponent: fit.map(|f| f.slope),
        r_squared: fit.map(|f| f.r_squared),
        rows,
        failures,
    }
}
