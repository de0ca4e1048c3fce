//! Run configuration, read from a TOML file.
//!
//! Every table rejects unknown keys. Sections that a command does not use are
//! ignored by it, so one file can drive several commands.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::Deserialize;

use crate::analysis::Window;
use crate::error::{Error, Result};
use crate::liouville::{AnticommutatorOrdering, EvolutionMethod, EvolveOptions, DEFAULT_D_MAX};
use crate::meanfield::{AntisymmetricField, JyConvention, TrajectoryOptions};
use crate::models::{dicke_gcr, BTCParams, DickeParams};
use crate::ode::IntegrationControls;
use crate::state_prep::{CoherentParams, EnsembleMember, EnsembleSpec};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ensemble: Option<EnsembleConfig>,
    pub dicke: Option<DickeConfig>,
    pub btc: Option<BtcConfig>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    pub output: Option<OutputConfig>,
    pub decompose: Option<DecomposeConfig>,
    pub gap_scan: Option<GapScanConfig>,
    pub meanfield: Option<MeanfieldConfig>,
    pub phase_diagram: Option<PhaseDiagramConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub validate: Option<ValidateConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberConfig {
    pub n_spins: u32,
    pub theta: f64,
    pub phi: f64,
}

/// Either an explicit member list or two equal halves on the equator.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default)]
    pub members: Vec<MemberConfig>,
    pub n_half: Option<u32>,
    pub phi_a: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeConfig {
    pub omega_z: f64,
    pub omega_0: f64,
    pub kappa: f64,
    pub g: Option<f64>,
    /// Coupling as a multiple of the homogeneous critical value.
    pub g_over_gcr: Option<f64>,
    #[serde(default)]
    pub jy_convention: JyConvention,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BtcConfig {
    pub omega_x: f64,
    pub kappa: f64,
    #[serde(default)]
    pub j_xx: f64,
    #[serde(default)]
    pub ordering: AnticommutatorOrdering,
    #[serde(default)]
    pub antisymmetric_field: AntisymmetricField,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub t_final: f64,
    pub samples: usize,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub method: EvolutionMethod,
    pub d_max: usize,
    pub window: Window,
    pub trim: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            t_final: 10.0,
            samples: 100,
            rtol: None,
            atol: None,
            method: EvolutionMethod::Auto,
            d_max: DEFAULT_D_MAX,
            window: Window::Hann,
            trim: 0.5,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: Option<String>,
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub n_half: u32,
    #[serde(default = "equator")]
    pub theta: f64,
    /// Explicit φ_A values; otherwise kπ/`phi_a_steps` for k = 0..=steps.
    pub phi_a: Option<Vec<f64>>,
    pub phi_a_steps: Option<u32>,
}

fn equator() -> f64 {
    FRAC_PI_2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapScanConfig {
    pub sizes: Vec<u32>,
    /// The block is (N/2, N/2 − offset).
    #[serde(default = "one")]
    pub sector_offset: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub lower: f64,
    pub upper: f64,
    #[serde(default = "threshold_tol")]
    pub rel_tol: f64,
}

fn threshold_tol() -> f64 {
    1e-3
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldConfig {
    pub threshold: Option<ThresholdConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    OmegaX,
    JXx,
    G,
    GOverGcr,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::OmegaX => "omega_x",
            SweepParameter::JXx => "j_xx",
            SweepParameter::G => "g",
            SweepParameter::GOverGcr => "g_over_gcr",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub n_half: u32,
    pub phi_a: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// (S, S') pairs; defaults to every diagonal and nearest-neighbour pair.
    pub pairs: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    #[serde(default = "validate_tol")]
    pub tolerance: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            tolerance: validate_tol(),
        }
    }
}

fn validate_tol() -> f64 {
    1e-6
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parse errors carry the line and column of the offending key.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        toml::from_str(text).map_err(|e| config_err(e.to_string().trim_end().to_owned()))?;
    cfg.numerics.check()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<(RunConfig, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok((parse_config(&text)?, text))
}

impl NumericsConfig {
    fn check(&self) -> Result<()> {
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(config_err("[numerics] t_final must be positive"));
        }
        if self.samples == 0 {
            return Err(config_err("[numerics] samples must be positive"));
        }
        if !(0.0..1.0).contains(&self.trim) {
            return Err(config_err("[numerics] trim must lie in [0, 1)"));
        }
        for (k, v) in [("rtol", self.rtol), ("atol", self.atol)] {
            if v.is_some_and(|x| !(x > 0.0)) {
                return Err(config_err(format!("[numerics] {k} must be positive")));
            }
        }
        Ok(())
    }

    fn controls(&self, base: IntegrationControls) -> IntegrationControls {
        let mut c = base;
        c.rtol = self.rtol.unwrap_or(base.rtol);
        c.atol = self.atol.unwrap_or(base.atol);
        c
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        let d = EvolveOptions::default();
        EvolveOptions {
            method: self.method,
            d_max: self.d_max,
            controls: self.controls(d.controls),
        }
    }

    pub fn trajectory_options(&self) -> TrajectoryOptions {
        let mut o = TrajectoryOptions::new(self.t_final, self.samples);
        o.controls = self.controls(o.controls);
        o
    }
}

impl RunConfig {
    pub fn ensemble(&self) -> Result<EnsembleSpec> {
        let e = self
            .ensemble
            .as_ref()
            .ok_or_else(|| config_err("missing [ensemble] section"))?;
        let spec = match (&e.members[..], e.n_half) {
            ([], Some(n)) => EnsembleSpec::split_equator(n, e.phi_a.unwrap_or(0.0)),
            ([], None) => return Err(config_err("[ensemble] needs either members or n_half")),
            (m, None) if e.phi_a.is_none() => m
                .iter()
                .map(|m| {
                    Ok(EnsembleMember {
                        n_spins: m.n_spins,
                        params: CoherentParams::new(m.theta, m.phi)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
                .and_then(EnsembleSpec::new),
            _ => {
                return Err(config_err(
                    "[ensemble] members cannot be combined with n_half/phi_a",
                ))
            }
        };
        spec.map_err(|e| config_err(format!("[ensemble] {e}")))
    }

    /// Dicke parameters at `n_total`, resolving `g_over_gcr` against the
    /// homogeneous critical coupling.
    pub fn dicke(&self, n_total: u32) -> Result<Option<(DickeParams, JyConvention)>> {
        let Some(d) = &self.dicke else {
            return Ok(None);
        };
        let mut p = DickeParams {
            omega_z: d.omega_z,
            omega_0: d.omega_0,
            kappa: d.kappa,
            g: 0.0,
            n_total,
        };
        p.g = match (d.g, d.g_over_gcr) {
            (Some(g), None) => g,
            (None, Some(r)) => {
                r * dicke_gcr(&p, None).map_err(|e| config_err(format!("[dicke] {e}")))?
            }
            _ => return Err(config_err("[dicke] set exactly one of g and g_over_gcr")),
        };
        p.validate()
            .map_err(|e| config_err(format!("[dicke] {e}")))?;
        Ok(Some((p, d.jy_convention)))
    }

    pub fn btc(&self, n_total: u32) -> Result<Option<(BTCParams, &BtcConfig)>> {
        let Some(b) = &self.btc else { return Ok(None) };
        let p = BTCParams {
            omega_x: b.omega_x,
            kappa: b.kappa,
            j_xx: b.j_xx,
            n_total,
        };
        p.validate().map_err(|e| config_err(format!("[btc] {e}")))?;
        Ok(Some((p, b)))
    }

    /// Exactly one of `[dicke]` and `[btc]` must be present.
    pub fn model_kind(&self) -> Result<ModelKind> {
        match (&self.dicke, &self.btc) {
            (Some(_), None) => Ok(ModelKind::Dicke),
            (None, Some(_)) => Ok(ModelKind::Btc),
            (None, None) => Err(config_err("a [dicke] or [btc] section is required")),
            _ => Err(config_err("[dicke] and [btc] are mutually exclusive")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Dicke,
    Btc,
}

impl DecomposeConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        match (&self.phi_a, self.phi_a_steps) {
            (Some(v), None) if !v.is_empty() => Ok(v.clone()),
            (None, Some(k)) if k > 0 => Ok((0..=k).map(|i| i as f64 * PI / k as f64).collect()),
            _ => Err(config_err(
                "[decompose] set either a non-empty phi_a or a positive phi_a_steps",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let e = parse_config("[numerics]\nt_final = 2.0\nsampels = 3\n").unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, Error::Config(_)));
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn split_and_explicit_ensembles() {
        let cfg = parse_config("[ensemble]\nn_half = 3\nphi_a = 1.0\n").unwrap();
        assert_eq!(
            cfg.ensemble().unwrap(),
            EnsembleSpec::split_equator(3, 1.0).unwrap()
        );
        let cfg = parse_config(
            "[ensemble]\nmembers = [{ n_spins = 1, theta = 0.5, phi = 0.0 }, { n_spins = 2, theta = 1.0, phi = 2.0 }]\n",
        )
        .unwrap();
        assert_eq!(cfg.ensemble().unwrap().n_total(), 3);
        let cfg = parse_config(
            "[ensemble]\nn_half = 3\nmembers = [{ n_spins = 1, theta = 0.5, phi = 0.0 }]\n",
        )
        .unwrap();
        assert!(matches!(cfg.ensemble(), Err(Error::Config(_))));
    }

    #[test]
    fn dicke_coupling_by_ratio() {
        let cfg =
            parse_config("[dicke]\nomega_z = 0.1\nomega_0 = 1.0\nkappa = 1.0\ng_over_gcr = 2.0\n")
                .unwrap();
        let (p, _) = cfg.dicke(10).unwrap().unwrap();
        assert!((p.g - 2.0 * dicke_gcr(&p, None).unwrap()).abs() < 1e-15);
        assert_eq!(cfg.model_kind().unwrap(), ModelKind::Dicke);
    }
}
