//! Spectral analysis of trajectories and curve fitting.

mod fit;
mod spectrum;

pub use fit::{fit_power_law, linear_fit, LinearFit};
pub use spectrum::{
    classify_series, locking_check, spectrum, steady_by_range, Classification, LockResult, Peak,
    SpectrumReport, Window, MIN_SPECTRAL_LENGTH,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled real signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!(
                "sampling step must be positive, got {dt}"
            )));
        }
        Ok(TimeSeries {
            dt,
            values,
            label: label.into(),
        })
    }

    /// Samples `f` at t = k·dt for k = 0..n.
    pub fn from_fn(
        dt: f64,
        n: usize,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        TimeSeries::new(dt, (0..n).map(|k| f(k as f64 * dt)).collect(), label)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.values.len() as f64
    }

    /// Drops the leading `fraction` of samples.
    pub fn trim_transient(&self, fraction: f64) -> TimeSeries {
        let skip = ((self.values.len() as f64) * fraction.clamp(0.0, 1.0)).floor() as usize;
        TimeSeries {
            dt: self.dt,
            values: self.values[skip..].to_vec(),
            label: self.label.clone(),
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| k as f64 * self.dt)
    }
}
