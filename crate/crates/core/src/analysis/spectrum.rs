use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

pub const MIN_SPECTRAL_LENGTH: usize = 64;

const PEAK_OVER_MEDIAN: f64 = 10.0;
const PEAK_RELATIVE_FLOOR: f64 = 1e-6;
const LIMIT_CYCLE_SHARE: f64 = 0.9;
const BEAT_POWER_RATIO: f64 = 10.0;
const MIN_PERIODS: f64 = 20.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Hann,
    Rect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Steady,
    LimitCycle,
    Beating,
    Unclassified,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Steady => "steady",
            Classification::LimitCycle => "limit_cycle",
            Classification::Beating => "beating",
            Classification::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    /// Interpolated frequency (cycles per unit time).
    pub frequency: f64,
    /// Power summed over the peak's lobe.
    pub power: f64,
    /// Lobe width in frequency units.
    pub width: f64,
    pub bin: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub label: String,
    pub frequencies: Vec<f64>,
    /// One-sided power; sums to the windowed time-domain energy.
    pub power: Vec<f64>,
    /// Sorted by power, descending.
    pub peaks: Vec<Peak>,
    pub classification: Classification,
    pub bin_width: f64,
    /// Σ x_w² of the mean-subtracted, windowed samples.
    pub energy: f64,
    pub duration: f64,
}

impl SpectrumReport {
    pub fn dominant(&self) -> Option<&Peak> {
        self.peaks.first()
    }
}

fn window_weights(n: usize, w: Window) -> Vec<f64> {
    match w {
        Window::Rect => vec![1.0; n],
        Window::Hann => (0..n)
            .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect(),
    }
}

/// Windowed one-sided power spectrum with peak picking.
///
/// The mean is removed before windowing. Peaks are local maxima above ten
/// times the median power, with sub-bin frequencies from a parabola through
/// the log power of the three bins around each maximum.
pub fn spectrum(series: &TimeSeries, window: Window) -> Result<SpectrumReport> {
    let n = series.len();
    if n < MIN_SPECTRAL_LENGTH {
        return Err(Error::domain(format!(
            "series '{}' has {n} samples, spectra need at least {MIN_SPECTRAL_LENGTH}",
            series.label
        )));
    }
    if series.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "series '{}' has non-finite samples",
            series.label
        )));
    }
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let w = window_weights(n, window);
    let mut buf: Vec<Complex<f64>> = series
        .values
        .iter()
        .zip(&w)
        .map(|(x, wk)| Complex::new((x - mean) * wk, 0.0))
        .collect();
    let energy: f64 = buf.iter().map(|z| z.re * z.re).sum();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let bin_width = 1.0 / (n as f64 * series.dt);
    let frequencies: Vec<f64> = (0..=half).map(|k| k as f64 * bin_width).collect();
    let power: Vec<f64> = (0..=half)
        .map(|k| {
            let weight = if k == 0 || (n % 2 == 0 && k == half) {
                1.0
            } else {
                2.0
            };
            weight * buf[k].norm_sqr() / n as f64
        })
        .collect();

    let scale = series.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let flat = energy <= (1e-12 * scale).powi(2) * n as f64 || scale == 0.0;
    let peaks = if flat {
        Vec::new()
    } else {
        find_peaks(&power, bin_width)
    };
    let duration = series.duration();
    let classification = spectral_classification(&peaks, bin_width, duration);
    Ok(SpectrumReport {
        label: series.label.clone(),
        frequencies,
        power,
        peaks,
        classification,
        bin_width,
        energy,
        duration,
    })
}

fn find_peaks(power: &[f64], df: f64) -> Vec<Peak> {
    let m = power.len();
    if m < 3 {
        return Vec::new();
    }
    let mut sorted = power.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[m / 2];
    let top = sorted[m - 1];
    let threshold = (PEAK_OVER_MEDIAN * median).max(PEAK_RELATIVE_FLOOR * top);
    let mut peaks = Vec::new();
    for k in 1..m - 1 {
        let p = power[k];
        if !(p > power[k - 1] && p >= power[k + 1] && p > threshold) {
            continue;
        }
        let (a, b, c) = (
            power[k - 1].max(1e-300).ln(),
            p.ln(),
            power[k + 1].max(1e-300).ln(),
        );
        let denom = a - 2.0 * b + c;
        let delta = if denom < 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let mut lo = k;
        while lo > 0 && power[lo - 1] < power[lo] {
            lo -= 1;
        }
        let mut hi = k;
        while hi + 1 < m && power[hi + 1] <= power[hi] {
            hi += 1;
        }
        peaks.push(Peak {
            frequency: (k as f64 + delta) * df,
            power: power[lo..=hi].iter().sum(),
            width: (hi - lo) as f64 * df,
            bin: k,
        });
    }
    peaks.sort_by(|x, y| y.power.total_cmp(&x.power).then(x.bin.cmp(&y.bin)));
    peaks
}

/// Groups peaks into harmonic families, strongest first: (fundamental, total power).
fn harmonic_families(peaks: &[Peak], df: f64) -> Vec<(f64, f64)> {
    let mut families: Vec<(f64, f64)> = Vec::new();
    for p in peaks {
        let member = families.iter_mut().find(|(f0, _)| {
            if *f0 <= 0.0 {
                return false;
            }
            let n = (p.frequency / f0).round();
            n >= 1.0 && (p.frequency - n * f0).abs() <= (2.0 * df).max(0.005 * p.frequency)
        });
        match member {
            Some(fam) => fam.1 += p.power,
            None => families.push((p.frequency, p.power)),
        }
    }
    families.sort_by(|a, b| b.1.total_cmp(&a.1));
    families
}

fn spectral_classification(peaks: &[Peak], df: f64, duration: f64) -> Classification {
    if peaks.is_empty() {
        return Classification::Steady;
    }
    let families = harmonic_families(peaks, df);
    let total: f64 = families.iter().map(|f| f.1).sum();
    let (f0, p0) = families[0];
    if f0 * duration < MIN_PERIODS {
        return Classification::Unclassified;
    }
    if p0 >= LIMIT_CYCLE_SHARE * total {
        return Classification::LimitCycle;
    }
    if families.len() >= 2 && families[1].1 * BEAT_POWER_RATIO >= p0 {
        return Classification::Beating;
    }
    Classification::Unclassified
}

/// True when the peak-to-peak range over the last 20% of samples is below
/// `rel` times `reference`.
pub fn steady_by_range(values: &[f64], reference: f64, rel: f64) -> bool {
    if values.is_empty() {
        return true;
    }
    let start = values.len() - (values.len() / 5).max(1);
    let tail = &values[start..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    hi - lo < rel * reference
}

/// Full classification of one observable: the range rule on the whole
/// trajectory, then spectral rules on the trajectory with its leading
/// `trim` fraction removed.
pub fn classify_series(
    series: &TimeSeries,
    reference: f64,
    trim: f64,
    window: Window,
) -> Result<(Classification, Option<SpectrumReport>)> {
    let trimmed = series.trim_transient(trim);
    let report = spectrum(&trimmed, window)?;
    if steady_by_range(&series.values, reference, 1e-6) {
        return Ok((Classification::Steady, Some(report)));
    }
    let class = report.classification;
    Ok((class, Some(report)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LockResult {
    pub locked: bool,
    pub detuning: f64,
}

/// Compares dominant frequencies; locked when they differ by at most one bin.
pub fn locking_check(a: &SpectrumReport, b: &SpectrumReport) -> Result<LockResult> {
    let (pa, pb) = match (a.dominant(), b.dominant()) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::domain(format!(
                "locking needs a peak in both '{}' and '{}'",
                a.label, b.label
            )))
        }
    };
    let detuning = pa.frequency - pb.frequency;
    Ok(LockResult {
        locked: detuning.abs() <= a.bin_width.max(b.bin_width),
        detuning,
    })
}
