use serde::Serialize;

use crate::analysis::{linear_fit, TimeSeries};
use crate::error::{Error, Result};

pub const NOISE_FLOOR: f64 = 1e-12;
const TAIL_FRACTION: f64 = 0.4;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub used_envelope: bool,
    pub points: usize,
}

/// Exponential decay rate of the tail of a signal.
///
/// Oscillating signals (four or more sign changes in the window) are fitted
/// through the local maxima of |x| instead of every sample.
pub fn asymptotic_decay_rate(series: &TimeSeries) -> Result<DecayFit> {
    let x = &series.values;
    let n = x.len();
    if n < 8 {
        return Err(Error::FitNotApplicable(format!(
            "series of length {n} is too short"
        )));
    }
    let peak_all = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let peak_tail = x[n - n / 3..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(peak_tail < peak_all) {
        return Err(Error::FitNotApplicable("signal does not decay".into()));
    }
    let above: Vec<usize> = (0..n).filter(|&i| x[i].abs() > NOISE_FLOOR).collect();
    if above.len() < 4 {
        return Err(Error::FitNotApplicable(
            "signal is below the noise floor".into(),
        ));
    }
    let last = *above.last().unwrap();
    let skip = above.len() - ((above.len() as f64 * TAIL_FRACTION).ceil() as usize).max(3);
    let first = above[skip];
    let window = first..=last;

    let sign_changes = x[window.clone()]
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && (w[0] > 0.0) != (w[1] > 0.0))
        .count();
    let used_envelope = sign_changes >= 4;
    let idx: Vec<usize> = if used_envelope {
        window
            .filter(|&i| i > 0 && i + 1 < n)
            .filter(|&i| {
                let a = x[i].abs();
                a > NOISE_FLOOR && a >= x[i - 1].abs() && a > x[i + 1].abs()
            })
            .collect()
    } else {
        window.filter(|&i| x[i].abs() > NOISE_FLOOR).collect()
    };
    if idx.len() < 3 {
        return Err(Error::FitNotApplicable(format!(
            "only {} usable points in the tail",
            idx.len()
        )));
    }
    let t: Vec<f64> = idx.iter().map(|&i| i as f64 * series.dt).collect();
    let y: Vec<f64> = idx.iter().map(|&i| x[i].abs().ln()).collect();
    let fit = linear_fit(&t, &y)?;
    if !(fit.slope < 0.0) {
        return Err(Error::FitNotApplicable(format!(
            "tail slope {} is not negative",
            fit.slope
        )));
    }
    Ok(DecayFit {
        rate: -fit.slope,
        r_squared: fit.r_squared,
        used_envelope,
        points: idx.len(),
    })
}
