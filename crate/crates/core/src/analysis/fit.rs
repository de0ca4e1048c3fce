use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
}

/// Ordinary least squares y ≈ slope·x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::FitNotApplicable(format!(
            "need at least two paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitNotApplicable("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - slope * a - intercept;
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Fits y ≈ A·x^p on log–log axes; `slope` is the exponent p.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::FitNotApplicable(
            "power-law fit needs positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let n = [16.0, 24.0, 32.0, 48.0, 64.0];
        let inv: Vec<f64> = n.iter().map(|x| 3.0 / x).collect();
        let f = fit_power_law(&n, &inv).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let flat = vec![0.4; 5];
        assert!(fit_power_law(&n, &flat).unwrap().slope.abs() < 1e-12);
        assert!(fit_power_law(&n, &[1.0, -1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
    }
}
