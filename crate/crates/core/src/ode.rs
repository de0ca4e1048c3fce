//! Adaptive Dormand–Prince 5(4) integration with exact landing on output times.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// A first-order system ẏ = f(t, y) on real state vectors.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.1)(t, y, dy)
    }
}

/// Which components enter the local error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorScope {
    All,
    /// Only the first `n` components. With a closed leading subsystem this
    /// makes its trajectory independent of whatever is appended after it.
    Leading(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationControls {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
    pub error_scope: ErrorScope,
}

impl IntegrationControls {
    pub fn new(rtol: f64, atol: f64) -> Self {
        IntegrationControls {
            rtol,
            atol,
            h_min: 1e-14,
            max_steps: 50_000_000,
            error_scope: ErrorScope::All,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates from `times[0]` through every entry of `times` (non-decreasing),
/// calling `on_output(index, t, y)` at each, including the initial point.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[f64],
    times: &[f64],
    controls: &IntegrationControls,
    mut on_output: impl FnMut(usize, f64, &[f64]) -> Result<()>,
) -> Result<IntegrationStats> {
    let n = sys.dim();
    if y0.len() != n {
        return Err(Error::domain(format!(
            "state has length {}, system has {n}",
            y0.len()
        )));
    }
    if times.is_empty() {
        return Ok(IntegrationStats::default());
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::domain("output times must be non-decreasing"));
    }
    let scope = match controls.error_scope {
        ErrorScope::All => n,
        ErrorScope::Leading(m) => m.min(n),
    };
    let mut stats = IntegrationStats::default();
    let mut t = times[0];
    let mut y = y0.to_vec();
    check_finite(&y, t)?;
    on_output(0, t, &y)?;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    sys.rhs(t, &y, &mut k1);
    stats.evaluations += 1;
    let span = times[times.len() - 1] - t;
    let mut h = initial_step(sys, t, &y, &k1, span, controls, scope, &mut stats);

    for (idx, &t_out) in times.iter().enumerate().skip(1) {
        while t < t_out {
            if stats.accepted + stats.rejected >= controls.max_steps {
                return Err(Error::Integration {
                    time: t,
                    step: h,
                    reason: "step budget exhausted".into(),
                });
            }
            let remaining = t_out - t;
            let landing = h >= remaining;
            let hs = if landing { remaining } else { h };

            for i in 0..n {
                tmp[i] = y[i] + hs * A21 * k1[i];
            }
            sys.rhs(t + C2 * hs, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
            }
            sys.rhs(t + C3 * hs, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            sys.rhs(t + C4 * hs, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            sys.rhs(t + C5 * hs, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i]
                    + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let t_new = if landing { t_out } else { t + hs };
            sys.rhs(t_new, &tmp, &mut k6);
            for i in 0..n {
                ynew[i] =
                    y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            sys.rhs(t_new, &ynew, &mut k7);
            stats.evaluations += 6;

            let mut err = 0.0;
            for i in 0..scope {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = controls.atol + controls.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = if scope > 0 {
                (err / scope as f64).sqrt()
            } else {
                0.0
            };
            if !err.is_finite() {
                check_finite(&ynew, t_new)?;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };

            if err <= 1.0 {
                check_finite(&ynew, t_new)?;
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                t = t_new;
                stats.accepted += 1;
                // A step shortened only to land on an output time does not
                // shrink the step used afterwards.
                h = if landing {
                    h.max(hs * factor)
                } else {
                    hs * factor
                };
            } else {
                stats.rejected += 1;
                h = hs * factor.min(1.0);
                if h < controls.h_min {
                    return Err(Error::Integration {
                        time: t,
                        step: h,
                        reason: "step size collapsed below the minimum".into(),
                    });
                }
            }
        }
        on_output(idx, t, &y)?;
    }
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    span: f64,
    c: &IntegrationControls,
    scope: usize,
    stats: &mut IntegrationStats,
) -> f64 {
    if span <= 0.0 || scope == 0 {
        return span.max(1e-6);
    }
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..scope).map(|i| v(i) * v(i)).sum::<f64>() / scope as f64).sqrt()
    };
    let sc = |i: usize| c.atol + c.rtol * y[i].abs();
    let d0 = rms(&|i| y[i] / sc(i));
    let d1 = rms(&|i| f0[i] / sc(i));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    sys.rhs(t + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let d2 = rms(&|i| (f1[i] - f0[i]) / sc(i)) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

fn check_finite(y: &[f64], t: f64) -> Result<()> {
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            time: t,
            reason: format!("non-finite state component {i}"),
        });
    }
    Ok(())
}

/// Views complex data as interleaved (re, im) pairs.
pub fn as_real(v: &[C64]) -> &[f64] {
    // SAFETY: Complex<f64> is #[repr(C)] with fields (re, im).
    unsafe { std::slice::from_raw_parts(v.as_ptr() as *const f64, v.len() * 2) }
}

pub fn as_real_mut(v: &mut [C64]) -> &mut [f64] {
    // SAFETY: as in `as_real`.
    unsafe { std::slice::from_raw_parts_mut(v.as_mut_ptr() as *mut f64, v.len() * 2) }
}

pub fn as_complex(v: &[f64]) -> &[C64] {
    assert!(v.len() % 2 == 0);
    // SAFETY: alignment of f64 equals that of Complex<f64>; length is even.
    unsafe { std::slice::from_raw_parts(v.as_ptr() as *const C64, v.len() / 2) }
}

pub fn as_complex_mut(v: &mut [f64]) -> &mut [C64] {
    assert!(v.len() % 2 == 0);
    // SAFETY: as in `as_complex`.
    unsafe { std::slice::from_raw_parts_mut(v.as_mut_ptr() as *mut C64, v.len() / 2) }
}

/// `n + 1` uniformly spaced points on [0, t_final].
pub fn uniform_grid(t_final: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| t_final * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_energy() {
        let sys = (2usize, |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let times = uniform_grid(100.0, 1000);
        let mut last = vec![0.0; 2];
        let c = IntegrationControls::new(1e-10, 1e-12);
        integrate(&sys, &[1.0, 0.0], &times, &c, |_, _, y| {
            last.copy_from_slice(y);
            Ok(())
        })
        .unwrap();
        let energy = 0.5 * (last[0] * last[0] + last[1] * last[1]);
        assert!((energy - 0.5).abs() < 1e-8, "{energy}");
        assert!((last[0] - 100f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn lands_exactly_on_output_times() {
        let sys = (1usize, |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = -0.5 * y[0]
        });
        let times = [0.0, 0.1, 0.25, 3.0, 3.0, 7.5];
        let mut seen = Vec::new();
        integrate(
            &sys,
            &[1.0],
            &times,
            &IntegrationControls::new(1e-10, 1e-12),
            |_, t, y| {
                seen.push((t, y[0]));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen.iter().map(|p| p.0).collect::<Vec<_>>(), times.to_vec());
        for (t, y) in seen {
            assert!((y - (-0.5 * t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn blow_up_reports_time() {
        let sys = (1usize, |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0]
        });
        let err = integrate(
            &sys,
            &[1.0],
            &[0.0, 2.0],
            &IntegrationControls::new(1e-8, 1e-10),
            |_, _, _| Ok(()),
        )
        .unwrap_err();
        match err {
            Error::Integration { time, .. } | Error::Numerical { time, .. } => {
                assert!(time > 0.9 && time <= 1.0 + 1e-6)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leading_scope_decouples_closed_subsystem() {
        let closed = |y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0] - 0.1 * y[1] * y[0] * y[0];
        };
        let alone = (2usize, move |_t: f64, y: &[f64], dy: &mut [f64]| {
            closed(y, dy)
        });
        let joint = (3usize, move |_t: f64, y: &[f64], dy: &mut [f64]| {
            closed(&y[..2], &mut dy[..2]);
            dy[2] = y[0] * y[2].sin() * 30.0;
        });
        let times = uniform_grid(50.0, 500);
        let mut c = IntegrationControls::new(1e-10, 1e-12);
        let mut a = Vec::new();
        integrate(&alone, &[1.0, 0.0], &times, &c, |_, _, y| {
            a.push([y[0], y[1]]);
            Ok(())
        })
        .unwrap();
        c.error_scope = ErrorScope::Leading(2);
        let mut b = Vec::new();
        integrate(&joint, &[1.0, 0.0, 0.3], &times, &c, |_, _, y| {
            b.push([y[0], y[1]]);
            Ok(())
        })
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complex_views_round_trip() {
        let mut v = vec![C64::new(1.0, 2.0), C64::new(3.0, 4.0)];
        assert_eq!(as_real(&v), &[1.0, 2.0, 3.0, 4.0]);
        as_real_mut(&mut v)[3] = -1.0;
        assert_eq!(v[1], C64::new(3.0, -1.0));
        assert_eq!(as_complex(&[5.0, 6.0])[0], C64::new(5.0, 6.0));
    }
}
