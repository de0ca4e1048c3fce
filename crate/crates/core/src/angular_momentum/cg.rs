//! Clebsch–Gordan coefficients from the Racah closed form, evaluated exactly.
//!
//! The alternating sum is rewritten as a sum of products of binomials, which is
//! an exact integer. The squared coefficient is then an exact rational that is
//! rounded to `f64` once, so there is no cancellation anywhere.
//!
//! Binomial and factorial tables live in a process-wide cache behind an
//! `RwLock`: readers share it freely, and the write lock is only taken when a
//! larger table is needed. Entries are never modified once written.

use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use super::spin::SpinQuantum;
use crate::error::Result;

#[derive(Default)]
pub(crate) struct Tables {
    pascal: Vec<Vec<BigUint>>,
    factorial: Vec<BigUint>,
}

impl Tables {
    fn grow(&mut self, n: usize) {
        if self.factorial.is_empty() {
            self.factorial.push(BigUint::one());
        }
        while self.factorial.len() <= n {
            let k = self.factorial.len();
            let next = &self.factorial[k - 1] * BigUint::from(k);
            self.factorial.push(next);
        }
        while self.pascal.len() <= n {
            let k = self.pascal.len();
            let mut row = Vec::with_capacity(k + 1);
            row.push(BigUint::one());
            for i in 1..k {
                row.push(&self.pascal[k - 1][i - 1] + &self.pascal[k - 1][i]);
            }
            if k > 0 {
                row.push(BigUint::one());
            }
            self.pascal.push(row);
        }
    }

    fn binom(&self, n: i64, k: i64) -> Option<&BigUint> {
        if n < 0 || k < 0 || k > n {
            None
        } else {
            Some(&self.pascal[n as usize][k as usize])
        }
    }

    fn fact(&self, n: i64) -> &BigUint {
        &self.factorial[n as usize]
    }
}

static TABLES: OnceLock<RwLock<Tables>> = OnceLock::new();

/// Runs `f` with tables covering arguments up to `n`.
pub(crate) fn with_tables<R>(n: usize, f: impl FnOnce(&Tables) -> R) -> R {
    let lock = TABLES.get_or_init(|| RwLock::new(Tables::default()));
    {
        let t = lock.read().unwrap_or_else(|p| p.into_inner());
        if t.factorial.len() > n && t.pascal.len() > n {
            return f(&t);
        }
    }
    let mut t = lock.write().unwrap_or_else(|p| p.into_inner());
    t.grow(n);
    f(&t)
}

/// Largest table index touched by couplings of `j1` and `j2`.
pub(crate) fn table_size(j1: SpinQuantum, j2: SpinQuantum) -> usize {
    (j1.twice() + j2.twice()) as usize + 2
}

/// Nearest `f64` to `num / den`.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let e = num.bits() as i64 - den.bits() as i64;
    let shift = 64 - e;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let mantissa = q.to_f64().unwrap_or(f64::INFINITY);
    let half = (-shift / 2) as i32;
    mantissa * 2f64.powi(half) * 2f64.powi(-shift as i32 - half)
}

/// ⟨j1 m1; j2 m2 | S M⟩ for already-validated projections (twice-values).
pub(crate) fn cg_exact(
    t: &Tables,
    j1: SpinQuantum,
    tm1: i32,
    j2: SpinQuantum,
    tm2: i32,
    s: SpinQuantum,
    tm: i32,
) -> f64 {
    let (tj1, tj2, ts) = (j1.twice() as i64, j2.twice() as i64, s.twice() as i64);
    let (tm1, tm2, tm) = (tm1 as i64, tm2 as i64, tm as i64);
    if tm1 + tm2 != tm || ts < (tj1 - tj2).abs() || ts > tj1 + tj2 || (tj1 + tj2 + ts) % 2 != 0 {
        return 0.0;
    }
    let a = (tj1 + tj2 - ts) / 2;
    let b = (tj1 - tj2 + ts) / 2;
    let c = (-tj1 + tj2 + ts) / 2;
    let s1 = (tj1 + tj2 + ts) / 2 + 1;
    let p = (tj1 - tm1) / 2;
    let q = (tj2 + tm2) / 2;

    let mut sum = BigInt::zero();
    let k_lo = 0.max(p - b).max(q - c);
    let k_hi = a.min(p).min(q);
    for k in k_lo..=k_hi {
        let (Some(x), Some(y), Some(z)) = (t.binom(a, k), t.binom(b, p - k), t.binom(c, q - k))
        else {
            continue;
        };
        let term = BigInt::from_biguint(Sign::Plus, x * y * z);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let f = t.fact((tj1 + tm1) / 2)
        * t.fact((tj1 - tm1) / 2)
        * t.fact((tj2 + tm2) / 2)
        * t.fact((tj2 - tm2) / 2)
        * t.fact((ts + tm) / 2)
        * t.fact((ts - tm) / 2);
    let mag = sum.magnitude();
    let num = BigUint::from((ts + 1) as u64) * f * mag * mag;
    let den = t.fact(a) * t.fact(b) * t.fact(c) * t.fact(s1);
    let value = ratio_to_f64(&num, &den).sqrt();
    if sum.sign() == Sign::Minus {
        -value
    } else {
        value
    }
}

/// Condon–Shortley Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | S M⟩.
///
/// Projections are passed as twice their value. The result is zero when
/// M ≠ m1 + m2 or when S is not in the triangle of j1 and j2; inadmissible
/// projections are a domain error.
pub fn cg_coefficient(
    j1: SpinQuantum,
    twice_m1: i32,
    j2: SpinQuantum,
    twice_m2: i32,
    s: SpinQuantum,
    twice_m: i32,
) -> Result<f64> {
    j1.check_projection(twice_m1)?;
    j2.check_projection(twice_m2)?;
    s.check_projection(twice_m)?;
    let n = table_size(j1, j2).max(s.twice() as usize + 2);
    Ok(with_tables(n, |t| {
        cg_exact(t, j1, twice_m1, j2, twice_m2, s, twice_m)
    }))
}
