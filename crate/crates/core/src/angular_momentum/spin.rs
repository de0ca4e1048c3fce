use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An angular momentum quantum number stored as twice its value, so that
/// half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinQuantum(u32);

impl SpinQuantum {
    pub const ZERO: SpinQuantum = SpinQuantum(0);
    pub const HALF: SpinQuantum = SpinQuantum(1);

    pub const fn from_twice(twice: u32) -> Self {
        SpinQuantum(twice)
    }

    /// The spin carried by the symmetric sector of `n` spin-½ particles.
    pub const fn from_spin_count(n: u32) -> Self {
        SpinQuantum(n)
    }

    /// Parses a value such as 1.5; fails unless `2 * value` is a non-negative integer.
    pub fn from_f64(value: f64) -> Result<Self> {
        let twice = 2.0 * value;
        if !twice.is_finite() || twice < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::domain(format!("{value} is not a half-integer spin")));
        }
        Ok(SpinQuantum(twice.round() as u32))
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Multiplet dimension 2j+1.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// Twice the projection at basis index `k`; index 0 is m = +j.
    pub fn twice_m(self, k: usize) -> i32 {
        self.0 as i32 - 2 * k as i32
    }

    /// Basis index of the projection with twice-value `twice_m`.
    pub fn index_of(self, twice_m: i32) -> Option<usize> {
        let tj = self.0 as i32;
        if twice_m.abs() > tj || (tj - twice_m) % 2 != 0 {
            None
        } else {
            Some(((tj - twice_m) / 2) as usize)
        }
    }

    /// Checks that `twice_m` is an admissible projection of this spin.
    pub fn check_projection(self, twice_m: i32) -> Result<()> {
        self.index_of(twice_m).map(|_| ()).ok_or_else(|| {
            Error::domain(format!(
                "projection {}/2 is not admissible for j = {}",
                twice_m, self
            ))
        })
    }

    /// Sectors |j1 − j2|, …, j1 + j2 in descending order.
    pub fn coupled_sectors(j1: SpinQuantum, j2: SpinQuantum) -> Vec<SpinQuantum> {
        let lo = j1.0.abs_diff(j2.0);
        let hi = j1.0 + j2.0;
        (lo..=hi).rev().step_by(2).map(SpinQuantum).collect()
    }
}

impl fmt::Display for SpinQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
