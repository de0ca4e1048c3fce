use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::spin::SpinQuantum;
use crate::linalg::{c, C64, I};

/// A Cartesian axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// A collective spin operator: a Cartesian component or a ladder operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl From<Axis> for Component {
    fn from(a: Axis) -> Self {
        match a {
            Axis::X => Component::X,
            Axis::Y => Component::Y,
            Axis::Z => Component::Z,
        }
    }
}

/// Unnormalized collective spin matrices on a single multiplet, basis ordered
/// by descending projection.
#[derive(Clone, Debug)]
pub struct CollectiveOps {
    pub sector: SpinQuantum,
    pub sx: Array2<C64>,
    pub sy: Array2<C64>,
    pub sz: Array2<C64>,
    pub s_plus: Array2<C64>,
    pub s_minus: Array2<C64>,
}

impl CollectiveOps {
    pub fn get(&self, comp: Component) -> &Array2<C64> {
        match comp {
            Component::X => &self.sx,
            Component::Y => &self.sy,
            Component::Z => &self.sz,
            Component::Plus => &self.s_plus,
            Component::Minus => &self.s_minus,
        }
    }
}

/// ⟨j, m+1| S₊ |j, m⟩ with projections as twice-values.
pub(crate) fn raising_element(j: SpinQuantum, twice_m: i32) -> f64 {
    let tj = j.twice() as f64;
    let tm = twice_m as f64;
    (0.25 * (tj - tm) * (tj + tm + 2.0)).sqrt()
}

pub fn build_collective_ops(s: SpinQuantum) -> CollectiveOps {
    let d = s.dim();
    let mut sz = Array2::zeros((d, d));
    let mut sp = Array2::zeros((d, d));
    for k in 0..d {
        let tm = s.twice_m(k);
        sz[[k, k]] = c(tm as f64 / 2.0);
        if k > 0 {
            sp[[k - 1, k]] = c(raising_element(s, tm));
        }
    }
    let sm = sp.t().to_owned();
    let sx = (&sp + &sm) * c(0.5);
    let sy = (&sp - &sm) * (-0.5 * I);
    CollectiveOps {
        sector: s,
        sx,
        sy,
        sz,
        s_plus: sp,
        s_minus: sm,
    }
}
