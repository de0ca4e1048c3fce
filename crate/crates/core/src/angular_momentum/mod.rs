//! Angular-momentum algebra: spins, Clebsch–Gordan coefficients, collective
//! operators, and the coupled basis of two subensembles.

mod block_operator;
mod cg;
mod coupling;
pub(crate) mod ops;
mod spin;

pub use block_operator::{
    antisymmetric_observable, offdiag_overlap_profile, subensemble_operator, symmetric_observable,
    BlockMatrix, BlockOperator, OverlapWeight, SectorPair, Subensemble,
};
pub use cg::cg_coefficient;
pub use coupling::{couple_basis, CoupledBasisMap, MBlock};
pub use ops::{build_collective_ops, Axis, CollectiveOps, Component};
pub use spin::SpinQuantum;
