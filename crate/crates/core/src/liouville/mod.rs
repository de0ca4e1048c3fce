//! Collective Lindbladians restricted to total-spin blocks.

mod decay;
mod evolve;
mod expm;
mod observables;
mod spec;
mod spectrum;
mod superop;

pub use decay::{asymptotic_decay_rate, DecayFit, NOISE_FLOOR};
pub use evolve::{
    block_trace, evolve_block, evolve_blocks, BlockTrajectory, EvolutionMethod, EvolveOptions,
    DEFAULT_D_MAX,
};
pub use expm::expm;
pub use observables::{block_expectation, expectation};
pub use spec::{AnticommutatorOrdering, HamiltonianTerm, JumpOperator, LindbladSpec};
pub use spectrum::{
    block_spectrum, block_spectrum_with_limit, gap_scaling_scan, GapRow, GapScan, SpectralResult,
    ZERO_MODE_TOL,
};
pub use superop::{build_block_superoperator, BlockGenerator, BlockSuperoperator};
