//! Mean-field dynamics of M subensembles.
//!
//! Vectors are in raw spin units: subensemble i has |S_i| = N_i/2, the
//! symmetric observable is O_S = Σ S_i, and the modes are
//! O_k = √M Σ_i (v_k)_i S_i, so that for M = 2 the single mode is S₁ − S₂.
//! Frequencies from the spectral analysis are in cycles per unit time.

mod btc;
mod dicke;
mod run;
mod state;

pub use btc::{btc_mf_rhs, btc_spin_rhs, AntisymmetricField, BtcCouplings};
pub use dicke::{dicke_mf_rhs, dressed_frequency, torque_rhs, DickeCouplings, JyConvention};
pub use run::{
    classify_trajectory, dicke_threshold, integrate_sectors, integrate_spins, is_superradiant,
    phase_scan, symmetric_is_steady, MfModel, MfTrajectory, ObservableClass, PhasePoint,
    ThresholdResult, TrajectoryOptions,
};
pub use state::{
    cross, dot, mode_basis, norm, project, reconstruct, MFState, SectorNorms, SectorObservables,
    Vec3,
};
