pub mod analysis;
pub mod angular_momentum;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod liouville;
pub mod meanfield;
pub mod models;
pub mod ode;
pub mod oracle;
pub mod state_prep;

pub use error::{Error, Result};
