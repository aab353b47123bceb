//! Kirkwood-Dirac and related quasiprobabilities for two-time measurements on
//! finite-dimensional quantum systems, with thermodynamic and many-body
//! applications.

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod io;
pub mod ising;
pub mod linalg;
pub mod manybody;
pub mod presets;
pub mod quasiprob;
pub mod random;
pub mod schemes;
pub mod state;
pub mod thermo;
pub mod tol;

pub use error::{QprobError, Result};
