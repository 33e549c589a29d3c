//! Numerics for the ground states of quasi-exactly solvable sextic
//! oscillators and of coupled pairs built from them.

pub mod coupled;
pub mod error;
pub mod fock;
pub mod husimi;
pub mod qes;
pub mod quadrature;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};

/// Version of this library, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
