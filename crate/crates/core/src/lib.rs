pub mod error;
pub mod fourier;
pub mod generators;
pub mod group;
pub mod linalg;
pub mod quadrature;
pub mod repr;
pub mod semigroup;
pub mod simulate;
pub mod symbol;
pub mod dirichlet;
pub mod config;
pub mod experiment;
pub mod verify;

pub use error::{Error, Result};
