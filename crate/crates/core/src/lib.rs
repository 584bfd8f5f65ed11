pub mod bath;
pub mod checkpoint;
pub mod config;
pub mod dmrg;
pub mod env;
pub mod error;
pub mod lanczos;
pub mod model;
pub mod mpo;
pub mod mps;
pub mod observables;
pub mod oracle;
pub mod point;
pub mod sweep;
pub mod tensor;

pub use error::{Error, Result};
