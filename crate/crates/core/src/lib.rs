pub mod cli;
pub mod error;
pub mod fields;
pub mod fock;
pub mod qseries;
pub mod relations;
pub mod ring;

pub use error::{Error, Result};
