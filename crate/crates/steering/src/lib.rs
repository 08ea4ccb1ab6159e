pub mod cli;
pub mod error;
pub mod numerics;
pub mod plateau;
pub mod quantum;
pub mod relax;
pub mod robustness;
pub mod table;
pub mod witness;

pub use error::{Error, Result};
