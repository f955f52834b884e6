pub mod direct_norms;
pub mod embedding;
pub mod error;
pub mod exec;
pub mod field;
pub mod littlewood_paley;
pub mod multiplier;
pub mod oracles;
pub mod realization;

pub use error::{Error, Result};
