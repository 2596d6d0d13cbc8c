pub mod bounds;
pub mod correlations;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod optimizer;
pub mod random;
pub mod scenario;
pub mod selftest;
pub mod state;

pub use error::{Error, Result};
