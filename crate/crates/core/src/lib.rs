pub mod cli;
pub mod error;
pub mod linalg;
pub mod mixed;
pub mod purestate;
pub mod roofopt;
pub mod sampling;
pub mod spectra;

pub use error::{Error, Result};
