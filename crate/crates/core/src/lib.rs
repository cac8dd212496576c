//! Embeddings between Besov-type sequence spaces: classification, numerical
//! witnesses, and the Haar bridge to functions on the line.

pub mod bernstein;
pub mod classifier;
pub mod cli;
pub mod error;
pub mod exponent;
pub mod gliding_hump;
pub mod haar;
pub mod spaces;
pub mod witnesses;

pub use error::{ComputeError, ParamError};
pub use exponent::{Exponent, Real};
pub use spaces::{Level, SeqVector, SpaceParams, TruncatedMixedSpace, WeightFlavor};
