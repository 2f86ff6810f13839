//! Polyhedral sequence-space norms, almost-square witness search, refutation
//! certificates and John-ellipsoid moduli.

pub mod certificates;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod family;
pub mod io;
pub mod moduli;
pub mod oracle;
pub mod random;
pub mod report;
pub mod scalar;
pub mod space;
pub mod vector;
pub mod witness;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use space::{PolyNormSpace, SumKind, SumSpace};
pub use vector::{CoordVector, SumVector};
