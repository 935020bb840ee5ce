//! Two-argument means, their differences, curvature certificates, sharp
//! constants between differences, and a sampling verifier for linear
//! relations written in a small DSL.

pub mod curvature;
pub mod dd;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod means;
pub mod optimize;
pub mod ratio;

pub use error::{Error, Result};
pub use means::{DifferencePair, GiniOrder, MeanKind, NormalizedArg, PositivePair};
