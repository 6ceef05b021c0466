//! Expected normalized traces of words in Gaussian matrices, computed as
//! finite sums over pairings glued into surfaces.
//!
//! The main entry points are [`engine::moment`] and [`engine::cumulant`],
//! driven by a [`engine::MomentSpec`] built either directly or from a trace
//! expression via [`expr`]. Independent reference evaluators live in
//! [`oracle`].

pub mod error;
pub mod scalar;
pub mod perm;
pub mod gluing;
pub mod matrix;
pub mod engine;
pub mod oracle;
pub mod expr;
pub mod cli;

pub use engine::{clt_report, cumulant, moment, wigner_moment, Kind, MomentResult, MomentSpec};
pub use error::{Error, Result};
pub use gluing::{surface_census, Gluing, SurfaceKind, SurfaceReport, WordShape};
pub use matrix::{Bindings, Matrix, MatrixSet};
pub use perm::{enumerate_pairings, Pairing, SetPartition, SignedPermutation};
pub use scalar::{Rational, Scalar};
