//! Harmonic Schwarzian derivatives of planar harmonic mappings `f = conj(g) + h`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod corpus;
pub mod equivalence;
pub mod error;
pub mod grid;
pub mod harmonic;
pub mod jets;

pub use analytic::{AnalyticExpr, DiskAutomorphism, Mobius};
pub use equivalence::{check_equal_schwarzian, CheckOptions, ConnectionResult, IdentityReport, Verdict};
pub use error::{Error, Result};
pub use grid::Grid;
pub use harmonic::{AffineMap, HarmonicMap, PairLinearMap, RotationMu};
pub use jets::{Jet3, Scheme, WirtingerStencil};
