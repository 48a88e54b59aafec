//! Frames, extrinsic invariants and classification of codimension-two
//! Riemannian submanifolds lying on the light-like hypercylinder `LC^n x R`
//! of Minkowski space, plus generators for the standard families.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod constructions;
pub mod error;
pub mod expr;
pub mod frame;
pub mod invariants;
pub mod lorentz;
pub mod report;
pub mod stencil;

pub use config::Tolerances;
pub use error::{Error, Result};
