//! Alternating row/column matrix scaling toward `(r, c)`-doubly stochastic
//! matrices, with an exact classifier for iterations that terminate after
//! finitely many scalings.
//!
//! Everything is generic over [`Scalar`]: [`ExactRational`] for exact
//! verification and `f64` for ordinary numerics.

pub mod error;
pub mod io;
pub mod lab;
pub mod matrix;
pub mod scalar;
pub mod scaling;
pub mod structure;

pub use error::{Error, Result};
pub use matrix::{is_col_stochastic, is_doubly_stochastic, is_row_stochastic, marginal_residual, DiagonalScaling, Marginals, Matrix};
pub use scalar::{parse_scalar, rational_arith, render_scalar, ArithOp, ExactRational, Scalar};
pub use scaling::{
    column_diag, column_scale, row_diag, row_scale, sinkhorn_iterate, ScalingStep, ScalingTrace, Side, SinkhornOptions,
    SinkhornResult,
};
