//! Finite-dimensional complex matrix `*`-algebras.
//!
//! Every algebra in this crate is realized concretely inside some `M_n`.
//! [`span_closure`] produces the `*`-algebra generated by a set of matrices,
//! [`check_star_map`] certifies that an assignment on generators extends to
//! a `*`-homomorphism, and [`wedderburn_signature`] reads off the block
//! structure `⊕ M_{n_i}`.

mod matrix;
mod span;
mod star_map;
mod wedderburn;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::{Mat, C64, ONE, ZERO};
pub use span::{linear_span, span_closure, AlgebraSpan, SpanSummary};
pub(crate) use star_map::round_trip_error;
pub use star_map::{check_star_map, StarMap, StarMapReport};
pub use wedderburn::{wedderburn_signature, Signature};

/// Numeric policy shared by every construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Config {
    /// Entrywise tolerance for comparing two computed matrices.
    pub tol: f64,
    /// Relative residual below which a candidate is considered inside a span.
    pub closure_tol: f64,
    /// Largest ambient matrix size accepted.
    pub max_dim: usize,
    /// Seed for randomized sub-steps (Wedderburn probes, random elements).
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: 1e-9, closure_tol: 1e-7, max_dim: 256, seed: 0x5eed }
    }
}

impl Config {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// A failed relation together with the matrices that exhibit it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub relation: String,
    pub error: f64,
    pub matrices: Vec<(String, Mat)>,
}

impl Witness {
    pub fn new(relation: impl Into<String>, error: f64) -> Self {
        Witness { relation: relation.into(), error, matrices: Vec::new() }
    }

    pub fn push(&mut self, name: &str, m: Mat) {
        self.matrices.push((name.to_string(), m));
    }

    pub fn with(mut self, name: &str, m: Mat) -> Self {
        self.push(name, m);
        self
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (error {:.3e})", self.relation, self.error)
    }
}

#[derive(Debug, Error)]
pub enum MatalgError {
    #[error("no generators supplied")]
    NoGenerators,
    #[error("generator {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("ambient dimension {dim} exceeds the cap {cap}")]
    AmbientTooLarge { dim: usize, cap: usize },
    #[error("span closure exceeded {limit} basis elements")]
    ClosureDiverged { limit: usize },
    #[error("element is not in the span (residual {residual:.3e})")]
    NotInSpan { residual: f64 },
    #[error("{generators} generators but {images} images")]
    AssignmentIncomplete { generators: usize, images: usize },
    #[error("assignment does not define a linear map: {witness}")]
    NotWellDefined { witness: Box<Witness> },
    #[error("center decomposition failed: {reason}")]
    NotSemisimple { reason: String },
}
