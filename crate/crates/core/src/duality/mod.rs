//! Certifiers for the graph-algebra isomorphisms: skew product versus
//! coaction crossed product, the crossed product by the translation action
//! versus `C*(E) ⊗ M_{|G|}`, the commuting regular diagram, and free actions.

mod certificate;
mod direct;
mod eqvt;

pub use certificate::{Check, IsomorphismCertificate};
pub use direct::{certify_direct_iso, certify_free_action, certify_regular_diagram};
pub use eqvt::certify_eqvt_iso;

use thiserror::Error;

use crate::crossed::CrossedError;
use crate::graphalg::GraphalgError;
use crate::graphs::GraphError;
use crate::matalg::MatalgError;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Graphalg(#[from] GraphalgError),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
    #[error(transparent)]
    Matalg(#[from] MatalgError),
    #[error("certification of {} failed: {}", .0.name, .0.first_failure().unwrap_or("unknown"))]
    CertificationFailed(Box<IsomorphismCertificate>),
    #[error("diagram does not commute at generator {generator} (error {error:.3e})")]
    DiagramMismatch { generator: String, error: f64, certificate: Box<IsomorphismCertificate> },
}

impl DualityError {
    /// The partial certificate carried by a certification failure.
    pub fn certificate(&self) -> Option<&IsomorphismCertificate> {
        match self {
            DualityError::CertificationFailed(c) => Some(c),
            DualityError::DiagramMismatch { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}
