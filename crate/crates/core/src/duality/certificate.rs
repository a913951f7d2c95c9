use serde::{Deserialize, Serialize};

use crate::matalg::{Signature, SpanSummary, StarMapReport, Witness};

/// One named verification with its worst observed error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Check {
    /// Passes when `error ≤ tol`.
    pub fn within(name: impl Into<String>, error: f64, tol: f64) -> Self {
        Check { name: name.into(), passed: error <= tol, max_error: error, detail: None, witness: None }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, max_error: 0.0, detail: None, witness: None }
    }

    /// Passes when the two counts agree.
    pub fn equal<T: PartialEq + std::fmt::Display>(name: impl Into<String>, left: T, right: T) -> Self {
        let passed = left == right;
        Check { name: name.into(), passed, max_error: 0.0, detail: Some(format!("{left} vs {right}")), witness: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }
}

/// A `*`-isomorphism claim between two concrete algebras, with everything
/// that was checked to support it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsomorphismCertificate {
    pub name: String,
    pub source: SpanSummary,
    pub target: SpanSummary,
    pub generators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<StarMapReport>,
    pub checks: Vec<Check>,
    pub equivariance: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signatures: Option<(Signature, Signature)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub parts: Vec<IsomorphismCertificate>,
    pub valid: bool,
}

impl IsomorphismCertificate {
    pub fn new(name: impl Into<String>, source: SpanSummary, target: SpanSummary) -> Self {
        IsomorphismCertificate {
            name: name.into(),
            source,
            target,
            generators: 0,
            map: None,
            checks: Vec::new(),
            equivariance: Vec::new(),
            signatures: None,
            parts: Vec::new(),
            valid: false,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Sets `valid` from the map report, every check and every part.
    pub fn finalize(mut self) -> Self {
        let map_ok = self.map.as_ref().is_none_or(StarMapReport::is_isomorphism);
        let sig_ok = self.signatures.as_ref().is_none_or(|(a, b)| a == b);
        self.valid = map_ok
            && sig_ok
            && self.checks.iter().all(|c| c.passed)
            && self.equivariance.iter().all(|c| c.passed)
            && self.parts.iter().all(|p| p.valid);
        self
    }

    pub fn first_failure(&self) -> Option<&str> {
        if let Some(m) = &self.map {
            if !m.is_isomorphism() {
                return Some("generator map is not a *-isomorphism");
            }
        }
        if let Some((a, b)) = &self.signatures {
            if a != b {
                return Some("Wedderburn signatures differ");
            }
        }
        self.checks
            .iter()
            .chain(self.equivariance.iter())
            .find(|c| !c.passed)
            .map(|c| c.name.as_str())
            .or_else(|| self.parts.iter().find(|p| !p.valid).and_then(|p| p.first_failure()))
    }

    /// The check, ordinary or equivariance, with exactly this name.
    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().chain(self.equivariance.iter()).find(|c| c.name == name)
    }

    pub fn max_error(&self) -> f64 {
        let own = self.checks.iter().chain(self.equivariance.iter()).map(|c| c.max_error).fold(0.0, f64::max);
        let map = self.map.as_ref().map_or(0.0, |m| m.max_error);
        self.parts.iter().map(IsomorphismCertificate::max_error).fold(own.max(map), f64::max)
    }
}
