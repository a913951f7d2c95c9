//! Serializable summaries of a single verification run.

use serde::{Deserialize, Serialize};

use crate::duality::{DualityError, IsomorphismCertificate};
use crate::groupoids::GroupoidError;
use crate::matalg::{Config, Signature};

/// One verification: what was checked, on what, and whether it held.
///
/// Everything except `wall_time_ms` is a function of the inputs and the
/// seed, so two runs with the same inputs serialize identically once that
/// field is cleared with [`VerificationReport::without_timing`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub instance: String,
    pub theorem: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signatures: Option<(Signature, Signature)>,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<IsomorphismCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    pub fn new(instance: impl Into<String>, theorem: impl Into<String>, cfg: &Config) -> Self {
        VerificationReport {
            instance: instance.into(),
            theorem: theorem.into(),
            passed: false,
            dims: None,
            signatures: None,
            tol: cfg.tol,
            seed: cfg.seed,
            failure: None,
            certificate: None,
            details: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn with_certificate(mut self, cert: IsomorphismCertificate) -> Self {
        self.passed = cert.valid;
        self.dims = Some((cert.source.dim, cert.target.dim));
        self.signatures = cert.signatures.clone();
        if !cert.valid {
            self.failure = cert.first_failure().map(str::to_string);
        }
        self.certificate = Some(cert);
        self
    }

    /// A failed run; the certificate is attached when one was produced.
    pub fn with_failure(mut self, message: impl Into<String>, cert: Option<IsomorphismCertificate>) -> Self {
        self.passed = false;
        self.failure = Some(message.into());
        if let Some(c) = cert {
            self.dims = Some((c.source.dim, c.target.dim));
            self.signatures = c.signatures.clone();
            self.certificate = Some(c);
        }
        self
    }

    /// A certification outcome; failures keep their partial certificate.
    pub fn from_outcome<E: PartialCertificate>(self, res: Result<IsomorphismCertificate, E>) -> Self {
        match res {
            Ok(cert) => self.with_certificate(cert),
            Err(e) => {
                let cert = e.partial_certificate().cloned();
                self.with_failure(e.to_string(), cert)
            }
        }
    }

    pub fn with_details<T: Serialize>(mut self, passed: bool, details: &T) -> Self {
        self.passed = passed;
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn timed(mut self, start: std::time::Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn without_timing(&self) -> Self {
        VerificationReport { wall_time_ms: 0.0, ..self.clone() }
    }

    /// One line: verdict, theorem, instance, dims and signatures.
    pub fn summary(&self) -> String {
        let mut s = format!("{} {} on {}", if self.passed { "PASS" } else { "FAIL" }, self.theorem, self.instance);
        if let Some((a, b)) = self.dims {
            s.push_str(&format!(", dims {a}/{b}"));
        }
        if let Some((a, b)) = &self.signatures {
            if a == b {
                s.push_str(&format!(", signature {a}"));
            } else {
                s.push_str(&format!(", signatures {a} vs {b}"));
            }
        }
        if let Some(f) = &self.failure {
            s.push_str(&format!(": {f}"));
        }
        s
    }
}

/// Errors that may carry the certificate assembled before the failure.
pub trait PartialCertificate: std::fmt::Display {
    fn partial_certificate(&self) -> Option<&IsomorphismCertificate>;
}

impl PartialCertificate for DualityError {
    fn partial_certificate(&self) -> Option<&IsomorphismCertificate> {
        self.certificate()
    }
}

impl PartialCertificate for GroupoidError {
    fn partial_certificate(&self) -> Option<&IsomorphismCertificate> {
        self.certificate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::SpanSummary;

    #[test]
    fn failed_certificate_names_first_failure() {
        let span = SpanSummary { label: "A".into(), ambient: 2, dim: 4 };
        let mut cert = IsomorphismCertificate::new("A ≅ A", span.clone(), span);
        cert.push(crate::duality::Check::flag("something", false));
        let r = VerificationReport::new("x", "t", &Config::default()).with_certificate(cert.finalize());
        assert!(!r.passed);
        assert_eq!(r.failure.as_deref(), Some("something"));
        assert!(r.summary().starts_with("FAIL t on x, dims 4/4"));
    }

    #[test]
    fn timing_is_the_only_nondeterministic_field() {
        let r = VerificationReport::new("x", "t", &Config::default()).timed(std::time::Instant::now());
        let a = serde_json::to_string(&r.without_timing()).unwrap();
        let b = serde_json::to_string(&VerificationReport::new("x", "t", &Config::default())).unwrap();
        assert_eq!(a, b);
    }
}
