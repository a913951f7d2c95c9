use serde::{Deserialize, Serialize};

use super::{AlgebraAction, CrossedError};
use crate::graphalg::coaction::second_factor_blocks;
use crate::groups::{regular_representations, RegularRepresentations};
use crate::matalg::{linear_span, span_closure, AlgebraSpan, Config, Mat};

/// `A ⋊_γ G` in the regular covariant representation on `A ⊗ M_{|G|}`:
/// `π̃(a) = Σ_t γ_{t⁻¹}(a) ⊗ χ_t` and `ũ_s = 1 ⊗ λ_s`.
#[derive(Clone, Debug)]
pub struct ActionCrossedProduct {
    pub base: AlgebraSpan,
    pub action: AlgebraAction,
    /// `π̃` of the action's generators.
    pub pi_generators: Vec<Mat>,
    pub u: Vec<Mat>,
    pub span: AlgebraSpan,
    /// Linear span of `π̃(A)`.
    pub diagonal: AlgebraSpan,
    pub report: ActionCrossedReport,
    reps: RegularRepresentations,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionCrossedReport {
    pub dim: usize,
    /// `dim A · |G|`.
    pub expected_dim: usize,
    /// `max |ũ_s π̃(a) ũ_s* − π̃(γ_s(a))|` over generators.
    pub covariance_error: f64,
}

impl ActionCrossedReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.dim == self.expected_dim && self.covariance_error <= tol
    }
}

impl ActionCrossedProduct {
    pub fn pi_tilde(&self, a: &Mat, tol: f64) -> Result<Mat, CrossedError> {
        pi_tilde(&self.action, &self.reps, a, tol)
    }

    /// `π̃` of the generators followed by the `ũ_s`.
    pub fn generators(&self) -> Vec<Mat> {
        self.pi_generators.iter().chain(self.u.iter()).cloned().collect()
    }

    pub fn order(&self) -> usize {
        self.u.len()
    }

    /// `P(Σ_s π̃(a_s) ũ_s) = a_e`.
    ///
    /// The pieces `π̃(A)ũ_s` sit in disjoint block positions `(t, s⁻¹t)`, so
    /// the `ũ_e` part is the block diagonal; it is matched against the
    /// orthonormalized `π̃(A)` and `a_e` is read from its `(e,e)` block.
    pub fn expectation(&self, x: &Mat, cfg: &Config) -> Result<Mat, CrossedError> {
        let residual = self.span.residual_norm(x);
        if residual > cfg.closure_tol * x.norm_fro().max(1.0) {
            return Err(CrossedError::NotInSpan { residual });
        }
        let n = self.order();
        let diag = Mat::from_triplets(x.dim(), x.entries().filter(|(r, c, _)| r % n == c % n).collect());
        let residual = self.diagonal.residual_norm(&diag);
        if residual > cfg.closure_tol * x.norm_fro().max(1.0) {
            return Err(CrossedError::NotInSpan { residual });
        }
        let e = self.action.group.identity();
        Ok(second_factor_blocks(&diag, n)[e][e].clone())
    }
}

fn pi_tilde(action: &AlgebraAction, reps: &RegularRepresentations, a: &Mat, tol: f64) -> Result<Mat, CrossedError> {
    let g = &action.group;
    let n = g.order();
    let mut out = Mat::zeros(a.dim() * n);
    for t in g.elements() {
        let ga = action.apply(g.inv(t), a, tol)?;
        out = &out + &ga.kron(reps.chi.get(t));
    }
    Ok(out)
}

pub fn action_crossed_product(
    base: &AlgebraSpan,
    action: &AlgebraAction,
    cfg: &Config,
) -> Result<ActionCrossedProduct, CrossedError> {
    let g = &action.group;
    let reps = regular_representations(g);
    let m = base.ambient();
    let mut pi_generators = Vec::with_capacity(action.generators.len());
    for a in &action.generators {
        pi_generators.push(pi_tilde(action, &reps, a, cfg.closure_tol)?);
    }
    let u: Vec<Mat> = g.elements().map(|s| Mat::identity(m).kron(reps.lambda.get(s))).collect();
    let all: Vec<Mat> = pi_generators.iter().chain(u.iter()).cloned().collect();
    let span = span_closure(&all, cfg)?.with_label("A ⋊_γ G");

    let mut covariance_error: f64 = 0.0;
    for s in g.elements() {
        for (k, pa) in pi_generators.iter().enumerate() {
            let lhs = u[s].matmul(pa).matmul(&u[s].adjoint());
            let rhs = pi_tilde(action, &reps, &action.images[s][k], cfg.closure_tol)?;
            covariance_error = covariance_error.max(lhs.max_abs_diff(&rhs));
        }
    }
    let mut diag_elems = Vec::with_capacity(base.dim());
    for b in base.basis() {
        diag_elems.push(pi_tilde(action, &reps, b, cfg.closure_tol)?);
    }
    let diagonal = linear_span(&diag_elems, cfg, "π̃(A)")?;
    let report = ActionCrossedReport { dim: span.dim(), expected_dim: base.dim() * g.order(), covariance_error };
    Ok(ActionCrossedProduct {
        base: base.clone(),
        action: action.clone(),
        pi_generators,
        u,
        span,
        diagonal,
        report,
        reps,
    })
}

/// `P_{A⋊G}` as a free function.
pub fn conditional_expectation(cp: &ActionCrossedProduct, x: &Mat, cfg: &Config) -> Result<Mat, CrossedError> {
    cp.expectation(x, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossed::graph_algebra_action;
    use crate::graphalg::ck_representation;
    use crate::graphs::{skew_product, translation_action, DirectedGraph, GraphAction};
    use crate::groups::{FiniteGroup, Labeling};
    use rand::SeedableRng;

    fn e1_z2_cp() -> (ActionCrossedProduct, crate::graphs::SkewProduct, crate::graphalg::CKFamily) {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let sk = skew_product(&e, &g, &c);
        let fam = ck_representation(&sk.graph).unwrap();
        let cfg = Config::default();
        let alg = fam.algebra(&cfg).unwrap();
        let act = graph_algebra_action(&fam, &translation_action(&sk, &g).unwrap(), &alg, &cfg).unwrap();
        (action_crossed_product(&alg, &act, &cfg).unwrap(), sk, fam)
    }

    #[test]
    fn e1_z2_translation_dim_16() {
        let (cp, sk, fam) = e1_z2_cp();
        assert_eq!(cp.span.dim(), 16);
        assert!(cp.report.passed(1e-12));
        // ũ_g π̃(s_(f,e)) ũ_g* = π̃(s_(f,g))
        let tol = 1e-9;
        let a = cp.pi_tilde(&fam.s[sk.edge(0, 0)], tol).unwrap();
        let b = cp.pi_tilde(&fam.s[sk.edge(0, 1)], tol).unwrap();
        assert!(cp.u[1].matmul(&a).matmul(&cp.u[1].adjoint()).approx_eq(&b, 1e-12));
    }

    #[test]
    fn trivial_action_keeps_dimension() {
        let e = DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap();
        let fam = ck_representation(&e).unwrap();
        let cfg = Config::default();
        let alg = fam.algebra(&cfg).unwrap();
        let act = graph_algebra_action(&fam, &GraphAction::trivial(&e, FiniteGroup::trivial()), &alg, &cfg).unwrap();
        assert_eq!(action_crossed_product(&alg, &act, &cfg).unwrap().span.dim(), 4);
    }

    #[test]
    fn expectation_extracts_unit_coefficient() {
        let (cp, _, _) = e1_z2_cp();
        let cfg = Config::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a = cp.base.random_element(&mut rng);
        let pa = cp.pi_tilde(&a, 1e-9).unwrap();
        assert!(cp.expectation(&pa, &cfg).unwrap().approx_eq(&a, 1e-10));
        assert!(cp.expectation(&pa.matmul(&cp.u[1]), &cfg).unwrap().max_abs() < 1e-12);
        let outside = Mat::unit(cp.span.ambient(), 0, 1);
        if !cp.span.contains(&outside, 1e-7) {
            assert!(matches!(cp.expectation(&outside, &cfg), Err(CrossedError::NotInSpan { .. })));
        }
    }
}
