use serde::{Deserialize, Serialize};

use super::{AlgebraAction, CrossedError};
use crate::graphalg::{GradedBasis, RepresentedCoaction};
use crate::groups::{regular_representations, FiniteGroup, RegularRepresentations};
use crate::matalg::{linear_span, span_closure, AlgebraSpan, Config, Mat};

/// `A ⋊_δ G` realized inside `A ⊗ M_{|G|}` as the algebra generated by
/// `j_A(a) = δ(a)` and `j_G(χ_u) = 1 ⊗ χ_u`, with spanning elements
/// `(a_t, u) = a_t ⊗ λ_t χ_u`.
#[derive(Clone, Debug)]
pub struct CoactionCrossedProduct {
    pub group: FiniteGroup,
    pub base_ambient: usize,
    pub graded: GradedBasis,
    /// `j_A` of the base generators.
    pub j_a: Vec<Mat>,
    /// `j_G(χ_u)` for every `u`.
    pub j_g: Vec<Mat>,
    pub span: AlgebraSpan,
    pub report: CoactionCrossedReport,
    reps: RegularRepresentations,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoactionCrossedReport {
    pub dim: usize,
    /// `Σ_t dim A_t · |G|`.
    pub expected_dim: usize,
    /// Dimension of the linear span of the `(a_t, u)`.
    pub spanning_dim: usize,
    pub spanning_in_algebra: bool,
    /// `(a_r,s)(a_t,u) = (a_r a_t, u)` if `s = tu`, else `0`; checked on
    /// generator-level pairs and all `s, u`.
    pub product_error: f64,
    /// `(a_t,u)* = (a_t*, tu)` on the whole spanning set.
    pub adjoint_error: f64,
}

impl CoactionCrossedReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.dim == self.expected_dim
            && self.spanning_dim == self.expected_dim
            && self.spanning_in_algebra
            && self.product_error <= tol
            && self.adjoint_error <= tol
    }
}

impl CoactionCrossedProduct {
    /// `(a, u) = a ⊗ λ_t χ_u` for `a` of degree `t`.
    pub fn element(&self, a: &Mat, t: usize, u: usize) -> Mat {
        a.kron(&self.reps.lambda.get(t).matmul(self.reps.chi.get(u)))
    }

    pub fn generators(&self) -> Vec<Mat> {
        self.j_a.iter().chain(self.j_g.iter()).cloned().collect()
    }

    pub fn reps(&self) -> &RegularRepresentations {
        &self.reps
    }
}

pub fn coaction_crossed_product(
    rc: &RepresentedCoaction,
    cfg: &Config,
) -> Result<CoactionCrossedProduct, CrossedError> {
    coaction_crossed_product_graded(&rc.family.generators(), &rc.generator_degrees, &rc.graded, &rc.group, cfg)
}

/// Builds `A ⋊_δ G` from homogeneous generators of `A` and an orthogonal
/// graded basis; `δ(a) = a ⊗ λ_t` for `a` of degree `t`.
pub fn coaction_crossed_product_graded(
    generators: &[Mat],
    degrees: &[usize],
    graded: &GradedBasis,
    g: &FiniteGroup,
    cfg: &Config,
) -> Result<CoactionCrossedProduct, CrossedError> {
    let reps = regular_representations(g);
    let n = g.order();
    let m = graded.ambient;
    let j_a: Vec<Mat> = generators.iter().zip(degrees).map(|(a, &t)| a.kron(reps.lambda.get(t))).collect();
    let j_g: Vec<Mat> = g.elements().map(|u| Mat::identity(m).kron(reps.chi.get(u))).collect();
    let all: Vec<Mat> = j_a.iter().chain(j_g.iter()).cloned().collect();
    let span = span_closure(&all, cfg)?.with_label("A ⋊_δ G");

    let elem = |a: &Mat, t: usize, u: usize| a.kron(&reps.lambda.get(t).matmul(reps.chi.get(u)));
    let mut spanning = Vec::with_capacity(graded.total_dim() * n);
    let mut adjoint_error: f64 = 0.0;
    for (t, a) in graded.all() {
        for u in g.elements() {
            let x = elem(a, t, u);
            let expected = elem(&a.adjoint(), g.inv(t), g.mul(t, u));
            adjoint_error = adjoint_error.max(x.adjoint().max_abs_diff(&expected));
            spanning.push(x);
        }
    }
    let spanning_in_algebra = spanning.iter().all(|x| span.contains(x, cfg.closure_tol));
    let spanning_dim = linear_span(&spanning, cfg, "spanning set")?.dim();

    let mut homogeneous: Vec<(usize, Mat)> = Vec::with_capacity(2 * generators.len());
    for (a, &t) in generators.iter().zip(degrees) {
        homogeneous.push((t, a.clone()));
        homogeneous.push((g.inv(t), a.adjoint()));
    }
    let mut product_error: f64 = 0.0;
    for (r, a) in &homogeneous {
        for (t, b) in &homogeneous {
            let ab = a.matmul(b);
            for s in g.elements() {
                let left = elem(a, *r, s);
                for u in g.elements() {
                    let prod = left.matmul(&elem(b, *t, u));
                    let expected = if s == g.mul(*t, u) { elem(&ab, g.mul(*r, *t), u) } else { Mat::zeros(m * n) };
                    product_error = product_error.max(prod.max_abs_diff(&expected));
                }
            }
        }
    }

    let report = CoactionCrossedReport {
        dim: span.dim(),
        expected_dim: graded.total_dim() * n,
        spanning_dim,
        spanning_in_algebra,
        product_error,
        adjoint_error,
    };
    Ok(CoactionCrossedProduct {
        group: g.clone(),
        base_ambient: m,
        graded: graded.clone(),
        j_a,
        j_g,
        span,
        report,
        reps,
    })
}

/// `δ̂_s = Ad(1 ⊗ ρ_s)` on `A ⋊_δ G`.
#[derive(Clone, Debug)]
pub struct DualAction {
    pub action: AlgebraAction,
    /// `max |δ̂_s(a_t,u) − (a_t, us⁻¹)|` over the spanning set.
    pub permutation_error: f64,
}

pub fn dual_action(cp: &CoactionCrossedProduct, cfg: &Config) -> Result<DualAction, CrossedError> {
    let g = &cp.group;
    let m = cp.base_ambient;
    let conj: Vec<Mat> = g.elements().map(|s| Mat::identity(m).kron(cp.reps.rho.get(s))).collect();
    let ad = |s: usize, x: &Mat| conj[s].matmul(x).matmul(&conj[s].adjoint());
    let gens = cp.generators();
    let images = g.elements().map(|s| gens.iter().map(|x| ad(s, x)).collect()).collect();
    let action = AlgebraAction::new(g.clone(), gens, images, &cp.span, cfg)?;
    let mut permutation_error: f64 = 0.0;
    for (t, a) in cp.graded.all() {
        for u in g.elements() {
            let x = cp.element(a, t, u);
            for s in g.elements() {
                let expected = cp.element(a, t, g.mul(u, g.inv(s)));
                permutation_error = permutation_error.max(ad(s, &x).max_abs_diff(&expected));
            }
        }
    }
    Ok(DualAction { action, permutation_error })
}
