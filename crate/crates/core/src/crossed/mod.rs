//! Crossed products realized through regular representations: by a
//! coaction (from a graded algebra) and by a finite group action.

mod action_cp;
mod coaction_cp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use action_cp::{action_crossed_product, conditional_expectation, ActionCrossedProduct, ActionCrossedReport};
pub use coaction_cp::{
    coaction_crossed_product, coaction_crossed_product_graded, dual_action, CoactionCrossedProduct,
    CoactionCrossedReport, DualAction,
};

use crate::graphalg::{CKFamily, GraphalgError};
use crate::graphs::GraphAction;
use crate::groups::FiniteGroup;
use crate::matalg::{check_star_map, AlgebraSpan, Config, Mat, MatalgError, StarMap};

#[derive(Debug, Error)]
pub enum CrossedError {
    #[error(transparent)]
    Matalg(#[from] MatalgError),
    #[error(transparent)]
    Graphalg(#[from] GraphalgError),
    #[error("invalid action: {0}")]
    ActionInvalid(String),
    #[error("element is not in the crossed product (residual {residual:.3e})")]
    NotInSpan { residual: f64 },
}

/// What was verified about an [`AlgebraAction`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionReport {
    pub automorphisms: bool,
    /// `max |γ_s(γ_t(a)) − γ_{st}(a)|` over generators.
    pub composition_error: f64,
}

/// `G` acting on an algebra by `*`-automorphisms, given on generators.
#[derive(Clone, Debug)]
pub struct AlgebraAction {
    pub group: FiniteGroup,
    pub generators: Vec<Mat>,
    /// `images[t][k] = γ_t(generators[k])`.
    pub images: Vec<Vec<Mat>>,
    maps: Vec<StarMap>,
    pub report: ActionReport,
}

impl AlgebraAction {
    /// Validates each `γ_t` as a `*`-automorphism of `algebra` and the law
    /// `γ_s γ_t = γ_{st}` on generators.
    pub fn new(
        group: FiniteGroup,
        generators: Vec<Mat>,
        images: Vec<Vec<Mat>>,
        algebra: &AlgebraSpan,
        cfg: &Config,
    ) -> Result<Self, CrossedError> {
        if images.len() != group.order() {
            return Err(CrossedError::ActionInvalid(format!(
                "{} image lists for {} elements",
                images.len(),
                group.order()
            )));
        }
        let mut maps = Vec::with_capacity(group.order());
        for t in group.elements() {
            let m = check_star_map(&generators, &images[t], Some(algebra), cfg)?;
            if !m.report().is_isomorphism() {
                return Err(CrossedError::ActionInvalid(format!(
                    "γ_{} is not a *-automorphism: {:?}",
                    group.name(t),
                    m.report().failures.first().map(|w| w.to_string())
                )));
            }
            maps.push(m);
        }
        let mut composition_error: f64 = 0.0;
        for s in group.elements() {
            for t in group.elements() {
                let st = group.mul(s, t);
                for (k, img) in images[t].iter().enumerate() {
                    let lhs = maps[s].apply(img, cfg.closure_tol)?;
                    composition_error = composition_error.max(lhs.max_abs_diff(&images[st][k]));
                }
            }
        }
        if composition_error > cfg.tol {
            return Err(CrossedError::ActionInvalid(format!("γ_sγ_t ≠ γ_st (error {composition_error:.3e})")));
        }
        let report = ActionReport { automorphisms: true, composition_error };
        Ok(AlgebraAction { group, generators, images, maps, report })
    }

    /// `γ_t(x)` for any `x` in the algebra.
    pub fn apply(&self, t: usize, x: &Mat, tol: f64) -> Result<Mat, MatalgError> {
        self.maps[t].apply(x, tol)
    }

    pub fn ambient(&self) -> usize {
        self.generators.first().map_or(0, Mat::dim)
    }
}

/// `β_t(s_f) = s_{t·f}`, `β_t(p_v) = p_{t·v}` for a group acting on the graph.
pub fn graph_algebra_action(
    fam: &CKFamily,
    a: &GraphAction,
    algebra: &AlgebraSpan,
    cfg: &Config,
) -> Result<AlgebraAction, CrossedError> {
    let g = &fam.graph;
    let images = a
        .group
        .elements()
        .map(|t| {
            (0..g.num_vertices())
                .map(|v| fam.p[a.act_vertex(t, v)].clone())
                .chain((0..g.num_edges()).map(|f| fam.s[a.act_edge(t, f)].clone()))
                .collect()
        })
        .collect();
    AlgebraAction::new(a.group.clone(), fam.generators(), images, algebra, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphalg::ck_representation;
    use crate::graphs::{skew_product, translation_action, DirectedGraph};
    use crate::groups::Labeling;

    #[test]
    fn translation_induces_action() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let sk = skew_product(&e, &g, &c);
        let fam = ck_representation(&sk.graph).unwrap();
        let cfg = Config::default();
        let alg = fam.algebra(&cfg).unwrap();
        let act = graph_algebra_action(&fam, &translation_action(&sk, &g).unwrap(), &alg, &cfg).unwrap();
        assert_eq!(act.report.composition_error, 0.0);
        // γ_g(s_(f,e)) = s_(f,g)
        let k = sk.graph.num_vertices() + sk.edge(0, 0);
        assert_eq!(act.images[1][k], fam.s[sk.edge(0, 1)]);
    }

    #[test]
    fn non_homomorphic_assignment_rejected() {
        // Z3 acting on C² with the generator swapping the two points: γ_g³ ≠ id.
        let g = FiniteGroup::cyclic(3).unwrap();
        let cfg = Config::default();
        let gens = vec![Mat::unit(2, 0, 0), Mat::unit(2, 1, 1)];
        let alg = crate::matalg::span_closure(&gens, &cfg).unwrap();
        let swapped = vec![gens[1].clone(), gens[0].clone()];
        let images = vec![gens.clone(), swapped.clone(), swapped];
        assert!(matches!(AlgebraAction::new(g, gens, images, &alg, &cfg), Err(CrossedError::ActionInvalid(_))));
    }
}
