//! Cuntz–Krieger families of finite acyclic graphs on the space of
//! sink-bound paths, the gauge action, the labeling coaction and the
//! resulting grading.

pub(crate) mod coaction;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coaction::{
    coaction, graded_coaction, spectral_subspaces, CoactionReport, GradedBasis, GradingReport, RepresentedCoaction,
};

use crate::graphs::{enumerate_sink_paths, DirectedGraph, GraphError, Path};
use crate::groups::GroupError;
use crate::matalg::{
    check_star_map, span_closure, AlgebraSpan, Config, Mat, MatalgError, StarMapReport, Witness, C64, ONE,
};

#[derive(Debug, Error)]
pub enum GraphalgError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matalg(#[from] MatalgError),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("Cuntz–Krieger relations fail: {0}")]
    RelationsFailed(Box<Witness>),
}

/// Outcome of checking the Cuntz–Krieger relations on a candidate family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CkRelationReport {
    pub passed: bool,
    /// `Σ_v p_v` is the identity of the ambient space.
    pub nondegenerate: bool,
    pub max_error: f64,
    pub failures: Vec<Witness>,
}

/// Checks that `{s_f, p_v}` is a Cuntz–Krieger `E`-family of nonzero elements.
pub fn check_ck_relations(graph: &DirectedGraph, s: &[Mat], p: &[Mat], tol: f64) -> CkRelationReport {
    let mut failures = Vec::new();
    let mut max_error: f64 = 0.0;
    let mut record = |name: String, lhs: &Mat, rhs: &Mat, failures: &mut Vec<Witness>| {
        let err = lhs.max_abs_diff(rhs);
        max_error = max_error.max(err);
        if err > tol && failures.len() < 8 {
            failures.push(Witness::new(name, err).with("lhs", lhs.clone()).with("rhs", rhs.clone()));
        }
        err <= tol
    };
    let n = p.first().or(s.first()).map_or(0, Mat::dim);
    let zero = Mat::zeros(n);
    let mut ok = true;
    for v in 0..graph.num_vertices() {
        let name = graph.vertex_name(v);
        ok &= record(format!("p_{name}² = p_{name}"), &p[v].matmul(&p[v]), &p[v], &mut failures);
        ok &= record(format!("p_{name}* = p_{name}"), &p[v].adjoint(), &p[v], &mut failures);
        if p[v].max_abs() <= tol {
            ok = false;
            failures.push(Witness::new(format!("p_{name} ≠ 0"), 0.0));
        }
        for w in (v + 1)..graph.num_vertices() {
            let prod = p[v].matmul(&p[w]);
            ok &= record(format!("p_{name} p_{} = 0", graph.vertex_name(w)), &prod, &zero, &mut failures);
        }
        if !graph.is_sink(v) {
            let sum = Mat::sum(
                n,
                graph.out_edges(v).iter().map(|&f| s[f].matmul(&s[f].adjoint())).collect::<Vec<_>>().iter(),
            );
            ok &= record(format!("p_{name} = Σ s_f s_f*"), &p[v], &sum, &mut failures);
        }
    }
    for f in 0..graph.num_edges() {
        let name = graph.edge_name(f);
        ok &= record(
            format!("s_{name}* s_{name} = p_r({name})"),
            &s[f].adjoint().matmul(&s[f]),
            &p[graph.rng(f)],
            &mut failures,
        );
        if s[f].max_abs() <= tol {
            ok = false;
            failures.push(Witness::new(format!("s_{name} ≠ 0"), 0.0));
        }
    }
    let total = Mat::sum(n, p.iter());
    let nondegenerate = total.max_abs_diff(&Mat::identity(n)) <= tol;
    CkRelationReport { passed: ok, nondegenerate, max_error, failures }
}

/// The Cuntz–Krieger family on `ℓ²` of the paths ending at sinks:
/// `s_f` sends `μ` (with `s(μ) = r(f)`) to `fμ`, and `p_v` projects onto the
/// paths with source `v`.
#[derive(Clone, Debug)]
pub struct CKFamily {
    pub graph: DirectedGraph,
    pub paths: Vec<Path>,
    pub s: Vec<Mat>,
    pub p: Vec<Mat>,
    index: HashMap<Path, usize>,
}

pub fn ck_representation(graph: &DirectedGraph) -> Result<CKFamily, GraphalgError> {
    if graph.num_vertices() == 0 {
        return Err(GraphalgError::EmptyGraph);
    }
    let paths = enumerate_sink_paths(graph)?;
    let index: HashMap<Path, usize> = paths.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let n = paths.len();
    let mut s_trip: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); graph.num_edges()];
    let mut p_trip: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); graph.num_vertices()];
    for (i, mu) in paths.iter().enumerate() {
        p_trip[mu.base].push((i, i, ONE));
        for &f in graph.in_edges(mu.base) {
            let j = index[&mu.prepend(graph, f)];
            s_trip[f].push((j, i, ONE));
        }
    }
    let s = s_trip.into_iter().map(|t| Mat::from_triplets(n, t)).collect();
    let p = p_trip.into_iter().map(|t| Mat::from_triplets(n, t)).collect();
    let fam = CKFamily { graph: graph.clone(), paths, s, p, index };
    let rep = check_ck_relations(graph, &fam.s, &fam.p, 1e-12);
    if !rep.passed || !rep.nondegenerate {
        let w = rep.failures.into_iter().next().unwrap_or_else(|| Witness::new("Σ p_v = 1", f64::NAN));
        return Err(GraphalgError::RelationsFailed(Box::new(w)));
    }
    Ok(fam)
}

impl CKFamily {
    /// Ambient dimension: the number of sink-bound paths.
    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    /// `p_v` for all vertices followed by `s_f` for all edges.
    pub fn generators(&self) -> Vec<Mat> {
        self.p.iter().chain(self.s.iter()).cloned().collect()
    }

    pub fn path_index(&self, mu: &Path) -> Option<usize> {
        self.index.get(mu).copied()
    }

    /// `Σ_w n_w²` over sinks `w`, with `n_w` the number of paths ending at `w`.
    pub fn expected_algebra_dim(&self) -> usize {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for mu in &self.paths {
            *counts.entry(mu.range(&self.graph)).or_default() += 1;
        }
        counts.values().map(|n| n * n).sum()
    }

    /// `s_μ = s_{e₁}⋯s_{e_n}`, or `p_v` for a vertex path.
    pub fn path_operator(&self, mu: &Path) -> Mat {
        let mut it = mu.edges.iter();
        match it.next() {
            None => self.p[mu.base].clone(),
            Some(&f) => it.fold(self.s[f].clone(), |acc, &g| acc.matmul(&self.s[g])),
        }
    }

    /// `s_μ s_ν*`.
    pub fn monomial(&self, mu: &Path, nu: &Path) -> Mat {
        self.path_operator(mu).matmul(&self.path_operator(nu).adjoint())
    }

    /// The `*`-algebra generated by the family.
    pub fn algebra(&self, cfg: &Config) -> Result<AlgebraSpan, MatalgError> {
        Ok(span_closure(&self.generators(), cfg)?.with_label("C*(E)"))
    }
}

/// Result of checking `α_z: s_f ↦ z s_f, p_v ↦ p_v`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeReport {
    pub z: (f64, f64),
    pub relations: CkRelationReport,
    pub map: StarMapReport,
    pub passed: bool,
}

/// Confirms that `{z s_f, p_v}` is a Cuntz–Krieger family and that the
/// induced map is a `*`-automorphism of the generated algebra.
pub fn gauge_check(fam: &CKFamily, z: C64, cfg: &Config) -> Result<GaugeReport, GraphalgError> {
    let zs: Vec<Mat> = fam.s.iter().map(|m| m.scale(z)).collect();
    let relations = check_ck_relations(&fam.graph, &zs, &fam.p, cfg.tol);
    let algebra = fam.algebra(cfg)?;
    let images: Vec<Mat> = fam.p.iter().chain(zs.iter()).cloned().collect();
    let map = check_star_map(&fam.generators(), &images, Some(&algebra), cfg)?.report().clone();
    let passed = relations.passed && relations.nondegenerate && map.is_isomorphism();
    Ok(GaugeReport { z: (z.re, z.im), relations, map, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    fn chain() -> DirectedGraph {
        DirectedGraph::from_triples(&["u", "v", "w"], &[("e1", 0, 1), ("e2", 1, 2)]).unwrap()
    }

    #[test]
    fn e1_family_is_matrix_units() {
        let fam = ck_representation(&e1()).unwrap();
        // basis {w, f}
        assert_eq!(fam.dim(), 2);
        assert_eq!(fam.s[0], Mat::unit(2, 1, 0));
        assert_eq!(fam.p[0], Mat::unit(2, 1, 1));
        assert_eq!(fam.p[1], Mat::unit(2, 0, 0));
        assert_eq!(fam.algebra(&Config::default()).unwrap().dim(), 4);
    }

    #[test]
    fn isolated_vertex() {
        let g = DirectedGraph::from_triples(&["u"], &[]).unwrap();
        let fam = ck_representation(&g).unwrap();
        assert_eq!(fam.p[0], Mat::identity(1));
    }

    #[test]
    fn chain_generates_m3() {
        let fam = ck_representation(&chain()).unwrap();
        assert_eq!(fam.dim(), 3);
        assert_eq!(fam.algebra(&Config::default()).unwrap().dim(), 9);
        assert_eq!(fam.expected_algebra_dim(), 9);
    }

    #[test]
    fn empty_and_cyclic_graphs_rejected() {
        let empty = DirectedGraph::from_triples(&[], &[]).unwrap();
        assert!(matches!(ck_representation(&empty), Err(GraphalgError::EmptyGraph)));
        let lp = DirectedGraph::from_triples(&["v"], &[("l", 0, 0)]).unwrap();
        assert!(matches!(ck_representation(&lp), Err(GraphalgError::Graph(GraphError::GraphHasCycle(_)))));
    }

    #[test]
    fn broken_family_detected() {
        let fam = ck_representation(&e1()).unwrap();
        let twice: Vec<Mat> = fam.s.iter().map(|m| m.scale(C64::new(2.0, 0.0))).collect();
        assert!(!check_ck_relations(&fam.graph, &twice, &fam.p, 1e-9).passed);
    }

    #[test]
    fn gauge_values() {
        let cfg = Config::default();
        let fam = ck_representation(&e1()).unwrap();
        for z in [ONE, C64::new(-1.0, 0.0)] {
            assert!(gauge_check(&fam, z, &cfg).unwrap().passed);
        }
        let ch = ck_representation(&chain()).unwrap();
        assert!(gauge_check(&ch, C64::new(0.0, 1.0), &cfg).unwrap().passed);
        // |z| ≠ 1 breaks s_f* s_f = p_r(f).
        assert!(!gauge_check(&fam, C64::new(2.0, 0.0), &cfg).unwrap().passed);
    }
}
