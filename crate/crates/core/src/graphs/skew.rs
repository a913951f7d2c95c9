use super::{DirectedGraph, Edge, GraphError, GraphIso};
use crate::groups::{FiniteGroup, Labeling};

/// `E ×_c G`: vertices `(v,t)`, edges `(f,t)` with `r(f,t) = (r(f),t)` and
/// `s(f,t) = (s(f),c(f)t)`.
///
/// Cell `(x,t)` has index `x·|G| + t`.
#[derive(Clone, Debug)]
pub struct SkewProduct {
    pub graph: DirectedGraph,
    pub base: DirectedGraph,
    pub group: FiniteGroup,
    pub labeling: Labeling,
}

impl SkewProduct {
    pub fn vertex(&self, v: usize, t: usize) -> usize {
        v * self.group.order() + t
    }

    pub fn edge(&self, f: usize, t: usize) -> usize {
        f * self.group.order() + t
    }

    pub fn split(&self, cell: usize) -> (usize, usize) {
        (cell / self.group.order(), cell % self.group.order())
    }
}

pub fn skew_product(e: &DirectedGraph, g: &FiniteGroup, c: &Labeling) -> SkewProduct {
    let n = g.order();
    let mut vertices = Vec::with_capacity(e.num_vertices() * n);
    for v in 0..e.num_vertices() {
        for t in g.elements() {
            vertices.push(format!("({},{})", e.vertex_name(v), g.name(t)));
        }
    }
    let mut edges = Vec::with_capacity(e.num_edges() * n);
    for f in 0..e.num_edges() {
        for t in g.elements() {
            edges.push(Edge {
                name: format!("({},{})", e.edge_name(f), g.name(t)),
                src: e.src(f) * n + g.mul(c.get(f), t),
                rng: e.rng(f) * n + t,
            });
        }
    }
    let graph = DirectedGraph::new(vertices, edges).expect("skew product cells are well formed");
    SkewProduct { graph, base: e.clone(), group: g.clone(), labeling: c.clone() }
}

/// The two other customary skew-product conventions and their
/// isomorphisms onto `E ×_c G`.
///
/// * `E^c`: `s(f,t) = (s(f),t)`, `r(f,t) = (r(f),t·c(f))`, mapped by
///   `ψ(v,t) = (v,t⁻¹)`, `ψ(f,t) = (f,c(f)⁻¹t⁻¹)`.
/// * `E(c)`: `s(t,f) = (t,s(f))`, `r(t,f) = (t·c(f),r(f))`, mapped by
///   `φ(t,v) = (v,t⁻¹)`, `φ(t,f) = (f,c(f)⁻¹t⁻¹)`.
#[derive(Clone, Debug)]
pub struct ConventionIsos {
    pub skew: SkewProduct,
    pub gross_tucker: DirectedGraph,
    pub kumjian_pask: DirectedGraph,
    /// `ψ: E^c → E ×_c G`.
    pub psi: GraphIso,
    /// `φ: E(c) → E ×_c G`.
    pub phi: GraphIso,
}

pub fn convention_iso(e: &DirectedGraph, c: &Labeling, g: &FiniteGroup) -> Result<ConventionIsos, GraphError> {
    let n = g.order();
    let (nv, ne) = (e.num_vertices(), e.num_edges());
    let skew = skew_product(e, g, c);

    let mut gt_vertices = Vec::with_capacity(nv * n);
    for v in 0..nv {
        for t in g.elements() {
            gt_vertices.push(format!("({},{})", e.vertex_name(v), g.name(t)));
        }
    }
    let mut gt_edges = Vec::with_capacity(ne * n);
    for f in 0..ne {
        for t in g.elements() {
            gt_edges.push(Edge {
                name: format!("({},{})", e.edge_name(f), g.name(t)),
                src: e.src(f) * n + t,
                rng: e.rng(f) * n + g.mul(t, c.get(f)),
            });
        }
    }
    let gross_tucker = DirectedGraph::new(gt_vertices, gt_edges)?;

    let mut kp_vertices = Vec::with_capacity(nv * n);
    let mut kp_edges = Vec::with_capacity(ne * n);
    for t in g.elements() {
        for v in 0..nv {
            kp_vertices.push(format!("({},{})", g.name(t), e.vertex_name(v)));
        }
    }
    for t in g.elements() {
        for f in 0..ne {
            kp_edges.push(Edge {
                name: format!("({},{})", g.name(t), e.edge_name(f)),
                src: t * nv + e.src(f),
                rng: g.mul(t, c.get(f)) * nv + e.rng(f),
            });
        }
    }
    let kumjian_pask = DirectedGraph::new(kp_vertices, kp_edges)?;

    let edge_target = |f: usize, t: usize| skew.edge(f, g.mul(g.inv(c.get(f)), g.inv(t)));
    let psi = GraphIso {
        vertex_map: (0..nv)
            .flat_map(|v| g.elements().map(move |t| (v, t)))
            .map(|(v, t)| skew.vertex(v, g.inv(t)))
            .collect(),
        edge_map: (0..ne).flat_map(|f| g.elements().map(move |t| (f, t))).map(|(f, t)| edge_target(f, t)).collect(),
    };
    let phi = GraphIso {
        vertex_map: g
            .elements()
            .flat_map(|t| (0..nv).map(move |v| (v, t)))
            .map(|(v, t)| skew.vertex(v, g.inv(t)))
            .collect(),
        edge_map: g.elements().flat_map(|t| (0..ne).map(move |f| (f, t))).map(|(f, t)| edge_target(f, t)).collect(),
    };
    psi.verify(&gross_tucker, &skew.graph)?;
    phi.verify(&kumjian_pask, &skew.graph)?;
    Ok(ConventionIsos { skew, gross_tucker, kumjian_pask, psi, phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::find_isomorphism;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    #[test]
    fn e1_over_z2() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let sk = skew_product(&e, &g, &c);
        let h = &sk.graph;
        assert_eq!((h.num_vertices(), h.num_edges()), (4, 2));
        // (f,e): (v,g) → (w,e)
        let fe = sk.edge(0, 0);
        assert_eq!(h.src(fe), sk.vertex(0, 1));
        assert_eq!(h.rng(fe), sk.vertex(1, 0));
        // (f,g): (v,e) → (w,g)
        let fg = sk.edge(0, 1);
        assert_eq!(h.src(fg), sk.vertex(0, 0));
        assert_eq!(h.rng(fg), sk.vertex(1, 1));
        assert_eq!(h.vertex_name(sk.vertex(0, 1)), "(v,g)");
    }

    #[test]
    fn trivial_group_reproduces_graph() {
        let g = FiniteGroup::trivial();
        let e = DirectedGraph::from_triples(&["a", "b", "c"], &[("x", 0, 1), ("y", 0, 2), ("z", 1, 2)]).unwrap();
        let c = Labeling::constant(&e, 0);
        let sk = skew_product(&e, &g, &c);
        assert!(find_isomorphism(&sk.graph, &e).unwrap().is_some());
    }

    #[test]
    fn constant_identity_label_gives_disjoint_copies() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let sk = skew_product(&e, &g, &Labeling::constant(&e, 0));
        let two = DirectedGraph::from_triples(&["a", "b", "c", "d"], &[("x", 0, 1), ("y", 2, 3)]).unwrap();
        assert!(find_isomorphism(&sk.graph, &two).unwrap().is_some());
    }

    #[test]
    fn psi_inverse_sends_fe_to_fg() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let iso = convention_iso(&e, &c, &g).unwrap();
        let back = iso.psi.inverse();
        let fe = iso.skew.edge(0, 0);
        assert_eq!(iso.gross_tucker.edge_name(back.edge_map[fe]), "(f,g)");
    }

    #[test]
    fn conventions_on_trivial_group_are_identity() {
        let g = FiniteGroup::trivial();
        let e = e1();
        let iso = convention_iso(&e, &Labeling::constant(&e, 0), &g).unwrap();
        assert_eq!(iso.psi, GraphIso::identity(&iso.skew.graph));
        assert_eq!(iso.phi, GraphIso::identity(&iso.skew.graph));
    }
}
