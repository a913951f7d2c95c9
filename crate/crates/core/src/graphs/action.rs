use super::{skew_product, DirectedGraph, Edge, GraphError, GraphIso, SkewProduct};
use crate::groups::{FiniteGroup, Labeling};

/// A group acting on a graph by automorphisms, stored as one vertex
/// permutation and one edge permutation per group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphAction {
    pub group: FiniteGroup,
    vertex_perm: Vec<Vec<usize>>,
    edge_perm: Vec<Vec<usize>>,
}

impl GraphAction {
    /// Validates that every element acts by an automorphism and that the
    /// assignment is a homomorphism.
    pub fn new(
        graph: &DirectedGraph,
        group: FiniteGroup,
        vertex_perm: Vec<Vec<usize>>,
        edge_perm: Vec<Vec<usize>>,
    ) -> Result<Self, GraphError> {
        let n = group.order();
        if vertex_perm.len() != n || edge_perm.len() != n {
            return Err(GraphError::ActionInvalid(format!("need one permutation pair for each of the {n} elements")));
        }
        for t in group.elements() {
            let name = group.name(t);
            if !super::is_permutation(&vertex_perm[t], graph.num_vertices()) {
                return Err(GraphError::ActionInvalid(format!("element {name} does not permute the vertices")));
            }
            if !super::is_permutation(&edge_perm[t], graph.num_edges()) {
                return Err(GraphError::ActionInvalid(format!("element {name} does not permute the edges")));
            }
            for f in 0..graph.num_edges() {
                let h = edge_perm[t][f];
                if graph.src(h) != vertex_perm[t][graph.src(f)] || graph.rng(h) != vertex_perm[t][graph.rng(f)] {
                    return Err(GraphError::ActionInvalid(format!(
                        "element {name} moves edge {} off its endpoints",
                        graph.edge_name(f)
                    )));
                }
            }
        }
        for s in group.elements() {
            for t in group.elements() {
                let st = group.mul(s, t);
                let ok_v = (0..graph.num_vertices()).all(|v| vertex_perm[st][v] == vertex_perm[s][vertex_perm[t][v]]);
                let ok_e = (0..graph.num_edges()).all(|f| edge_perm[st][f] == edge_perm[s][edge_perm[t][f]]);
                if !ok_v || !ok_e {
                    return Err(GraphError::ActionInvalid(format!(
                        "action of {} differs from action of {} after {}",
                        group.name(st),
                        group.name(s),
                        group.name(t)
                    )));
                }
            }
        }
        Ok(GraphAction { group, vertex_perm, edge_perm })
    }

    pub fn trivial(graph: &DirectedGraph, group: FiniteGroup) -> Self {
        let n = group.order();
        GraphAction {
            group,
            vertex_perm: vec![(0..graph.num_vertices()).collect(); n],
            edge_perm: vec![(0..graph.num_edges()).collect(); n],
        }
    }

    pub fn act_vertex(&self, t: usize, v: usize) -> usize {
        self.vertex_perm[t][v]
    }

    pub fn act_edge(&self, t: usize, f: usize) -> usize {
        self.edge_perm[t][f]
    }

    /// A non-identity element together with a cell it fixes.
    pub fn fixed_cell(&self, graph: &DirectedGraph) -> Option<(usize, String)> {
        let e = self.group.identity();
        for t in self.group.elements().filter(|&t| t != e) {
            if let Some(v) = (0..graph.num_vertices()).find(|&v| self.vertex_perm[t][v] == v) {
                return Some((t, format!("vertex {}", graph.vertex_name(v))));
            }
            if let Some(f) = (0..graph.num_edges()).find(|&f| self.edge_perm[t][f] == f) {
                return Some((t, format!("edge {}", graph.edge_name(f))));
            }
        }
        None
    }

    pub fn is_free(&self) -> bool {
        let e = self.group.identity();
        self.group.elements().filter(|&t| t != e).all(|t| {
            self.vertex_perm[t].iter().enumerate().all(|(v, &w)| v != w)
                && self.edge_perm[t].iter().enumerate().all(|(f, &h)| f != h)
        })
    }
}

/// `t·(v,s) = (v,st⁻¹)` and `t·(f,s) = (f,st⁻¹)` on a skew product over `g`.
pub fn translation_action(sk: &SkewProduct, g: &FiniteGroup) -> Result<GraphAction, GraphError> {
    if &sk.group != g {
        return Err(GraphError::NotSkewProduct);
    }
    let shift = |t: usize, cell: usize| {
        let (x, s) = sk.split(cell);
        x * g.order() + g.mul(s, g.inv(t))
    };
    let vertex_perm = g.elements().map(|t| (0..sk.graph.num_vertices()).map(|v| shift(t, v)).collect()).collect();
    let edge_perm = g.elements().map(|t| (0..sk.graph.num_edges()).map(|f| shift(t, f)).collect()).collect();
    GraphAction::new(&sk.graph, g.clone(), vertex_perm, edge_perm)
}

/// Output of [`quotient_and_gross_tucker`]: `F ≅ (F/G) ×_c G`.
#[derive(Clone, Debug)]
pub struct GrossTucker {
    pub quotient: DirectedGraph,
    pub labeling: Labeling,
    pub skew: SkewProduct,
    /// `F → (F/G) ×_c G`, carrying the given action to translation.
    pub iso: GraphIso,
    /// Quotient vertex index of each vertex of `F`.
    pub vertex_orbit: Vec<usize>,
    /// Quotient edge index of each edge of `F`.
    pub edge_orbit: Vec<usize>,
}

/// Orbit representatives are the least indices in each orbit. A vertex
/// `x = t·rep` gets group coordinate `t⁻¹`, an edge `y` lies over the orbit
/// `[y]` with coordinate that of `r(y)`, and `c([y]) = g_{s(y)} g_{r(y)}⁻¹`.
pub fn quotient_and_gross_tucker(f: &DirectedGraph, a: &GraphAction) -> Result<GrossTucker, GraphError> {
    if let Some((t, cell)) = a.fixed_cell(f) {
        return Err(GraphError::ActionNotFree { element: a.group.name(t).to_string(), cell });
    }
    let g = &a.group;
    let nv = f.num_vertices();
    let mut vertex_orbit = vec![usize::MAX; nv];
    let mut coord = vec![usize::MAX; nv];
    let mut vreps = Vec::new();
    for v in 0..nv {
        if vertex_orbit[v] != usize::MAX {
            continue;
        }
        let k = vreps.len();
        vreps.push(v);
        for t in g.elements() {
            let x = a.act_vertex(t, v);
            vertex_orbit[x] = k;
            coord[x] = g.inv(t);
        }
    }
    let mut edge_orbit = vec![usize::MAX; f.num_edges()];
    let mut ereps = Vec::new();
    for y in 0..f.num_edges() {
        if edge_orbit[y] != usize::MAX {
            continue;
        }
        let k = ereps.len();
        ereps.push(y);
        for t in g.elements() {
            edge_orbit[a.act_edge(t, y)] = k;
        }
    }
    let quotient = DirectedGraph::new(
        vreps.iter().map(|&v| format!("[{}]", f.vertex_name(v))).collect(),
        ereps
            .iter()
            .map(|&y| Edge {
                name: format!("[{}]", f.edge_name(y)),
                src: vertex_orbit[f.src(y)],
                rng: vertex_orbit[f.rng(y)],
            })
            .collect(),
    )?;
    let labels: Vec<usize> = ereps.iter().map(|&y| g.mul(coord[f.src(y)], g.inv(coord[f.rng(y)]))).collect();
    let labeling = Labeling::from_values(&quotient, labels, g)?;
    let skew = skew_product(&quotient, g, &labeling);
    let iso = GraphIso {
        vertex_map: (0..nv).map(|x| skew.vertex(vertex_orbit[x], coord[x])).collect(),
        edge_map: (0..f.num_edges()).map(|y| skew.edge(edge_orbit[y], coord[f.rng(y)])).collect(),
    };
    iso.verify(f, &skew.graph)?;
    let translation = translation_action(&skew, g)?;
    for t in g.elements() {
        for x in 0..nv {
            if iso.vertex_map[a.act_vertex(t, x)] != translation.act_vertex(t, iso.vertex_map[x]) {
                return Err(GraphError::NotIsomorphism(format!("not equivariant at vertex {}", f.vertex_name(x))));
            }
        }
        for y in 0..f.num_edges() {
            if iso.edge_map[a.act_edge(t, y)] != translation.act_edge(t, iso.edge_map[y]) {
                return Err(GraphError::NotIsomorphism(format!("not equivariant at edge {}", f.edge_name(y))));
            }
        }
    }
    Ok(GrossTucker { quotient, labeling, skew, iso, vertex_orbit, edge_orbit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::find_isomorphism;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    fn e1_z2() -> (FiniteGroup, SkewProduct) {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let sk = skew_product(&e, &g, &c);
        (g, sk)
    }

    #[test]
    fn translation_swaps_sheets() {
        let (g, sk) = e1_z2();
        let a = translation_action(&sk, &g).unwrap();
        assert_eq!(a.act_vertex(1, sk.vertex(0, 0)), sk.vertex(0, 1));
        assert_eq!(a.act_vertex(1, sk.vertex(1, 1)), sk.vertex(1, 0));
        for v in 0..4 {
            assert_eq!(a.act_vertex(0, v), v);
        }
        assert!(a.is_free());
    }

    #[test]
    fn wrong_group_is_rejected() {
        let (_, sk) = e1_z2();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        assert_eq!(translation_action(&sk, &z3).unwrap_err(), GraphError::NotSkewProduct);
    }

    #[test]
    fn trivial_z2_action_is_not_free() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let a = GraphAction::trivial(&e1(), g);
        assert!(!a.is_free());
        assert!(matches!(quotient_and_gross_tucker(&e1(), &a), Err(GraphError::ActionNotFree { .. })));
    }

    #[test]
    fn swap_on_two_copies() {
        let f = DirectedGraph::from_triples(&["a", "b", "c", "d"], &[("x", 0, 1), ("y", 2, 3)]).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let a =
            GraphAction::new(&f, g, vec![vec![0, 1, 2, 3], vec![2, 3, 0, 1]], vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(a.is_free());
        let gt = quotient_and_gross_tucker(&f, &a).unwrap();
        assert_eq!((gt.quotient.num_vertices(), gt.quotient.num_edges()), (2, 1));
    }

    #[test]
    fn non_automorphism_rejected() {
        let f = DirectedGraph::from_triples(&["a", "b"], &[("x", 0, 1)]).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let r = GraphAction::new(&f, g, vec![vec![0, 1], vec![1, 0]], vec![vec![0], vec![0]]);
        assert!(matches!(r, Err(GraphError::ActionInvalid(_))));
    }

    #[test]
    fn round_trip_recovers_e1() {
        let (g, sk) = e1_z2();
        let a = translation_action(&sk, &g).unwrap();
        let gt = quotient_and_gross_tucker(&sk.graph, &a).unwrap();
        assert!(find_isomorphism(&gt.quotient, &e1()).unwrap().is_some());
        assert!(find_isomorphism(&gt.skew.graph, &sk.graph).unwrap().is_some());
    }

    #[test]
    fn trivial_group_quotient_is_input() {
        let f = e1();
        let a = GraphAction::trivial(&f, FiniteGroup::trivial());
        let gt = quotient_and_gross_tucker(&f, &a).unwrap();
        assert_eq!(gt.quotient.num_vertices(), 2);
        assert_eq!(gt.labeling.values(), &[0]);
    }
}
