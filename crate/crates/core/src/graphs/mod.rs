//! Finite directed graphs, sink-bound paths, skew products, group actions
//! and the Gross–Tucker factorization of free actions.

mod action;
mod skew;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use action::{quotient_and_gross_tucker, translation_action, GraphAction, GrossTucker};
pub use skew::{convention_iso, skew_product, ConventionIsos, SkewProduct};

use crate::groups::GroupError;

/// Largest cell count (vertices plus edges) handled by [`find_isomorphism`].
pub const ISO_SEARCH_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge:?} refers to unknown vertex index {vertex}")]
    UnknownVertex { edge: String, vertex: usize },
    #[error("duplicate {kind} name {name:?}")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error("graph has a cycle through edges {0:?}")]
    GraphHasCycle(Vec<String>),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is not a skew product over this group")]
    NotSkewProduct,
    #[error("invalid action: {0}")]
    ActionInvalid(String),
    #[error("action is not free: element {element} fixes {cell}")]
    ActionNotFree { element: String, cell: String },
    #[error("not a graph isomorphism: {0}")]
    NotIsomorphism(String),
    #[error("isomorphism search limited to {ISO_SEARCH_CAP} cells, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub rng: usize,
}

/// `E = (E⁰, E¹, r, s)` with vertices and edges indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(GraphError::DuplicateName { kind: "vertex", name: v.clone() });
            }
        }
        let mut out = vec![Vec::new(); vertices.len()];
        let mut inc = vec![Vec::new(); vertices.len()];
        let mut names = std::collections::HashSet::new();
        for (f, e) in edges.iter().enumerate() {
            if !names.insert(e.name.as_str()) {
                return Err(GraphError::DuplicateName { kind: "edge", name: e.name.clone() });
            }
            for v in [e.src, e.rng] {
                if v >= vertices.len() {
                    return Err(GraphError::UnknownVertex { edge: e.name.clone(), vertex: v });
                }
            }
            out[e.src].push(f);
            inc[e.rng].push(f);
        }
        Ok(DirectedGraph { vertices, edges, out, inc })
    }

    /// Convenience constructor from `(name, src, rng)` triples.
    pub fn from_triples(vertices: &[&str], edges: &[(&str, usize, usize)]) -> Result<Self, GraphError> {
        DirectedGraph::new(
            vertices.iter().map(|s| s.to_string()).collect(),
            edges.iter().map(|&(n, s, r)| Edge { name: n.to_string(), src: s, rng: r }).collect(),
        )
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn src(&self, f: usize) -> usize {
        self.edges[f].src
    }

    pub fn rng(&self, f: usize) -> usize {
        self.edges[f].rng
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, f: usize) -> &str {
        &self.edges[f].name
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, GraphError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| GraphError::UnknownName { kind: "vertex", name: name.to_string() })
    }

    pub fn edge_index(&self, name: &str) -> Result<usize, GraphError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| GraphError::UnknownName { kind: "edge", name: name.to_string() })
    }

    /// Edges with source `v`.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// Edges with range `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out[v].is_empty()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.is_sink(v)).collect()
    }

    /// Some directed cycle, as a list of edge indices, if one exists.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let n = self.num_vertices();
        let mut state = vec![0u8; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            state[root] = 1;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                if *k < self.out[v].len() {
                    let f = self.out[v][*k];
                    *k += 1;
                    let w = self.rng(f);
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            via[w] = Some(f);
                            stack.push((w, 0));
                        }
                        1 => {
                            let mut cycle = vec![f];
                            let mut x = v;
                            while x != w {
                                let e = via[x].expect("stack vertex has a parent edge");
                                cycle.push(e);
                                x = self.src(e);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    pub(crate) fn require_acyclic(&self) -> Result<(), GraphError> {
        match self.find_cycle() {
            Some(c) => Err(GraphError::GraphHasCycle(c.iter().map(|&f| self.edge_name(f).to_string()).collect())),
            None => Ok(()),
        }
    }

    /// Number of edges from `u` to `v`.
    fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.out[u].iter().filter(|&&f| self.rng(f) == v).count()
    }
}

/// A path `e₁…e_n` with `r(e_i) = s(e_{i+1})`, or a vertex when `n = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    /// The source vertex `s(μ)`.
    pub base: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn vertex(v: usize) -> Self {
        Path { base: v, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> usize {
        self.base
    }

    pub fn range(&self, g: &DirectedGraph) -> usize {
        self.edges.last().map_or(self.base, |&f| g.rng(f))
    }

    /// `fμ`; requires `r(f) = s(μ)`.
    pub fn prepend(&self, g: &DirectedGraph, f: usize) -> Path {
        debug_assert_eq!(g.rng(f), self.base);
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(f);
        edges.extend_from_slice(&self.edges);
        Path { base: g.src(f), edges }
    }

    pub fn is_valid(&self, g: &DirectedGraph) -> bool {
        let mut at = self.base;
        for &f in &self.edges {
            if g.src(f) != at {
                return false;
            }
            at = g.rng(f);
        }
        true
    }

    pub fn display(&self, g: &DirectedGraph) -> String {
        if self.edges.is_empty() {
            g.vertex_name(self.base).to_string()
        } else {
            self.edges.iter().map(|&f| g.edge_name(f)).collect::<Vec<_>>().join("")
        }
    }
}

/// All paths ending at a sink, grouped by sink and ordered by length.
pub fn enumerate_sink_paths(g: &DirectedGraph) -> Result<Vec<Path>, GraphError> {
    g.require_acyclic()?;
    let mut out = Vec::new();
    for w in g.sinks() {
        let mut layer = vec![Path::vertex(w)];
        while !layer.is_empty() {
            let mut next = Vec::new();
            for mu in &layer {
                for &f in g.in_edges(mu.base) {
                    next.push(mu.prepend(g, f));
                }
            }
            out.append(&mut layer);
            layer = next;
        }
    }
    Ok(out)
}

/// Vertex and edge bijections between two graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphIso {
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
}

fn is_permutation(map: &[usize], n: usize) -> bool {
    if map.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    map.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

impl GraphIso {
    pub fn identity(g: &DirectedGraph) -> Self {
        GraphIso { vertex_map: (0..g.num_vertices()).collect(), edge_map: (0..g.num_edges()).collect() }
    }

    /// Checks bijectivity and that `s` and `r` are intertwined.
    pub fn verify(&self, a: &DirectedGraph, b: &DirectedGraph) -> Result<(), GraphError> {
        if !is_permutation(&self.vertex_map, b.num_vertices()) || a.num_vertices() != b.num_vertices() {
            return Err(GraphError::NotIsomorphism("vertex map is not a bijection".into()));
        }
        if !is_permutation(&self.edge_map, b.num_edges()) || a.num_edges() != b.num_edges() {
            return Err(GraphError::NotIsomorphism("edge map is not a bijection".into()));
        }
        for f in 0..a.num_edges() {
            let h = self.edge_map[f];
            if b.src(h) != self.vertex_map[a.src(f)] || b.rng(h) != self.vertex_map[a.rng(f)] {
                return Err(GraphError::NotIsomorphism(format!(
                    "edge {} ↦ {} does not respect source and range",
                    a.edge_name(f),
                    b.edge_name(h)
                )));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> GraphIso {
        let inv = |m: &[usize]| {
            let mut out = vec![0; m.len()];
            for (i, &j) in m.iter().enumerate() {
                out[j] = i;
            }
            out
        };
        GraphIso { vertex_map: inv(&self.vertex_map), edge_map: inv(&self.edge_map) }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GraphIso) -> GraphIso {
        GraphIso {
            vertex_map: self.vertex_map.iter().map(|&v| other.vertex_map[v]).collect(),
            edge_map: self.edge_map.iter().map(|&f| other.edge_map[f]).collect(),
        }
    }
}

/// Backtracking search for an isomorphism `a → b`.
pub fn find_isomorphism(a: &DirectedGraph, b: &DirectedGraph) -> Result<Option<GraphIso>, GraphError> {
    let cells = a.num_vertices() + a.num_edges();
    if cells > ISO_SEARCH_CAP {
        return Err(GraphError::TooLarge(cells));
    }
    if a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges() {
        return Ok(None);
    }
    let n = a.num_vertices();
    let degree = |g: &DirectedGraph, v: usize| (g.out_edges(v).len(), g.in_edges(v).len(), g.multiplicity(v, v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        k: usize,
        a: &DirectedGraph,
        b: &DirectedGraph,
        map: &mut [usize],
        used: &mut [bool],
        degree: &dyn Fn(&DirectedGraph, usize) -> (usize, usize, usize),
    ) -> bool {
        if k == map.len() {
            return true;
        }
        let da = degree(a, k);
        for cand in 0..map.len() {
            if used[cand] || degree(b, cand) != da {
                continue;
            }
            let consistent = (0..k).all(|j| {
                a.multiplicity(j, k) == b.multiplicity(map[j], cand)
                    && a.multiplicity(k, j) == b.multiplicity(cand, map[j])
            });
            if !consistent {
                continue;
            }
            map[k] = cand;
            used[cand] = true;
            if extend(k + 1, a, b, map, used, degree) {
                return true;
            }
            used[cand] = false;
        }
        map[k] = usize::MAX;
        false
    }

    if !extend(0, a, b, &mut map, &mut used, &degree) {
        return Ok(None);
    }
    // Parallel edges between matched endpoints are interchangeable.
    let mut taken = vec![false; b.num_edges()];
    let mut edge_map = Vec::with_capacity(a.num_edges());
    for f in 0..a.num_edges() {
        let (s, r) = (map[a.src(f)], map[a.rng(f)]);
        let h = b
            .out_edges(s)
            .iter()
            .copied()
            .find(|&h| !taken[h] && b.rng(h) == r)
            .expect("vertex map preserves edge multiplicities");
        taken[h] = true;
        edge_map.push(h);
    }
    let iso = GraphIso { vertex_map: map, edge_map };
    iso.verify(a, b)?;
    Ok(Some(iso))
}
