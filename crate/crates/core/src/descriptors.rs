//! JSON descriptors for groups, graphs and groupoids.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{DirectedGraph, Edge, GraphAction, GraphError};
use crate::groupoids::{make_groupoid, Cocycle, FiniteGroupoid, GroupoidAction, GroupoidError, GroupoidSpec};
use crate::groups::{make_labeling, make_named_group, FiniteGroup, GroupError, Labeling};

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("edge `{edge}` has no label")]
    MissingLabel { edge: String },
    #[error("arrow `{arrow}` has no cocycle value")]
    MissingCocycleValue { arrow: String },
    #[error("cocycle names unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("groupoid descriptor has no cocycle")]
    NoCocycle,
    #[error("action of `{element}` names unknown cell `{cell}`")]
    UnknownCell { element: String, cell: String },
}

/// `{ "elements": [names], "table": [[indices]] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupDescriptor {
    pub fn build(&self) -> Result<FiniteGroup, DescriptorError> {
        Ok(make_named_group(self.elements.clone(), self.table.clone())?)
    }
}

impl From<&FiniteGroup> for GroupDescriptor {
    fn from(g: &FiniteGroup) -> Self {
        GroupDescriptor { elements: g.names().to_vec(), table: g.table().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDescriptor {
    pub id: String,
    pub src: String,
    pub rng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// `{ "vertices": [names], "edges": [{ "id", "src", "rng", "label"? }] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDescriptor>,
}

impl GraphDescriptor {
    pub fn build(&self) -> Result<DirectedGraph, DescriptorError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let index = |name: &str| {
                self.vertices
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| DescriptorError::UnknownVertex { edge: e.id.clone(), vertex: name.to_string() })
            };
            edges.push(Edge { name: e.id.clone(), src: index(&e.src)?, rng: index(&e.rng)? });
        }
        Ok(DirectedGraph::new(self.vertices.clone(), edges)?)
    }

    pub fn has_labels(&self) -> bool {
        self.edges.iter().any(|e| e.label.is_some())
    }

    /// Resolves the edge labels against `g`; every edge must carry one.
    pub fn labeling(&self, graph: &DirectedGraph, g: &FiniteGroup) -> Result<Labeling, DescriptorError> {
        let mut values = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let name = e.label.as_ref().ok_or_else(|| DescriptorError::MissingLabel { edge: e.id.clone() })?;
            values.push(Some(g.index_of(name)?));
        }
        Ok(make_labeling(graph, &values, g)?)
    }

    pub fn from_graph(graph: &DirectedGraph, labels: Option<(&Labeling, &FiniteGroup)>) -> Self {
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(f, e)| EdgeDescriptor {
                id: e.name.clone(),
                src: graph.vertex_name(e.src).to_string(),
                rng: graph.vertex_name(e.rng).to_string(),
                label: labels.map(|(c, g)| g.name(c.get(f)).to_string()),
            })
            .collect();
        GraphDescriptor { vertices: graph.vertex_names().to_vec(), edges }
    }
}

pub fn parse_group(json: &str) -> Result<FiniteGroup, DescriptorError> {
    serde_json::from_str::<GroupDescriptor>(json)?.build()
}

pub fn parse_graph(json: &str) -> Result<GraphDescriptor, DescriptorError> {
    let d: GraphDescriptor = serde_json::from_str(json)?;
    d.build()?;
    Ok(d)
}

pub fn parse_groupoid(json: &str) -> Result<GroupoidSpec, DescriptorError> {
    let spec: GroupoidSpec = serde_json::from_str(json)?;
    make_groupoid(&spec)?;
    Ok(spec)
}

/// Reads the descriptor's cocycle against `g`. Units default to `e`.
pub fn groupoid_cocycle(spec: &GroupoidSpec, q: &FiniteGroupoid, g: &FiniteGroup) -> Result<Cocycle, DescriptorError> {
    let map = spec.cocycle.as_ref().ok_or(DescriptorError::NoCocycle)?;
    for arrow in map.keys() {
        if q.index_of(arrow).is_none() {
            return Err(DescriptorError::UnknownArrow(arrow.clone()));
        }
    }
    let mut values = Vec::with_capacity(q.num_arrows());
    for x in q.arrows() {
        let v = match map.get(q.name(x)) {
            Some(name) => g.index_of(name)?,
            None if q.is_unit(x) => g.identity(),
            None => return Err(DescriptorError::MissingCocycleValue { arrow: q.name(x).to_string() }),
        };
        values.push(v);
    }
    Ok(Cocycle::new(q, g, values)?)
}

/// The descriptor of `q`, with `c` written out when given.
pub fn groupoid_descriptor(q: &FiniteGroupoid, c: Option<&Cocycle>) -> GroupoidSpec {
    let mut spec = q.to_spec();
    spec.cocycle = c.map(|c| {
        q.arrows().map(|x| (q.name(x).to_string(), c.group.name(c.get(x)).to_string())).collect::<BTreeMap<_, _>>()
    });
    spec
}

/// Images of one group element on a graph; cells not listed are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphPermutation {
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

/// `{ "<element>": { "vertices": { v: t·v }, "edges": { f: t·f } } }`.
/// Elements not listed act trivially.
pub type GraphActionDescriptor = BTreeMap<String, GraphPermutation>;

/// `{ "<element>": { x: t·x } }` on the arrows of a groupoid.
pub type GroupoidActionDescriptor = BTreeMap<String, BTreeMap<String, String>>;

fn permutation(
    element: &str,
    size: usize,
    images: &BTreeMap<String, String>,
    index: impl Fn(&str) -> Option<usize>,
) -> Result<Vec<usize>, DescriptorError> {
    let mut perm: Vec<usize> = (0..size).collect();
    let lookup = |name: &str| {
        index(name).ok_or_else(|| DescriptorError::UnknownCell { element: element.to_string(), cell: name.to_string() })
    };
    for (from, to) in images {
        perm[lookup(from)?] = lookup(to)?;
    }
    Ok(perm)
}

pub fn parse_graph_action(json: &str, graph: &DirectedGraph, g: &FiniteGroup) -> Result<GraphAction, DescriptorError> {
    let d: GraphActionDescriptor = serde_json::from_str(json)?;
    let empty = GraphPermutation::default();
    for name in d.keys() {
        g.index_of(name)?;
    }
    let mut vertex_perm = Vec::with_capacity(g.order());
    let mut edge_perm = Vec::with_capacity(g.order());
    for t in g.elements() {
        let name = g.name(t);
        let p = d.get(name).unwrap_or(&empty);
        vertex_perm.push(permutation(name, graph.num_vertices(), &p.vertices, |v| graph.vertex_index(v).ok())?);
        edge_perm.push(permutation(name, graph.num_edges(), &p.edges, |f| graph.edge_index(f).ok())?);
    }
    Ok(GraphAction::new(graph, g.clone(), vertex_perm, edge_perm)?)
}

pub fn parse_groupoid_action(
    json: &str,
    q: &FiniteGroupoid,
    g: &FiniteGroup,
) -> Result<GroupoidAction, DescriptorError> {
    let d: GroupoidActionDescriptor = serde_json::from_str(json)?;
    let empty = BTreeMap::new();
    for name in d.keys() {
        g.index_of(name)?;
    }
    let perm = g
        .elements()
        .map(|t| permutation(g.name(t), q.num_arrows(), d.get(g.name(t)).unwrap_or(&empty), |x| q.index_of(x)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupoidAction::new(q, g.clone(), perm)?)
}

/// Shipped fixtures, by name.
pub fn builtin_group(name: &str) -> Option<FiniteGroup> {
    match name {
        "trivial" => Some(FiniteGroup::trivial()),
        "z2" => FiniteGroup::cyclic(2).ok(),
        "z3" => FiniteGroup::cyclic(3).ok(),
        "z4" => FiniteGroup::cyclic(4).ok(),
        "klein" => Some(FiniteGroup::klein_four()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: &str = r#"{ "vertices": ["v", "w"], "edges": [{ "id": "f", "src": "v", "rng": "w", "label": "g" }] }"#;

    #[test]
    fn graph_round_trip() {
        let d = parse_graph(E1).unwrap();
        let e = d.build().unwrap();
        let z2 = builtin_group("z2").unwrap();
        let c = d.labeling(&e, &z2).unwrap();
        assert_eq!(c.values(), &[1]);
        assert_eq!(GraphDescriptor::from_graph(&e, Some((&c, &z2))), d);
    }

    #[test]
    fn group_round_trip() {
        let k = FiniteGroup::klein_four();
        let json = serde_json::to_string(&GroupDescriptor::from(&k)).unwrap();
        assert_eq!(parse_group(&json).unwrap(), k);
    }

    #[test]
    fn unknown_vertex_and_label() {
        let bad = r#"{ "vertices": ["v"], "edges": [{ "id": "f", "src": "v", "rng": "x" }] }"#;
        assert!(matches!(parse_graph(bad), Err(DescriptorError::UnknownVertex { .. })));
        let d = parse_graph(r#"{ "vertices": ["v", "w"], "edges": [{ "id": "f", "src": "v", "rng": "w" }] }"#).unwrap();
        let e = d.build().unwrap();
        assert!(matches!(d.labeling(&e, &FiniteGroup::trivial()), Err(DescriptorError::MissingLabel { .. })));
    }

    #[test]
    fn swap_action_on_two_copies() {
        let f = DirectedGraph::from_triples(&["v1", "w1", "v2", "w2"], &[("f1", 0, 1), ("f2", 2, 3)]).unwrap();
        let z2 = builtin_group("z2").unwrap();
        let json = r#"{ "g": { "vertices": { "v1": "v2", "v2": "v1", "w1": "w2", "w2": "w1" }, "edges": { "f1": "f2", "f2": "f1" } } }"#;
        let a = parse_graph_action(json, &f, &z2).unwrap();
        assert!(a.is_free());
        let bad = r#"{ "g": { "vertices": { "v9": "v1" } } }"#;
        assert!(matches!(parse_graph_action(bad, &f, &z2), Err(DescriptorError::UnknownCell { .. })));
    }

    #[test]
    fn groupoid_cocycle_from_json() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let c = Cocycle::new(&q, &z2, q.arrows().map(|x| usize::from(!q.is_unit(x))).collect()).unwrap();
        let spec = groupoid_descriptor(&q, Some(&c));
        let json = serde_json::to_string(&spec).unwrap();
        let back = parse_groupoid(&json).unwrap();
        let q2 = make_groupoid(&back).unwrap();
        assert_eq!(groupoid_cocycle(&back, &q2, &z2).unwrap().values(), c.values());
    }
}
