//! Finite groups given by Cayley tables, their regular representations, and
//! edge labelings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::DirectedGraph;
use crate::matalg::{Mat, ONE};

/// Largest group order accepted; every group law is checked exhaustively.
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("group of order {order} exceeds the cap {MAX_ORDER}")]
    TooLarge { order: usize },
    #[error("row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row},{col}) = {value} is not an element index")]
    IndexOutOfRange { row: usize, col: usize, value: usize },
    #[error("not a Latin square: {line} {index} repeats element {value}")]
    NotLatinSquare { line: &'static str, index: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("({a}·{b})·{c} ≠ {a}·({b}·{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("{names} element names for a group of order {order}")]
    NameCountMismatch { names: usize, order: usize },
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("unknown group element {0:?}")]
    UnknownElement(String),
    #[error("edge {edge:?} has no label")]
    MissingEdge { edge: String },
    #[error("edge {edge:?} is labeled by {value}, which is not an element index")]
    InvalidElement { edge: String, value: usize },
    #[error("{found} labels for a graph with {expected} edges")]
    LabelCountMismatch { found: usize, expected: usize },
}

/// A validated finite group; elements are the indices `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    #[serde(skip)]
    inverses: Vec<usize>,
}

/// Validates a multiplication table, with elements named by their index.
pub fn make_group(table: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
    let names = (0..table.len()).map(|i| i.to_string()).collect();
    make_named_group(names, table)
}

#[allow(clippy::needless_range_loop)]
pub fn make_named_group(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup, GroupError> {
    let n = table.len();
    if n == 0 {
        return Err(GroupError::Empty);
    }
    if n > MAX_ORDER {
        return Err(GroupError::TooLarge { order: n });
    }
    if names.len() != n {
        return Err(GroupError::NameCountMismatch { names: names.len(), order: n });
    }
    for (i, a) in names.iter().enumerate() {
        if names[..i].contains(a) {
            return Err(GroupError::DuplicateName(a.clone()));
        }
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(GroupError::NotSquare { row, len: r.len(), expected: n });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(GroupError::IndexOutOfRange { row, col, value });
        }
    }
    for i in 0..n {
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for j in 0..n {
            let v = table[i][j];
            if std::mem::replace(&mut seen_row[v], true) {
                return Err(GroupError::NotLatinSquare { line: "row", index: i, value: v });
            }
            let w = table[j][i];
            if std::mem::replace(&mut seen_col[w], true) {
                return Err(GroupError::NotLatinSquare { line: "column", index: i, value: w });
            }
        }
    }
    let identity =
        (0..n).find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j)).ok_or(GroupError::NoIdentity)?;
    let mut inverses = Vec::with_capacity(n);
    for a in 0..n {
        let inv = (0..n)
            .find(|&b| table[a][b] == identity && table[b][a] == identity)
            .ok_or(GroupError::NoInverse { element: a })?;
        inverses.push(inv);
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(GroupError::NotAssociative { a, b, c });
                }
            }
        }
    }
    Ok(FiniteGroup { names, table, identity, inverses })
}

impl FiniteGroup {
    /// `ℤ_n` with elements `e, g, g^2, …`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let names = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                k => format!("g^{k}"),
            })
            .collect();
        make_named_group(names, table)
    }

    /// `ℤ₂ × ℤ₂` with elements `e, a, b, ab`.
    pub fn klein_four() -> Self {
        let table = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        let names = ["e", "a", "b", "ab"].iter().map(|s| s.to_string()).collect();
        make_named_group(names, table).expect("Klein four table")
    }

    pub fn trivial() -> Self {
        make_named_group(vec!["e".into()], vec![vec![0]]).expect("trivial table")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GroupError> {
        self.names.iter().position(|n| n == name).ok_or_else(|| GroupError::UnknownElement(name.to_string()))
    }

    /// Whether `φ: self → other` given by images of indices is a homomorphism.
    pub fn is_homomorphism(&self, other: &FiniteGroup, phi: &[usize]) -> bool {
        phi.len() == self.order()
            && self.elements().all(|a| self.elements().all(|b| phi[self.mul(a, b)] == other.mul(phi[a], phi[b])))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepresentationKind {
    /// `λ_s e_t = e_{st}`.
    LeftRegular,
    /// `ρ_s e_t = e_{ts⁻¹}`.
    RightRegular,
    /// `χ_r = e_{rr}`, the projection onto the point `r`.
    Projection,
}

/// One family of `|G|×|G|` matrices indexed by group elements.
#[derive(Clone, Debug)]
pub struct GroupRepresentation {
    pub kind: RepresentationKind,
    matrices: Vec<Mat>,
}

impl GroupRepresentation {
    pub fn new(g: &FiniteGroup, kind: RepresentationKind) -> Self {
        let n = g.order();
        let matrices = g
            .elements()
            .map(|s| match kind {
                RepresentationKind::LeftRegular => {
                    Mat::from_triplets(n, g.elements().map(|t| (g.mul(s, t), t, ONE)).collect())
                }
                RepresentationKind::RightRegular => {
                    Mat::from_triplets(n, g.elements().map(|t| (g.mul(t, g.inv(s)), t, ONE)).collect())
                }
                RepresentationKind::Projection => Mat::unit(n, s, s),
            })
            .collect();
        GroupRepresentation { kind, matrices }
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn get(&self, t: usize) -> &Mat {
        &self.matrices[t]
    }

    pub fn matrices(&self) -> &[Mat] {
        &self.matrices
    }
}

/// `λ`, `ρ` and `χ` for one group.
#[derive(Clone, Debug)]
pub struct RegularRepresentations {
    pub lambda: GroupRepresentation,
    pub rho: GroupRepresentation,
    pub chi: GroupRepresentation,
}

pub fn regular_representations(g: &FiniteGroup) -> RegularRepresentations {
    RegularRepresentations {
        lambda: GroupRepresentation::new(g, RepresentationKind::LeftRegular),
        rho: GroupRepresentation::new(g, RepresentationKind::RightRegular),
        chi: GroupRepresentation::new(g, RepresentationKind::Projection),
    }
}

/// A function `c: E¹ → G`, stored by edge index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    values: Vec<usize>,
}

/// Builds a labeling from per-edge assignments; every edge must be labeled.
pub fn make_labeling(e: &DirectedGraph, c: &[Option<usize>], g: &FiniteGroup) -> Result<Labeling, GroupError> {
    if c.len() != e.num_edges() {
        return Err(GroupError::LabelCountMismatch { found: c.len(), expected: e.num_edges() });
    }
    let mut values = Vec::with_capacity(c.len());
    for (f, v) in c.iter().enumerate() {
        let edge = || e.edge_name(f).to_string();
        match *v {
            None => return Err(GroupError::MissingEdge { edge: edge() }),
            Some(value) if value >= g.order() => return Err(GroupError::InvalidElement { edge: edge(), value }),
            Some(value) => values.push(value),
        }
    }
    Ok(Labeling { values })
}

impl Labeling {
    pub fn constant(e: &DirectedGraph, t: usize) -> Self {
        Labeling { values: vec![t; e.num_edges()] }
    }

    pub fn from_values(e: &DirectedGraph, values: Vec<usize>, g: &FiniteGroup) -> Result<Self, GroupError> {
        let c: Vec<Option<usize>> = values.into_iter().map(Some).collect();
        make_labeling(e, &c, g)
    }

    pub fn get(&self, f: usize) -> usize {
        self.values[f]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `c(μ) = c(e₁)…c(e_n)`, with `c` of a vertex path equal to `e`.
    pub fn path_value(&self, g: &FiniteGroup, edges: &[usize]) -> usize {
        edges.iter().fold(g.identity(), |acc, &f| g.mul(acc, self.values[f]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_table_accepted() {
        let g = make_group(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.identity(), 0);
    }

    #[test]
    fn repeated_row_entry_rejected() {
        let e = make_group(vec![vec![0, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(e, GroupError::NotLatinSquare { .. }), "{e}");
    }

    #[test]
    fn z3_accepted() {
        let g = make_group(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.inv(1), 2);
    }

    #[test]
    fn latin_square_without_identity_rejected() {
        // x·y = x - y mod 3 is a Latin square with right identity 0 only.
        let t = (0..3).map(|x| (0..3).map(|y| (x + 3 - y) % 3).collect()).collect();
        assert_eq!(make_group(t).unwrap_err(), GroupError::NoIdentity);
    }

    #[test]
    fn non_associative_loop_rejected() {
        // A Latin square with identity 0 that is not associative (order 5 loop).
        let t = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(make_group(t).unwrap_err(), GroupError::NotAssociative { .. }));
    }

    #[test]
    fn order_cap() {
        assert!(matches!(FiniteGroup::cyclic(17).unwrap_err(), GroupError::TooLarge { order: 17 }));
    }

    #[test]
    fn z2_lambda_is_antidiagonal() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let r = regular_representations(&g);
        let expected = Mat::from_triplets(2, vec![(0, 1, ONE), (1, 0, ONE)]);
        assert_eq!(r.lambda.get(1), &expected);
        assert_eq!(r.lambda.get(0), &Mat::identity(2));
    }

    #[test]
    fn z2_rho_chi_covariance() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let r = regular_representations(&g);
        assert_eq!(r.rho.get(1).matmul(r.chi.get(0)), r.chi.get(1).matmul(r.rho.get(1)));
    }

    #[test]
    fn klein_is_abelian_with_involutions() {
        let g = FiniteGroup::klein_four();
        for a in g.elements() {
            assert_eq!(g.inv(a), a);
            for b in g.elements() {
                assert_eq!(g.mul(a, b), g.mul(b, a));
            }
        }
    }
}
