//! Finite groupoids, cocycles into finite groups and their convolution
//! algebras; skew-product and semidirect-product groupoids; the
//! isomorphisms relating them to crossed products; equivalence bimodules.

mod certify;
mod equivalence;
mod products;

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certify::{
    certify_full_gpd, certify_gpd_iso, certify_semi_cross, expectations_and_norm_identities, kernel_embedding_check,
    ExpectationReport, KernelEmbeddingReport,
};
pub use equivalence::{
    bimodule_inner_products, build_bimodule, certify_equivalence, inner_product_general, inner_product_graded,
    verify_bimodule, BimoduleReport, EquivalenceBimodule, EquivalenceKind, EquivalenceReport, InnerProductReport,
};
pub use products::{semidirect_product, skew_product_groupoid, GroupoidAction, SemidirectProduct, SkewGroupoid};

use crate::crossed::CrossedError;
use crate::duality::IsomorphismCertificate;
use crate::graphalg::GraphalgError;
use crate::groups::{FiniteGroup, GroupError};
use crate::matalg::{linear_span, AlgebraSpan, Config, Mat, MatalgError, C64, ONE, ZERO};

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("groupoid has no units")]
    Empty,
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("duplicate arrow name `{0}`")]
    DuplicateName(String),
    #[error("units misbehave at `{arrow}`: {detail}")]
    BadUnits { arrow: String, detail: String },
    #[error("bad inverse for `{arrow}`: {detail}")]
    BadInverse { arrow: String, detail: String },
    #[error("product `{x}·{y}` is missing")]
    MissingProduct { x: String, y: String },
    #[error("product `{x}·{y}` has wrong range or source")]
    BadProduct { x: String, y: String },
    #[error("product leaves the arrow set at `{x}·{y}`")]
    NotClosed { x: String, y: String },
    #[error("not associative: ({x}·{y})·{z} ≠ {x}·({y}·{z})")]
    NotAssociative { x: String, y: String, z: String },
    #[error("cocycle fails c(xy) = c(x)c(y) at `{x}`, `{y}`")]
    NotHomomorphism { x: String, y: String },
    #[error("cocycle has {found} values for {expected} arrows")]
    CocycleLength { expected: usize, found: usize },
    #[error("cocycle value {value} at `{arrow}` is not a group element")]
    CocycleValue { arrow: String, value: usize },
    #[error("action of `{element}` is not a groupoid automorphism: {detail}")]
    NotAutomorphism { element: String, detail: String },
    #[error("groupoid with {arrows} arrows exceeds the cap {cap}")]
    TooLarge { arrows: usize, cap: usize },
    #[error("identity violated: {identity} ({detail})")]
    IdentityViolated { identity: String, detail: String },
    #[error("bimodule axiom `{axiom}` fails at {witness}")]
    AxiomFailed { axiom: String, witness: String },
    #[error("inner product formulas differ by {error:.3e}")]
    FormulaMismatch { error: f64 },
    #[error("{what} has negative eigenvalue {min_eigenvalue:.3e}")]
    PositivityFailed { what: String, min_eigenvalue: f64 },
    #[error("certification of {} failed: {}", .0.name, .0.first_failure().unwrap_or("unknown"))]
    CertificationFailed(Box<IsomorphismCertificate>),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matalg(#[from] MatalgError),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
    #[error(transparent)]
    Graphalg(#[from] GraphalgError),
}

impl GroupoidError {
    /// The partial certificate carried by a certification failure.
    pub fn certificate(&self) -> Option<&IsomorphismCertificate> {
        match self {
            GroupoidError::CertificationFailed(c) => Some(c),
            _ => None,
        }
    }
}

/// A finite groupoid. Arrows `0..num_units()` are the units, in unit order,
/// so a unit index is also its arrow index.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupoid {
    names: Vec<String>,
    units: usize,
    src: Vec<usize>,
    rng: Vec<usize>,
    inv: Vec<usize>,
    table: Vec<Option<u32>>,
    by_range: Vec<Vec<usize>>,
    by_source: Vec<Vec<usize>>,
}

/// Cell list plus structure maps from which [`FiniteGroupoid`] is assembled.
struct Cells<T> {
    cells: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Copy + Eq + Hash> Cells<T> {
    /// Orders cells with units first, keeping the given order otherwise.
    fn new(all: Vec<T>, is_unit: impl Fn(&T) -> bool) -> Self {
        let (mut cells, rest): (Vec<T>, Vec<T>) = all.into_iter().partition(|c| is_unit(c));
        cells.extend(rest);
        let index = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Cells { cells, index }
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble<T: Copy + Eq + Hash>(
    all: Vec<T>,
    is_unit: impl Fn(&T) -> bool,
    name: impl Fn(&T) -> String,
    src: impl Fn(&T) -> T,
    rng: impl Fn(&T) -> T,
    inv: impl Fn(&T) -> T,
    mul: impl Fn(&T, &T) -> T,
) -> Result<(FiniteGroupoid, Vec<T>), GroupoidError> {
    let cells = Cells::new(all, &is_unit);
    let units = cells.cells.iter().filter(|c| is_unit(c)).count();
    let names: Vec<String> = cells.cells.iter().map(&name).collect();
    let look = |c: T, ctx: &T| {
        cells
            .index
            .get(&c)
            .copied()
            .ok_or_else(|| GroupoidError::UnknownArrow(format!("{} of {}", name(&c), name(ctx))))
    };
    let mut s = Vec::with_capacity(cells.cells.len());
    let mut r = Vec::with_capacity(cells.cells.len());
    let mut iv = Vec::with_capacity(cells.cells.len());
    for c in &cells.cells {
        s.push(look(src(c), c)?);
        r.push(look(rng(c), c)?);
        iv.push(look(inv(c), c)?);
    }
    let n = cells.cells.len();
    let mut table = vec![None; n * n];
    for x in 0..n {
        for y in 0..n {
            if s[x] == r[y] {
                let p = mul(&cells.cells[x], &cells.cells[y]);
                let k = cells
                    .index
                    .get(&p)
                    .ok_or_else(|| GroupoidError::NotClosed { x: names[x].clone(), y: names[y].clone() })?;
                table[x * n + y] = Some(*k as u32);
            }
        }
    }
    let g = FiniteGroupoid::from_tables(names, units, s, r, iv, table)?;
    Ok((g, cells.cells))
}

impl FiniteGroupoid {
    /// Validates every groupoid axiom exhaustively.
    fn from_tables(
        names: Vec<String>,
        units: usize,
        src: Vec<usize>,
        rng: Vec<usize>,
        inv: Vec<usize>,
        table: Vec<Option<u32>>,
    ) -> Result<Self, GroupoidError> {
        if units == 0 {
            return Err(GroupoidError::Empty);
        }
        let n = names.len();
        let mut seen = std::collections::HashSet::new();
        for nm in &names {
            if !seen.insert(nm.as_str()) {
                return Err(GroupoidError::DuplicateName(nm.clone()));
            }
        }
        let bad_units = |names: &[String], x: usize, d: &str| GroupoidError::BadUnits {
            arrow: names[x].clone(),
            detail: d.to_string(),
        };
        for x in 0..n {
            if src[x] >= units || rng[x] >= units {
                return Err(bad_units(&names, x, "range or source is not a unit"));
            }
            if x < units && (src[x] != x || rng[x] != x) {
                return Err(bad_units(&names, x, "a unit must be its own range and source"));
            }
        }
        let mut by_range = vec![Vec::new(); units];
        let mut by_source = vec![Vec::new(); units];
        for x in 0..n {
            by_range[rng[x]].push(x);
            by_source[src[x]].push(x);
        }
        let g = FiniteGroupoid { names, units, src, rng, inv, table, by_range, by_source };
        for x in 0..n {
            for &y in &g.by_range[g.src[x]] {
                let xy = g
                    .mul(x, y)
                    .ok_or_else(|| GroupoidError::MissingProduct { x: g.names[x].clone(), y: g.names[y].clone() })?;
                if g.rng[xy] != g.rng[x] || g.src[xy] != g.src[y] {
                    return Err(GroupoidError::BadProduct { x: g.names[x].clone(), y: g.names[y].clone() });
                }
            }
        }
        for x in 0..n {
            if g.mul(g.rng[x], x) != Some(x) || g.mul(x, g.src[x]) != Some(x) {
                return Err(bad_units(&g.names, x, "units do not act as identities"));
            }
            let i = g.inv[x];
            if g.mul(x, i) != Some(g.rng[x]) || g.mul(i, x) != Some(g.src[x]) {
                return Err(GroupoidError::BadInverse {
                    arrow: g.names[x].clone(),
                    detail: format!("with candidate `{}`", g.names[i]),
                });
            }
        }
        for x in 0..n {
            for &y in &g.by_range[g.src[x]] {
                let xy = g.mul(x, y).unwrap_or(usize::MAX);
                for &z in &g.by_range[g.src[y]] {
                    if g.mul(xy, z) != g.mul(y, z).and_then(|yz| g.mul(x, yz)) {
                        return Err(GroupoidError::NotAssociative {
                            x: g.names[x].clone(),
                            y: g.names[y].clone(),
                            z: g.names[z].clone(),
                        });
                    }
                }
            }
        }
        Ok(g)
    }

    /// The pair groupoid on `n` points, arrows `x_ij` from `j` to `i`.
    pub fn pair(n: usize) -> Result<Self, GroupoidError> {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let sep = if n > 9 { "," } else { "" };
        assemble(
            all,
            |&(i, j)| i == j,
            |&(i, j)| format!("x{}{sep}{}", i + 1, j + 1),
            |&(_, j)| (j, j),
            |&(i, _)| (i, i),
            |&(i, j)| (j, i),
            |&(i, _), &(_, k)| (i, k),
        )
        .map(|(g, _)| g)
    }

    /// A group as a one-unit groupoid; arrows carry the element names.
    pub fn from_group(h: &FiniteGroup) -> Result<Self, GroupoidError> {
        let e = h.identity();
        assemble(
            h.elements().collect(),
            |&t| t == e,
            |&t| h.name(t).to_string(),
            |_| e,
            |_| e,
            |&t| h.inv(t),
            |&a, &b| h.mul(a, b),
        )
        .map(|(g, _)| g)
    }

    /// `n` units and nothing else.
    pub fn units_only(n: usize) -> Result<Self, GroupoidError> {
        assemble((0..n).collect(), |_| true, |&i| format!("u{}", i + 1), |&i| i, |&i| i, |&i| i, |&i, _| i)
            .map(|(g, _)| g)
    }

    /// Disjoint union. Names are kept when they stay distinct and prefixed
    /// by the part index otherwise.
    pub fn disjoint_union(parts: &[&FiniteGroupoid]) -> Result<Self, GroupoidError> {
        let all: Vec<(usize, usize)> =
            parts.iter().enumerate().flat_map(|(k, p)| (0..p.num_arrows()).map(move |x| (k, x))).collect();
        let total: usize = parts.iter().map(|p| p.num_arrows()).sum();
        let distinct: std::collections::HashSet<&str> =
            parts.iter().flat_map(|p| p.names.iter().map(String::as_str)).collect();
        let prefix = distinct.len() != total;
        assemble(
            all,
            |&(k, x)| parts[k].is_unit(x),
            |&(k, x)| if prefix { format!("{}.{}", k + 1, parts[k].names[x]) } else { parts[k].names[x].clone() },
            |&(k, x)| (k, parts[k].src[x]),
            |&(k, x)| (k, parts[k].rng[x]),
            |&(k, x)| (k, parts[k].inv[x]),
            |&(k, x), &(_, y)| (k, parts[k].mul(x, y).unwrap_or(usize::MAX)),
        )
        .map(|(g, _)| g)
    }

    /// Cartesian product of groupoids.
    pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<Self, GroupoidError> {
        let all: Vec<(usize, usize)> =
            (0..a.num_arrows()).flat_map(|x| (0..b.num_arrows()).map(move |y| (x, y))).collect();
        assemble(
            all,
            |&(x, y)| a.is_unit(x) && b.is_unit(y),
            |&(x, y)| format!("({},{})", a.names[x], b.names[y]),
            |&(x, y)| (a.src[x], b.src[y]),
            |&(x, y)| (a.rng[x], b.rng[y]),
            |&(x, y)| (a.inv[x], b.inv[y]),
            |&(x, y), &(z, w)| (a.mul(x, z).unwrap_or(usize::MAX), b.mul(y, w).unwrap_or(usize::MAX)),
        )
        .map(|(g, _)| g)
    }

    /// The transitive groupoid on `n` points with isotropy `h`: pair
    /// groupoid times `h`.
    pub fn pair_with_isotropy(n: usize, h: &FiniteGroup) -> Result<Self, GroupoidError> {
        Self::product(&Self::pair(n)?, &Self::from_group(h)?)
    }

    /// The subgroupoid on the arrows with `keep[x]`; the second value maps
    /// old arrow indices to new ones.
    pub fn subgroupoid(&self, keep: &[bool]) -> Result<(Self, Vec<Option<usize>>), GroupoidError> {
        let all: Vec<usize> = (0..self.num_arrows()).filter(|&x| keep[x]).collect();
        let (g, cells) = assemble(
            all,
            |&x| self.is_unit(x),
            |&x| self.names[x].clone(),
            |&x| self.src[x],
            |&x| self.rng[x],
            |&x| self.inv[x],
            |&x, &y| self.mul(x, y).unwrap_or(usize::MAX),
        )?;
        let mut map = vec![None; self.num_arrows()];
        for (i, &x) in cells.iter().enumerate() {
            map[x] = Some(i);
        }
        Ok((g, map))
    }

    pub fn num_arrows(&self) -> usize {
        self.names.len()
    }

    pub fn num_units(&self) -> usize {
        self.units
    }

    pub fn units(&self) -> std::ops::Range<usize> {
        0..self.units
    }

    pub fn arrows(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn is_unit(&self, x: usize) -> bool {
        x < self.units
    }

    pub fn src(&self, x: usize) -> usize {
        self.src[x]
    }

    pub fn rng(&self, x: usize) -> usize {
        self.rng[x]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    /// `xy` when `s(x) = r(y)`.
    pub fn mul(&self, x: usize, y: usize) -> Option<usize> {
        self.table.get(x * self.names.len() + y).copied().flatten().map(|k| k as usize)
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `Q^u = r⁻¹(u)`.
    pub fn with_range(&self, u: usize) -> &[usize] {
        &self.by_range[u]
    }

    pub fn with_source(&self, u: usize) -> &[usize] {
        &self.by_source[u]
    }

    /// Units grouped into transitive components (orbits).
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.units];
        let mut out = Vec::new();
        for u in self.units() {
            if comp[u] != usize::MAX {
                continue;
            }
            let k = out.len();
            let mut orbit: Vec<usize> = self.by_range[u].iter().map(|&x| self.src[x]).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &v in &orbit {
                comp[v] = k;
            }
            out.push(orbit);
        }
        out
    }

    /// Arrows from `u` to `u`.
    pub fn isotropy(&self, u: usize) -> Vec<usize> {
        self.by_range[u].iter().copied().filter(|&x| self.src[x] == u).collect()
    }
}

/// `c: Q → G` with `c(xy) = c(x)c(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    pub group: FiniteGroup,
    values: Vec<usize>,
}

impl Cocycle {
    pub fn new(q: &FiniteGroupoid, g: &FiniteGroup, values: Vec<usize>) -> Result<Self, GroupoidError> {
        if values.len() != q.num_arrows() {
            return Err(GroupoidError::CocycleLength { expected: q.num_arrows(), found: values.len() });
        }
        if let Some(x) = q.arrows().find(|&x| values[x] >= g.order()) {
            return Err(GroupoidError::CocycleValue { arrow: q.name(x).into(), value: values[x] });
        }
        for x in q.arrows() {
            for &y in q.with_range(q.src(x)) {
                let xy = q.mul(x, y).expect("validated groupoid");
                if values[xy] != g.mul(values[x], values[y]) {
                    return Err(GroupoidError::NotHomomorphism { x: q.name(x).into(), y: q.name(y).into() });
                }
            }
        }
        Ok(Cocycle { group: g.clone(), values })
    }

    pub fn trivial(q: &FiniteGroupoid, g: &FiniteGroup) -> Self {
        Cocycle { group: g.clone(), values: vec![g.identity(); q.num_arrows()] }
    }

    pub fn get(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `N = c⁻¹(e)` as a subgroupoid, with the arrow map into `q`.
    pub fn kernel(&self, q: &FiniteGroupoid) -> Result<(FiniteGroupoid, Vec<usize>), GroupoidError> {
        let e = self.group.identity();
        let keep: Vec<bool> = self.values.iter().map(|&v| v == e).collect();
        let (n, map) = q.subgroupoid(&keep)?;
        let mut back = vec![0; n.num_arrows()];
        for (x, m) in map.iter().enumerate() {
            if let Some(i) = m {
                back[*i] = x;
            }
        }
        Ok((n, back))
    }
}

/// A finitely supported function on the arrows of a groupoid. Operations
/// take the groupoid explicitly.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionElement {
    pub coeffs: Vec<C64>,
}

impl ConvolutionElement {
    pub fn zero(q: &FiniteGroupoid) -> Self {
        ConvolutionElement { coeffs: vec![ZERO; q.num_arrows()] }
    }

    pub fn delta(q: &FiniteGroupoid, x: usize) -> Self {
        let mut f = Self::zero(q);
        f.coeffs[x] = ONE;
        f
    }

    /// Coefficients uniform in the unit square on the arrows `support` accepts.
    pub fn random<R: Rng + ?Sized>(q: &FiniteGroupoid, rng: &mut R, support: impl Fn(usize) -> bool) -> Self {
        let coeffs = q
            .arrows()
            .map(|x| if support(x) { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { ZERO })
            .collect();
        ConvolutionElement { coeffs }
    }

    /// `(fg)(x) = Σ_{r(y)=r(x)} f(y) g(y⁻¹x)`.
    pub fn convolve(&self, q: &FiniteGroupoid, g: &ConvolutionElement) -> Self {
        let coeffs = q
            .arrows()
            .map(|x| {
                q.with_range(q.rng(x))
                    .iter()
                    .map(|&y| self.coeffs[y] * g.coeffs[q.mul(q.inv(y), x).expect("r(y) = r(x)")])
                    .sum()
            })
            .collect();
        ConvolutionElement { coeffs }
    }

    /// `f*(x) = conj f(x⁻¹)`.
    pub fn star(&self, q: &FiniteGroupoid) -> Self {
        ConvolutionElement { coeffs: q.arrows().map(|x| self.coeffs[q.inv(x)].conj()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        ConvolutionElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        ConvolutionElement { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `P_Q(f) = f|_{Q⁰}` with the sup norm over units.
    pub fn unit_sup_norm(&self, q: &FiniteGroupoid) -> f64 {
        q.units().map(|u| self.coeffs[u].norm()).fold(0.0, f64::max)
    }

    /// The part supported on `c⁻¹(t)`.
    pub fn graded_part(&self, c: &Cocycle, t: usize) -> Self {
        ConvolutionElement {
            coeffs: self.coeffs.iter().enumerate().map(|(x, &v)| if c.get(x) == t { v } else { ZERO }).collect(),
        }
    }
}

/// `C*(Q)` in the regular representation `L(δ_y)δ_z = δ_{yz}` on `ℓ²(Q)`.
#[derive(Clone, Debug)]
pub struct GroupoidAlgebra {
    pub groupoid: FiniteGroupoid,
    /// `L(δ_x)` for every arrow.
    pub deltas: Vec<Mat>,
    pub span: AlgebraSpan,
    pub report: ConvolutionReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub arrows: usize,
    pub dim: usize,
    /// `L(δ_x)L(δ_y) = L(δ_{xy})` or `0`, and `L(δ_x)* = L(δ_{x⁻¹})`, exactly.
    pub multiplicative: bool,
}

impl ConvolutionReport {
    pub fn passed(&self) -> bool {
        self.multiplicative && self.dim == self.arrows
    }
}

pub fn convolution_algebra(q: &FiniteGroupoid, cfg: &Config) -> Result<GroupoidAlgebra, GroupoidError> {
    let n = q.num_arrows();
    if n > cfg.max_dim {
        return Err(GroupoidError::TooLarge { arrows: n, cap: cfg.max_dim });
    }
    let deltas: Vec<Mat> = q
        .arrows()
        .map(|y| {
            let t = q.with_range(q.src(y)).iter().map(|&z| (q.mul(y, z).expect("composable"), z, ONE)).collect();
            Mat::from_triplets(n, t)
        })
        .collect();
    let zero = Mat::zeros(n);
    let mut multiplicative = true;
    for x in q.arrows() {
        multiplicative &= deltas[x].adjoint() == deltas[q.inv(x)];
        for y in q.arrows() {
            let expected = q.mul(x, y).map_or(&zero, |xy| &deltas[xy]);
            multiplicative &= deltas[x].matmul(&deltas[y]) == *expected;
        }
    }
    let span = linear_span(&deltas, cfg, "C*(Q)")?;
    let report = ConvolutionReport { arrows: n, dim: span.dim(), multiplicative };
    Ok(GroupoidAlgebra { groupoid: q.clone(), deltas, span, report })
}

impl GroupoidAlgebra {
    /// `L(f) = Σ f(x) L(δ_x)`.
    pub fn operator(&self, f: &ConvolutionElement) -> Mat {
        Mat::lin_comb(self.deltas.len(), f.coeffs.iter().copied().zip(self.deltas.iter()))
    }

    /// Reads `f` back from `L(f)`: `f(x) = L(f)_{x, s(x)}`.
    pub fn element_of(&self, m: &Mat) -> ConvolutionElement {
        let q = &self.groupoid;
        ConvolutionElement { coeffs: q.arrows().map(|x| m.get(x, q.src(x))).collect() }
    }
}

/// JSON groupoid descriptor. Units are arrows too; products and inverses
/// involving units are implied and need not be listed.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupoidSpec {
    pub units: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub mult: Vec<[String; 3]>,
    #[serde(default)]
    pub inv: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub rng: String,
}

pub fn make_groupoid(spec: &GroupoidSpec) -> Result<FiniteGroupoid, GroupoidError> {
    let mut names: Vec<String> = spec.units.clone();
    let mut src: Vec<usize> = (0..names.len()).collect();
    let mut rng: Vec<usize> = src.clone();
    let unit_ix: HashMap<&str, usize> = spec.units.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();
    if unit_ix.len() != spec.units.len() {
        let dup =
            spec.units.iter().find(|u| spec.units.iter().filter(|v| v == u).count() > 1).cloned().unwrap_or_default();
        return Err(GroupoidError::DuplicateName(dup));
    }
    let unit = |n: &str| unit_ix.get(n).copied().ok_or_else(|| GroupoidError::UnknownArrow(n.to_string()));
    for a in &spec.arrows {
        if let Some(&u) = unit_ix.get(a.id.as_str()) {
            if a.src != a.id || a.rng != a.id {
                return Err(GroupoidError::BadUnits {
                    arrow: a.id.clone(),
                    detail: "declared unit with another range or source".into(),
                });
            }
            debug_assert!(u < spec.units.len());
            continue;
        }
        names.push(a.id.clone());
        src.push(unit(&a.src)?);
        rng.push(unit(&a.rng)?);
    }
    let n = names.len();
    let idx: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if idx.len() != n {
        let dup = names.iter().find(|u| names.iter().filter(|v| v == u).count() > 1).cloned().unwrap_or_default();
        return Err(GroupoidError::DuplicateName(dup));
    }
    let arrow = |s: &str| idx.get(s).copied().ok_or_else(|| GroupoidError::UnknownArrow(s.to_string()));
    let units = spec.units.len();
    let mut inv: Vec<usize> = (0..n).map(|x| if x < units { x } else { usize::MAX }).collect();
    for (a, b) in &spec.inv {
        inv[arrow(a)?] = arrow(b)?;
    }
    if let Some(x) = inv.iter().position(|&i| i == usize::MAX) {
        return Err(GroupoidError::BadInverse { arrow: names[x].clone(), detail: "no inverse declared".into() });
    }
    let mut table = vec![None; n * n];
    for x in 0..n {
        table[rng[x] * n + x] = Some(x as u32);
        table[x * n + src[x]] = Some(x as u32);
    }
    for [a, b, ab] in &spec.mult {
        let (x, y, xy) = (arrow(a)?, arrow(b)?, arrow(ab)?);
        if src[x] != rng[y] {
            return Err(GroupoidError::BadProduct { x: a.clone(), y: b.clone() });
        }
        table[x * n + y] = Some(xy as u32);
    }
    FiniteGroupoid::from_tables(names, units, src, rng, inv, table)
}

impl FiniteGroupoid {
    /// The descriptor [`make_groupoid`] accepts; products with units omitted.
    pub fn to_spec(&self) -> GroupoidSpec {
        let units = self.units().map(|u| self.names[u].clone()).collect();
        let arrows = self
            .arrows()
            .filter(|&x| !self.is_unit(x))
            .map(|x| ArrowSpec {
                id: self.names[x].clone(),
                src: self.names[self.src[x]].clone(),
                rng: self.names[self.rng[x]].clone(),
            })
            .collect();
        let mut mult = Vec::new();
        for x in self.arrows().filter(|&x| !self.is_unit(x)) {
            for &y in self.with_range(self.src[x]) {
                if !self.is_unit(y) {
                    let xy = self.mul(x, y).expect("composable");
                    mult.push([self.names[x].clone(), self.names[y].clone(), self.names[xy].clone()]);
                }
            }
        }
        let inv = self
            .arrows()
            .filter(|&x| !self.is_unit(x))
            .map(|x| (self.names[x].clone(), self.names[self.inv[x]].clone()))
            .collect();
        GroupoidSpec { units, arrows, mult, inv, cocycle: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::wedderburn_signature;
    use crate::matalg::Signature;

    #[test]
    fn pair_groupoid_counts_and_product() {
        let q = FiniteGroupoid::pair(2).unwrap();
        assert_eq!((q.num_units(), q.num_arrows()), (2, 4));
        let x12 = q.index_of("x12").unwrap();
        let x21 = q.index_of("x21").unwrap();
        let x11 = q.index_of("x11").unwrap();
        assert_eq!(q.mul(x12, x21), Some(x11));
        assert_eq!(q.mul(x12, x12), None);
        let d = ConvolutionElement::delta(&q, x12).convolve(&q, &ConvolutionElement::delta(&q, x21));
        assert_eq!(d, ConvolutionElement::delta(&q, x11));
    }

    #[test]
    fn disjoint_union_of_pairs() {
        let p = FiniteGroupoid::pair(2).unwrap();
        let q = FiniteGroupoid::disjoint_union(&[&p, &p]).unwrap();
        assert_eq!((q.num_units(), q.num_arrows()), (4, 8));
        assert_eq!(q.orbits().len(), 2);
        assert!(q.name(0).starts_with("1."));
    }

    #[test]
    fn signatures_of_basic_algebras() {
        let cfg = Config::default();
        let sig = |q: &FiniteGroupoid| {
            let a = convolution_algebra(q, &cfg).unwrap();
            assert!(a.report.passed());
            wedderburn_signature(&a.span, &cfg).unwrap()
        };
        assert_eq!(sig(&FiniteGroupoid::pair(2).unwrap()), Signature(vec![2]));
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(sig(&FiniteGroupoid::from_group(&z2).unwrap()), Signature(vec![1, 1]));
        assert_eq!(sig(&FiniteGroupoid::units_only(3).unwrap()), Signature(vec![1, 1, 1]));
        let z3 = FiniteGroup::cyclic(3).unwrap();
        assert_eq!(sig(&FiniteGroupoid::pair_with_isotropy(2, &z3).unwrap()), Signature(vec![2, 2, 2]));
    }

    #[test]
    fn regular_representation_matches_convolution() {
        use rand::SeedableRng;
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let q = FiniteGroupoid::pair_with_isotropy(2, &z2).unwrap();
        let a = convolution_algebra(&q, &Config::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = ConvolutionElement::random(&q, &mut rng, |_| true);
            let g = ConvolutionElement::random(&q, &mut rng, |_| true);
            let fg = a.operator(&f.convolve(&q, &g));
            assert!(fg.approx_eq(&a.operator(&f).matmul(&a.operator(&g)), 1e-12));
            assert!(a.operator(&f.star(&q)).approx_eq(&a.operator(&f).adjoint(), 1e-12));
            assert!(a.element_of(&a.operator(&f)).max_abs_diff(&f) < 1e-15);
        }
    }

    #[test]
    fn spec_round_trip_and_rejections() {
        let q = FiniteGroupoid::pair(3).unwrap();
        let spec = q.to_spec();
        assert_eq!(make_groupoid(&spec).unwrap(), q);

        let mut bad = spec.clone();
        bad.mult.retain(|[a, b, _]| !(a == "x12" && b == "x23"));
        assert!(matches!(make_groupoid(&bad), Err(GroupoidError::MissingProduct { .. })));

        let mut bad = spec.clone();
        bad.inv.insert("x12".into(), "x12".into());
        assert!(matches!(make_groupoid(&bad), Err(GroupoidError::BadInverse { .. })));

        let mut bad = spec.clone();
        for m in bad.mult.iter_mut() {
            if m[0] == "x12" && m[1] == "x21" {
                m[2] = "x21".into();
            }
        }
        assert!(make_groupoid(&bad).is_err());
    }

    #[test]
    fn non_associative_table_rejected() {
        // Z3 table with two products swapped keeps units and inverses but
        // breaks associativity.
        let spec = GroupoidSpec {
            units: vec!["e".into()],
            arrows: vec![
                ArrowSpec { id: "a".into(), src: "e".into(), rng: "e".into() },
                ArrowSpec { id: "b".into(), src: "e".into(), rng: "e".into() },
                ArrowSpec { id: "c".into(), src: "e".into(), rng: "e".into() },
            ],
            mult: vec![
                ["a".into(), "a".into(), "e".into()],
                ["b".into(), "b".into(), "e".into()],
                ["c".into(), "c".into(), "e".into()],
                ["a".into(), "b".into(), "c".into()],
                ["b".into(), "a".into(), "c".into()],
                ["a".into(), "c".into(), "b".into()],
                ["c".into(), "a".into(), "b".into()],
                ["b".into(), "c".into(), "c".into()],
                ["c".into(), "b".into(), "a".into()],
            ],
            inv: [("a", "a"), ("b", "b"), ("c", "c")].iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
            cocycle: None,
        };
        assert!(matches!(make_groupoid(&spec), Err(GroupoidError::NotAssociative { .. })));
    }

    #[test]
    fn cocycles() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let mut v = vec![0; 4];
        v[q.index_of("x12").unwrap()] = 1;
        v[q.index_of("x21").unwrap()] = 1;
        let c = Cocycle::new(&q, &z2, v).unwrap();
        let (n, back) = c.kernel(&q).unwrap();
        assert_eq!(n.num_arrows(), 2);
        assert!(back.iter().all(|&x| q.is_unit(x)));
        let mut bad = vec![0; 4];
        bad[q.index_of("x12").unwrap()] = 1;
        assert!(matches!(Cocycle::new(&q, &z2, bad), Err(GroupoidError::NotHomomorphism { .. })));
    }
}
