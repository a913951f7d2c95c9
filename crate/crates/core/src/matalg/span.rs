//! Orthonormal spans of matrices and the `*`-algebra closure engine.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{Mat, C64, DROP, ZERO};
use super::{Config, MatalgError, Witness};

/// Incremental orthonormal basis under the trace pairing.
///
/// Positions of nonzero entries are indexed so a candidate is only projected
/// against basis vectors whose support meets its own; for orthonormal
/// vectors the skipped pairings are exactly zero.
pub(crate) struct OrthoBasis {
    n: usize,
    vectors: Vec<Mat>,
    flat: Vec<Vec<(usize, C64)>>,
    index: Vec<Vec<u32>>,
    scratch: Vec<C64>,
    marked: Vec<bool>,
    touched: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
}

pub(crate) struct Projection {
    pub coeffs: Vec<(usize, C64)>,
    pub residual: Mat,
    pub residual_norm: f64,
}

impl OrthoBasis {
    pub fn new(n: usize) -> Self {
        OrthoBasis {
            n,
            vectors: Vec::new(),
            flat: Vec::new(),
            index: vec![Vec::new(); n * n],
            scratch: vec![ZERO; n * n],
            marked: vec![false; n * n],
            touched: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    fn touch(&mut self, p: usize) {
        if !self.marked[p] {
            self.marked[p] = true;
            self.touched.push(p);
        }
    }

    fn candidates(&mut self) -> Vec<usize> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut out = Vec::new();
        for &p in &self.touched {
            if self.scratch[p].norm() <= DROP {
                continue;
            }
            for &k in &self.index[p] {
                let k = k as usize;
                if self.stamp[k] != self.epoch {
                    self.stamp[k] = self.epoch;
                    out.push(k);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Modified Gram-Schmidt projection of `y` with one reorthogonalization pass.
    pub fn project(&mut self, y: &Mat) -> Projection {
        debug_assert_eq!(y.dim(), self.n);
        for (p, v) in y.flat_entries() {
            self.scratch[p] = v;
            self.touch(p);
        }
        let mut coeffs: Vec<(usize, C64)> = Vec::new();
        for _pass in 0..2 {
            let cands = self.candidates();
            for k in cands {
                let mut c = ZERO;
                for &(p, q) in &self.flat[k] {
                    c += q.conj() * self.scratch[p];
                }
                if c.norm() <= DROP {
                    continue;
                }
                for idx in 0..self.flat[k].len() {
                    let (p, q) = self.flat[k][idx];
                    self.scratch[p] -= c * q;
                    self.touch(p);
                }
                coeffs.push((k, c));
            }
        }
        self.touched.sort_unstable();
        let n = self.n;
        let mut t = Vec::new();
        for &p in &self.touched {
            let v = self.scratch[p];
            if v.norm() > DROP {
                t.push((p / n, p % n, v));
            }
            self.scratch[p] = ZERO;
            self.marked[p] = false;
        }
        self.touched.clear();
        coeffs.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, C64)> = Vec::with_capacity(coeffs.len());
        for (k, c) in coeffs {
            match merged.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => merged.push((k, c)),
            }
        }
        let residual = Mat::from_triplets(n, t);
        let residual_norm = residual.norm_fro();
        Projection { coeffs: merged, residual, residual_norm }
    }

    /// Appends `residual / norm` as a new basis vector.
    pub fn push_normalized(&mut self, residual: &Mat, norm: f64) -> usize {
        let q = residual.scale(C64::new(1.0 / norm, 0.0));
        let k = self.vectors.len();
        let flat: Vec<(usize, C64)> = q.flat_entries().collect();
        for &(p, _) in &flat {
            self.index[p].push(k as u32);
        }
        self.flat.push(flat);
        self.vectors.push(q);
        self.stamp.push(0);
        k
    }

    pub fn into_span(self, generators: Vec<Mat>, label: &str) -> AlgebraSpan {
        AlgebraSpan { ambient: self.n, basis: self.vectors, index: self.index, generators, label: label.to_string() }
    }
}

/// An orthonormal basis (under `⟨a,b⟩ = tr(a*b)`) of a subspace of `M_n`,
/// usually a `*`-subalgebra produced by [`span_closure`].
#[derive(Clone, Debug)]
pub struct AlgebraSpan {
    ambient: usize,
    basis: Vec<Mat>,
    index: Vec<Vec<u32>>,
    generators: Vec<Mat>,
    label: String,
}

impl AlgebraSpan {
    fn from_orthonormal(ambient: usize, basis: Vec<Mat>, generators: Vec<Mat>, label: &str) -> Self {
        let mut index = vec![Vec::new(); ambient * ambient];
        for (k, q) in basis.iter().enumerate() {
            for (p, _) in q.flat_entries() {
                index[p].push(k as u32);
            }
        }
        AlgebraSpan { ambient, basis, index, generators, label: label.to_string() }
    }

    /// The full matrix algebra `M_n`, spanned by matrix units.
    pub fn full(n: usize) -> Self {
        let basis: Vec<Mat> = (0..n).flat_map(|i| (0..n).map(move |j| Mat::unit(n, i, j))).collect();
        Self::from_orthonormal(n, basis.clone(), basis, &format!("M_{n}"))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn generators(&self) -> &[Mat] {
        &self.generators
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    fn candidates(&self, x: &Mat, stamp: &mut [bool]) -> Vec<usize> {
        let mut out = Vec::new();
        for (p, _) in x.flat_entries() {
            for &k in &self.index[p] {
                let k = k as usize;
                if !stamp[k] {
                    stamp[k] = true;
                    out.push(k);
                }
            }
        }
        for &k in &out {
            stamp[k] = false;
        }
        out.sort_unstable();
        out
    }

    /// Orthogonal projection: sparse coordinates and the residual.
    pub fn project(&self, x: &Mat) -> (Vec<(usize, C64)>, Mat) {
        assert_eq!(x.dim(), self.ambient, "projection onto a span of a different ambient dimension");
        let mut stamp = vec![false; self.basis.len()];
        let mut coeffs: Vec<(usize, C64)> = Vec::new();
        let mut r = x.clone();
        for _pass in 0..2 {
            let cands = self.candidates(&r, &mut stamp);
            let cs: Vec<(usize, C64)> =
                cands.into_iter().map(|k| (k, self.basis[k].inner(&r))).filter(|(_, c)| c.norm() > DROP).collect();
            if cs.is_empty() {
                break;
            }
            let mut terms: Vec<(C64, &Mat)> = vec![(C64::new(1.0, 0.0), &r)];
            terms.extend(cs.iter().map(|&(k, c)| (-c, &self.basis[k])));
            let next = Mat::lin_comb(self.ambient, terms);
            r = next;
            coeffs.extend(cs);
        }
        coeffs.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, C64)> = Vec::with_capacity(coeffs.len());
        for (k, c) in coeffs {
            match merged.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => merged.push((k, c)),
            }
        }
        (merged, r)
    }

    /// Dense coordinate vector of `x`; errors when `x` leaves the span.
    pub fn coordinates(&self, x: &Mat, tol: f64) -> Result<Vec<C64>, MatalgError> {
        let (coeffs, r) = self.project(x);
        let residual = r.norm_fro();
        if residual > tol * x.norm_fro().max(1.0) {
            return Err(MatalgError::NotInSpan { residual });
        }
        let mut out = vec![ZERO; self.dim()];
        for (k, c) in coeffs {
            out[k] = c;
        }
        Ok(out)
    }

    pub fn residual_norm(&self, x: &Mat) -> f64 {
        self.project(x).1.norm_fro()
    }

    pub fn contains(&self, x: &Mat, tol: f64) -> bool {
        x.dim() == self.ambient && self.residual_norm(x) <= tol * x.norm_fro().max(1.0)
    }

    pub fn combine(&self, coords: &[C64]) -> Mat {
        Mat::lin_comb(self.ambient, coords.iter().copied().zip(self.basis.iter()))
    }

    /// A random element with coefficients uniform in the unit square.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let coords: Vec<C64> =
            (0..self.dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        self.combine(&coords)
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut stamp = vec![false; self.dim()];
        for (i, q) in self.basis.iter().enumerate() {
            for j in self.candidates(q, &mut stamp) {
                let g = q.inner(&self.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Whether the span is closed under products of basis elements and adjoints.
    pub fn is_star_algebra(&self, tol: f64) -> bool {
        self.basis.iter().all(|q| self.contains(&q.adjoint(), tol))
            && self.basis.iter().all(|a| self.basis.iter().all(|b| self.contains(&a.matmul(b), tol)))
    }

    pub fn tensor(&self, other: &AlgebraSpan) -> AlgebraSpan {
        let basis: Vec<Mat> = self.basis.iter().flat_map(|a| other.basis.iter().map(move |b| a.kron(b))).collect();
        let gens: Vec<Mat> =
            self.generators.iter().flat_map(|a| other.generators.iter().map(move |b| a.kron(b))).collect();
        Self::from_orthonormal(self.ambient * other.ambient, basis, gens, &format!("{}⊗{}", self.label, other.label))
    }

    pub fn direct_sum(&self, other: &AlgebraSpan) -> AlgebraSpan {
        let za = Mat::zeros(self.ambient);
        let zb = Mat::zeros(other.ambient);
        let mut basis: Vec<Mat> = self.basis.iter().map(|a| a.direct_sum(&zb)).collect();
        basis.extend(other.basis.iter().map(|b| za.direct_sum(b)));
        let mut gens: Vec<Mat> = self.generators.iter().map(|a| a.direct_sum(&zb)).collect();
        gens.extend(other.generators.iter().map(|b| za.direct_sum(b)));
        Self::from_orthonormal(self.ambient + other.ambient, basis, gens, &format!("{}⊕{}", self.label, other.label))
    }
}

fn validate(gens: &[Mat], cfg: &Config) -> Result<usize, MatalgError> {
    let first = gens.first().ok_or(MatalgError::NoGenerators)?;
    let n = first.dim();
    if n > cfg.max_dim {
        return Err(MatalgError::AmbientTooLarge { dim: n, cap: cfg.max_dim });
    }
    for (index, g) in gens.iter().enumerate() {
        if g.dim() != n {
            return Err(MatalgError::DimensionMismatch { index, expected: n, found: g.dim() });
        }
    }
    Ok(n)
}

/// Linear span (no closure) of the given elements.
pub fn linear_span(elements: &[Mat], cfg: &Config, label: &str) -> Result<AlgebraSpan, MatalgError> {
    let n = validate(elements, cfg)?;
    let mut ob = OrthoBasis::new(n);
    for y in elements {
        let pr = ob.project(y);
        if pr.residual_norm > cfg.closure_tol * y.norm_fro().max(1.0) {
            ob.push_normalized(&pr.residual, pr.residual_norm);
        }
    }
    Ok(ob.into_span(elements.to_vec(), label))
}

/// Basis of the smallest `*`-subalgebra (not unitized) containing `generators`.
///
/// Breadth-first: every new basis word is multiplied on the right by each
/// linearly independent generator and generator adjoint, and kept if it
/// leaves the current span.
pub fn span_closure(generators: &[Mat], cfg: &Config) -> Result<AlgebraSpan, MatalgError> {
    let run = ClosureRun::run(generators, None, cfg)?;
    Ok(run.basis.into_span(generators.to_vec(), "span"))
}

/// Outcome of inserting one candidate into a tracked closure.
enum Insert {
    Added,
    InSpan { error: f64, predicted: Option<Mat> },
}

/// Closure state, optionally carrying a parallel assignment of images.
pub(crate) struct ClosureRun {
    pub basis: OrthoBasis,
    pub words: Vec<Mat>,
    pub word_images: Vec<Mat>,
    pub basis_images: Vec<Mat>,
    pub tracking: bool,
    pub image_dim: usize,
    pub well_defined_failure: Option<Witness>,
    pub star_failures: Vec<Witness>,
    pub mult_failures: Vec<Witness>,
    pub max_error: f64,
}

const WITNESS_CAP: usize = 4;

impl ClosureRun {
    fn insert(&mut self, y: Mat, z: Option<Mat>, cfg: &Config) -> Insert {
        let pr = self.basis.project(&y);
        if pr.residual_norm > cfg.closure_tol * y.norm_fro().max(1.0) {
            if let Some(z) = &z {
                let mut terms: Vec<(C64, &Mat)> = vec![(C64::new(1.0, 0.0), z)];
                terms.extend(pr.coeffs.iter().map(|&(k, c)| (-c, &self.basis_images[k])));
                let img = Mat::lin_comb(self.image_dim, terms).scale(C64::new(1.0 / pr.residual_norm, 0.0));
                self.basis_images.push(img);
                self.word_images.push(z.clone());
            }
            self.basis.push_normalized(&pr.residual, pr.residual_norm);
            self.words.push(y);
            Insert::Added
        } else if let Some(z) = z {
            let predicted = Mat::lin_comb(self.image_dim, pr.coeffs.iter().map(|&(k, c)| (c, &self.basis_images[k])));
            let error = predicted.max_abs_diff(&z);
            self.max_error = self.max_error.max(error);
            Insert::InSpan { error, predicted: Some(predicted) }
        } else {
            Insert::InSpan { error: 0.0, predicted: None }
        }
    }

    pub fn run(gens: &[Mat], images: Option<&[Mat]>, cfg: &Config) -> Result<ClosureRun, MatalgError> {
        let n = validate(gens, cfg)?;
        let image_dim = match images {
            Some(imgs) => {
                if imgs.len() != gens.len() {
                    return Err(MatalgError::AssignmentIncomplete { generators: gens.len(), images: imgs.len() });
                }
                validate(imgs, cfg)?
            }
            None => 0,
        };
        let limit = n * n;
        let mut run = ClosureRun {
            basis: OrthoBasis::new(n),
            words: Vec::new(),
            word_images: Vec::new(),
            basis_images: Vec::new(),
            tracking: images.is_some(),
            image_dim,
            well_defined_failure: None,
            star_failures: Vec::new(),
            mult_failures: Vec::new(),
            max_error: 0.0,
        };
        let image_of = |i: usize| images.map(|imgs| imgs[i].clone());

        // Generators first: a dependent generator must carry the matching combination of images.
        for (i, g) in gens.iter().enumerate() {
            if let Insert::InSpan { error, predicted } = run.insert(g.clone(), image_of(i), cfg) {
                if error > cfg.tol && run.well_defined_failure.is_none() {
                    let mut w = Witness::new(
                        format!("generator {i} is a combination of earlier generators but its image is not"),
                        error,
                    );
                    w.push("generator", g.clone());
                    if let (Some(p), Some(z)) = (predicted, image_of(i)) {
                        w.push("image implied by linearity", p);
                        w.push("assigned image", z);
                    }
                    run.well_defined_failure = Some(w);
                }
            }
        }
        if let Some(w) = run.well_defined_failure.take() {
            return Err(MatalgError::NotWellDefined { witness: Box::new(w) });
        }
        for (i, g) in gens.iter().enumerate() {
            let z = image_of(i).map(|z| z.adjoint());
            if let Insert::InSpan { error, predicted } = run.insert(g.adjoint(), z.clone(), cfg) {
                if error > cfg.tol && run.star_failures.len() < WITNESS_CAP {
                    let mut w = Witness::new(format!("adjoint of generator {i}"), error);
                    if let (Some(p), Some(z)) = (predicted, z) {
                        w.push("image of adjoint by linearity", p);
                        w.push("adjoint of image", z);
                    }
                    run.star_failures.push(w);
                }
            }
        }
        let algebra_gens: Vec<usize> = (0..run.words.len()).collect();
        let mut queue: VecDeque<usize> = (0..run.words.len()).collect();
        while let Some(w) = queue.pop_front() {
            for &a in &algebra_gens {
                let y = run.words[w].matmul(&run.words[a]);
                if y.is_empty() {
                    if run.tracking {
                        let z = run.word_images[w].matmul(&run.word_images[a]);
                        let error = z.max_abs();
                        run.max_error = run.max_error.max(error);
                        if error > cfg.tol && run.mult_failures.len() < WITNESS_CAP {
                            let mut wit = Witness::new(
                                format!("product of basis words {w}·{a} vanishes but its image does not"),
                                error,
                            );
                            wit.push("image product", z);
                            run.mult_failures.push(wit);
                        }
                    }
                    continue;
                }
                let z = if run.tracking { Some(run.word_images[w].matmul(&run.word_images[a])) } else { None };
                match run.insert(y, z.clone(), cfg) {
                    Insert::Added => {
                        queue.push_back(run.words.len() - 1);
                        if run.words.len() > limit {
                            return Err(MatalgError::ClosureDiverged { limit });
                        }
                    }
                    Insert::InSpan { error, predicted } => {
                        if error > cfg.tol && run.mult_failures.len() < WITNESS_CAP {
                            let mut wit = Witness::new(
                                format!("image of product of basis words {w}·{a} differs from product of images"),
                                error,
                            );
                            if let (Some(p), Some(z)) = (predicted, z) {
                                wit.push("image of product", p);
                                wit.push("product of images", z);
                            }
                            run.mult_failures.push(wit);
                        }
                    }
                }
            }
        }
        Ok(run)
    }
}

/// Serializable summary of a span.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpanSummary {
    pub label: String,
    pub ambient: usize,
    pub dim: usize,
}

impl From<&AlgebraSpan> for SpanSummary {
    fn from(s: &AlgebraSpan) -> Self {
        SpanSummary { label: s.label.clone(), ambient: s.ambient, dim: s.dim() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::matrix::ONE;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn off_diagonal_units_generate_m2() {
        let s = span_closure(&[Mat::unit(2, 0, 1), Mat::unit(2, 1, 0)], &cfg()).unwrap();
        assert_eq!(s.dim(), 4);
    }

    #[test]
    fn identity_generates_scalars() {
        assert_eq!(span_closure(&[Mat::identity(3)], &cfg()).unwrap().dim(), 1);
    }

    #[test]
    fn commuting_projections_generate_diagonal() {
        let s = span_closure(&[Mat::unit(2, 0, 0), Mat::unit(2, 1, 1)], &cfg()).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let e = span_closure(&[Mat::unit(2, 0, 0), Mat::unit(3, 1, 1)], &cfg()).unwrap_err();
        assert!(matches!(e, MatalgError::DimensionMismatch { index: 1, .. }));
    }

    #[test]
    fn empty_generator_list_rejected() {
        assert!(matches!(span_closure(&[], &cfg()), Err(MatalgError::NoGenerators)));
    }

    #[test]
    fn ambient_cap_enforced() {
        let c = Config { max_dim: 2, ..Config::default() };
        assert!(matches!(span_closure(&[Mat::identity(3)], &c), Err(MatalgError::AmbientTooLarge { .. })));
    }

    #[test]
    fn closure_is_idempotent_and_orthonormal() {
        let a = Mat::from_triplets(3, vec![(0, 1, ONE), (1, 2, C64::new(0.0, 2.0))]);
        let s = span_closure(&[a], &cfg()).unwrap();
        let again = span_closure(s.basis(), &cfg()).unwrap();
        assert_eq!(s.dim(), again.dim());
        assert!(s.gram_deviation() < 1e-12);
        assert!(s.is_star_algebra(1e-9));
    }

    #[test]
    fn tensor_and_direct_sum_dimensions() {
        let m2 = AlgebraSpan::full(2);
        assert_eq!(m2.tensor(&m2).dim(), 16);
        assert_eq!(m2.direct_sum(&m2).dim(), 8);
        assert!(m2.tensor(&m2).gram_deviation() < 1e-12);
    }

    #[test]
    fn coordinates_reconstruct_member() {
        let s = AlgebraSpan::full(2);
        let x = Mat::from_triplets(2, vec![(0, 1, C64::new(1.0, -1.0)), (1, 1, ONE)]);
        let c = s.coordinates(&x, 1e-9).unwrap();
        assert!(s.combine(&c).approx_eq(&x, 1e-12));
    }
}
