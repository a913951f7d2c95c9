use serde::{Deserialize, Serialize};

use super::{CKFamily, GraphalgError};
use crate::groups::{regular_representations, FiniteGroup, Labeling};
use crate::matalg::{check_star_map, Config, Mat, StarMap, StarMapReport, C64};

/// An orthogonal basis of an algebra split into pieces `A_t`, one per
/// group element.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    pub ambient: usize,
    pub pieces: Vec<Vec<Mat>>,
    pub labels: Vec<Vec<String>>,
}

/// Checks run on a [`GradedBasis`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradingReport {
    pub dims: Vec<usize>,
    pub orthogonal: bool,
    /// `A_s A_t ⊆ A_{st}` on all pairs of basis elements.
    pub multiplicative: bool,
    /// `A_t* = A_{t⁻¹}` on all basis elements.
    pub star_compatible: bool,
    pub max_error: f64,
}

impl GradingReport {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.multiplicative && self.star_compatible
    }
}

impl GradedBasis {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(Vec::len).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    pub fn all(&self) -> impl Iterator<Item = (usize, &Mat)> {
        self.pieces.iter().enumerate().flat_map(|(t, p)| p.iter().map(move |m| (t, m)))
    }

    /// Orthogonal projection of `a` onto `A_t`.
    pub fn component(&self, a: &Mat, t: usize) -> Mat {
        Mat::lin_comb(
            self.ambient,
            self.pieces[t].iter().map(|b| {
                let c = b.inner(a) / b.inner(b);
                (c, b)
            }),
        )
    }

    /// Splits `a` as `Σ_t a_t`.
    pub fn decompose(&self, a: &Mat) -> Vec<Mat> {
        (0..self.pieces.len()).map(|t| self.component(a, t)).collect()
    }

    pub fn verify(&self, g: &FiniteGroup, tol: f64) -> GradingReport {
        let mut max_error: f64 = 0.0;
        let all: Vec<(usize, &Mat)> = self.all().collect();
        let mut orthogonal = true;
        for (i, (_, a)) in all.iter().enumerate() {
            for (_, b) in &all[i + 1..] {
                let ip = a.inner(b).norm();
                max_error = max_error.max(ip);
                orthogonal &= ip <= tol;
            }
        }
        let outside = |x: &Mat, t: usize| (x - &self.component(x, t)).max_abs();
        let mut multiplicative = true;
        for &(s, a) in &all {
            for &(t, b) in &all {
                let e = outside(&a.matmul(b), g.mul(s, t));
                max_error = max_error.max(e);
                multiplicative &= e <= tol;
            }
        }
        let mut star_compatible = true;
        for &(t, a) in &all {
            let e = outside(&a.adjoint(), g.inv(t));
            max_error = max_error.max(e);
            star_compatible &= e <= tol;
        }
        GradingReport { dims: self.dims(), orthogonal, multiplicative, star_compatible, max_error }
    }
}

/// The monomials `s_μ s_ν*` with `r(μ) = r(ν)` a sink, graded by
/// `c(μ)c(ν)⁻¹`. In the path representation these are matrix units.
pub fn spectral_subspaces(fam: &CKFamily, g: &FiniteGroup, c: &Labeling) -> GradedBasis {
    let graph = &fam.graph;
    let mut pieces = vec![Vec::new(); g.order()];
    let mut labels = vec![Vec::new(); g.order()];
    for mu in &fam.paths {
        for nu in &fam.paths {
            if mu.range(graph) != nu.range(graph) {
                continue;
            }
            let t = g.mul(c.path_value(g, &mu.edges), g.inv(c.path_value(g, &nu.edges)));
            pieces[t].push(fam.monomial(mu, nu));
            labels[t].push(format!("s_{} s_{}*", mu.display(graph), nu.display(graph)));
        }
    }
    GradedBasis { ambient: fam.dim(), pieces, labels }
}

/// `δ(s_f) = s_f ⊗ λ_{c(f)}`, `δ(p_v) = p_v ⊗ 1` inside `C*(E) ⊗ M_{|G|}`.
#[derive(Clone, Debug)]
pub struct RepresentedCoaction {
    pub group: FiniteGroup,
    pub labeling: Labeling,
    pub family: CKFamily,
    pub graded: GradedBasis,
    /// Degree of each entry of `family.generators()`.
    pub generator_degrees: Vec<usize>,
    pub images: Vec<Mat>,
    pub delta: StarMap,
    pub report: CoactionReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoactionReport {
    pub map: StarMapReport,
    /// `max |(δ⊗id)δ(a) − (id⊗δ_G)δ(a)|` over generators.
    pub identity_error: f64,
    /// `max |δ(a)(1⊗λ_{deg a}⁻¹λ_t) − a⊗λ_t|` over generators.
    pub nondegeneracy_error: f64,
    /// `max |δ(a_t) − a_t⊗λ_t|` over the graded basis.
    pub degree_error: f64,
    pub grading: GradingReport,
}

impl CoactionReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.map.is_homomorphism()
            && self.map.injective
            && self.identity_error <= tol
            && self.nondegeneracy_error <= tol
            && self.degree_error <= tol
            && self.grading.passed()
    }
}

/// Writes `x ∈ M_N ⊗ M_n` as `Σ_{ij} A_{ij} ⊗ e_{ij}`.
pub(crate) fn second_factor_blocks(x: &Mat, inner: usize) -> Vec<Vec<Mat>> {
    let outer = x.dim() / inner;
    let mut trips: Vec<Vec<Vec<(usize, usize, C64)>>> = vec![vec![Vec::new(); inner]; inner];
    for (r, c, v) in x.entries() {
        trips[r % inner][c % inner].push((r / inner, c / inner, v));
    }
    trips.into_iter().map(|row| row.into_iter().map(|t| Mat::from_triplets(outer, t)).collect()).collect()
}

pub fn coaction(
    fam: &CKFamily,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<RepresentedCoaction, GraphalgError> {
    let e = g.identity();
    let gens = fam.generators();
    let degrees: Vec<usize> =
        (0..fam.graph.num_vertices()).map(|_| e).chain((0..fam.graph.num_edges()).map(|f| c.get(f))).collect();
    let graded = spectral_subspaces(fam, g, c);
    let (images, delta, report) = graded_coaction(&gens, &degrees, &graded, g, cfg)?;
    Ok(RepresentedCoaction {
        group: g.clone(),
        labeling: c.clone(),
        family: fam.clone(),
        graded,
        generator_degrees: degrees,
        images,
        delta,
        report,
    })
}

/// `δ(a) = a ⊗ λ_t` for homogeneous generators `a` of degree `t`, with the
/// coaction identity, nondegeneracy and the grading checked.
pub fn graded_coaction(
    gens: &[Mat],
    degrees: &[usize],
    graded: &GradedBasis,
    g: &FiniteGroup,
    cfg: &Config,
) -> Result<(Vec<Mat>, StarMap, CoactionReport), GraphalgError> {
    let reps = regular_representations(g);
    let n = g.order();
    let e = g.identity();
    let images: Vec<Mat> = gens.iter().zip(degrees).map(|(a, &t)| a.kron(reps.lambda.get(t))).collect();
    let delta = check_star_map(gens, &images, None, cfg)?;

    // (δ⊗id)(X) = Σ δ(A_ij)⊗e_ij and (id⊗δ_G)(X) = Σ e_kl⊗δ_G(B_kl), with
    // δ_G(Σ β_t λ_t) = Σ β_t λ_t⊗λ_t and β_t read off column e.
    let mut identity_error: f64 = 0.0;
    for x in &images {
        let blocks = second_factor_blocks(x, n);
        let mut left = Mat::zeros(x.dim() * n);
        for (i, row) in blocks.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_empty() {
                    continue;
                }
                let da = delta.apply(a, cfg.closure_tol)?;
                left = &left + &da.kron(&Mat::unit(n, i, j));
            }
        }
        let outer = x.dim() / n;
        let mut right = Mat::zeros(x.dim() * n);
        for k in 0..outer {
            for l in 0..outer {
                let b = x.block(k * n, l * n, n);
                if b.is_empty() {
                    continue;
                }
                let beta: Vec<C64> = g.elements().map(|t| b.get(t, e)).collect();
                let in_span = Mat::lin_comb(n, g.elements().map(|t| (beta[t], reps.lambda.get(t))));
                identity_error = identity_error.max(in_span.max_abs_diff(&b));
                let db = Mat::lin_comb(
                    n * n,
                    g.elements()
                        .map(|t| (beta[t], reps.lambda.get(t).kron(reps.lambda.get(t))))
                        .collect::<Vec<_>>()
                        .iter()
                        .map(|(c, m)| (*c, m)),
                );
                right = &right + &Mat::unit(outer, k, l).kron(&db);
            }
        }
        identity_error = identity_error.max(left.max_abs_diff(&right));
    }

    let mut nondegeneracy_error: f64 = 0.0;
    let m = graded.ambient;
    for (a, (img, &deg)) in gens.iter().zip(images.iter().zip(degrees)) {
        for t in g.elements() {
            let shift = Mat::identity(m).kron(&reps.lambda.get(g.inv(deg)).matmul(reps.lambda.get(t)));
            let lhs = img.matmul(&shift);
            nondegeneracy_error = nondegeneracy_error.max(lhs.max_abs_diff(&a.kron(reps.lambda.get(t))));
        }
    }

    let mut degree_error: f64 = 0.0;
    for (t, a) in graded.all() {
        let da = delta.apply(a, cfg.closure_tol)?;
        degree_error = degree_error.max(da.max_abs_diff(&a.kron(reps.lambda.get(t))));
    }
    let grading = graded.verify(g, cfg.tol);
    let report =
        CoactionReport { map: delta.report().clone(), identity_error, nondegeneracy_error, degree_error, grading };
    Ok((images, delta, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphalg::ck_representation;
    use crate::graphs::DirectedGraph;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    #[test]
    fn e1_z2_coaction() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let fam = ck_representation(&e).unwrap();
        let rc = coaction(&fam, &g, &c, &Config::default()).unwrap();
        assert!(rc.report.passed(1e-12), "{:?}", rc.report);
        // δ(s_f) = s_f ⊗ λ_g is 4×4; δ(p_v) = p_v ⊗ 1.
        let lg = regular_representations(&g).lambda.get(1).clone();
        assert_eq!(rc.images[2], fam.s[0].kron(&lg));
        assert_eq!(rc.images[0], fam.p[0].kron(&Mat::identity(2)));
        assert_eq!(rc.graded.dims(), vec![2, 2]);
    }

    #[test]
    fn trivial_group_everything_in_degree_e() {
        let g = FiniteGroup::trivial();
        let e = DirectedGraph::from_triples(&["u", "v", "w"], &[("a", 0, 1), ("b", 1, 2), ("c", 0, 2)]).unwrap();
        let c = Labeling::constant(&e, 0);
        let fam = ck_representation(&e).unwrap();
        let rc = coaction(&fam, &g, &c, &Config::default()).unwrap();
        assert!(rc.report.passed(1e-12));
        assert_eq!(rc.graded.dims(), vec![fam.expected_algebra_dim()]);
        assert_eq!(rc.images, fam.generators());
    }

    #[test]
    fn vertex_projections_have_degree_e() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let e = DirectedGraph::from_triples(&["u", "v", "w"], &[("a", 0, 1), ("b", 1, 2), ("c", 0, 2)]).unwrap();
        let c = Labeling::from_values(&e, vec![1, 2, 1], &g).unwrap();
        let fam = ck_representation(&e).unwrap();
        let gb = spectral_subspaces(&fam, &g, &c);
        for p in &fam.p {
            assert!(gb.component(p, 0).approx_eq(p, 1e-12));
        }
        let prod = fam.s[2].matmul(&fam.s[2].adjoint());
        assert!(gb.component(&prod, 0).approx_eq(&prod, 1e-12));
        assert!(gb.verify(&g, 1e-12).passed());
    }
}
