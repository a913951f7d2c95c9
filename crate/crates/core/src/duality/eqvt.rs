use super::{Check, DualityError, IsomorphismCertificate};
use crate::crossed::{coaction_crossed_product, dual_action, CoactionCrossedProduct, DualAction};
use crate::graphalg::{check_ck_relations, ck_representation, coaction, RepresentedCoaction};
use crate::graphs::{skew_product, translation_action, DirectedGraph, GraphAction, SkewProduct};
use crate::groups::{FiniteGroup, Labeling};
use crate::matalg::{check_star_map, Config, Mat, SpanSummary};

/// Everything built while certifying `C*(E ×_c G) ≅ C*(E) ⋊_δ G`.
pub(crate) struct EqvtParts {
    pub skew: SkewProduct,
    #[cfg_attr(not(test), allow(dead_code))]
    pub rc: RepresentedCoaction,
    pub cp: CoactionCrossedProduct,
    pub dual: DualAction,
    #[cfg_attr(not(test), allow(dead_code))]
    pub translation: GraphAction,
    /// `Φ` of `fam_f.generators()`.
    pub images: Vec<Mat>,
    pub certificate: IsomorphismCertificate,
}

pub(crate) fn build_eqvt(
    e: &DirectedGraph,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<EqvtParts, DualityError> {
    let skew = skew_product(e, g, c);
    let fam_f = ck_representation(&skew.graph)?;
    let fam_e = ck_representation(e)?;
    let source = fam_f.algebra(cfg)?.with_label("C*(E×_cG)");
    let rc = coaction(&fam_e, g, c, cfg)?;
    let cp = coaction_crossed_product(&rc, cfg)?;
    let dual = dual_action(&cp, cfg)?;
    let translation = translation_action(&skew, g)?;

    let mut cert =
        IsomorphismCertificate::new("C*(E×_cG) ≅ C*(E)⋊_δG", SpanSummary::from(&source), SpanSummary::from(&cp.span));
    cert.push(Check::within("coaction identity", rc.report.identity_error, cfg.tol));
    cert.push(Check::flag(
        "coaction injective homomorphism",
        rc.report.map.is_homomorphism() && rc.report.map.injective,
    ));
    cert.push(Check::within("coaction nondegeneracy", rc.report.nondegeneracy_error, cfg.tol));
    cert.push(Check::flag("grading", rc.report.grading.passed()));
    cert.push(Check::equal("dim C*(E×_cG) = Σ n_w²", source.dim(), fam_f.expected_algebra_dim()));
    cert.push(Check::flag("crossed product relations", cp.report.passed(cfg.tol)));
    cert.push(Check::within("dual action permutes (a_t,u)", dual.permutation_error, 0.0));
    cert.push(Check::equal("dimensions agree", source.dim(), cp.span.dim()));

    let nv = skew.graph.num_vertices();
    let images: Vec<Mat> = (0..nv)
        .map(|x| {
            let (v, t) = skew.split(x);
            cp.element(&fam_e.p[v], g.identity(), t)
        })
        .chain((0..skew.graph.num_edges()).map(|y| {
            let (f, t) = skew.split(y);
            cp.element(&fam_e.s[f], c.get(f), t)
        }))
        .collect();

    if source.dim() == cp.span.dim() {
        let (p_img, s_img) = images.split_at(nv);
        let ck = check_ck_relations(&skew.graph, s_img, p_img, cfg.tol);
        cert.push(
            Check::flag("image is a Cuntz–Krieger family", ck.passed)
                .with_witness(ck.failures.first().cloned())
                .with_detail(format!("max error {:.3e}", ck.max_error)),
        );
        cert.push(Check::flag("image family is nondegenerate", ck.nondegenerate));
        let gens = fam_f.generators();
        let m = check_star_map(&gens, &images, Some(&cp.span), cfg)?;
        cert.generators = gens.len();
        cert.map = Some(m.report().clone());

        // Φ∘γ_r = δ̂_r∘Φ on generators, compared exactly.
        for r in g.elements() {
            let mut worst: f64 = 0.0;
            for x in 0..nv {
                let lhs = &images[translation.act_vertex(r, x)];
                let rhs = conj_rho(&cp, r, &images[x]);
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
            for y in 0..skew.graph.num_edges() {
                let lhs = &images[nv + translation.act_edge(r, y)];
                let rhs = conj_rho(&cp, r, &images[nv + y]);
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
            cert.equivariance.push(Check::within(format!("Φ∘γ_{} = δ̂_{}∘Φ", g.name(r), g.name(r)), worst, 0.0));
        }
    }
    let certificate = cert.finalize();
    Ok(EqvtParts { skew, rc, cp, dual, translation, images, certificate })
}

/// `δ̂_r(x) = (1⊗ρ_r) x (1⊗ρ_r)*`.
fn conj_rho(cp: &CoactionCrossedProduct, r: usize, x: &Mat) -> Mat {
    let u = Mat::identity(cp.base_ambient).kron(cp.reps().rho.get(r));
    u.matmul(x).matmul(&u.adjoint())
}

/// Certifies `s_{(f,t)} ↦ (s_f, t)`, `p_{(v,t)} ↦ (p_v, t)` as an
/// equivariant `*`-isomorphism `C*(E ×_c G) → C*(E) ⋊_δ G`.
pub fn certify_eqvt_iso(
    e: &DirectedGraph,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<IsomorphismCertificate, DualityError> {
    let parts = build_eqvt(e, g, c, cfg)?;
    if parts.certificate.valid {
        Ok(parts.certificate)
    } else {
        Err(DualityError::CertificationFailed(Box::new(parts.certificate)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    #[test]
    fn e1_z2_passes_with_dims_8() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let cert = certify_eqvt_iso(&e, &g, &c, &Config::default()).unwrap();
        assert_eq!((cert.source.dim, cert.target.dim), (8, 8));
    }

    #[test]
    fn trivial_group_dims_4() {
        let g = FiniteGroup::trivial();
        let e = e1();
        let cert = certify_eqvt_iso(&e, &g, &Labeling::constant(&e, 0), &Config::default()).unwrap();
        assert_eq!((cert.source.dim, cert.target.dim), (4, 4));
    }

    #[test]
    fn equivariance_on_sfe() {
        // Φ(γ_g s_(f,e)) = δ̂_g(s_f, e) = (s_f, g)
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let p = build_eqvt(&e, &g, &c, &Config::default()).unwrap();
        let nv = p.skew.graph.num_vertices();
        let sfe = nv + p.skew.edge(0, 0);
        let moved = conj_rho(&p.cp, 1, &p.images[sfe]);
        let expected = p.cp.element(&p.rc.family.s[0], 1, 1);
        assert!(moved.approx_eq(&expected, 0.0));
        assert!(p.images[nv + p.translation.act_edge(1, p.skew.edge(0, 0))].approx_eq(&expected, 0.0));
    }
}
