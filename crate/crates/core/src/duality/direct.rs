use super::eqvt::build_eqvt;
use super::{Check, DualityError, IsomorphismCertificate};
use crate::crossed::{action_crossed_product, graph_algebra_action, ActionCrossedProduct};
use crate::graphalg::{check_ck_relations, ck_representation, CKFamily};
use crate::graphs::{
    quotient_and_gross_tucker, skew_product, translation_action, DirectedGraph, GraphAction, SkewProduct,
};
use crate::groups::{regular_representations, FiniteGroup, Labeling};
use crate::matalg::{check_star_map, round_trip_error, wedderburn_signature, AlgebraSpan, Config, Mat, SpanSummary};

/// Everything built while certifying `C*(E ×_c G) ⋊_γ G ≅ C*(E) ⊗ M_{|G|}`.
pub(crate) struct DirectParts {
    #[cfg_attr(not(test), allow(dead_code))]
    pub skew: SkewProduct,
    #[cfg_attr(not(test), allow(dead_code))]
    pub fam_e: CKFamily,
    pub acp: ActionCrossedProduct,
    pub target: AlgebraSpan,
    /// `Θ` of `acp.generators()`.
    pub theta_images: Vec<Mat>,
    pub certificate: IsomorphismCertificate,
}

fn generator_name(sk: &SkewProduct, g: &FiniteGroup, k: usize) -> String {
    let (nv, ne) = (sk.graph.num_vertices(), sk.graph.num_edges());
    if k < nv {
        format!("p_{}", sk.graph.vertex_name(k))
    } else if k < nv + ne {
        format!("s_{}", sk.graph.edge_name(k - nv))
    } else {
        format!("u_{}", g.name(k - nv - ne))
    }
}

pub(crate) fn build_direct(
    e: &DirectedGraph,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<DirectParts, DualityError> {
    let n = g.order();
    let reps = regular_representations(g);
    let skew = skew_product(e, g, c);
    let fam_f = ck_representation(&skew.graph)?;
    let fam_e = ck_representation(e)?;
    let a = fam_f.algebra(cfg)?;
    let translation = translation_action(&skew, g)?;
    let gamma = graph_algebra_action(&fam_f, &translation, &a, cfg)?;
    let acp = action_crossed_product(&a, &gamma, cfg)?;
    let ce = fam_e.algebra(cfg)?;
    let target = ce.tensor(&AlgebraSpan::full(n)).with_label("C*(E)⊗M_G");

    let mut cert = IsomorphismCertificate::new(
        "C*(E×_cG)⋊_γG ≅ C*(E)⊗M_G",
        SpanSummary::from(&acp.span),
        SpanSummary::from(&target),
    );
    cert.push(Check::within("covariance ũ_s π̃(a) ũ_s* = π̃(γ_s a)", acp.report.covariance_error, cfg.tol));
    cert.push(Check::equal(
        "regular covariant representation keeps dim A·|G|",
        acp.report.dim,
        acp.report.expected_dim,
    ));
    cert.push(Check::equal("dim = dim C*(E)·|G|²", acp.span.dim(), ce.dim() * n * n));
    cert.push(Check::equal("dimensions agree", acp.span.dim(), target.dim()));

    let nv = skew.graph.num_vertices();
    let ne = skew.graph.num_edges();
    let one_e = Mat::identity(fam_e.dim());
    let theta_images: Vec<Mat> = (0..nv)
        .map(|x| {
            let (v, r) = skew.split(x);
            fam_e.p[v].kron(reps.chi.get(r))
        })
        .chain((0..ne).map(|y| {
            let (f, r) = skew.split(y);
            fam_e.s[f].kron(&reps.lambda.get(c.get(f)).matmul(reps.chi.get(r)))
        }))
        .chain(g.elements().map(|t| one_e.kron(reps.rho.get(t))))
        .collect();

    if acp.span.dim() != target.dim() {
        let certificate = cert.finalize();
        return Ok(DirectParts { skew, fam_e, acp, target, theta_images, certificate });
    }

    let ck = check_ck_relations(&skew.graph, &theta_images[nv..nv + ne], &theta_images[..nv], cfg.tol);
    cert.push(
        Check::flag("Θ(t_(f,r)), Θ(q_(v,r)) form a Cuntz–Krieger family", ck.passed)
            .with_witness(ck.failures.first().cloned()),
    );
    cert.push(Check::flag("Θ(q) sums to 1", ck.nondegenerate));
    let mut cov: f64 = 0.0;
    for t in g.elements() {
        let u = &theta_images[nv + ne + t];
        for x in 0..nv {
            let lhs = u.matmul(&theta_images[x]).matmul(&u.adjoint());
            cov = cov.max(lhs.max_abs_diff(&theta_images[translation.act_vertex(t, x)]));
        }
        for y in 0..ne {
            let lhs = u.matmul(&theta_images[nv + y]).matmul(&u.adjoint());
            cov = cov.max(lhs.max_abs_diff(&theta_images[nv + translation.act_edge(t, y)]));
        }
    }
    cert.push(Check::within("Θ(u_t) Θ(s_(f,r)) Θ(u_t)* = Θ(s_(f,rt⁻¹))", cov, cfg.tol));

    let gens = acp.generators();
    let theta = check_star_map(&gens, &theta_images, Some(&target), cfg)?;
    cert.generators = gens.len();
    cert.map = Some(theta.report().clone());

    // y×u on M_G: χ_r ρ_t ↦ y_r u_t, then w_t = (y×u)(λ_t).
    let y: Vec<Mat> = g
        .elements()
        .map(|r| Mat::sum(acp.span.ambient(), (0..e.num_vertices()).map(|v| &acp.pi_generators[skew.vertex(v, r)])))
        .collect();
    let mut yu_dom = Vec::with_capacity(n * n);
    let mut yu_img = Vec::with_capacity(n * n);
    for r in g.elements() {
        for t in g.elements() {
            yu_dom.push(reps.chi.get(r).matmul(reps.rho.get(t)));
            yu_img.push(y[r].matmul(&acp.u[t]));
        }
    }
    let yu = check_star_map(&yu_dom, &yu_img, None, cfg)?;
    cert.push(Check::flag("y×u is a *-homomorphism of M_G", yu.report().is_homomorphism()));
    let mut w = Vec::with_capacity(n);
    for t in g.elements() {
        w.push(yu.apply(reps.lambda.get(t), cfg.closure_tol)?);
    }

    let mut ups_dom = Vec::new();
    let mut ups_img = Vec::new();
    for f in 0..e.num_edges() {
        let ci = g.inv(c.get(f));
        for r in g.elements() {
            for t in g.elements() {
                ups_dom.push(fam_e.s[f].kron(&reps.chi.get(r).matmul(reps.rho.get(t))));
                let s = &acp.pi_generators[nv + skew.edge(f, g.mul(ci, r))];
                ups_img.push(s.matmul(&acp.u[t]).matmul(&w[ci]));
            }
        }
    }
    for v in 0..e.num_vertices() {
        for r in g.elements() {
            for t in g.elements() {
                ups_dom.push(fam_e.p[v].kron(&reps.chi.get(r).matmul(reps.rho.get(t))));
                ups_img.push(acp.pi_generators[skew.vertex(v, r)].matmul(&acp.u[t]));
            }
        }
    }
    let upsilon = check_star_map(&ups_dom, &ups_img, Some(&acp.span), cfg)?;
    cert.push(Check::flag("Υ is a *-isomorphism", upsilon.report().is_isomorphism()));

    let mut theta_ups: f64 = 0.0;
    for (x, img) in ups_dom.iter().zip(&ups_img) {
        theta_ups = theta_ups.max(theta.apply(img, cfg.closure_tol)?.max_abs_diff(x));
    }
    let ups_theta = round_trip_error(&theta, &upsilon, &gens, cfg.closure_tol)?;
    cert.push(Check::within("Θ∘Υ = id on generators", theta_ups, cfg.tol));
    cert.push(Check::within("Υ∘Θ = id on generators", ups_theta, cfg.tol));

    let sa = wedderburn_signature(&acp.span, cfg)?;
    let sb = wedderburn_signature(&target, cfg)?;
    cert.signatures = Some((sa, sb));

    let certificate = cert.finalize();
    Ok(DirectParts { skew, fam_e, acp, target, theta_images, certificate })
}

/// Certifies `Θ: C*(E ×_c G) ⋊_γ G → C*(E) ⊗ M_{|G|}` and its inverse `Υ`.
pub fn certify_direct_iso(
    e: &DirectedGraph,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<IsomorphismCertificate, DualityError> {
    let parts = build_direct(e, g, c, cfg)?;
    if parts.certificate.valid {
        Ok(parts.certificate)
    } else {
        Err(DualityError::CertificationFailed(Box::new(parts.certificate)))
    }
}

/// Checks that `Φ ⋊ G` followed by the canonical map
/// `(C*(E) ⋊_δ G) ⋊_δ̂ G → C*(E) ⊗ M_{|G|}` (`j(a) ↦ (id⊗λ)δ(a)`,
/// `j_G(χ_r) ↦ 1⊗χ_r`, `u_t ↦ 1⊗ρ_t`) agrees with `Θ` on every generator.
pub fn certify_regular_diagram(
    e: &DirectedGraph,
    g: &FiniteGroup,
    c: &Labeling,
    cfg: &Config,
) -> Result<IsomorphismCertificate, DualityError> {
    let reps = regular_representations(g);
    let eq = build_eqvt(e, g, c, cfg)?;
    let direct = build_direct(e, g, c, cfg)?;
    let double = action_crossed_product(&eq.cp.span, &eq.dual.action, cfg)?;

    let mut cert = IsomorphismCertificate::new(
        "regular diagram commutes",
        SpanSummary::from(&direct.acp.span),
        SpanSummary::from(&direct.target),
    );
    cert.parts.push(eq.certificate.clone());
    cert.parts.push(direct.certificate.clone());
    cert.push(Check::equal("(C*(E)⋊_δG)⋊_δ̂G keeps dim ·|G|", double.report.dim, double.report.expected_dim));
    cert.push(Check::within("dual covariance", double.report.covariance_error, cfg.tol));

    let k_images: Vec<Mat> = eq
        .cp
        .generators()
        .into_iter()
        .chain(g.elements().map(|t| Mat::identity(eq.cp.base_ambient).kron(reps.rho.get(t))))
        .collect();
    let katayama = check_star_map(&double.generators(), &k_images, Some(&direct.target), cfg)?;
    cert.push(Check::flag(
        "canonical map of the double crossed product is a *-isomorphism",
        katayama.report().is_isomorphism(),
    ));

    let nf = eq.images.len();
    let mut phi_g_images = Vec::with_capacity(nf + g.order());
    for img in &eq.images {
        phi_g_images.push(double.pi_tilde(img, cfg.closure_tol)?);
    }
    phi_g_images.extend(double.u.iter().cloned());
    let gens = direct.acp.generators();
    let phi_g = check_star_map(&gens, &phi_g_images, Some(&double.span), cfg)?;
    cert.push(Check::flag("Φ⋊G is a *-isomorphism", phi_g.report().is_isomorphism()));
    cert.generators = gens.len();

    let mut worst: f64 = 0.0;
    let mut mismatch: Option<(String, f64)> = None;
    for (k, img) in phi_g_images.iter().enumerate() {
        let routed = katayama.apply(img, cfg.closure_tol)?;
        let err = routed.max_abs_diff(&direct.theta_images[k]);
        if err > cfg.tol && mismatch.is_none() {
            mismatch = Some((generator_name(&eq.skew, g, k), err));
        }
        worst = worst.max(err);
    }
    cert.push(Check::within("composite route equals Θ on every generator", worst, cfg.tol));
    let certificate = cert.finalize();
    if let Some((generator, error)) = mismatch {
        return Err(DualityError::DiagramMismatch { generator, error, certificate: Box::new(certificate) });
    }
    if certificate.valid {
        Ok(certificate)
    } else {
        Err(DualityError::CertificationFailed(Box::new(certificate)))
    }
}

/// For a free action `β` of `G` on `F`: `C*(F) ⋊_β G ≅ C*(F/G) ⊗ M_{|G|}`,
/// obtained by transporting `β` to the translation action through the
/// Gross–Tucker isomorphism and composing with `Θ`.
pub fn certify_free_action(
    f: &DirectedGraph,
    action: &GraphAction,
    cfg: &Config,
) -> Result<IsomorphismCertificate, DualityError> {
    let g = &action.group;
    let gt = quotient_and_gross_tucker(f, action)?;
    let fam = ck_representation(f)?;
    let a = fam.algebra(cfg)?;
    let beta = graph_algebra_action(&fam, action, &a, cfg)?;
    let acp = action_crossed_product(&a, &beta, cfg)?;
    let direct = build_direct(&gt.quotient, g, &gt.labeling, cfg)?;

    let mut cert = IsomorphismCertificate::new(
        "C*(F)⋊_βG ≅ C*(F/G)⊗M_G",
        SpanSummary::from(&acp.span),
        SpanSummary::from(&direct.target),
    );
    cert.parts.push(direct.certificate.clone());
    cert.push(Check::equal(
        "regular covariant representation keeps dim A·|G|",
        acp.report.dim,
        acp.report.expected_dim,
    ));
    cert.push(Check::within("covariance", acp.report.covariance_error, cfg.tol));
    cert.push(Check::equal("dimensions agree", acp.span.dim(), direct.target.dim()));

    let translation = translation_action(&gt.skew, g)?;
    let mut transported = true;
    for t in g.elements() {
        transported &= (0..f.num_vertices())
            .all(|x| gt.iso.vertex_map[action.act_vertex(t, x)] == translation.act_vertex(t, gt.iso.vertex_map[x]));
        transported &= (0..f.num_edges())
            .all(|y| gt.iso.edge_map[action.act_edge(t, y)] == translation.act_edge(t, gt.iso.edge_map[y]));
    }
    cert.push(Check::flag("Gross–Tucker isomorphism carries β_t(s_f) = s_{t·f} to translation", transported));

    if acp.span.dim() == direct.target.dim() {
        let nv = gt.skew.graph.num_vertices();
        let ne = gt.skew.graph.num_edges();
        let images: Vec<Mat> = (0..f.num_vertices())
            .map(|x| direct.theta_images[gt.iso.vertex_map[x]].clone())
            .chain((0..f.num_edges()).map(|y| direct.theta_images[nv + gt.iso.edge_map[y]].clone()))
            .chain(g.elements().map(|t| direct.theta_images[nv + ne + t].clone()))
            .collect();
        let gens = acp.generators();
        let m = check_star_map(&gens, &images, Some(&direct.target), cfg)?;
        cert.generators = gens.len();
        cert.map = Some(m.report().clone());
        let sa = wedderburn_signature(&acp.span, cfg)?;
        let sb = wedderburn_signature(&direct.target, cfg)?;
        cert.signatures = Some((sa, sb));
    }
    let certificate = cert.finalize();
    if certificate.valid {
        Ok(certificate)
    } else {
        Err(DualityError::CertificationFailed(Box::new(certificate)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::Signature;

    fn e1() -> DirectedGraph {
        DirectedGraph::from_triples(&["v", "w"], &[("f", 0, 1)]).unwrap()
    }

    #[test]
    fn e1_z2_direct_dims_16_signature_4() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let cert = certify_direct_iso(&e, &g, &c, &Config::default()).unwrap();
        assert_eq!((cert.source.dim, cert.target.dim), (16, 16));
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![4]));
    }

    #[test]
    fn theta_of_edge_partial_isometry() {
        // Θ(t_(f,r))* Θ(t_(f,r)) = p_r(f) ⊗ χ_r
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let d = build_direct(&e, &g, &c, &Config::default()).unwrap();
        let chi = regular_representations(&g).chi;
        let nv = d.skew.graph.num_vertices();
        for r in g.elements() {
            let t = &d.theta_images[nv + d.skew.edge(0, r)];
            assert!(t.adjoint().matmul(t).approx_eq(&d.fam_e.p[1].kron(chi.get(r)), 0.0));
        }
    }

    #[test]
    fn trivial_group_direct_and_diagram() {
        let g = FiniteGroup::trivial();
        let e = e1();
        let c = Labeling::constant(&e, 0);
        let cert = certify_direct_iso(&e, &g, &c, &Config::default()).unwrap();
        assert_eq!(cert.source.dim, 4);
        certify_regular_diagram(&e, &g, &c, &Config::default()).unwrap();
    }

    #[test]
    fn e1_z2_diagram_commutes() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let e = e1();
        let c = Labeling::from_values(&e, vec![1], &g).unwrap();
        let cert = certify_regular_diagram(&e, &g, &c, &Config::default()).unwrap();
        // 4 vertex + 2 edge generators of C*(E×_cG) and both u_t
        assert_eq!(cert.generators, 8);
    }

    #[test]
    fn swap_on_two_edges() {
        let f = DirectedGraph::from_triples(&["a", "b", "c", "d"], &[("x", 0, 1), ("y", 2, 3)]).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let a =
            GraphAction::new(&f, g, vec![vec![0, 1, 2, 3], vec![2, 3, 0, 1]], vec![vec![0, 1], vec![1, 0]]).unwrap();
        let cert = certify_free_action(&f, &a, &Config::default()).unwrap();
        assert_eq!(cert.signatures.unwrap(), (Signature(vec![4]), Signature(vec![4])));
    }

    #[test]
    fn trivial_group_on_e1() {
        let a = GraphAction::trivial(&e1(), FiniteGroup::trivial());
        let cert = certify_free_action(&e1(), &a, &Config::default()).unwrap();
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![2]));
    }

    #[test]
    fn non_free_action_rejected() {
        let a = GraphAction::trivial(&e1(), FiniteGroup::cyclic(2).unwrap());
        assert!(matches!(
            certify_free_action(&e1(), &a, &Config::default()),
            Err(DualityError::Graph(crate::graphs::GraphError::ActionNotFree { .. }))
        ));
    }
}
