use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    convolution_algebra, semidirect_product, skew_product_groupoid, Cocycle, ConvolutionElement, FiniteGroupoid,
    GroupoidAction, GroupoidAlgebra, GroupoidError, SemidirectProduct,
};
use crate::crossed::{action_crossed_product, coaction_crossed_product_graded, ActionCrossedProduct, AlgebraAction};
use crate::duality::{Check, IsomorphismCertificate};
use crate::graphalg::{graded_coaction, GradedBasis};
use crate::groups::regular_representations;
use crate::matalg::{
    check_star_map, linear_span, round_trip_error, wedderburn_signature, AlgebraSpan, Config, Mat, SpanSummary,
};

fn finish(cert: IsomorphismCertificate) -> Result<IsomorphismCertificate, GroupoidError> {
    let cert = cert.finalize();
    if cert.valid {
        Ok(cert)
    } else {
        Err(GroupoidError::CertificationFailed(Box::new(cert)))
    }
}

/// `β_s(δ_x) = δ_{s·x}` on `C*(R)`.
fn induced_action(
    alg: &GroupoidAlgebra,
    action: &GroupoidAction,
    cfg: &Config,
) -> Result<AlgebraAction, GroupoidError> {
    let g = &action.group;
    let images =
        g.elements().map(|t| alg.groupoid.arrows().map(|x| alg.deltas[action.act(t, x)].clone()).collect()).collect();
    Ok(AlgebraAction::new(g.clone(), alg.deltas.clone(), images, &alg.span, cfg)?)
}

/// Everything built for `C*(R ⋊ G) ≅ C*(R) ⋊_β G`.
pub(crate) struct SemiCrossParts {
    pub sd: SemidirectProduct,
    pub alg_sd: GroupoidAlgebra,
    pub alg_r: GroupoidAlgebra,
    pub acp: ActionCrossedProduct,
    /// `Φ(δ_{(x,s)}) = π̃(δ_x) ũ_s` for every arrow of `R ⋊ G`.
    pub phi_images: Vec<Mat>,
}

impl SemiCrossParts {
    /// `Φ(b) = Σ b(x,s) π̃(δ_x) ũ_s`.
    pub fn phi(&self, b: &ConvolutionElement) -> Mat {
        Mat::lin_comb(self.acp.span.ambient(), b.coeffs.iter().copied().zip(self.phi_images.iter()))
    }
}

pub(crate) fn build_semi_cross(
    r: &FiniteGroupoid,
    action: &GroupoidAction,
    cfg: &Config,
) -> Result<SemiCrossParts, GroupoidError> {
    let sd = semidirect_product(r, action)?;
    let alg_sd = convolution_algebra(&sd.groupoid, cfg)?;
    let alg_r = convolution_algebra(r, cfg)?;
    let beta = induced_action(&alg_r, action, cfg)?;
    let acp = action_crossed_product(&alg_r.span, &beta, cfg)?;
    let phi_images = sd
        .groupoid
        .arrows()
        .map(|k| {
            let (x, s) = sd.split(k);
            acp.pi_generators[x].matmul(&acp.u[s])
        })
        .collect();
    Ok(SemiCrossParts { sd, alg_sd, alg_r, acp, phi_images })
}

/// `Φ: C*(R ⋊ G) → C*(R) ⋊_β G`, `Φ(f)(s)(x) = f(x,s)`, with inverse
/// `Ψ(f)(x,s) = f(s)(x)`.
pub fn certify_semi_cross(
    r: &FiniteGroupoid,
    action: &GroupoidAction,
    cfg: &Config,
) -> Result<IsomorphismCertificate, GroupoidError> {
    let parts = build_semi_cross(r, action, cfg)?;
    semi_cross_certificate(&parts, cfg)
}

fn semi_cross_certificate(parts: &SemiCrossParts, cfg: &Config) -> Result<IsomorphismCertificate, GroupoidError> {
    let SemiCrossParts { sd, alg_sd, alg_r, acp, phi_images } = parts;
    let g = &sd.action.group;
    let e = g.identity();
    let mut cert = IsomorphismCertificate::new(
        "C*(R⋊G) ≅ C*(R)⋊_βG",
        SpanSummary::from(&alg_sd.span),
        SpanSummary::from(&acp.span),
    );
    cert.push(Check::flag("regular representation of C*(R⋊G) is faithful", alg_sd.report.passed()));
    cert.push(Check::flag("regular representation of C*(R) is faithful", alg_r.report.passed()));
    cert.push(Check::within("covariance", acp.report.covariance_error, cfg.tol));
    cert.push(Check::equal("dim C*(R)⋊G = |R|·|G|", acp.span.dim(), alg_r.span.dim() * g.order()));
    cert.push(Check::equal("dimensions agree", alg_sd.span.dim(), acp.span.dim()));

    // δ_{(x,e)} and δ_{(u,s)} generate C*(R⋊G).
    let gen_arrows: Vec<usize> = sd
        .groupoid
        .arrows()
        .filter(|&k| {
            let (x, s) = sd.split(k);
            s == e || sd.base.is_unit(x)
        })
        .collect();
    let dom: Vec<Mat> = gen_arrows.iter().map(|&k| alg_sd.deltas[k].clone()).collect();
    let img: Vec<Mat> = gen_arrows.iter().map(|&k| phi_images[k].clone()).collect();
    let phi = check_star_map(&dom, &img, Some(&acp.span), cfg)?;
    cert.generators = dom.len();
    cert.map = Some(phi.report().clone());

    // Ψ on π̃(δ_x), ũ_s.
    let units: Vec<usize> = sd.base.units().collect();
    let mut psi_images: Vec<Mat> = sd.base.arrows().map(|x| alg_sd.deltas[sd.arrow(x, e)].clone()).collect();
    for s in g.elements() {
        psi_images.push(Mat::sum(sd.groupoid.num_arrows(), units.iter().map(|&u| &alg_sd.deltas[sd.arrow(u, s)])));
    }
    let psi = check_star_map(&acp.generators(), &psi_images, Some(&alg_sd.span), cfg)?;
    cert.push(Check::flag("Ψ is a *-isomorphism", psi.report().is_isomorphism()));
    let all_phi = round_trip_error(&phi, &psi, &alg_sd.deltas, cfg.closure_tol)?;
    cert.push(Check::within("Ψ∘Φ = id on every δ_(x,s)", all_phi, cfg.tol));
    let all_psi = round_trip_error(&psi, &phi, phi_images, cfg.closure_tol)?;
    cert.push(Check::within("Φ∘Ψ = id on every π̃(δ_x)ũ_s", all_psi, cfg.tol));

    // Φ(fg) = Φ(f)Φ(g) with fg from the convolution formula.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = ConvolutionElement::random(&sd.groupoid, &mut rng, |_| true);
        let h = ConvolutionElement::random(&sd.groupoid, &mut rng, |_| true);
        let lhs = parts.phi(&f.convolve(&sd.groupoid, &h));
        worst = worst.max(lhs.max_abs_diff(&parts.phi(&f).matmul(&parts.phi(&h))));
        worst = worst.max(parts.phi(&f.star(&sd.groupoid)).max_abs_diff(&parts.phi(&f).adjoint()));
    }
    cert.push(Check::within("Φ(fg) = Φ(f)Φ(g), Φ(f*) = Φ(f)* on random f, g", worst, cfg.tol));

    let sa = wedderburn_signature(&alg_sd.span, cfg)?;
    let sb = wedderburn_signature(&acp.span, cfg)?;
    cert.signatures = Some((sa, sb));
    finish(cert)
}

/// `C_s` spanned by `δ_x` with `c(x) = s`.
fn bundle(alg: &GroupoidAlgebra, c: &Cocycle) -> GradedBasis {
    let q = &alg.groupoid;
    let mut pieces = vec![Vec::new(); c.group.order()];
    let mut labels = vec![Vec::new(); c.group.order()];
    for x in q.arrows() {
        pieces[c.get(x)].push(alg.deltas[x].clone());
        labels[c.get(x)].push(format!("δ_{}", q.name(x)));
    }
    GradedBasis { ambient: q.num_arrows(), pieces, labels }
}

/// `Ψ: C*(Q) ⋊_δ G → C*(Q ×_c G)`, `Ψ(f,t)(x,u) = f(x)` when `t = u`,
/// equivariant for `δ̂` and `β`.
pub fn certify_gpd_iso(q: &FiniteGroupoid, c: &Cocycle, cfg: &Config) -> Result<IsomorphismCertificate, GroupoidError> {
    let g = &c.group;
    let alg_q = convolution_algebra(q, cfg)?;
    let graded = bundle(&alg_q, c);
    let degrees: Vec<usize> = q.arrows().map(|x| c.get(x)).collect();
    let (_, _, coaction) = graded_coaction(&alg_q.deltas, &degrees, &graded, g, cfg)?;
    let cp = coaction_crossed_product_graded(&alg_q.deltas, &degrees, &graded, g, cfg)?;
    let sk = skew_product_groupoid(q, c)?;
    let alg_sk = convolution_algebra(&sk.groupoid, cfg)?;

    let mut cert = IsomorphismCertificate::new(
        "C*(Q)⋊_δG ≅ C*(Q×_cG)",
        SpanSummary::from(&cp.span),
        SpanSummary::from(&alg_sk.span),
    );
    let kernel = kernel_embedding_check(q, c, cfg)?;
    cert.push(Check::flag("i: C*(N) → C*(Q) is faithful and P_N = P_Q∘i", kernel.passed()));
    cert.push(Check::flag("C_sC_t ⊆ C_st, C_s* = C_s⁻¹", coaction.grading.passed()));
    cert.push(Check::within("coaction identity", coaction.identity_error, cfg.tol));
    cert.push(Check::flag("δ is an injective homomorphism", coaction.map.is_homomorphism() && coaction.map.injective));
    cert.push(Check::within("δ nondegenerate", coaction.nondegeneracy_error, cfg.tol));
    cert.push(Check::within("δ(f_s) = f_s⊗s", coaction.degree_error, cfg.tol));
    cert.push(Check::flag("crossed product relations", cp.report.passed(cfg.tol)));
    cert.push(Check::flag("regular representation of C*(Q×_cG) is faithful", alg_sk.report.passed()));
    cert.push(Check::equal("dimensions agree", cp.span.dim(), alg_sk.span.dim()));

    // Ψ(j(δ_x)) = Σ_u δ_(x,u) and Ψ(1⊗χ_u) = Σ_v δ_(v,u).
    let m = sk.groupoid.num_arrows();
    let mut images: Vec<Mat> =
        q.arrows().map(|x| Mat::sum(m, g.elements().map(|u| &alg_sk.deltas[sk.arrow(x, u)]))).collect();
    for u in g.elements() {
        images.push(Mat::sum(m, q.units().map(|v| &alg_sk.deltas[sk.arrow(v, u)])));
    }
    let gens = cp.generators();
    let psi = check_star_map(&gens, &images, Some(&alg_sk.span), cfg)?;
    cert.generators = gens.len();
    cert.map = Some(psi.report().clone());

    // Ψ(f_x, t) = δ_(x,t) on the whole spanning set.
    let mut spanning_error: f64 = 0.0;
    for x in q.arrows() {
        for t in g.elements() {
            let img = psi.apply(&cp.element(&alg_q.deltas[x], c.get(x), t), cfg.closure_tol)?;
            spanning_error = spanning_error.max(img.max_abs_diff(&alg_sk.deltas[sk.arrow(x, t)]));
        }
    }
    cert.push(Check::within("Ψ(δ_x, t) = δ_(x,t)", spanning_error, cfg.tol));

    // (δ_x, t)(δ_y, v) = (δ_xδ_y, v) when t = c(y)v, else 0; Ψ respects it exactly.
    let zero = Mat::zeros(m);
    let mut case_ok = true;
    for x in q.arrows() {
        for y in q.arrows() {
            for v in g.elements() {
                for t in g.elements() {
                    let prod = alg_sk.deltas[sk.arrow(x, t)].matmul(&alg_sk.deltas[sk.arrow(y, v)]);
                    let expected = match q.mul(x, y) {
                        Some(xy) if t == g.mul(c.get(y), v) => &alg_sk.deltas[sk.arrow(xy, v)],
                        _ => &zero,
                    };
                    case_ok &= prod == *expected;
                }
            }
        }
    }
    cert.push(Check::flag("Ψ((f_s,t)(g_u,v)) = Ψ(f_sg_u, v) exactly when t = uv", case_ok));

    // Ψ∘δ̂_s = β_s∘Ψ, exactly, on the spanning set.
    let reps = regular_representations(g);
    for s in g.elements() {
        let w = Mat::identity(q.num_arrows()).kron(reps.rho.get(s));
        let mut worst: f64 = 0.0;
        for x in q.arrows() {
            for t in g.elements() {
                let moved = w.matmul(&cp.element(&alg_q.deltas[x], c.get(x), t)).matmul(&w.adjoint());
                let ts = g.mul(t, g.inv(s));
                worst = worst.max(moved.max_abs_diff(&cp.element(&alg_q.deltas[x], c.get(x), ts)));
                if sk.beta.act(s, sk.arrow(x, t)) != sk.arrow(x, ts) {
                    worst = f64::INFINITY;
                }
            }
        }
        cert.equivariance.push(Check::within(format!("Ψ∘δ̂_{} = β_{}∘Ψ", g.name(s), g.name(s)), worst, 0.0));
    }

    let sa = wedderburn_signature(&cp.span, cfg)?;
    let sb = wedderburn_signature(&alg_sk.span, cfg)?;
    cert.signatures = Some((sa, sb));
    finish(cert)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelEmbeddingReport {
    pub kernel_arrows: usize,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub homomorphism: bool,
    pub injective: bool,
    /// `max |P_N(a) − P_Q(i(a))|` over the random samples.
    pub expectation_error: f64,
    pub samples: usize,
}

impl KernelEmbeddingReport {
    pub fn passed(&self) -> bool {
        self.homomorphism && self.injective && self.kernel_dim == self.image_dim && self.expectation_error <= 1e-12
    }
}

/// `i: C*(N) → C*(Q)` for `N = c⁻¹(e)`.
pub fn kernel_embedding_check(
    q: &FiniteGroupoid,
    c: &Cocycle,
    cfg: &Config,
) -> Result<KernelEmbeddingReport, GroupoidError> {
    let (n, back) = c.kernel(q)?;
    let alg_n = convolution_algebra(&n, cfg)?;
    let alg_q = convolution_algebra(q, cfg)?;
    let images: Vec<Mat> = back.iter().map(|&x| alg_q.deltas[x].clone()).collect();
    let i = check_star_map(&alg_n.deltas, &images, None, cfg)?;
    let image_dim = linear_span(&images, cfg, "i(C*(N))")?.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b65_726e);
    let samples = 100;
    let mut expectation_error: f64 = 0.0;
    for _ in 0..samples {
        let a = ConvolutionElement::random(&n, &mut rng, |_| true);
        let la = alg_n.operator(&a);
        let pn = alg_n.element_of(&la);
        let pq = alg_q.element_of(&i.apply(&la, cfg.closure_tol)?);
        for u in n.units() {
            expectation_error = expectation_error.max((pn.coeffs[u] - pq.coeffs[back[u]]).norm());
        }
    }
    Ok(KernelEmbeddingReport {
        kernel_arrows: n.num_arrows(),
        kernel_dim: alg_n.span.dim(),
        image_dim,
        homomorphism: i.report().is_homomorphism(),
        injective: i.report().injective,
        expectation_error,
        samples,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub samples: usize,
    /// `P_R(f) = 0` whenever `f` vanishes on `R⁰`.
    pub off_units_vanish: bool,
    /// `max |‖P_R β_s(f)‖ − ‖P_R(f)‖|`, computed without rounding.
    pub invariance_error: f64,
    /// `max |P_{A⋊G}(Φ(b)) − b(·,e)|`.
    pub crossed_expectation_error: f64,
    /// `max |‖P_{R⋊G}(b)‖ − ‖P_R P_{A⋊G} Φ(b)‖|`.
    pub norm_identity_error: f64,
    /// Smallest `‖P_R(x*x)‖` over random nonzero `x`.
    pub faithful_min: f64,
}

impl ExpectationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.off_units_vanish
            && self.invariance_error == 0.0
            && self.crossed_expectation_error <= tol
            && self.norm_identity_error <= tol
            && self.faithful_min > 1e-6
    }
}

/// `P_R(f) = f|_{R⁰}`, `P_{A⋊G}(f) = f(e)` and the norm identities tying
/// them to `P_{R⋊G}` through `Φ`.
pub fn expectations_and_norm_identities(
    r: &FiniteGroupoid,
    action: &GroupoidAction,
    cfg: &Config,
) -> Result<ExpectationReport, GroupoidError> {
    let parts = build_semi_cross(r, action, cfg)?;
    let SemiCrossParts { sd, alg_sd, alg_r, acp, .. } = &parts;
    let g = &action.group;
    let e = g.identity();
    let samples = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6578_7063);
    let p_r = |m: &Mat| alg_r.element_of(m).unit_sup_norm(r);

    let mut off_units_vanish = true;
    let mut invariance_error: f64 = 0.0;
    let mut faithful_min = f64::INFINITY;
    for _ in 0..samples {
        let off = ConvolutionElement::random(r, &mut rng, |x| !r.is_unit(x));
        off_units_vanish &= p_r(&alg_r.operator(&off)) == 0.0;

        let f = ConvolutionElement::random(r, &mut rng, |_| true);
        let lf = alg_r.operator(&f);
        for s in g.elements() {
            // β_s(f)(x) = f(s⁻¹·x), i.e. coefficients moved along the permutation.
            let moved =
                Mat::lin_comb(r.num_arrows(), r.arrows().map(|x| (f.coeffs[x], &alg_r.deltas[action.act(s, x)])));
            invariance_error = invariance_error.max((p_r(&moved) - p_r(&lf)).abs());
        }

        let x = loop {
            let mask: Vec<bool> = r.arrows().map(|_| rng.gen_bool(0.5)).collect();
            let x = ConvolutionElement::random(r, &mut rng, |k| mask[k]);
            if x.coeffs.iter().any(|c| c.norm() > 0.0) {
                break x;
            }
        };
        let lx = alg_r.operator(&x);
        faithful_min = faithful_min.min(p_r(&lx.adjoint().matmul(&lx)));
    }

    let mut crossed_expectation_error: f64 = 0.0;
    let mut norm_identity_error: f64 = 0.0;
    for _ in 0..samples {
        let b = ConvolutionElement::random(&sd.groupoid, &mut rng, |_| true);
        let phib = parts.phi(&b);
        let pe = acp.expectation(&phib, cfg)?;
        let b_e = Mat::lin_comb(r.num_arrows(), r.arrows().map(|x| (b.coeffs[sd.arrow(x, e)], &alg_r.deltas[x])));
        crossed_expectation_error = crossed_expectation_error.max(pe.max_abs_diff(&b_e));
        let lhs = alg_sd.element_of(&alg_sd.operator(&b)).unit_sup_norm(&sd.groupoid);
        norm_identity_error = norm_identity_error.max((lhs - p_r(&pe)).abs());
    }

    let report = ExpectationReport {
        samples,
        off_units_vanish,
        invariance_error,
        crossed_expectation_error,
        norm_identity_error,
        faithful_min,
    };
    if !report.passed(cfg.tol) {
        let identity = if !report.off_units_vanish {
            "P_R(f) = f|R⁰"
        } else if report.invariance_error != 0.0 {
            "‖P_R∘β_s(f)‖ = ‖P_R(f)‖"
        } else if report.crossed_expectation_error > cfg.tol {
            "P_{A×G}(f) = f(e)"
        } else if report.norm_identity_error > cfg.tol {
            "‖P_{R⋊G}(b)‖ = ‖P_R∘P_{C*(R)×G}∘Φ(b)‖"
        } else {
            "P_R faithful on positives"
        };
        return Err(GroupoidError::IdentityViolated { identity: identity.into(), detail: format!("{report:?}") });
    }
    Ok(report)
}

/// `C*(Q ×_c G) ⋊_β G ≅ C*(Q) ⊗ M_{|G|}`, certified by composing `Φ` for the
/// semidirect product with `Ψ` and comparing Wedderburn signatures.
pub fn certify_full_gpd(
    q: &FiniteGroupoid,
    c: &Cocycle,
    cfg: &Config,
) -> Result<IsomorphismCertificate, GroupoidError> {
    let n = c.group.order();
    let sk = skew_product_groupoid(q, c)?;
    let parts = build_semi_cross(&sk.groupoid, &sk.beta, cfg)?;
    let alg_q = convolution_algebra(q, cfg)?;
    let target = alg_q.span.tensor(&AlgebraSpan::full(n)).with_label("C*(Q)⊗M_G");
    let mut cert = IsomorphismCertificate::new(
        "C*(Q×_cG)⋊_βG ≅ C*(Q)⊗M_G",
        SpanSummary::from(&parts.acp.span),
        SpanSummary::from(&target),
    );
    cert.parts.push(certify_gpd_iso(q, c, cfg).unwrap_or_else(failed_part));
    cert.parts.push(semi_cross_certificate(&parts, cfg).unwrap_or_else(failed_part));
    cert.push(Check::equal("dim = |Q|·|G|²", parts.acp.span.dim(), q.num_arrows() * n * n));
    cert.push(Check::equal("dimensions agree", parts.acp.span.dim(), target.dim()));
    let sa = wedderburn_signature(&parts.acp.span, cfg)?;
    let sb = wedderburn_signature(&target, cfg)?;
    cert.signatures = Some((sa, sb));
    finish(cert)
}

fn failed_part(e: GroupoidError) -> IsomorphismCertificate {
    match e {
        GroupoidError::CertificationFailed(c) => *c,
        other => {
            let empty = SpanSummary { label: String::new(), ambient: 0, dim: 0 };
            let mut c = IsomorphismCertificate::new(other.to_string(), empty.clone(), empty);
            c.push(Check::flag("construction", false));
            c.finalize()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::matalg::Signature;

    fn pair_z2() -> (FiniteGroupoid, Cocycle) {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v = q.arrows().map(|x| if q.is_unit(x) { 0 } else { 1 }).collect();
        (q.clone(), Cocycle::new(&q, &z2, v).unwrap())
    }

    #[test]
    fn gpd_iso_pair_z2() {
        let (q, c) = pair_z2();
        let cert = certify_gpd_iso(&q, &c, &Config::default()).unwrap();
        assert_eq!((cert.source.dim, cert.target.dim), (8, 8));
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![2, 2]));
    }

    #[test]
    fn gpd_iso_trivial_cocycle() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        let cert = certify_gpd_iso(&q, &Cocycle::trivial(&q, &z3), &Config::default()).unwrap();
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![2, 2, 2]));
    }

    #[test]
    fn semi_cross_swap() {
        let r = FiniteGroupoid::units_only(2).unwrap();
        let a = GroupoidAction::new(&r, FiniteGroup::cyclic(2).unwrap(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let cert = certify_semi_cross(&r, &a, &Config::default()).unwrap();
        assert_eq!((cert.source.dim, cert.target.dim), (4, 4));
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![2]));
    }

    #[test]
    fn semi_cross_trivial_group() {
        let (q, _) = pair_z2();
        let a = GroupoidAction::trivial(&q, FiniteGroup::trivial());
        certify_semi_cross(&q, &a, &Config::default()).unwrap();
    }

    #[test]
    fn kernel_embedding_pair_z2() {
        let (q, c) = pair_z2();
        let k = kernel_embedding_check(&q, &c, &Config::default()).unwrap();
        assert_eq!((k.kernel_dim, k.image_dim), (2, 2));
        assert!(k.passed());
        let t = kernel_embedding_check(&q, &Cocycle::trivial(&q, &c.group), &Config::default()).unwrap();
        assert_eq!(t.kernel_arrows, q.num_arrows());
    }

    #[test]
    fn expectations_on_skew() {
        let (q, c) = pair_z2();
        let sk = skew_product_groupoid(&q, &c).unwrap();
        let rep = expectations_and_norm_identities(&sk.groupoid, &sk.beta, &Config::default()).unwrap();
        assert_eq!(rep.invariance_error, 0.0);
    }

    #[test]
    fn full_pair_z2() {
        let (q, c) = pair_z2();
        let cert = certify_full_gpd(&q, &c, &Config::default()).unwrap();
        assert_eq!(cert.source.dim, 16);
        assert_eq!(cert.signatures.unwrap().0, Signature(vec![4]));
    }
}
