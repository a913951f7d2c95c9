use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    convolution_algebra, semidirect_product, skew_product_groupoid, Cocycle, ConvolutionElement, FiniteGroupoid,
    GroupoidError,
};
use crate::matalg::{Config, Mat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceKind {
    /// `(Q ×_c G ⋊ G)` on the left, `Q` on the right, carrier `Q ×_c G`.
    Stable,
    /// `H` on the left, `N = c⁻¹(e)` on the right, carrier `Q`.
    Kernel,
}

impl std::str::FromStr for EquivalenceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" => Ok(EquivalenceKind::Stable),
            "kernel" => Ok(EquivalenceKind::Kernel),
            other => Err(format!("unknown equivalence kind `{other}` (expected stable or kernel)")),
        }
    }
}

impl std::fmt::Display for EquivalenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EquivalenceKind::Stable => "stable",
            EquivalenceKind::Kernel => "kernel",
        })
    }
}

/// A space with a left and a right groupoid action, given by tables.
/// Moment maps take values in the unit arrows of the respective groupoid.
#[derive(Clone, Debug)]
pub struct EquivalenceBimodule {
    pub kind: EquivalenceKind,
    pub left: FiniteGroupoid,
    pub right: FiniteGroupoid,
    pub carrier: Vec<String>,
    pub rho: Vec<usize>,
    pub sigma: Vec<usize>,
    left_table: Vec<Option<usize>>,
    right_table: Vec<Option<usize>>,
    /// Carrier points whose action formula left the carrier.
    undefined: Vec<String>,
}

impl EquivalenceBimodule {
    /// Fills the action tables wherever the moment maps match.
    #[allow(clippy::too_many_arguments)]
    fn from_rules(
        kind: EquivalenceKind,
        left: FiniteGroupoid,
        right: FiniteGroupoid,
        carrier: Vec<String>,
        rho: Vec<usize>,
        sigma: Vec<usize>,
        left_rule: impl Fn(usize, usize) -> Option<usize>,
        right_rule: impl Fn(usize, usize) -> Option<usize>,
    ) -> Self {
        let np = carrier.len();
        let mut undefined = Vec::new();
        let mut left_table = vec![None; left.num_arrows() * np];
        for g in left.arrows() {
            for p in 0..np {
                if left.src(g) == rho[p] {
                    left_table[g * np + p] = left_rule(g, p);
                    if left_table[g * np + p].is_none() {
                        undefined.push(format!("{}·{}", left.name(g), carrier[p]));
                    }
                }
            }
        }
        let nr = right.num_arrows();
        let mut right_table = vec![None; np * nr];
        for p in 0..np {
            for y in right.arrows() {
                if sigma[p] == right.rng(y) {
                    right_table[p * nr + y] = right_rule(p, y);
                    if right_table[p * nr + y].is_none() {
                        undefined.push(format!("{}·{}", carrier[p], right.name(y)));
                    }
                }
            }
        }
        EquivalenceBimodule { kind, left, right, carrier, rho, sigma, left_table, right_table, undefined }
    }

    pub fn carrier_size(&self) -> usize {
        self.carrier.len()
    }

    /// `g·p`, defined when `s(g) = ρ(p)`.
    pub fn act_left(&self, g: usize, p: usize) -> Option<usize> {
        self.left_table[g * self.carrier.len() + p]
    }

    /// `p·y`, defined when `σ(p) = r(y)`.
    pub fn act_right(&self, p: usize, y: usize) -> Option<usize> {
        self.right_table[p * self.right.num_arrows() + y]
    }
}

/// Counts of cells examined per axiom.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BimoduleReport {
    pub carrier: usize,
    pub left_arrows: usize,
    pub left_units: usize,
    pub right_arrows: usize,
    pub right_units: usize,
    pub left_pairs: usize,
    pub right_pairs: usize,
    pub associativity_triples: usize,
    pub commuting_triples: usize,
    pub rho_fibre_pairs: usize,
    pub sigma_fibre_pairs: usize,
    /// Finite carriers make both actions proper.
    pub proper: bool,
}

fn axiom(name: &str, witness: String) -> GroupoidError {
    GroupoidError::AxiomFailed { axiom: name.into(), witness }
}

/// Exhaustively checks the groupoid equivalence axioms.
pub fn verify_bimodule(b: &EquivalenceBimodule) -> Result<BimoduleReport, GroupoidError> {
    let (l, r) = (&b.left, &b.right);
    let np = b.carrier.len();
    let pn = |p: usize| b.carrier[p].as_str();
    let mut rep = BimoduleReport {
        carrier: np,
        left_arrows: l.num_arrows(),
        left_units: l.num_units(),
        right_arrows: r.num_arrows(),
        right_units: r.num_units(),
        proper: true,
        ..Default::default()
    };
    if let Some(w) = b.undefined.first() {
        return Err(axiom("action well-defined", w.clone()));
    }

    let rho_img: BTreeSet<usize> = b.rho.iter().copied().collect();
    if let Some(u) = l.units().find(|u| !rho_img.contains(u)) {
        return Err(axiom("ρ surjective", format!("left unit {} not hit", l.name(u))));
    }
    if let Some(p) = (0..np).find(|&p| !l.is_unit(b.rho[p])) {
        return Err(axiom("ρ surjective", format!("ρ({}) is not a unit", pn(p))));
    }
    let sigma_img: BTreeSet<usize> = b.sigma.iter().copied().collect();
    if let Some(u) = r.units().find(|u| !sigma_img.contains(u)) {
        return Err(axiom("σ surjective", format!("right unit {} not hit", r.name(u))));
    }
    if let Some(p) = (0..np).find(|&p| !r.is_unit(b.sigma[p])) {
        return Err(axiom("σ surjective", format!("σ({}) is not a unit", pn(p))));
    }

    for g in l.arrows() {
        for p in 0..np {
            let Some(gp) = b.act_left(g, p) else { continue };
            rep.left_pairs += 1;
            let cell = || format!("{}·{} = {}", l.name(g), pn(p), pn(gp));
            if b.rho[gp] != l.rng(g) {
                return Err(axiom("ρ(g·p) = r(g)", cell()));
            }
            if b.sigma[gp] != b.sigma[p] {
                return Err(axiom("σ(g·p) = σ(p)", cell()));
            }
            if l.is_unit(g) && gp != p {
                return Err(axiom("units act trivially on the left", cell()));
            }
            if gp == p && !l.is_unit(g) {
                return Err(axiom("left action free", cell()));
            }
            for &h in l.with_range(l.src(g)) {
                // h composable after g: g(h·q) = (gh)·q
                let gh = l.mul(g, h).expect("composable");
                for q in (0..np).filter(|&q| b.act_left(h, q) == Some(p)) {
                    rep.associativity_triples += 1;
                    if b.act_left(gh, q) != Some(gp) {
                        return Err(axiom(
                            "(gh)·p = g·(h·p)",
                            format!("g = {}, h = {}, p = {}", l.name(g), l.name(h), pn(q)),
                        ));
                    }
                }
            }
            for y in r.arrows() {
                let Some(py) = b.act_right(p, y) else { continue };
                rep.commuting_triples += 1;
                if b.act_right(gp, y) != b.act_left(g, py) || b.act_left(g, py).is_none() {
                    return Err(axiom(
                        "(g·p)·y = g·(p·y)",
                        format!("g = {}, p = {}, y = {}", l.name(g), pn(p), r.name(y)),
                    ));
                }
            }
        }
    }
    for p in 0..np {
        if b.act_left(b.rho[p], p) != Some(p) {
            return Err(axiom("ρ(p)·p = p", pn(p).to_string()));
        }
        if b.act_right(p, b.sigma[p]) != Some(p) {
            return Err(axiom("p·σ(p) = p", pn(p).to_string()));
        }
        for y in r.arrows() {
            let Some(py) = b.act_right(p, y) else { continue };
            rep.right_pairs += 1;
            let cell = || format!("{}·{} = {}", pn(p), r.name(y), pn(py));
            if b.sigma[py] != r.src(y) {
                return Err(axiom("σ(p·y) = s(y)", cell()));
            }
            if b.rho[py] != b.rho[p] {
                return Err(axiom("ρ(p·y) = ρ(p)", cell()));
            }
            if py == p && !r.is_unit(y) {
                return Err(axiom("right action free", cell()));
            }
            for &z in r.with_range(r.src(y)) {
                rep.associativity_triples += 1;
                let yz = r.mul(y, z).expect("composable");
                if b.act_right(py, z) != b.act_right(p, yz) {
                    return Err(axiom(
                        "(p·y)·z = p·(yz)",
                        format!("p = {}, y = {}, z = {}", pn(p), r.name(y), r.name(z)),
                    ));
                }
            }
        }
    }

    // ρ(p) = ρ(q) ⇒ q ∈ p·R and σ(p) = σ(q) ⇒ q ∈ L·p.
    for p in 0..np {
        let right_orbit: BTreeSet<usize> = r.arrows().filter_map(|y| b.act_right(p, y)).collect();
        let left_orbit: BTreeSet<usize> = l.arrows().filter_map(|g| b.act_left(g, p)).collect();
        for q in 0..np {
            if b.rho[p] == b.rho[q] {
                rep.rho_fibre_pairs += 1;
                if !right_orbit.contains(&q) {
                    return Err(axiom(
                        "ρ induces a bijection from carrier/right onto left units",
                        format!("{} and {}", pn(p), pn(q)),
                    ));
                }
            }
            if b.sigma[p] == b.sigma[q] {
                rep.sigma_fibre_pairs += 1;
                if !left_orbit.contains(&q) {
                    return Err(axiom(
                        "σ induces a bijection from left\\carrier onto right units",
                        format!("{} and {}", pn(p), pn(q)),
                    ));
                }
            }
        }
    }
    Ok(rep)
}

/// Builds the bimodule of the requested kind from `Q` and `c`.
pub fn build_bimodule(
    kind: EquivalenceKind,
    q: &FiniteGroupoid,
    c: &Cocycle,
) -> Result<EquivalenceBimodule, GroupoidError> {
    let g = &c.group;
    let sk = skew_product_groupoid(q, c)?;
    match kind {
        EquivalenceKind::Stable => {
            let sd = semidirect_product(&sk.groupoid, &sk.beta)?;
            let e = g.identity();
            let carrier = sk.groupoid.names().to_vec();
            let np = carrier.len();
            // ρ(y,r) = (r(y), c(y)r, e), σ(y,r) = s(y)
            let rho = (0..np)
                .map(|p| {
                    let (y, r) = sk.split(p);
                    sd.arrow(sk.arrow(q.rng(y), g.mul(c.get(y), r)), e)
                })
                .collect();
            let sigma = (0..np).map(|p| q.src(sk.split(p).0)).collect();
            // (x,s,t)(y,r) = (xy, rt⁻¹)
            let left_rule = |k: usize, p: usize| {
                let (xs, t) = sd.split(k);
                let (x, _) = sk.split(xs);
                let (y, r) = sk.split(p);
                q.mul(x, y).map(|xy| sk.arrow(xy, g.mul(r, g.inv(t))))
            };
            // (x,s)y = (xy, c(y)⁻¹s)
            let right_rule = |p: usize, y: usize| {
                let (x, s) = sk.split(p);
                q.mul(x, y).map(|xy| sk.arrow(xy, g.mul(g.inv(c.get(y)), s)))
            };
            Ok(EquivalenceBimodule::from_rules(
                kind,
                sd.groupoid.clone(),
                q.clone(),
                carrier,
                rho,
                sigma,
                left_rule,
                right_rule,
            ))
        }
        EquivalenceKind::Kernel => {
            // H = {(x, c(y)) : s(x) = r(y)}
            let keep: Vec<bool> = sk
                .groupoid
                .arrows()
                .map(|k| {
                    let (x, t) = sk.split(k);
                    q.with_range(q.src(x)).iter().any(|&y| c.get(y) == t)
                })
                .collect();
            let (h, to_h) = sk.groupoid.subgroupoid(&keep)?;
            let mut h_back = vec![0; h.num_arrows()];
            for (k, m) in to_h.iter().enumerate() {
                if let Some(i) = m {
                    h_back[*i] = k;
                }
            }
            let (n, n_back) = c.kernel(q)?;
            let mut to_n = vec![None; q.num_arrows()];
            for (i, &x) in n_back.iter().enumerate() {
                to_n[x] = Some(i);
            }
            let carrier = q.names().to_vec();
            // ρ(y) = (r(y), c(y)), σ(y) = s(y)
            let rho = q.arrows().map(|y| to_h[sk.arrow(q.rng(y), c.get(y))].expect("(r(y), c(y)) ∈ H⁰")).collect();
            let sigma = q.arrows().map(|y| to_n[q.src(y)].expect("units lie in N")).collect();
            // (x,t)y = xy
            let left_rule = |k: usize, y: usize| q.mul(sk.split(h_back[k]).0, y);
            let right_rule = |y: usize, m: usize| q.mul(y, n_back[m]);
            Ok(EquivalenceBimodule::from_rules(kind, h, n, carrier, rho, sigma, left_rule, right_rule))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub kind: EquivalenceKind,
    pub bimodule: BimoduleReport,
    /// Random `L ⊆ Q`, `F ⊆ G` for which the compactness containments held.
    pub properness_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_products: Option<InnerProductReport>,
    pub passed: bool,
}

/// Verifies the bimodule axioms, the properness containments, and for the
/// `H`–`N` bimodule also the inner-product identities.
pub fn certify_equivalence(
    kind: EquivalenceKind,
    q: &FiniteGroupoid,
    c: &Cocycle,
    cfg: &Config,
) -> Result<(EquivalenceBimodule, EquivalenceReport), GroupoidError> {
    let b = build_bimodule(kind, q, c)?;
    let bimodule = verify_bimodule(&b)?;
    let properness_samples = properness_containments(&b, q, c, cfg)?;
    let inner_products = match kind {
        EquivalenceKind::Kernel => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6970);
            let a = ConvolutionElement::random(q, &mut rng, |_| true);
            let bb = ConvolutionElement::random(q, &mut rng, |_| true);
            Some(bimodule_inner_products(q, c, &a, &bb, cfg)?.1)
        }
        EquivalenceKind::Stable => None,
    };
    let passed = inner_products.as_ref().is_none_or(|r| r.passed(cfg.tol));
    Ok((b, EquivalenceReport { kind, bimodule, properness_samples, inner_products, passed }))
}

/// The containments from the properness argument, on random `L`, `F`.
fn properness_containments(
    b: &EquivalenceBimodule,
    q: &FiniteGroupoid,
    c: &Cocycle,
    cfg: &Config,
) -> Result<usize, GroupoidError> {
    let g = &c.group;
    let sk = skew_product_groupoid(q, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7072);
    let samples = 20;
    for _ in 0..samples {
        let l: BTreeSet<usize> = q.arrows().filter(|_| rng.gen_bool(0.4)).collect();
        let f: BTreeSet<usize> = g.elements().filter(|_| rng.gen_bool(0.6)).collect();
        let ll: BTreeSet<usize> = l.iter().flat_map(|&x| l.iter().filter_map(move |&y| q.mul(x, q.inv(y)))).collect();
        let cl: BTreeSet<usize> = l.iter().map(|&x| c.get(x)).collect();
        let fif: BTreeSet<usize> = f.iter().flat_map(|&s| f.iter().map(move |&t| g.mul(g.inv(s), t))).collect();
        match b.kind {
            EquivalenceKind::Stable => {
                // s ∈ c(L)FF⁻¹F
                let mut big = BTreeSet::new();
                for &a in &cl {
                    for &u in &f {
                        for &v in &f {
                            for &w in &f {
                                big.insert(g.mul(g.mul(a, u), g.mul(g.inv(v), w)));
                            }
                        }
                    }
                }
                let sd = semidirect_product(&sk.groupoid, &sk.beta)?;
                let in_lf = |p: usize| {
                    let (y, r) = sk.split(p);
                    l.contains(&y) && f.contains(&r)
                };
                for k in b.left.arrows() {
                    for p in 0..b.carrier_size() {
                        let Some(kp) = b.act_left(k, p) else { continue };
                        if in_lf(kp) && in_lf(p) {
                            let (xs, t) = sd.split(k);
                            let (x, s) = sk.split(xs);
                            if !(ll.contains(&x) && big.contains(&s) && fif.contains(&t)) {
                                return Err(axiom(
                                    "left action proper",
                                    format!("{} on {}", b.left.name(k), b.carrier[p]),
                                ));
                            }
                        }
                    }
                }
            }
            EquivalenceKind::Kernel => {
                // x ∈ LL⁻¹, t ∈ c(L), y ∈ L
                for k in b.left.arrows() {
                    for y in 0..b.carrier_size() {
                        let Some(ky) = b.act_left(k, y) else { continue };
                        if l.contains(&ky) && l.contains(&y) {
                            let name = b.left.name(k);
                            let (x, t) = sk.split(sk.groupoid.index_of(name).expect("H ⊆ Q×_cG"));
                            if !(ll.contains(&x) && cl.contains(&t)) {
                                return Err(axiom("left action proper", format!("{} on {}", name, b.carrier[y])));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(samples)
}

/// `⟨a,b⟩(n) = Σ_{r(h)=ρ(y)} conj a(h⁻¹y) · b(h⁻¹yn)` with `y` any arrow
/// with `s(y) = r(n)`. Also returns the largest spread over choices of `y`.
pub fn inner_product_general(
    b: &EquivalenceBimodule,
    f: &ConvolutionElement,
    g: &ConvolutionElement,
) -> (ConvolutionElement, f64) {
    let h = &b.left;
    let n = &b.right;
    let mut spread: f64 = 0.0;
    let coeffs = n
        .arrows()
        .map(|m| {
            let mut first: Option<C64> = None;
            for y in (0..b.carrier_size()).filter(|&y| b.sigma[y] == n.rng(m)) {
                let yn = b.act_right(y, m).expect("σ(y) = r(n)");
                let v: C64 = h
                    .with_range(b.rho[y])
                    .iter()
                    .map(|&k| {
                        let ki = h.inv(k);
                        let a = b.act_left(ki, y).expect("s(h⁻¹) = ρ(y)");
                        let c = b.act_left(ki, yn).expect("ρ(yn) = ρ(y)");
                        f.coeffs[a].conj() * g.coeffs[c]
                    })
                    .sum();
                match first {
                    None => first = Some(v),
                    Some(w) => spread = spread.max((v - w).norm()),
                }
            }
            first.unwrap_or_default()
        })
        .collect();
    (ConvolutionElement { coeffs }, spread)
}

/// `Σ_t a_t* b_t` restricted to `N`; the second value is the largest
/// coefficient of the sum off `N`.
pub fn inner_product_graded(
    q: &FiniteGroupoid,
    c: &Cocycle,
    a: &ConvolutionElement,
    b: &ConvolutionElement,
) -> (ConvolutionElement, f64) {
    let mut total = ConvolutionElement::zero(q);
    for t in c.group.elements() {
        total = total.add(&a.graded_part(c, t).star(q).convolve(q, &b.graded_part(c, t)));
    }
    let e = c.group.identity();
    let off = q.arrows().filter(|&x| c.get(x) != e).map(|x| total.coeffs[x].norm()).fold(0.0, f64::max);
    let coeffs = q.arrows().filter(|&x| c.get(x) == e).map(|x| total.coeffs[x]).collect();
    (ConvolutionElement { coeffs }, off)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerProductReport {
    /// General formula vs `Σ_t a_t* b_t` on the supplied pair.
    pub formula_error: f64,
    /// Same comparison over the random pairs.
    pub random_formula_error: f64,
    pub random_pairs: usize,
    /// Dependence of the general formula on the auxiliary `y`.
    pub y_spread: f64,
    /// Largest coefficient of `Σ_t a_t* b_t` off `N`.
    pub off_kernel: f64,
    /// `max |⟨ab,c⟩ − ⟨b,a*c⟩|` over random homogeneous `a`.
    pub adjoint_error: f64,
    pub adjoint_triples: usize,
    /// Smallest eigenvalue of `[L_N⟨a_i,a_j⟩]`.
    pub gram_min_eigenvalue: f64,
    /// Smallest eigenvalue of `‖a‖² L_N⟨b,b⟩ − L_N⟨ab,ab⟩`.
    pub bound_min_eigenvalue: f64,
}

impl InnerProductReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.formula_error <= tol
            && self.random_formula_error <= tol
            && self.y_spread <= tol
            && self.off_kernel <= tol
            && self.adjoint_error <= tol
            && self.gram_min_eigenvalue >= -tol
            && self.bound_min_eigenvalue >= -tol
    }
}

/// `⟨a,b⟩_{C_c(N)}` on the `H`–`N` bimodule, with the module identities.
pub fn bimodule_inner_products(
    q: &FiniteGroupoid,
    c: &Cocycle,
    a: &ConvolutionElement,
    b: &ConvolutionElement,
    cfg: &Config,
) -> Result<(ConvolutionElement, InnerProductReport), GroupoidError> {
    let bm = build_bimodule(EquivalenceKind::Kernel, q, c)?;
    let alg_n = convolution_algebra(&bm.right, cfg)?;
    let alg_q = convolution_algebra(q, cfg)?;
    let g = &c.group;

    let (general, mut y_spread) = inner_product_general(&bm, a, b);
    let (graded, mut off_kernel) = inner_product_graded(q, c, a, b);
    let formula_error = general.max_abs_diff(&graded);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6970_726f);
    let random_pairs = 100;
    let mut random_formula_error: f64 = 0.0;
    for _ in 0..random_pairs {
        let x = ConvolutionElement::random(q, &mut rng, |_| true);
        let y = ConvolutionElement::random(q, &mut rng, |_| true);
        let (gen, sp) = inner_product_general(&bm, &x, &y);
        let (grd, off) = inner_product_graded(q, c, &x, &y);
        random_formula_error = random_formula_error.max(gen.max_abs_diff(&grd));
        y_spread = y_spread.max(sp);
        off_kernel = off_kernel.max(off);
    }

    let ip = |x: &ConvolutionElement, y: &ConvolutionElement| inner_product_graded(q, c, x, y).0;
    let adjoint_triples = 100;
    let mut adjoint_error: f64 = 0.0;
    for _ in 0..adjoint_triples {
        let s = rng.gen_range(0..g.order());
        let x = ConvolutionElement::random(q, &mut rng, |k| c.get(k) == s);
        let y = ConvolutionElement::random(q, &mut rng, |_| true);
        let z = ConvolutionElement::random(q, &mut rng, |_| true);
        let lhs = ip(&x.convolve(q, &y), &z);
        let rhs = ip(&y, &x.star(q).convolve(q, &z));
        adjoint_error = adjoint_error.max(lhs.max_abs_diff(&rhs));
    }

    let nn = bm.right.num_arrows();
    let mut gram_min_eigenvalue = f64::INFINITY;
    let mut bound_min_eigenvalue = f64::INFINITY;
    for _ in 0..20 {
        let fam: Vec<ConvolutionElement> = (0..3).map(|_| ConvolutionElement::random(q, &mut rng, |_| true)).collect();
        let mut triplets = Vec::new();
        for (i, fi) in fam.iter().enumerate() {
            for (j, fj) in fam.iter().enumerate() {
                let block = alg_n.operator(&ip(fi, fj));
                triplets.extend(block.entries().map(|(r, s, v)| (i * nn + r, j * nn + s, v)));
            }
        }
        let gram = Mat::from_triplets(3 * nn, triplets);
        gram_min_eigenvalue = gram_min_eigenvalue.min(gram.min_hermitian_eigenvalue());

        let x = &fam[0];
        let y = &fam[1];
        let norm = alg_q.operator(x).operator_norm();
        let xy = x.convolve(q, y);
        let diff = &alg_n.operator(&ip(y, y)).scale(C64::from(norm * norm)) - &alg_n.operator(&ip(&xy, &xy));
        bound_min_eigenvalue = bound_min_eigenvalue.min(diff.min_hermitian_eigenvalue());
    }

    let report = InnerProductReport {
        formula_error,
        random_formula_error,
        random_pairs,
        y_spread,
        off_kernel,
        adjoint_error,
        adjoint_triples,
        gram_min_eigenvalue,
        bound_min_eigenvalue,
    };
    let worst = formula_error.max(random_formula_error).max(y_spread).max(off_kernel).max(adjoint_error);
    if worst > cfg.tol {
        return Err(GroupoidError::FormulaMismatch { error: worst });
    }
    if gram_min_eigenvalue < -cfg.tol {
        return Err(GroupoidError::PositivityFailed {
            what: "Gram matrix [⟨a_i,a_j⟩]".into(),
            min_eigenvalue: gram_min_eigenvalue,
        });
    }
    if bound_min_eigenvalue < -cfg.tol {
        return Err(GroupoidError::PositivityFailed {
            what: "‖a‖²⟨b,b⟩ − ⟨ab,ab⟩".into(),
            min_eigenvalue: bound_min_eigenvalue,
        });
    }
    Ok((general, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;

    fn pair_z2() -> (FiniteGroupoid, Cocycle) {
        let q = FiniteGroupoid::pair(2).unwrap();
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let v = q.arrows().map(|x| if q.is_unit(x) { 0 } else { 1 }).collect();
        (q.clone(), Cocycle::new(&q, &z2, v).unwrap())
    }

    #[test]
    fn kernel_pair_z2_has_four_h_units() {
        let (q, c) = pair_z2();
        let (b, rep) = certify_equivalence(EquivalenceKind::Kernel, &q, &c, &Config::default()).unwrap();
        assert_eq!(b.left.num_units(), 4);
        assert_eq!(b.right.num_arrows(), 2);
        assert!(rep.passed);
    }

    #[test]
    fn kernel_trivial_cocycle_is_identity() {
        let q = FiniteGroupoid::pair(2).unwrap();
        let c = Cocycle::trivial(&q, &FiniteGroup::cyclic(3).unwrap());
        let (b, _) = certify_equivalence(EquivalenceKind::Kernel, &q, &c, &Config::default()).unwrap();
        assert_eq!(b.left.num_arrows(), q.num_arrows());
        assert_eq!(b.right.num_arrows(), q.num_arrows());
    }

    #[test]
    fn stable_pair_z2() {
        let (q, c) = pair_z2();
        let (b, rep) = certify_equivalence(EquivalenceKind::Stable, &q, &c, &Config::default()).unwrap();
        assert_eq!(b.left.num_arrows(), 16);
        assert_eq!(b.carrier_size(), 8);
        assert!(rep.bimodule.proper);
    }

    #[test]
    fn stable_fixed_points_are_units() {
        let (q, c) = pair_z2();
        let b = build_bimodule(EquivalenceKind::Stable, &q, &c).unwrap();
        for k in b.left.arrows() {
            for p in 0..b.carrier_size() {
                if b.act_left(k, p) == Some(p) {
                    assert!(b.left.is_unit(k));
                }
            }
        }
    }

    #[test]
    fn inner_product_of_x12() {
        let (q, c) = pair_z2();
        let x12 = q.index_of("x12").unwrap();
        let a = ConvolutionElement::delta(&q, x12);
        let (ip, rep) = bimodule_inner_products(&q, &c, &a, &a, &Config::default()).unwrap();
        assert!(rep.formula_error < 1e-12);
        let n = build_bimodule(EquivalenceKind::Kernel, &q, &c).unwrap().right;
        let u = n.index_of("x22").unwrap();
        for m in n.arrows() {
            assert_eq!(ip.coeffs[m], if m == u { C64::new(1.0, 0.0) } else { C64::default() });
        }
    }

    #[test]
    fn graded_orthogonality() {
        let (q, c) = pair_z2();
        let a = ConvolutionElement::delta(&q, q.index_of("x12").unwrap());
        let b = ConvolutionElement::delta(&q, q.index_of("x11").unwrap());
        let (ip, _) = inner_product_graded(&q, &c, &a, &b);
        assert!(ip.coeffs.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn broken_action_is_reported() {
        let (q, c) = pair_z2();
        let mut b = build_bimodule(EquivalenceKind::Kernel, &q, &c).unwrap();
        let np = b.carrier.len();
        let k = b.left.arrows().find(|&k| !b.left.is_unit(k)).unwrap();
        let p = (0..np).find(|&p| b.act_left(k, p).is_some()).unwrap();
        b.left_table[k * np + p] = Some(p);
        assert!(matches!(verify_bimodule(&b), Err(GroupoidError::AxiomFailed { .. })));
    }
}
