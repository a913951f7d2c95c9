//! Seeded random instances and the batch runner over them.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{certify_free_action, certify_regular_diagram, DualityError, IsomorphismCertificate};
use crate::graphalg::{ck_representation, coaction, gauge_check, CoactionReport, GaugeReport};
use crate::graphs::{enumerate_sink_paths, skew_product, translation_action, DirectedGraph, Edge};
use crate::groupoids::{
    certify_equivalence, certify_full_gpd, expectations_and_norm_identities, skew_product_groupoid, Cocycle,
    EquivalenceKind, EquivalenceReport, ExpectationReport, FiniteGroupoid, GroupoidError,
};
use crate::groups::{FiniteGroup, Labeling};
use crate::matalg::{Config, C64};
use crate::report::VerificationReport;

/// Size limits for generated instances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SuiteCaps {
    pub max_vertices: usize,
    pub max_edges: usize,
    /// Bound on `|paths|·|G|²`, the largest ambient dimension used.
    pub max_ambient: usize,
    /// Bound on `dim C*(E)·|G|²`.
    pub max_algebra_dim: usize,
    pub max_units: usize,
    pub max_arrows: usize,
}

impl SuiteCaps {
    pub fn from_config(cfg: &Config) -> Self {
        SuiteCaps {
            max_vertices: 8,
            max_edges: 12,
            max_ambient: cfg.max_dim,
            max_algebra_dim: cfg.max_dim,
            max_units: 6,
            max_arrows: 24,
        }
    }
}

/// The groups cycled through by the graph suite.
pub fn graph_suite_groups() -> Vec<(String, FiniteGroup)> {
    vec![
        ("Z2".into(), FiniteGroup::cyclic(2).expect("order 2")),
        ("Z3".into(), FiniteGroup::cyclic(3).expect("order 3")),
        ("Z4".into(), FiniteGroup::cyclic(4).expect("order 4")),
        ("Klein".into(), FiniteGroup::klein_four()),
    ]
}

#[derive(Clone, Debug)]
pub struct GraphCase {
    pub index: usize,
    pub graph: DirectedGraph,
    pub group_name: String,
    pub group: FiniteGroup,
    pub labeling: Labeling,
}

impl GraphCase {
    pub fn describe(&self) -> String {
        let labels: Vec<&str> = self.labeling.values().iter().map(|&t| self.group.name(t)).collect();
        format!(
            "graph #{} ({}v/{}e, {}, c = [{}])",
            self.index,
            self.graph.num_vertices(),
            self.graph.num_edges(),
            self.group_name,
            labels.join(",")
        )
    }
}

fn random_acyclic_graph<R: Rng>(rng: &mut R, caps: &SuiteCaps) -> DirectedGraph {
    let nv = rng.gen_range(2..=caps.max_vertices);
    let ne = rng.gen_range(1..=caps.max_edges);
    let mut order: Vec<usize> = (0..nv).collect();
    order.shuffle(rng);
    let edges = (0..ne)
        .map(|k| {
            let a = rng.gen_range(0..nv - 1);
            let b = rng.gen_range(a + 1..nv);
            Edge { name: format!("e{k}"), src: order[a], rng: order[b] }
        })
        .collect();
    DirectedGraph::new((0..nv).map(|v| format!("v{v}")).collect(), edges).expect("indices in range")
}

/// `count` acyclic graphs with random labelings, groups cycling through
/// `ℤ₂, ℤ₃, ℤ₄, ℤ₂×ℤ₂`; oversized draws are rejected.
pub fn graph_cases(seed: u64, count: usize, caps: &SuiteCaps) -> Vec<GraphCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = graph_suite_groups();
    (0..count)
        .map(|index| {
            let (group_name, group) = groups[index % groups.len()].clone();
            let n = group.order();
            let graph = loop {
                let g = random_acyclic_graph(&mut rng, caps);
                let paths = enumerate_sink_paths(&g).expect("acyclic").len();
                let dim = ck_representation(&g).expect("acyclic").expected_algebra_dim();
                if paths * n * n <= caps.max_ambient && dim * n * n <= caps.max_algebra_dim {
                    break g;
                }
            };
            let values = (0..graph.num_edges()).map(|_| rng.gen_range(0..n)).collect();
            let labeling = Labeling::from_values(&graph, values, &group).expect("values in range");
            GraphCase { index, graph, group_name, group, labeling }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct GroupoidCase {
    pub index: usize,
    pub groupoid: FiniteGroupoid,
    /// `(points, isotropy order)` per transitive component.
    pub components: Vec<(usize, usize)>,
    pub group_name: String,
    pub cocycle: Cocycle,
}

impl GroupoidCase {
    pub fn describe(&self) -> String {
        let comps: Vec<String> = self.components.iter().map(|(n, h)| format!("P{n}×Z{h}")).collect();
        format!(
            "groupoid #{} ({}, {} units/{} arrows, c into {})",
            self.index,
            comps.join(" ⊔ "),
            self.groupoid.num_units(),
            self.groupoid.num_arrows(),
            self.group_name
        )
    }
}

/// A random cocycle: on each component pick a base unit `u₀`, arrows
/// `γ_u: u₀ → u`, values `b_u` (with `b_{u₀} = e`) and a homomorphism `φ` on
/// the isotropy at `u₀`; then `c(x) = b_{r(x)} φ(γ_{r(x)}⁻¹ x γ_{s(x)}) b_{s(x)}⁻¹`.
pub fn random_cocycle<R: Rng>(q: &FiniteGroupoid, g: &FiniteGroup, rng: &mut R) -> Result<Cocycle, GroupoidError> {
    let mut values = vec![g.identity(); q.num_arrows()];
    for orbit in q.orbits() {
        let u0 = orbit[0];
        let gamma: Vec<(usize, usize)> = orbit
            .iter()
            .map(|&u| {
                let arrow = *q.with_range(u).iter().find(|&&x| q.src(x) == u0).expect("same orbit");
                let b = if u == u0 { g.identity() } else { rng.gen_range(0..g.order()) };
                (arrow, b)
            })
            .collect();
        let iso = q.isotropy(u0);
        let pos = |h: usize| iso.iter().position(|&k| k == h).expect("isotropy arrow");
        let homs: Vec<Vec<usize>> = (0..g.order().pow(iso.len() as u32))
            .map(|mut code| {
                (0..iso.len())
                    .map(|_| {
                        let v = code % g.order();
                        code /= g.order();
                        v
                    })
                    .collect::<Vec<usize>>()
            })
            .filter(|phi| {
                iso.iter().all(|&a| {
                    iso.iter()
                        .all(|&b| phi[pos(q.mul(a, b).expect("loops compose"))] == g.mul(phi[pos(a)], phi[pos(b)]))
                })
            })
            .collect();
        let phi = homs.choose(rng).expect("the trivial homomorphism exists");
        let at = |u: usize| gamma[orbit.iter().position(|&v| v == u).expect("in orbit")];
        for &u in &orbit {
            for &x in q.with_range(u) {
                let (gr, br) = at(q.rng(x));
                let (gs, bs) = at(q.src(x));
                let h = q.mul(q.inv(gr), x).and_then(|y| q.mul(y, gs)).expect("composable");
                values[x] = g.mul(g.mul(br, phi[pos(h)]), g.inv(bs));
            }
        }
    }
    Cocycle::new(q, g, values)
}

/// Disjoint unions of `pair(n) × ℤ_h` components with cocycles into `ℤ₂` or
/// `ℤ₃`, alternating.
pub fn groupoid_cases(seed: u64, count: usize, caps: &SuiteCaps) -> Vec<GroupoidCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = [("Z2", 2usize), ("Z3", 3)];
    (0..count)
        .map(|index| {
            let (group_name, order) = targets[index % targets.len()];
            let g = FiniteGroup::cyclic(order).expect("small cyclic group");
            let mut components: Vec<(usize, usize)> = Vec::new();
            let (mut units, mut arrows) = (0, 0);
            loop {
                let fitting: Vec<(usize, usize)> = [1, 2, 3]
                    .iter()
                    .flat_map(|&n| [1, 2, 3].iter().map(move |&h| (n, h)))
                    .filter(|&(n, h)| units + n <= caps.max_units && arrows + n * n * h <= caps.max_arrows)
                    .collect();
                if fitting.is_empty() || (!components.is_empty() && rng.gen_bool(0.4)) {
                    break;
                }
                let (n, h) = *fitting.choose(&mut rng).expect("nonempty");
                components.push((n, h));
                units += n;
                arrows += n * n * h;
            }
            let parts: Vec<FiniteGroupoid> = components
                .iter()
                .map(|&(n, h)| {
                    FiniteGroupoid::pair_with_isotropy(n, &FiniteGroup::cyclic(h).expect("order ≤ 3")).expect("valid")
                })
                .collect();
            let refs: Vec<&FiniteGroupoid> = parts.iter().collect();
            let groupoid = FiniteGroupoid::disjoint_union(&refs).expect("valid");
            let cocycle = random_cocycle(&groupoid, &g, &mut rng).expect("built as a cocycle");
            GroupoidCase { index, groupoid, components, group_name: group_name.into(), cocycle }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphCaseResult {
    pub index: usize,
    pub instance: String,
    /// Carries the equivariant and direct isomorphism certificates as parts.
    pub diagram: VerificationReport,
    pub coaction: Result<CoactionReport, String>,
    /// `α_z` for `z ∈ {1, −1, i, e^{2πi/7}}`.
    pub gauge: Result<Vec<GaugeReport>, String>,
}

impl GraphCaseResult {
    pub fn passed(&self, tol: f64) -> bool {
        self.diagram.passed
            && self.coaction.as_ref().is_ok_and(|c| c.passed(tol))
            && self.gauge.as_ref().is_ok_and(|g| g.iter().all(|r| r.passed))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupoidCaseResult {
    pub index: usize,
    pub instance: String,
    /// Carries the `Ψ` and `Φ` certificates as parts.
    pub full: VerificationReport,
    pub expectations: Result<ExpectationReport, String>,
    pub stable: Result<EquivalenceReport, String>,
    pub kernel: Result<EquivalenceReport, String>,
}

impl GroupoidCaseResult {
    pub fn passed(&self, tol: f64) -> bool {
        self.full.passed
            && self.expectations.as_ref().is_ok_and(|e| e.passed(tol))
            && self.stable.as_ref().is_ok_and(|e| e.passed)
            && self.kernel.as_ref().is_ok_and(|e| e.passed)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeCaseResult {
    pub index: usize,
    pub instance: String,
    pub report: VerificationReport,
}

fn duality_report(
    instance: &str,
    theorem: &str,
    res: Result<IsomorphismCertificate, DualityError>,
    cfg: &Config,
) -> VerificationReport {
    VerificationReport::new(instance, theorem, cfg).from_outcome(res)
}

pub fn gauge_parameters() -> Vec<C64> {
    vec![
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 7.0),
    ]
}

pub fn run_graph_case(case: &GraphCase, cfg: &Config) -> GraphCaseResult {
    let instance = case.describe();
    let start = Instant::now();
    let diagram = duality_report(
        &instance,
        "regular diagram (eqvt-iso, direct-iso)",
        certify_regular_diagram(&case.graph, &case.group, &case.labeling, cfg),
        cfg,
    )
    .timed(start);
    let fam = ck_representation(&case.graph).map_err(|e| e.to_string());
    let coaction = fam
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|f| coaction(f, &case.group, &case.labeling, cfg).map(|rc| rc.report).map_err(|e| e.to_string()));
    let gauge = fam.and_then(|f| {
        gauge_parameters().into_iter().map(|z| gauge_check(&f, z, cfg).map_err(|e| e.to_string())).collect()
    });
    GraphCaseResult { index: case.index, instance, diagram, coaction, gauge }
}

pub fn run_free_case(case: &GraphCase, cfg: &Config) -> FreeCaseResult {
    let sk = skew_product(&case.graph, &case.group, &case.labeling);
    let instance = format!("free translation action on the skew product of {}", case.describe());
    let start = Instant::now();
    let res = translation_action(&sk, &case.group)
        .map_err(DualityError::from)
        .and_then(|a| certify_free_action(&sk.graph, &a, cfg));
    let report = duality_report(&instance, "free action (Gross–Tucker)", res, cfg).timed(start);
    FreeCaseResult { index: case.index, instance, report }
}

pub fn run_groupoid_case(case: &GroupoidCase, cfg: &Config) -> GroupoidCaseResult {
    let instance = case.describe();
    let (q, c) = (&case.groupoid, &case.cocycle);
    let start = Instant::now();
    let base = VerificationReport::new(&instance, "full-gpd (gpd-iso, semi-cross)", cfg);
    let full = base.from_outcome(certify_full_gpd(q, c, cfg)).timed(start);
    let expectations = skew_product_groupoid(q, c)
        .and_then(|sk| expectations_and_norm_identities(&sk.groupoid, &sk.beta, cfg))
        .map_err(|e| e.to_string());
    let equiv = |kind| certify_equivalence(kind, q, c, cfg).map(|(_, r)| r).map_err(|e| e.to_string());
    GroupoidCaseResult {
        index: case.index,
        instance,
        full,
        expectations,
        stable: equiv(EquivalenceKind::Stable),
        kernel: equiv(EquivalenceKind::Kernel),
    }
}

/// How many instances of each family to generate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SuiteSize {
    pub graph: usize,
    pub groupoid: usize,
    pub free: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        SuiteSize { graph: 50, groupoid: 30, free: 20 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub tol: f64,
    pub graph: Vec<GraphCaseResult>,
    pub groupoid: Vec<GroupoidCaseResult>,
    pub free: Vec<FreeCaseResult>,
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn counts(&self) -> [(usize, usize); 3] {
        let tol = self.tol;
        [
            (self.graph.iter().filter(|r| r.passed(tol)).count(), self.graph.len()),
            (self.groupoid.iter().filter(|r| r.passed(tol)).count(), self.groupoid.len()),
            (self.free.iter().filter(|r| r.report.passed).count(), self.free.len()),
        ]
    }

    pub fn passed(&self) -> bool {
        self.counts().iter().all(|(p, n)| p == n)
    }

    pub fn summary(&self) -> String {
        let [g, q, f] = self.counts();
        format!(
            "seed {}: graph {}/{} pass, groupoid {}/{} pass, free action {}/{} pass",
            self.seed, g.0, g.1, q.0, q.1, f.0, f.1
        )
    }
}

/// Independent seed streams for the three families.
pub fn family_seeds(seed: u64) -> [u64; 3] {
    [seed, seed ^ 0x6770_6f69_6473, seed ^ 0x6672_6565]
}

pub fn run_suite(seed: u64, size: SuiteSize, cfg: &Config) -> SuiteReport {
    let start = Instant::now();
    let caps = SuiteCaps::from_config(cfg);
    let [s_graph, s_gpd, s_free] = family_seeds(seed);
    let cfg = Config { seed, ..*cfg };
    let graph_in = graph_cases(s_graph, size.graph, &caps);
    let gpd_in = groupoid_cases(s_gpd, size.groupoid, &caps);
    let free_in = graph_cases(s_free, size.free, &caps);
    let graph = graph_in.par_iter().map(|c| run_graph_case(c, &cfg)).collect();
    let groupoid = gpd_in.par_iter().map(|c| run_groupoid_case(c, &cfg)).collect();
    let free = free_in.par_iter().map(|c| run_free_case(c, &cfg)).collect();
    SuiteReport { seed, tol: cfg.tol, graph, groupoid, free, wall_time_ms: start.elapsed().as_secs_f64() * 1e3 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_cases_respect_caps() {
        let cfg = Config::default();
        let caps = SuiteCaps::from_config(&cfg);
        for c in graph_cases(3, 12, &caps) {
            assert!(c.graph.is_acyclic());
            assert!(c.graph.num_vertices() <= 8 && c.graph.num_edges() <= 12);
            let n = c.group.order();
            assert!(enumerate_sink_paths(&c.graph).unwrap().len() * n * n <= caps.max_ambient);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let caps = SuiteCaps::from_config(&Config::default());
        let a: Vec<String> = graph_cases(9, 5, &caps).iter().map(GraphCase::describe).collect();
        let b: Vec<String> = graph_cases(9, 5, &caps).iter().map(GraphCase::describe).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn groupoid_cases_respect_caps() {
        let caps = SuiteCaps::from_config(&Config::default());
        for c in groupoid_cases(5, 10, &caps) {
            assert!(c.groupoid.num_units() <= 6 && c.groupoid.num_arrows() <= 24);
            assert_eq!(c.groupoid.orbits().len(), c.components.len());
        }
    }

    #[test]
    fn random_cocycle_on_isotropy() {
        let q = FiniteGroupoid::pair_with_isotropy(2, &FiniteGroup::cyclic(2).unwrap()).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            random_cocycle(&q, &g, &mut rng).unwrap();
        }
    }
}
