//! `skewcert`: build skew products and certify crossed-product isomorphisms
//! from JSON descriptors.

mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use input::{InputError, LoadedGraph, LoadedGroupoid};
use skewcert::descriptors::{groupoid_descriptor, GraphDescriptor};
use skewcert::duality::{certify_direct_iso, certify_eqvt_iso, certify_free_action, certify_regular_diagram};
use skewcert::graphalg::{check_ck_relations, ck_representation};
use skewcert::graphs::{
    convention_iso, find_isomorphism, quotient_and_gross_tucker, skew_product, translation_action, DirectedGraph,
    GraphAction,
};
use skewcert::groupoids::{
    bimodule_inner_products, certify_equivalence, certify_full_gpd, certify_gpd_iso, certify_semi_cross,
    kernel_embedding_check, semidirect_product, skew_product_groupoid, ConvolutionElement, EquivalenceKind,
    FiniteGroupoid, GroupoidAction,
};
use skewcert::groups::FiniteGroup;
use skewcert::matalg::{wedderburn_signature, Config};
use skewcert::report::VerificationReport;
use skewcert::suite::{run_suite, SuiteReport, SuiteSize};

#[derive(Parser)]
#[command(
    name = "skewcert",
    version,
    about = "Skew products, coaction crossed products and groupoid algebras, certified at finite scale"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Entrywise tolerance for matrix comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized sub-steps and suite generation.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Print the report as JSON instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    /// Largest ambient matrix size accepted.
    #[arg(long = "max-dim", global = true, default_value_t = 256)]
    max_dim: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Graph constructions.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Graph algebras.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Certifications.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Groupoid constructions.
    #[command(subcommand)]
    Gpd(GpdCmd),
    /// Randomized suites.
    #[command(subcommand)]
    Suite(SuiteCmd),
    /// Rewrites a skew product in another customary convention.
    Convert(ConvertArgs),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// `E ×_c G` from a labeled graph.
    Skew(GraphIn),
    /// `F/G` with its labeling.
    Quotient(ActionIn),
    /// `F ≅ (F/G) ×_c G`, with the isomorphism.
    GrossTucker(ActionIn),
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// The Cuntz–Krieger representation on sink-bound paths.
    Ck(GraphOnly),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// `C*(E ×_c G) ≅ C*(E) ⋊_δ G`, equivariantly.
    EqvtIso(GraphIn),
    /// `C*(E ×_c G) ⋊_γ G ≅ C*(E) ⊗ M_G`.
    DirectIso(GraphIn),
    /// `C*(F) ⋊ G ≅ C*(F/G) ⊗ M_G` for a free action.
    FreeAction(ActionIn),
    /// The duality diagram through the double crossed product.
    Diagram(GraphIn),
    /// `C*(Q) ⋊_δ G ≅ C*(Q ×_c G)`.
    GpdIso(GpdIsoIn),
    /// `C*(R ⋊ G) ≅ C*(R) ⋊_β G`.
    SemiCross(GpdActionIn),
    /// Equivalence bimodules, exhaustively.
    Equivalence(EquivalenceIn),
    /// Inner products on the bimodule over `N = c⁻¹(e)` and the embedding `C*(N) → C*(Q)`.
    Bimodule(GpdIn),
}

#[derive(Subcommand)]
enum GpdCmd {
    /// `Q ×_c G`.
    Skew(GpdIn),
    /// `R ⋊ G`.
    Semidirect(GpdActionIn),
}

#[derive(Subcommand)]
enum SuiteCmd {
    /// Runs the graph, groupoid and free-action families.
    Run(SuiteIn),
}

#[derive(Args)]
struct GraphOnly {
    /// Graph descriptor.
    #[arg(short = 'g', long)]
    graph: PathBuf,
}

#[derive(Args)]
struct GraphIn {
    /// Graph descriptor; every edge carries a label.
    #[arg(short = 'g', long)]
    graph: PathBuf,
    /// Group descriptor, or one of trivial, z2, z3, z4, klein.
    #[arg(short = 'G', long)]
    group: PathBuf,
    /// Also write the constructed descriptor here.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ActionIn {
    /// Graph `F`. Without `--action` its labels define `E`, and `F = E ×_c G` with translation.
    #[arg(short = 'g', long)]
    graph: PathBuf,
    #[arg(short = 'G', long)]
    group: PathBuf,
    /// Action descriptor on the graph.
    #[arg(short = 'a', long)]
    action: Option<PathBuf>,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GpdIn {
    /// Groupoid descriptor with a cocycle.
    #[arg(short = 'q', long)]
    groupoid: PathBuf,
    #[arg(short = 'G', long)]
    group: PathBuf,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GpdIsoIn {
    #[command(flatten)]
    gpd: GpdIn,
    /// Also certify `C*(Q ×_c G) ⋊_β G ≅ C*(Q) ⊗ M_G`.
    #[arg(long)]
    full: bool,
}

#[derive(Args)]
struct GpdActionIn {
    /// Groupoid `R`. Without `--action` its cocycle defines `Q`, and `R = Q ×_c G` with `β`.
    #[arg(short = 'q', long)]
    groupoid: PathBuf,
    #[arg(short = 'G', long)]
    group: PathBuf,
    /// Action descriptor on the arrows.
    #[arg(short = 'a', long)]
    action: Option<PathBuf>,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivalenceIn {
    #[command(flatten)]
    gpd: GpdIn,
    /// Which bimodule; both when omitted.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<EquivalenceKind>,
}

fn parse_kind(s: &str) -> Result<EquivalenceKind, String> {
    s.parse()
}

#[derive(Args)]
struct SuiteIn {
    /// Graph instances.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = 30)]
    groupoid_cases: usize,
    #[arg(long, default_value_t = 20)]
    free_cases: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// `s(f,t) = (s(f), c(f)t)`, `r(f,t) = (r(f), t)`.
    Skew,
    /// `s(f,t) = (s(f), t)`, `r(f,t) = (r(f), t c(f))`.
    GrossTucker,
    /// `s(t,f) = (t, s(f))`, `r(t,f) = (t c(f), r(f))`.
    KumjianPask,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    input: GraphIn,
    #[arg(long, value_enum)]
    to: Convention,
}

/// A finished command: the report, extra summary lines, and the
/// constructed descriptor if any.
#[allow(clippy::large_enum_variant)]
enum Outcome {
    Single { report: VerificationReport, lines: Vec<String>, artifact: Option<(Value, Option<PathBuf>)> },
    Suite(SuiteReport),
}

impl Outcome {
    fn check(report: VerificationReport) -> Self {
        Outcome::Single { report, lines: Vec::new(), artifact: None }
    }

    fn built(report: VerificationReport, lines: Vec<String>, artifact: impl Serialize, out: &Option<PathBuf>) -> Self {
        let value = serde_json::to_value(artifact).expect("descriptors serialize");
        Outcome::Single { report, lines, artifact: Some((value, out.clone())) }
    }
}

fn config(o: &Opts) -> Config {
    Config { tol: o.tol, max_dim: o.max_dim, seed: o.seed, ..Config::default() }
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn labeled(a: &GraphIn) -> Result<(LoadedGraph, FiniteGroup, skewcert::groups::Labeling), InputError> {
    let e = input::graph(&a.graph)?;
    let g = input::group(&a.group)?;
    let c = e.labeling(&g)?;
    Ok((e, g, c))
}

fn acyclic_labeled(a: &GraphIn) -> Result<(LoadedGraph, FiniteGroup, skewcert::groups::Labeling), InputError> {
    let t = labeled(a)?;
    t.0.require_acyclic()?;
    Ok(t)
}

/// `F` and the action on it: from `--action`, or translation on `E ×_c G`.
fn graph_with_action(a: &ActionIn) -> Result<(String, DirectedGraph, GraphAction), InputError> {
    let loaded = input::graph(&a.graph)?;
    let g = input::group(&a.group)?;
    match &a.action {
        Some(path) => {
            let action = loaded.action(path, &g)?;
            Ok((format!("{} with action {}", loaded.name(), stem(path)), loaded.graph, action))
        }
        None => {
            let c = loaded.labeling(&g)?;
            let sk = skew_product(&loaded.graph, &g, &c);
            let action = translation_action(&sk, &g).map_err(|e| InputError(e.to_string()))?;
            Ok((format!("{} ×_c {} with translation", loaded.name(), stem(&a.group)), sk.graph, action))
        }
    }
}

fn require_free(f: &DirectedGraph, action: &GraphAction, path: &Path) -> Result<(), InputError> {
    match action.fixed_cell(f) {
        None => Ok(()),
        Some((t, cell)) => {
            Err(InputError(format!("{}: action is not free: {} fixes {cell}", path.display(), action.group.name(t))))
        }
    }
}

/// `R` and the action on it: from `--action`, or `β` on `Q ×_c G`.
fn groupoid_with_action(a: &GpdActionIn) -> Result<(String, FiniteGroupoid, GroupoidAction), InputError> {
    let loaded = input::groupoid(&a.groupoid)?;
    let g = input::group(&a.group)?;
    match &a.action {
        Some(path) => {
            let action = loaded.action(path, &g)?;
            Ok((format!("{} with action {}", loaded.name(), stem(path)), loaded.groupoid, action))
        }
        None => {
            if !loaded.has_cocycle() {
                return Err(InputError(format!("{}: no cocycle and no --action given", loaded.path.display())));
            }
            let c = loaded.cocycle(&g)?;
            let sk = skew_product_groupoid(&loaded.groupoid, &c).map_err(|e| InputError(e.to_string()))?;
            Ok((format!("{} ×_c {} with β", loaded.name(), stem(&a.group)), sk.groupoid, sk.beta))
        }
    }
}

fn groupoid_cocycle(a: &GpdIn) -> Result<(LoadedGroupoid, skewcert::groupoids::Cocycle), InputError> {
    let q = input::groupoid(&a.groupoid)?;
    let g = input::group(&a.group)?;
    let c = q.cocycle(&g)?;
    Ok((q, c))
}

fn instance(name: &str, group: &Path) -> String {
    format!("{name} over {}", stem(group))
}

fn graph_lines(what: &str, g: &DirectedGraph) -> Vec<String> {
    vec![format!("{what}: {} vertices, {} edges", g.num_vertices(), g.num_edges())]
}

fn run(cmd: &Cmd, cfg: &Config) -> Result<Outcome, InputError> {
    Ok(match cmd {
        Cmd::Graph(GraphCmd::Skew(a)) => {
            let (e, g, c) = labeled(a)?;
            let sk = skew_product(&e.graph, &g, &c);
            let mut passed = true;
            let mut lines = graph_lines("E ×_c G", &sk.graph);
            if g.order() == 1 {
                let iso = find_isomorphism(&sk.graph, &e.graph).ok().flatten();
                passed = iso.is_some();
                lines.push(format!("trivial group: isomorphic to the input: {passed}"));
            }
            let d = GraphDescriptor::from_graph(&sk.graph, None);
            let report = VerificationReport::new(instance(&e.name(), &a.group), "graph skew", cfg)
                .with_details(passed, &json!({ "graph": &d }));
            Outcome::built(report, lines, d, &a.out)
        }
        Cmd::Graph(GraphCmd::Quotient(a)) | Cmd::Graph(GraphCmd::GrossTucker(a)) => {
            let gross_tucker = matches!(cmd, Cmd::Graph(GraphCmd::GrossTucker(_)));
            let (name, f, action) = graph_with_action(a)?;
            let gt = quotient_and_gross_tucker(&f, &action)
                .map_err(|e| InputError(format!("{}: {e}", a.action.as_ref().unwrap_or(&a.graph).display())))?;
            let g = &action.group;
            let quotient = GraphDescriptor::from_graph(&gt.quotient, Some((&gt.labeling, g)));
            let mut lines = graph_lines("F/G", &gt.quotient);
            let details = if gross_tucker {
                let vertices: serde_json::Map<String, Value> = (0..f.num_vertices())
                    .map(|v| (f.vertex_name(v).to_string(), json!(gt.skew.graph.vertex_name(gt.iso.vertex_map[v]))))
                    .collect();
                let edges: serde_json::Map<String, Value> = (0..f.num_edges())
                    .map(|e| (f.edge_name(e).to_string(), json!(gt.skew.graph.edge_name(gt.iso.edge_map[e]))))
                    .collect();
                lines.push(format!("F ≅ (F/G) ×_c G on all {} cells", f.num_vertices() + f.num_edges()));
                json!({ "quotient": &quotient, "iso": { "vertices": vertices, "edges": edges } })
            } else {
                json!({ "quotient": &quotient })
            };
            let theorem = if gross_tucker { "graph gross-tucker" } else { "graph quotient" };
            let report = VerificationReport::new(name, theorem, cfg).with_details(true, &details);
            Outcome::built(report, lines, quotient, &a.out)
        }
        Cmd::Algebra(AlgebraCmd::Ck(a)) => {
            let e = input::graph(&a.graph)?;
            e.require_acyclic()?;
            let base = VerificationReport::new(e.name(), "algebra ck", cfg);
            let fam = ck_representation(&e.graph).map_err(|err| InputError(format!("{}: {err}", e.path.display())))?;
            let relations = check_ck_relations(&fam.graph, &fam.s, &fam.p, cfg.tol);
            let expected = fam.expected_algebra_dim();
            let report = match fam.algebra(cfg).and_then(|alg| Ok((alg.dim(), wedderburn_signature(&alg, cfg)?))) {
                Ok((dim, sig)) => {
                    let passed = relations.passed && relations.nondegenerate && dim == expected;
                    let mut r = base.with_details(
                        passed,
                        &json!({ "paths": fam.dim(), "dim": dim, "expected_dim": expected, "signature": &sig, "relations": &relations }),
                    );
                    r.dims = Some((dim, expected));
                    r.signatures = Some((sig.clone(), sig));
                    if !passed {
                        r.failure =
                            Some(format!("relations hold: {}, dim {dim} vs Σ n_w² = {expected}", relations.passed));
                    }
                    r
                }
                Err(err) => base.with_failure(err.to_string(), None),
            };
            let lines = vec![format!("{} sink-bound paths, Σ n_w² = {expected}", fam.dim())];
            Outcome::Single { report, lines, artifact: None }
        }
        Cmd::Verify(v) => verify(v, cfg)?,
        Cmd::Gpd(GpdCmd::Skew(a)) => {
            let (q, c) = groupoid_cocycle(a)?;
            let sk =
                skew_product_groupoid(&q.groupoid, &c).map_err(|e| InputError(format!("{}: {e}", q.path.display())))?;
            let d = groupoid_descriptor(&sk.groupoid, None);
            let lines =
                vec![format!("Q ×_c G: {} units, {} arrows", sk.groupoid.num_units(), sk.groupoid.num_arrows())];
            let report = VerificationReport::new(instance(&q.name(), &a.group), "gpd skew", cfg).with_details(true, &d);
            Outcome::built(report, lines, d, &a.out)
        }
        Cmd::Gpd(GpdCmd::Semidirect(a)) => {
            let (name, r, action) = groupoid_with_action(a)?;
            let sd = semidirect_product(&r, &action).map_err(|e| InputError(e.to_string()))?;
            let d = groupoid_descriptor(&sd.groupoid, None);
            let lines = vec![format!("R ⋊ G: {} units, {} arrows", sd.groupoid.num_units(), sd.groupoid.num_arrows())];
            let report = VerificationReport::new(name, "gpd semidirect", cfg).with_details(true, &d);
            Outcome::built(report, lines, d, &a.out)
        }
        Cmd::Suite(SuiteCmd::Run(a)) => {
            let size = SuiteSize { graph: a.cases, groupoid: a.groupoid_cases, free: a.free_cases };
            Outcome::Suite(run_suite(cfg.seed, size, cfg))
        }
        Cmd::Convert(a) => {
            let (e, g, c) = labeled(&a.input)?;
            let isos = convention_iso(&e.graph, &c, &g).map_err(|err| InputError(err.to_string()))?;
            let (graph, iso) = match a.to {
                Convention::Skew => (&isos.skew.graph, None),
                Convention::GrossTucker => (&isos.gross_tucker, Some(&isos.psi)),
                Convention::KumjianPask => (&isos.kumjian_pask, Some(&isos.phi)),
            };
            let sk = &isos.skew.graph;
            let to_skew = iso.map(|iso| {
                let mut m = serde_json::Map::new();
                for v in 0..graph.num_vertices() {
                    m.insert(graph.vertex_name(v).to_string(), json!(sk.vertex_name(iso.vertex_map[v])));
                }
                for f in 0..graph.num_edges() {
                    m.insert(graph.edge_name(f).to_string(), json!(sk.edge_name(iso.edge_map[f])));
                }
                m
            });
            let d = GraphDescriptor::from_graph(graph, None);
            let report = VerificationReport::new(instance(&e.name(), &a.input.group), "convert", cfg)
                .with_details(true, &json!({ "graph": &d, "to_skew": to_skew }));
            Outcome::built(report, graph_lines("converted graph", graph), d, &a.input.out)
        }
    })
}

fn verify(v: &VerifyCmd, cfg: &Config) -> Result<Outcome, InputError> {
    let start = Instant::now();
    Ok(match v {
        VerifyCmd::EqvtIso(a) | VerifyCmd::DirectIso(a) | VerifyCmd::Diagram(a) => {
            let (e, g, c) = acyclic_labeled(a)?;
            let (theorem, res) = match v {
                VerifyCmd::EqvtIso(_) => ("eqvt-iso", certify_eqvt_iso(&e.graph, &g, &c, cfg)),
                VerifyCmd::DirectIso(_) => ("direct-iso", certify_direct_iso(&e.graph, &g, &c, cfg)),
                _ => ("diagram", certify_regular_diagram(&e.graph, &g, &c, cfg)),
            };
            Outcome::check(
                VerificationReport::new(instance(&e.name(), &a.group), theorem, cfg).from_outcome(res).timed(start),
            )
        }
        VerifyCmd::FreeAction(a) => {
            let (name, f, action) = graph_with_action(a)?;
            require_free(&f, &action, a.action.as_ref().unwrap_or(&a.graph))?;
            if let Some(cycle) = f.find_cycle() {
                let names: Vec<&str> = cycle.iter().map(|&e| f.edge_name(e)).collect();
                return Err(InputError(format!(
                    "{}: graph has a cycle through edges {}",
                    a.graph.display(),
                    names.join(", ")
                )));
            }
            let res = certify_free_action(&f, &action, cfg);
            Outcome::check(VerificationReport::new(name, "free-action", cfg).from_outcome(res).timed(start))
        }
        VerifyCmd::GpdIso(a) => {
            let (q, c) = groupoid_cocycle(&a.gpd)?;
            let (theorem, res) = if a.full {
                ("gpd-iso --full", certify_full_gpd(&q.groupoid, &c, cfg))
            } else {
                ("gpd-iso", certify_gpd_iso(&q.groupoid, &c, cfg))
            };
            Outcome::check(
                VerificationReport::new(instance(&q.name(), &a.gpd.group), theorem, cfg).from_outcome(res).timed(start),
            )
        }
        VerifyCmd::SemiCross(a) => {
            let (name, r, action) = groupoid_with_action(a)?;
            let res = certify_semi_cross(&r, &action, cfg);
            Outcome::check(VerificationReport::new(name, "semi-cross", cfg).from_outcome(res).timed(start))
        }
        VerifyCmd::Equivalence(a) => {
            let (q, c) = groupoid_cocycle(&a.gpd)?;
            let kinds = a.kind.map_or_else(|| vec![EquivalenceKind::Stable, EquivalenceKind::Kernel], |k| vec![k]);
            let mut details = serde_json::Map::new();
            let mut failures = Vec::new();
            let mut lines = Vec::new();
            for kind in kinds {
                match certify_equivalence(kind, &q.groupoid, &c, cfg) {
                    Ok((_, rep)) => {
                        lines.push(format!(
                            "{kind}: carrier {}, {} associativity triples, {}",
                            rep.bimodule.carrier,
                            rep.bimodule.associativity_triples,
                            if rep.passed { "all axioms hold" } else { "FAILED" }
                        ));
                        if !rep.passed {
                            failures.push(format!("{kind}: inner products"));
                        }
                        details.insert(kind.to_string(), serde_json::to_value(&rep).expect("report serializes"));
                    }
                    Err(e) => {
                        failures.push(format!("{kind}: {e}"));
                        details.insert(kind.to_string(), json!({ "error": e.to_string() }));
                    }
                }
            }
            let mut report = VerificationReport::new(instance(&q.name(), &a.gpd.group), "equivalence", cfg)
                .with_details(failures.is_empty(), &details);
            report.failure = (!failures.is_empty()).then(|| failures.join("; "));
            Outcome::Single { report: report.timed(start), lines, artifact: None }
        }
        VerifyCmd::Bimodule(a) => {
            let (q, c) = groupoid_cocycle(a)?;
            let base = VerificationReport::new(instance(&q.name(), &a.group), "bimodule", cfg);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let x = ConvolutionElement::random(&q.groupoid, &mut rng, |_| true);
            let y = ConvolutionElement::random(&q.groupoid, &mut rng, |_| true);
            let outcome = kernel_embedding_check(&q.groupoid, &c, cfg)
                .and_then(|k| Ok((k, bimodule_inner_products(&q.groupoid, &c, &x, &y, cfg)?.1)));
            let report = match outcome {
                Ok((k, ip)) => {
                    let passed = k.passed() && ip.passed(cfg.tol);
                    let mut r = base.with_details(passed, &json!({ "kernel_embedding": &k, "inner_products": &ip }));
                    if !passed {
                        r.failure = Some(format!(
                            "embedding passed: {}, inner products passed: {}",
                            k.passed(),
                            ip.passed(cfg.tol)
                        ));
                    }
                    r
                }
                Err(e) => base.with_failure(e.to_string(), None),
            };
            Outcome::check(report.timed(start))
        }
    })
}

fn emit(outcome: &Outcome, json: bool) -> Result<bool, InputError> {
    let mut out: Vec<String> = Vec::new();
    let passed = match outcome {
        Outcome::Single { report, lines, artifact } => {
            if let Some((value, Some(path))) = artifact {
                let text = serde_json::to_string_pretty(value).expect("descriptors serialize");
                std::fs::write(path, text + "\n").map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            }
            if json {
                out.push(serde_json::to_string_pretty(report).expect("reports serialize"));
            } else {
                out.push(report.summary());
                for l in lines {
                    out.push(format!("  {l}"));
                }
                if let Some((value, None)) = artifact {
                    out.push(serde_json::to_string_pretty(value).expect("descriptors serialize"));
                }
            }
            report.passed
        }
        Outcome::Suite(s) => {
            if json {
                out.push(serde_json::to_string_pretty(s).expect("reports serialize"));
            } else {
                out.push(format!("{} {}", if s.passed() { "PASS" } else { "FAIL" }, s.summary()));
                for r in s.graph.iter().filter(|r| !r.passed(s.tol)) {
                    out.push(format!("  graph case {}: {}", r.index, r.diagram.summary()));
                }
                for r in s.groupoid.iter().filter(|r| !r.passed(s.tol)) {
                    out.push(format!("  groupoid case {}: {}", r.index, r.full.summary()));
                }
                for r in s.free.iter().filter(|r| !r.report.passed) {
                    out.push(format!("  free case {}: {}", r.index, r.report.summary()));
                }
            }
            s.passed()
        }
    };
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all((out.join("\n") + "\n").as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(InputError(format!("stdout: {e}"))),
        _ => Ok(passed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = config(&cli.opts);
    match run(&cli.cmd, &cfg).and_then(|o| emit(&o, cli.opts.json)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
