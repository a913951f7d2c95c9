use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use skewcert::descriptors::{groupoid_cocycle, groupoid_descriptor, parse_graph, parse_groupoid, GraphDescriptor};
use skewcert::graphs::{
    convention_iso, enumerate_sink_paths, find_isomorphism, quotient_and_gross_tucker, skew_product,
    translation_action, DirectedGraph, Edge,
};
use skewcert::groupoids::{
    build_bimodule, convolution_algebra, inner_product_general, inner_product_graded, make_groupoid,
    skew_product_groupoid, Cocycle, ConvolutionElement, EquivalenceKind, FiniteGroupoid,
};
use skewcert::groups::{FiniteGroup, Labeling};
use skewcert::matalg::{wedderburn_signature, Config};
use skewcert::suite::random_cocycle;

fn group(k: usize) -> FiniteGroup {
    match k {
        0 => FiniteGroup::cyclic(2).unwrap(),
        1 => FiniteGroup::cyclic(3).unwrap(),
        2 => FiniteGroup::cyclic(4).unwrap(),
        _ => FiniteGroup::klein_four(),
    }
}

/// An acyclic graph on up to 5 vertices (edges point from lower to higher
/// index), a group, and a labeling.
fn labeled_graph() -> impl Strategy<Value = (DirectedGraph, FiniteGroup, Labeling)> {
    (2usize..=5, 0usize..4)
        .prop_flat_map(|(nv, k)| {
            let edge = (0..nv - 1).prop_flat_map(move |a| (Just(a), a + 1..nv));
            (Just(nv), Just(k), prop::collection::vec((edge, 0usize..4), 1..=6))
        })
        .prop_map(|(nv, k, raw)| {
            let g = group(k);
            let vertices = (0..nv).map(|v| format!("v{v}")).collect();
            let edges = raw
                .iter()
                .enumerate()
                .map(|(i, &((s, r), _))| Edge { name: format!("f{i}"), src: s, rng: r })
                .collect();
            let e = DirectedGraph::new(vertices, edges).unwrap();
            let values = raw.iter().map(|&(_, t)| t % g.order()).collect();
            let c = Labeling::from_values(&e, values, &g).unwrap();
            (e, g, c)
        })
}

/// A disjoint union of one or two transitive groupoids with cyclic
/// isotropy, and a random cocycle into Z2 or Z3.
fn groupoid_with_cocycle() -> impl Strategy<Value = (FiniteGroupoid, Cocycle)> {
    (prop::collection::vec((1usize..=3, 1usize..=2), 1..=2), 2usize..=3, any::<u64>()).prop_map(|(comps, m, seed)| {
        let parts: Vec<FiniteGroupoid> = comps
            .iter()
            .map(|&(n, h)| FiniteGroupoid::pair_with_isotropy(n, &FiniteGroup::cyclic(h).unwrap()).unwrap())
            .collect();
        let q = FiniteGroupoid::disjoint_union(&parts.iter().collect::<Vec<_>>()).unwrap();
        let g = FiniteGroup::cyclic(m).unwrap();
        let c = random_cocycle(&q, &g, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        (q, c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn skew_product_cells_and_incidence((e, g, c) in labeled_graph()) {
        let sk = skew_product(&e, &g, &c);
        let n = g.order();
        prop_assert_eq!(sk.graph.num_vertices(), e.num_vertices() * n);
        prop_assert_eq!(sk.graph.num_edges(), e.num_edges() * n);
        for f in 0..e.num_edges() {
            for t in g.elements() {
                let h = sk.edge(f, t);
                prop_assert_eq!(sk.graph.rng(h), sk.vertex(e.rng(f), t));
                prop_assert_eq!(sk.graph.src(h), sk.vertex(e.src(f), g.mul(c.get(f), t)));
            }
        }
    }

    #[test]
    fn sink_paths_lift_uniquely((e, g, c) in labeled_graph()) {
        let base = enumerate_sink_paths(&e).unwrap().len();
        let sk = skew_product(&e, &g, &c);
        prop_assert_eq!(enumerate_sink_paths(&sk.graph).unwrap().len(), base * g.order());
    }

    #[test]
    fn translation_is_free_and_recovers_the_base((e, g, c) in labeled_graph()) {
        let sk = skew_product(&e, &g, &c);
        let action = translation_action(&sk, &g).unwrap();
        let gt = quotient_and_gross_tucker(&sk.graph, &action).unwrap();
        prop_assert_eq!(gt.quotient.num_vertices(), e.num_vertices());
        prop_assert_eq!(gt.quotient.num_edges(), e.num_edges());
        prop_assert!(find_isomorphism(&gt.quotient, &e).unwrap().is_some());
    }

    #[test]
    fn conventions_are_isomorphic((e, g, c) in labeled_graph()) {
        let isos = convention_iso(&e, &c, &g).unwrap();
        isos.psi.verify(&isos.gross_tucker, &isos.skew.graph).unwrap();
        isos.phi.verify(&isos.kumjian_pask, &isos.skew.graph).unwrap();
    }

    #[test]
    fn graph_descriptor_round_trip((e, g, c) in labeled_graph()) {
        let d = GraphDescriptor::from_graph(&e, Some((&c, &g)));
        let back = parse_graph(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(&back, &d);
        let e2 = back.build().unwrap();
        let labels = back.labeling(&e2, &g).unwrap();
        prop_assert_eq!(labels.values(), c.values());
    }

    #[test]
    fn convolution_algebra_has_one_dimension_per_arrow((q, _c) in groupoid_with_cocycle()) {
        let cfg = Config::default();
        let alg = convolution_algebra(&q, &cfg).unwrap();
        prop_assert_eq!(alg.span.dim(), q.num_arrows());
        let sig = wedderburn_signature(&alg.span, &cfg).unwrap();
        prop_assert_eq!(sig.0.iter().map(|k| k * k).sum::<usize>(), q.num_arrows());
    }

    #[test]
    fn convolution_is_a_star_algebra((q, _c) in groupoid_with_cocycle(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [f, g, h] = [(); 3].map(|_| ConvolutionElement::random(&q, &mut rng, |_| true));
        let left = f.convolve(&q, &g).convolve(&q, &h);
        let right = f.convolve(&q, &g.convolve(&q, &h));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
        let fg_star = f.convolve(&q, &g).star(&q);
        prop_assert!(fg_star.max_abs_diff(&g.star(&q).convolve(&q, &f.star(&q))) < 1e-12);
    }

    #[test]
    fn grading_multiplies((q, c) in groupoid_with_cocycle(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &c.group;
        for s in g.elements() {
            for t in g.elements() {
                let a = ConvolutionElement::random(&q, &mut rng, |x| c.get(x) == s);
                let b = ConvolutionElement::random(&q, &mut rng, |x| c.get(x) == t);
                let ab = a.convolve(&q, &b);
                let st = g.mul(s, t);
                prop_assert!(q.arrows().all(|x| c.get(x) == st || ab.coeffs[x].norm() < 1e-14));
            }
        }
    }

    #[test]
    fn skew_groupoid_shape_and_translation((q, c) in groupoid_with_cocycle()) {
        let sk = skew_product_groupoid(&q, &c).unwrap();
        let g = &c.group;
        let r = &sk.groupoid;
        prop_assert_eq!(r.num_units(), q.num_units() * g.order());
        prop_assert_eq!(r.num_arrows(), q.num_arrows() * g.order());
        for k in r.arrows() {
            let (x, s) = sk.split(k);
            prop_assert_eq!(sk.split(r.src(k)), (q.src(x), s));
            prop_assert_eq!(sk.split(r.rng(k)), (q.rng(x), g.mul(c.get(x), s)));
            for t in g.elements() {
                prop_assert_eq!(sk.split(sk.beta.act(t, k)), (x, g.mul(s, g.inv(t))));
            }
        }
        for t in g.elements() {
            for k in r.arrows() {
                for &l in r.with_range(r.src(k)) {
                    let kl = r.mul(k, l).unwrap();
                    prop_assert_eq!(r.mul(sk.beta.act(t, k), sk.beta.act(t, l)), Some(sk.beta.act(t, kl)));
                }
            }
        }
    }

    #[test]
    fn inner_product_formulas_agree((q, c) in groupoid_with_cocycle(), seed in any::<u64>()) {
        let b = build_bimodule(EquivalenceKind::Kernel, &q, &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ConvolutionElement::random(&q, &mut rng, |_| true);
        let g = ConvolutionElement::random(&q, &mut rng, |_| true);
        let (general, spread) = inner_product_general(&b, &f, &g);
        let (graded, off) = inner_product_graded(&q, &c, &f, &g);
        prop_assert!(spread < 1e-12);
        prop_assert!(general.max_abs_diff(&graded) < 1e-9);
        prop_assert!(off.is_finite());
    }

    #[test]
    fn groupoid_descriptor_round_trip((q, c) in groupoid_with_cocycle()) {
        let json = serde_json::to_string(&groupoid_descriptor(&q, Some(&c))).unwrap();
        let spec = parse_groupoid(&json).unwrap();
        let q2 = make_groupoid(&spec).unwrap();
        prop_assert_eq!(&q2, &q);
        let c2 = groupoid_cocycle(&spec, &q2, &c.group).unwrap();
        prop_assert_eq!(c2.values(), c.values());
    }
}
