use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kmatch_core::complex::{independence_complex, matching_complex, SimplicialComplex};
use kmatch_core::graph::{decomposes_into_claws, find_claw_units, families, Graph, GraphBuilder};
use kmatch_core::homology::{betti, betti_direct};
use kmatch_core::morse::{
    claw_induced_matching, euler_consistent, morse_vector, toggle_sequence, verify_acyclic,
};
use kmatch_core::predictions::*;

fn graph_from(nv: usize, pairs: &[(usize, usize)], name: impl Fn(usize) -> String) -> Graph {
    let mut b = GraphBuilder::new();
    for v in 0..nv {
        b.vertex(name(v));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(u, v) in pairs {
        let (u, v) = (u % nv, v % nv);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            b.edge(name(u), name(v));
        }
    }
    b.build().unwrap()
}

fn arb_edges(max_v: usize, max_e: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_v).prop_flat_map(move |nv| (Just(nv), prop::collection::vec((0..nv, 0..nv), 0..=max_e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bridge_edge_forces_acyclic_m2(seed in any::<u64>()) {
        let g = random_bridge_graph(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        prop_assert!(bridge_edge(&g).is_some());
        prop_assert_eq!(predict_graph(&g, 2), Prediction::Contractible);
        prop_assert!(betti(&matching_complex(&g, 2).unwrap()).unwrap().is_acyclic());
    }

    #[test]
    fn clawed_graphs_are_spheres(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_cubic_base(&mut rng, 4).claw().unwrap();
        prop_assert!(decomposes_into_claws(&g));
        let c = check_clawed_graph(&g, &mut rng).unwrap();
        prop_assert!(c.complete);
        prop_assert_eq!(c.vector.total(), 1);
        prop_assert_eq!(c.vector.get(c.predicted_dimension), 1);
        prop_assert_eq!(predict_graph(&g, 2).profile(), Some(c.profile));
    }

    #[test]
    fn claw_matching_vector_ignores_toggle_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_cubic_base(&mut rng, 4).claw().unwrap();
        let cx = matching_complex(&g, 2).unwrap();
        let mut t = random_toggles(&g, &mut rng);
        let a = morse_vector(&cx, &claw_induced_matching(&g, &cx, &t).unwrap().matching).unwrap();
        t.shuffle(&mut rng);
        let b = morse_vector(&cx, &claw_induced_matching(&g, &cx, &t).unwrap().matching).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn homology_ignores_vertex_names((nv, pairs) in arb_edges(6, 9), shift in 1usize..5) {
        let g = graph_from(nv, &pairs, |v| format!("v{v}"));
        let h = graph_from(nv, &pairs, |v| format!("w{}", (v + shift) % nv));
        for k in 1..=2 {
            let a = betti(&matching_complex(&g, k).unwrap()).unwrap();
            let b = betti(&matching_complex(&h, k).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn reduced_and_direct_homology_agree((nv, pairs) in arb_edges(6, 9), k in 1usize..=2) {
        let g = graph_from(nv, &pairs, |v| v.to_string());
        let cx = matching_complex(&g, k).unwrap();
        let p = betti(&cx).unwrap();
        prop_assert_eq!(&p, &betti_direct(&cx).unwrap());
        prop_assert_eq!(p.euler(), cx.reduced_euler());
    }

    #[test]
    fn toggle_sequences_satisfy_morse_inequalities(
        (nv, pairs) in arb_edges(6, 9),
        k in 1usize..=2,
        order in prop::collection::vec(0usize..64, 0..12),
    ) {
        let g = graph_from(nv, &pairs, |v| v.to_string());
        let cx = matching_complex(&g, k).unwrap();
        let n = cx.vertex_count().max(1);
        let vs: Vec<usize> = order.iter().map(|&i| i % n).filter(|&i| i < cx.vertex_count()).collect();
        let m = toggle_sequence(&cx, &vs);
        prop_assert!(verify_acyclic(&cx, &m).unwrap().is_acyclic());
        let v = morse_vector(&cx, &m).unwrap();
        prop_assert!(v.dominates(&betti(&cx).unwrap()));
        prop_assert!(euler_consistent(&cx, &m, &v));
    }

    #[test]
    fn line_graph_independence_is_m1((nv, pairs) in arb_edges(6, 8)) {
        let g = graph_from(nv, &pairs, |v| v.to_string());
        let a = matching_complex(&g, 1).unwrap();
        let b = independence_complex(&g.line_graph()).unwrap();
        prop_assert!(a.same_faces_as(&b));
    }

    #[test]
    fn complex_json_round_trip((nv, pairs) in arb_edges(6, 8)) {
        let g = graph_from(nv, &pairs, |v| v.to_string());
        let cx = matching_complex(&g, 2).unwrap();
        let back = SimplicialComplex::from_json(&cx.to_json()).unwrap();
        prop_assert!(cx.same_faces_as(&back));
        let g2 = Graph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(g2.edge_labels(), g.edge_labels());
    }

    #[test]
    fn sequence_ends_in_a_cone((nv, pairs) in arb_edges(5, 7)) {
        let g = graph_from(nv, &pairs, |v| v.to_string());
        let s = k_matching_sequence(&g).unwrap();
        prop_assert!(s.last_acyclic);
        if g.edge_count() > 0 {
            let want = g.edges().iter().map(|e| g.degree(e.u).max(g.degree(e.v))).min().unwrap();
            prop_assert_eq!(s.entries.len(), want);
            prop_assert!(s.cone_edge.is_some());
        }
    }

    #[test]
    fn caterpillar_tables_are_consistent(m in 2usize..7, depth in 1usize..7) {
        let t = caterpillar_tables(m, depth);
        for i in 0..depth {
            prop_assert_eq!(t.alpha[i].iter().sum::<i128>(), t.a_total[i]);
            prop_assert_eq!(t.beta[i].iter().sum::<i128>(), t.b_total[i]);
            if m >= 3 {
                prop_assert!(t.a_total[i] > 0 && t.b_total[i] > 0);
            }
        }
        let (bd, m2) = bd_m2_towers(m, depth);
        prop_assert_eq!(bd.total() as i128, t.a_total[depth - 1]);
        prop_assert_eq!(m2.total() as i128, t.b_total[depth - 1]);
        let r = compare_closed_forms(&t);
        prop_assert!(r.a_minus_sign_agrees && r.b_derived_form_agrees && r.bivariate_matches_bd_table);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn maximize_sites_beats_random_toggles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let script = random_script(&mut rng, 2, 6);
        let r = maximize_sites(&script).unwrap();
        prop_assert!(r.analysis.site_count <= r.claws);
        let g = kmatch_core::graph::build_clawed_nonseparable(&script).unwrap().graph;
        let leaf_claws = kmatch_core::graph::leaf_claws(&g);
        for (c, e) in &r.toggles {
            if let Some(u) = leaf_claws.iter().find(|u| &u.center == c) {
                let ci = g.vertex_index(&u.center).unwrap();
                let ei = g.edge_by_label(e).unwrap();
                let other = if g.edges()[ei].u == ci { g.edges()[ei].v } else { g.edges()[ei].u };
                // a leaf-claw keeps a leaf toggle unless it was paired
                let paired = r.paired.iter().flatten().any(|(a, b)| a == c || b == c);
                prop_assert!(paired || g.is_leaf(other));
            }
        }
        for _ in 0..50 {
            let t = random_toggles(&g, &mut rng);
            let a = attaching_site_analysis(&g, &t).unwrap();
            prop_assert!(a.site_count <= r.analysis.site_count, "{:?} beats {:?}", t, r.toggles);
        }
    }
}

#[test]
fn family_predictions_match_homology() {
    let cases: &[(&str, &[usize])] = &[
        ("clawed-path", &[0]),
        ("clawed-path", &[1]),
        ("clawed-path", &[2]),
        ("clawed-cycle", &[3]),
        ("whiskered-cycle", &[3]),
        ("whiskered-cycle", &[4]),
        ("whiskered-cycle", &[5]),
        ("whiskered-cycle", &[6]),
        ("cycle-M1", &[5]),
        ("cycle-M1", &[6]),
        ("cycle-M1", &[7]),
        ("wheel-M1", &[7]),
        ("wheel-M2", &[4]),
        ("wheel-M2", &[6]),
        ("caterpillar-M1", &[2, 4]),
        ("caterpillar-M2", &[2, 4]),
        ("caterpillar-BD", &[3, 2]),
        ("five-edge-tree", &[]),
    ];
    for (f, p) in cases {
        let (_, cx) = family_complex(f, p).unwrap();
        assert_eq!(predict(f, p).profile(), Some(betti(&cx).unwrap()), "{f} {p:?}");
    }
}

#[test]
fn jonsson_examples() {
    let cp0 = jonsson_gap(&families::clawed_path(0)).unwrap();
    assert_eq!((cp0.nu, cp0.observed_dimension), (0.0, Some(1)));
    let cc3 = jonsson_gap(&families::clawed_cycle(3).unwrap()).unwrap();
    assert_eq!((cc3.nu, cc3.observed_dimension), (2.0, Some(5)));
    assert_eq!(cc3.claw_sphere_dimension, 5.0);
    assert_eq!(cc3.stated_dimension, 3.0);
}

#[test]
fn wheel_sequences() {
    let w4 = k_matching_sequence(&families::wheel(4).unwrap()).unwrap();
    let totals: Vec<u64> = w4.entries.iter().map(|e| e.profile.total()).collect();
    assert_eq!(totals, [2, 3, 0]);
    let w5 = k_matching_sequence(&families::wheel(5).unwrap()).unwrap();
    let p: Vec<_> = w5.entries.iter().map(|e| e.profile.clone()).collect();
    assert_eq!(p[0], kmatch_core::BettiProfile::from_betti(&[(1, 3)]));
    assert_eq!(p[1], kmatch_core::BettiProfile::from_betti(&[(3, 2)]));
    assert!(p[2].is_acyclic());
    assert_eq!(k_matching_sequence(&families::path(1)).unwrap().entries.len(), 1);
}

#[test]
fn clawed_cycle_sites_survive_leaves() {
    let g = families::clawed_cycle(3).unwrap();
    let a = attaching_site_analysis(&g, &leaf_edge_toggles(&g)).unwrap();
    assert_eq!(a.site_count, find_claw_units(&g).len());
    assert!(check_site_dichotomy(&g, &a).unwrap().is_empty());
    let bare = maximize_sites(&kmatch_core::graph::ClawedBuildScript { n: 4, steps: vec![] }).unwrap();
    assert_eq!(bare.analysis.site_count, 4);
}
