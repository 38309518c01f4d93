use ndarray::Array2;
use netroles::equivalence::{
    automorphic_orbits, regular_refinement, structural_classes, RefinementMode, StructuralVariant,
};
use netroles::features::{
    create_feature_graph, feature_similarity, vertical_log_bin, SimilarityMeasure,
};
use netroles::nnls::NnlsMethod;
use netroles::roles::{rank_search, svd_factorize};
use netroles::synth::{erdos_renyi, random_permutation};
use netroles::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_graphs(count: u64) -> impl Iterator<Item = Graph> {
    (0..count).map(|i| {
        let n = 1 + (i as usize % 8);
        let p = 0.1 + 0.8 * ((i * 7919 % 97) as f64 / 96.0);
        erdos_renyi(n, p, 500 + i).unwrap()
    })
}

#[test]
fn learned_features_follow_relabeling() {
    for i in 0..15 {
        let g = erdos_renyi(30, 0.12, i).unwrap();
        let perm = random_permutation(30, 100 + i);
        let gp = apply_permutation(&g, &perm).unwrap();
        let a = learn_features(&g, &LearnConfig::default()).unwrap();
        let b = learn_features(&gp, &LearnConfig::default()).unwrap();
        assert_eq!(a.features.descriptors(), b.features.descriptors());
        assert_eq!(a.surviving_counts, b.surviving_counts);
        for u in 0..30 {
            assert_eq!(a.features.values().row(u), b.features.values().row(perm[u]));
            assert_eq!(a.features.nodes()[u], b.features.nodes()[perm[u]]);
        }
    }
}

#[test]
fn orbit_members_share_feature_rows() {
    for g in small_graphs(60) {
        let x = learn_features(&g, &LearnConfig::default())
            .unwrap()
            .features;
        for class in automorphic_orbits(&g).unwrap().classes() {
            for &u in &class[1..] {
                assert_eq!(x.values().row(u), x.values().row(class[0]));
            }
        }
    }
}

#[test]
fn equivalence_hierarchy_and_refinement_laws() {
    for g in small_graphs(60) {
        let n = g.node_count();
        let strict = structural_classes(&g, StructuralVariant::Strict);
        let weak = structural_classes(&g, StructuralVariant::Weak);
        let orbits = automorphic_orbits(&g).unwrap();
        let regular =
            regular_refinement(&g, &NodePartition::single_class(n), RefinementMode::Set).unwrap();
        let colors = regular_refinement(
            &g,
            &NodePartition::single_class(n),
            RefinementMode::Multiset,
        )
        .unwrap();
        assert!(strict.refines(&weak));
        assert!(strict.refines(&orbits));
        assert!(weak.refines(&orbits));
        assert!(orbits.refines(&colors));
        assert!(colors.refines(&regular));
        for p in [&regular, &colors] {
            let mode = if p == &regular {
                RefinementMode::Set
            } else {
                RefinementMode::Multiset
            };
            assert_eq!(&regular_refinement(&g, p, mode).unwrap(), p);
        }
    }
}

#[test]
fn oracles_are_equivariant() {
    for (i, g) in small_graphs(40).enumerate() {
        let n = g.node_count();
        let perm = random_permutation(n, i as u64);
        let gp = apply_permutation(&g, &perm).unwrap();
        let same = |a: &NodePartition, b: &NodePartition| {
            (0..n).all(|u| {
                (0..n).all(|v| {
                    (a.class_of(u) == a.class_of(v)) == (b.class_of(perm[u]) == b.class_of(perm[v]))
                })
            })
        };
        assert!(same(
            &structural_classes(&g, StructuralVariant::Weak),
            &structural_classes(&gp, StructuralVariant::Weak)
        ));
        assert!(same(
            &automorphic_orbits(&g).unwrap(),
            &automorphic_orbits(&gp).unwrap()
        ));
        let p0 = NodePartition::single_class(n);
        assert!(same(
            &regular_refinement(&g, &p0, RefinementMode::Set).unwrap(),
            &regular_refinement(&gp, &p0, RefinementMode::Set).unwrap()
        ));
    }
}

#[test]
fn learning_grows_and_separates() {
    for i in 0..10 {
        let g = erdos_renyi(60, 0.08, i).unwrap();
        for lambda in [1.0, 0.9] {
            let cfg = LearnConfig {
                lambda,
                ..LearnConfig::default()
            };
            let out = learn_features(&g, &cfg).unwrap();
            assert!(out.surviving_counts.windows(2).all(|w| w[0] <= w[1]));
            assert!(out.rounds() <= cfg.max_iterations);
            let fg = create_feature_graph(
                &out.features,
                cfg.bin_fraction,
                lambda,
                SimilarityMeasure::BinAgreement,
            )
            .unwrap();
            assert!(fg.edges.is_empty(), "{:?}", fg.edges);
            let bins: Vec<_> = (0..out.features.feature_count())
                .map(|j| {
                    vertical_log_bin(&out.features.column(j).to_vec(), cfg.bin_fraction).unwrap()
                })
                .collect();
            for a in 0..bins.len() {
                for b in a + 1..bins.len() {
                    assert!(feature_similarity(&bins[a], &bins[b]).unwrap() < lambda);
                }
            }
        }
    }
}

#[test]
fn truncated_svd_beats_random_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..20 {
        let x = Array2::from_shape_fn((4, 4), |_| rng.random_range(-1.0..1.0));
        let best = svd_factorize(&x, 2).unwrap();
        let err = (&x - &best.reconstruct()).mapv(|v| v * v).sum();
        for _ in 0..200 {
            let a = Array2::from_shape_fn((4, 2), |_| rng.random_range(-2.0..2.0));
            let b = Array2::from_shape_fn((2, 4), |_| rng.random_range(-2.0..2.0));
            assert!(err <= (&x - &a.dot(&b)).mapv(|v| v * v).sum() + 1e-12);
        }
    }
}

#[test]
fn transition_beats_random_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let wa = Array2::from_shape_fn((6, 2), |_| rng.random_range(0.0..1.0));
        let wb = Array2::from_shape_fn((6, 2), |_| rng.random_range(0.0..1.0));
        let t = dynamic::estimate_transition_model(&wa, &wb, NnlsMethod::default()).unwrap();
        assert!(t.t.iter().all(|&v| v >= 0.0));
        let obj = |m: &Array2<f64>| (&wb - &wa.dot(m)).mapv(|v| v * v).sum();
        let got = obj(&t.t);
        for _ in 0..200 {
            let cand = Array2::from_shape_fn((2, 2), |_| rng.random_range(0.0..3.0));
            assert!(got <= obj(&cand) + 1e-12);
        }
    }
}

#[test]
fn search_returns_cheapest_evaluated_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let x = Array2::from_shape_fn((25, 8), |_| rng.random_range(0.0..4.0f64).floor());
        let s = rank_search(&x, &SelectConfig::default()).unwrap();
        let min = s.costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        assert_eq!(s.best.cost, min);
        assert!(s.best.w.iter().chain(s.best.h.iter()).all(|&v| v >= 0.0));
    }
}

#[test]
fn model_json_round_trip() {
    let g = erdos_renyi(25, 0.2, 4).unwrap();
    let learned = learn_features(&g, &LearnConfig::default()).unwrap();
    let model = fit_roles(&learned.features, None, &SelectConfig::default()).unwrap();
    let mut buf = Vec::new();
    model.write_json(&mut buf).unwrap();
    let back = RoleModel::read_json(buf.as_slice()).unwrap();
    assert_eq!(back, model);
    let x = recompute(&g, &back.descriptors).unwrap();
    assert_eq!(x, learned.features);
}

#[test]
fn edge_list_round_trip_keeps_labels() {
    let text = "10 20\n20 30\n40\n30 10\n";
    let g = load_edge_list(text.as_bytes(), false).unwrap();
    let mut out = Vec::new();
    write_edge_list(&g, &mut out).unwrap();
    let back = load_edge_list(out.as_slice(), false).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.labels(), &[10, 20, 30, 40]);
}
