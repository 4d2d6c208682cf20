use ldpc_subshift::factor_graph::{
    greedy_separated_set, orbit_map_injective, sample_permutation_model, sigma_distance, vert_neighborhood, Distance,
    FactorGraph, NodeSet, UniformHomomorphism,
};
use ldpc_subshift::gf2::{kernel_basis, BitVec, LinearCode};
use ldpc_subshift::group::{ball_size, enumerate_ball, BallCode};
use ldpc_subshift::microstate::{cluster_decomposition, cluster_decomposition_linear, normalized_hamming};
use ldpc_subshift::rng::seeded;
use proptest::prelude::*;
use rand::Rng;

fn sample(n: usize, seed: u64) -> (UniformHomomorphism, FactorGraph) {
    sample_permutation_model(n, 3, 4, &mut seeded(seed)).unwrap()
}

#[test]
fn ball_sizes_and_codes() {
    assert_eq!(ball_size(3, 4, 1), Some(10));
    assert_eq!(ball_size(3, 4, 2), Some(64));
    let dims: Vec<usize> = (0..3).map(|r| BallCode::new(3, 4, r).unwrap().dimension()).collect();
    assert_eq!(dims, vec![1, 7, 43]);
    let b1 = BallCode::new(3, 4, 1).unwrap();
    assert_eq!(b1.hyperedges().len(), 3);
    assert!((b1.haar_marginal_entropy() - 7.0 * std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(BallCode::new(3, 4, 2).unwrap().hyperedges().len(), 21);
}

#[test]
fn ball_code_extends_to_smaller_ball() {
    let b1 = BallCode::new(3, 4, 1).unwrap();
    let b2 = BallCode::new(3, 4, 2).unwrap();
    let coords: Vec<usize> = b1.vertices().iter().map(|g| b2.index_of(g).unwrap()).collect();
    let projected = b2.code().project(&coords);
    assert_eq!(projected.dimension(), 7);
    assert!(projected.is_subspace_of(&b1.code()));
}

#[test]
fn parity_check_structure() {
    for seed in 0..10 {
        let (_, g) = sample(24, seed);
        let h = g.parity_check_matrix();
        assert_eq!((h.rows(), h.cols()), (18, 24));
        assert!((0..h.rows()).all(|e| h.row_weight(e) == 4));
        assert!((0..h.cols()).all(|v| h.col_weight(v) == 3));
        for part in 0..3 {
            let mut sum = BitVec::zeros(24);
            for e in g.part_range(part) {
                sum.xor_assign(&h.row_vec(e));
            }
            assert_eq!(sum, BitVec::ones(24));
        }
        assert!(h.rank() <= 18 - 2);
        assert!(kernel_basis(&h).dimension() >= 6);
    }
}

#[test]
fn homomorphism_round_trip() {
    let (sigma, g) = sample(60, 4);
    let back = g.to_homomorphism().unwrap();
    for i in 0..3 {
        assert_eq!(back.generator_image(i), sigma.generator_image(i));
    }
    let json = serde_json::to_string(&g.to_json()).unwrap();
    let again = FactorGraph::from_json(serde_json::from_str(&json).unwrap()).unwrap();
    assert_eq!(again.checks(), g.checks());
}

#[test]
fn tree_like_vertex_has_full_ball() {
    let (sigma, g) = sample(3000, 2);
    let ball = enumerate_ball(3, 4, 2).unwrap();
    let v = (0..3000).find(|&v| orbit_map_injective(&sigma, v, &ball)).expect("some tree-like vertex");
    assert_eq!(vert_neighborhood(&g, &NodeSet::Vertices(vec![v]), 2).unwrap().len(), 64);
    for u in 0..50 {
        assert!(vert_neighborhood(&g, &NodeSet::Vertices(vec![u]), 2).unwrap().len() <= 64);
    }
}

#[test]
fn greedy_separated_set_covering_bound() {
    let r = 1;
    let bound = 300 / ball_size(3, 4, 2 * r).unwrap();
    for seed in 0..10 {
        let (sigma, _) = sample(300, seed);
        let order: Vec<usize> = (0..300).collect();
        let s = greedy_separated_set(&sigma, 2 * r, &order, None);
        assert!(s.len() >= bound, "{} < {bound}", s.len());
        for (a, &v) in s.iter().enumerate() {
            assert_eq!(sigma_distance(&sigma, v, v, 0), Distance::Within(0));
            for &w in &s[a + 1..] {
                assert_eq!(sigma_distance(&sigma, v, w, 2 * r), Distance::Beyond);
            }
        }
    }
}

#[test]
fn distance_one_to_generator_images() {
    let (sigma, _) = sample(40, 8);
    for v in 0..40 {
        for i in 0..3 {
            assert_eq!(sigma_distance(&sigma, v, sigma.apply(i, v), 3), Distance::Within(1));
        }
    }
}

#[test]
fn separated_code_clusters_are_singletons() {
    // two disjoint weight-12 words at n = 24: min distance 12 > 0.3n
    let a = BitVec::from_indices(24, 0..12);
    let b = BitVec::from_indices(24, 12..24);
    let code = LinearCode::from_generators(24, vec![a, b]);
    let report = cluster_decomposition_linear(&code, 0.05, 0.3).unwrap();
    assert_eq!(report.cluster_count, 4);
    assert_eq!(report.cluster_sizes, vec![(1, 4)]);
}

fn clusters(points: &[BitVec], limit: f64) -> Vec<usize> {
    let mut label: Vec<usize> = (0..points.len()).collect();
    loop {
        let mut changed = false;
        for a in 0..points.len() {
            for b in 0..points.len() {
                if (points[a].distance(&points[b]) as f64) < limit && label[b] < label[a] {
                    label[a] = label[b];
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

proptest! {
    #[test]
    fn neighborhoods_monotone_and_additive(seed in 0u64..50, u1 in proptest::collection::vec(0usize..60, 1..4), u2 in proptest::collection::vec(0usize..60, 1..4), r in 1usize..3) {
        let (_, g) = sample(60, seed);
        let n1 = vert_neighborhood(&g, &NodeSet::Vertices(u1.clone()), r).unwrap();
        let n2 = vert_neighborhood(&g, &NodeSet::Vertices(u2.clone()), r).unwrap();
        let bigger = vert_neighborhood(&g, &NodeSet::Vertices(u1.clone()), r + 1).unwrap();
        prop_assert!(n1.iter().all(|v| bigger.contains(v)));
        let mut both: Vec<usize> = u1.iter().chain(&u2).copied().collect();
        both.sort_unstable();
        let joint = vert_neighborhood(&g, &NodeSet::Vertices(both), r).unwrap();
        let mut union: Vec<usize> = n1.iter().chain(&n2).copied().collect();
        union.sort_unstable();
        union.dedup();
        prop_assert_eq!(joint, union);
    }

    #[test]
    fn pair_distance_is_weight_of_difference(bits in proptest::collection::vec(any::<bool>(), 2..80), seed in any::<u64>()) {
        let x = BitVec::from_bools(&bits);
        let mut rng = seeded(seed);
        let y = BitVec::from_bools(&bits.iter().map(|_| rng.gen()).collect::<Vec<bool>>());
        let mut diff = x.clone();
        diff.xor_assign(&y);
        prop_assert_eq!(normalized_hamming(&x, &y).unwrap(), diff.weight() as f64 / bits.len() as f64);
    }

    #[test]
    fn gap_bounds_cluster_diameter(seed in any::<u64>(), count in 2usize..30) {
        let mut rng = seeded(seed);
        let n = 30;
        let centers: Vec<BitVec> = (0..3).map(|_| BitVec::from_bools(&(0..n).map(|_| rng.gen()).collect::<Vec<bool>>())).collect();
        let points: Vec<BitVec> = (0..count)
            .map(|_| {
                let mut p = centers[rng.gen_range(0..3)].clone();
                for _ in 0..rng.gen_range(0..3) {
                    p.flip(rng.gen_range(0..n));
                }
                p
            })
            .collect();
        let (eps, delta) = (0.15, 0.35);
        let report = cluster_decomposition(&points, eps, delta).unwrap();
        let labels = clusters(&points, delta * n as f64);
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(report.cluster_count, distinct.len() as u64);
        if report.gap_empty {
            for a in 0..count {
                for b in 0..count {
                    if labels[a] == labels[b] {
                        prop_assert!(normalized_hamming(&points[a], &points[b]).unwrap() < eps);
                    }
                }
            }
        }
    }
}
