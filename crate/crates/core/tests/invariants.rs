use proptest::prelude::{
    prop_assert, prop_assert_eq, prop_oneof, proptest, Just, ProptestConfig, Strategy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use usf_core::electrical::{
    effective_resistance, kirchhoff_marginal, potential, Mode, ResistanceQuery,
};
use usf_core::experiments::{fit_tail, FitOptions};
use usf_core::forest::format::{read_forest, write_forest};
use usf_core::forest::{is_spanning_tree, Sampler, WalkConfig};
use usf_core::generators::{self, tube_vertex, TessellationSpec};
use usf_core::graph::format::{read_planenet, write_planenet};
use usf_core::packing::format::{read_packing, write_packing};
use usf_core::packing::{solve_double_packing, Model, PackingOptions};
use usf_core::PlaneNetwork;

fn family() -> impl Strategy<Value = PlaneNetwork> {
    prop_oneof![
        (2usize..6, 2usize..6).prop_map(|(r, c)| generators::grid_rect(r, c).unwrap()),
        (3usize..9).prop_map(|n| generators::cycle(n).unwrap()),
        (2usize..6).prop_map(|n| generators::path(n).unwrap()),
        (2usize..6, 0.1f64..10.0).prop_map(|(n, c)| generators::tube(n, c).unwrap()),
        prop_oneof![Just((3, 7)), Just((4, 5)), Just((7, 3))]
            .prop_flat_map(|pq| (Just(pq), 1usize..3))
            .prop_map(|((p, q), d)| {
                generators::tessellation_ball(&TessellationSpec::new(p, q, d)).unwrap()
            }),
        Just(generators::tetrahedron()),
        Just(generators::cube()),
        Just(generators::octahedron()),
    ]
}

/// A network from the family with random conductances in [0.1, 10].
fn network() -> impl Strategy<Value = PlaneNetwork> {
    (family(), proptest::num::u64::ANY).prop_map(|(net, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        net.map_conductances(|_, _| rng.gen_range(0.1..10.0))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn darts_and_faces_are_consistent(net in network()) {
        let mut seen = vec![0usize; net.dart_count()];
        for f in 0..net.face_count() {
            for d in net.face_darts(f) {
                seen[d] += 1;
                prop_assert_eq!(net.face_of(d), f);
            }
        }
        prop_assert!(seen.iter().all(|&k| k == 1));
        for d in 0..net.dart_count() {
            prop_assert_eq!(net.twin(net.twin(d)), d);
            prop_assert!(net.twin(d) != d);
            prop_assert_eq!(net.origin(net.twin(d)), net.target(d));
        }
        prop_assert_eq!(net.euler_characteristic(), 2);
    }

    #[test]
    fn dual_is_an_involution_with_reciprocal_conductances(net in network()) {
        let d = net.dual();
        prop_assert!(d.dual().is_isomorphic(&net));
        for e in 0..net.edge_count() {
            prop_assert_eq!(d.conductance(e), 1.0 / net.conductance(e));
        }
    }

    #[test]
    fn planenet_round_trip(net in network()) {
        let text = write_planenet(&net);
        let back = read_planenet(&text).unwrap();
        prop_assert_eq!(write_planenet(&back), text);
    }

    #[test]
    fn marginals_sum_to_tree_size(net in network()) {
        let loops = (0..net.edge_count()).filter(|&e| net.is_loop(e)).count();
        prop_assert_eq!(loops, 0);
        let total: f64 = (0..net.edge_count())
            .map(|e| kirchhoff_marginal(&net, e).unwrap())
            .sum();
        prop_assert!((total - (net.vertex_count() - 1) as f64).abs() < 1e-8);
    }

    #[test]
    fn resistance_is_reciprocal_and_potentials_harmonic(net in network(), a in 0usize..1000, b in 0usize..1000) {
        let n = net.vertex_count();
        let (a, b) = (a % n, b % n);
        if a != b {
            let ab = effective_resistance(&net, &ResistanceQuery::pair(a, b)).unwrap();
            let ba = effective_resistance(&net, &ResistanceQuery::pair(b, a)).unwrap();
            prop_assert_eq!(ab, ba);
            let phi = potential(&net, &ResistanceQuery::new(vec![a], vec![b], Mode::Plain)).unwrap();
            for v in (0..n).filter(|&v| v != a && v != b) {
                let mean: f64 = net
                    .darts_around(v)
                    .map(|d| net.conductance(net.edge_of(d)) * phi[net.target(d)])
                    .sum::<f64>()
                    / net.vertex_conductance(v);
                prop_assert!((mean - phi[v]).abs() <= 1e-10 * phi.iter().fold(0f64, |m, x| m.max(x.abs())));
            }
        }
    }

    #[test]
    fn wilson_samples_are_reproducible_spanning_trees(net in network(), seed in 0u64..1000, stream in 0u64..1000) {
        let sampler = Sampler::new(&net);
        let root = (seed as usize) % net.vertex_count();
        let cfg = WalkConfig::new(seed, stream);
        let t = sampler.ust(root, &cfg).unwrap().edges();
        prop_assert!(is_spanning_tree(&net, &t));
        prop_assert_eq!(sampler.ust(root, &cfg).unwrap().edges(), t.clone());
        let text = write_forest(&t);
        prop_assert_eq!(read_forest(&text).unwrap(), t);
    }

    #[test]
    fn tube_rotation_is_an_automorphism(rings in 2usize..8, c in 0.01f64..100.0) {
        let t = generators::tube(rings, c).unwrap();
        let shift = |v: usize| tube_vertex(v / 4, v % 4 + 1);
        for e in 0..t.edge_count() {
            let (u, v) = t.endpoints(e);
            let d = t.find_dart(shift(u), shift(v));
            prop_assert!(d.is_some());
            prop_assert_eq!(t.conductance(t.edge_of(d.unwrap())), t.conductance(e));
        }
    }

    #[test]
    fn survival_and_bootstrap_are_sane(alpha in 0.3f64..2.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..5000).map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha)).collect();
        let fit = fit_tail(&samples, &FitOptions { bootstrap: 100, seed, ..FitOptions::default() }).unwrap();
        prop_assert!(fit.survival.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(fit.bootstrap_lo <= fit.slope && fit.slope <= fit.bootstrap_hi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tessellation_interior_degrees(pq in prop_oneof![Just((3usize, 7usize)), Just((4, 5)), Just((5, 4)), Just((7, 3))], depth in 3usize..5) {
        let (p, q) = pq;
        let ball = generators::tessellation_ball_layered(&TessellationSpec::new(p, q, depth), 1 << 20).unwrap();
        let net = &ball.network;
        let deep = ball.depth().saturating_sub(2);
        for v in (0..net.vertex_count()).filter(|&v| ball.layer[v] < deep) {
            prop_assert_eq!(net.degree(v), q);
        }
        for f in (0..net.face_count()).filter(|&f| f != net.outer_face()) {
            let vs = net.face_vertices(f);
            if vs.iter().all(|&v| ball.layer[v] < deep) {
                prop_assert_eq!(vs.len(), p);
            }
        }
    }

    #[test]
    fn packings_are_deterministic_and_round_trip(pq in prop_oneof![Just((3usize, 7usize)), Just((4, 5)), Just((7, 3))], depth in 1usize..4, disc in proptest::bool::ANY) {
        let (p, q) = pq;
        let net = generators::tessellation_ball(&TessellationSpec::new(p, q, depth)).unwrap();
        let model = if disc { Model::UnitDisc } else { Model::EuclideanPlane };
        let a = solve_double_packing(&net, &PackingOptions::new(model)).unwrap();
        let b = solve_double_packing(&net, &PackingOptions::new(model)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.residuals.tangency < 1e-7 && a.residuals.orthogonality < 1e-7);
        for u in 0..net.vertex_count() {
            for w in u + 1..net.vertex_count() {
                if net.find_dart(u, w).is_none() {
                    let (cu, cw) = (a.primal[u], a.primal[w]);
                    prop_assert!((cu.centre - cw.centre).norm() >= cu.radius + cw.radius - 1e-9);
                }
            }
        }
        let text = write_packing(&a);
        prop_assert_eq!(write_packing(&read_packing(&text).unwrap()), text);
    }
}
