//! Property-based invariants over the random ensembles.

use nodal_lab::discrete;
use nodal_lab::ensemble;
use nodal_lab::magnetic;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cycle_space_dimensions_are_consistent(seed in any::<u64>()) {
        let mut rng = ensemble::rng_from_seed(seed);
        let g = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let beta = g.edge_count() + 1 - g.vertex_count();
        prop_assert_eq!(g.betti_number(), beta);
        let basis = g.cycle_basis();
        prop_assert_eq!(basis.chords.len(), beta);
        prop_assert_eq!(basis.tree_edges.len(), g.vertex_count() - 1);
        for (i, cycle) in basis.cycles.iter().enumerate() {
            let (u, v) = g.edges()[basis.chords[i]];
            // Each basis cycle starts at its chord's lower endpoint and
            // crosses it first.
            prop_assert_eq!(cycle[0], u);
            prop_assert_eq!(cycle[1], v);
        }
    }

    #[test]
    fn subdivision_preserves_cycle_rank(seed in any::<u64>()) {
        let mut rng = ensemble::rng_from_seed(seed);
        let g = ensemble::sample_graph(&mut rng, 7, 0, 3);
        let counts: Vec<usize> =
            (0..g.edge_count()).map(|_| rng.gen_range(1..4)).collect();
        let (subdivided, map) = g.subdivide(&counts).unwrap();
        prop_assert_eq!(subdivided.betti_number(), g.betti_number());
        let new_vertices: usize = counts.iter().map(|c| c - 1).sum();
        prop_assert_eq!(subdivided.vertex_count(), g.vertex_count() + new_vertices);
        for (e, path) in map.edge_paths.iter().enumerate() {
            prop_assert_eq!(path.len(), counts[e]);
        }
    }

    #[test]
    fn nodal_counts_respect_the_band(seed in any::<u64>()) {
        let mut rng = ensemble::rng_from_seed(seed);
        let g = ensemble::sample_graph(&mut rng, 8, 0, 3);
        let beta = g.betti_number();
        let op = ensemble::random_generalized_laplacian(&mut rng, g);
        let spectrum = op.spectrum().unwrap();
        let report = discrete::nodal_report(&op, &spectrum);
        for (idx, entry) in report.entries.iter().enumerate() {
            let Some(e) = entry else { continue };
            let n = idx + 1;
            prop_assert!(e.phi >= n - 1 && e.phi <= n - 1 + beta);
            prop_assert!(e.nu >= 1 && e.nu <= n);
        }
    }

    #[test]
    fn forbidden_shape_detector_matches_definition(
        len in 1usize..8,
        split in 0usize..9,
        beta in 1usize..4,
    ) {
        let split = split.min(len);
        let step: Vec<i64> = (0..len)
            .map(|i| if i < split { 0 } else { beta as i64 })
            .collect();
        prop_assert!(!magnetic::forbidden_surplus_check(&step, beta));
        // Any interior value breaks the shape.
        if beta > 1 {
            let mut bent = step.clone();
            bent[split.min(len - 1)] = 1;
            prop_assert!(magnetic::forbidden_surplus_check(&bent, beta));
        }
    }
}
