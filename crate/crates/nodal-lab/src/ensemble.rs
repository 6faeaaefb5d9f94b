//! Seeded random ensembles: connected graphs built from a random spanning
//! tree plus extra chords, and generalized Laplacians with sign-constrained
//! random entries. One `ChaCha8` stream per experiment makes every sweep
//! reproducible from its seed alone.

use crate::discrete::DiscreteOperator;
use crate::graph::CombinatorialGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Off-diagonal entries are drawn uniformly from this range (strictly
/// negative, bounded away from zero).
pub const WEIGHT_RANGE: (f64, f64) = (-2.0, -0.5);
/// Diagonal entries are drawn uniformly from this range.
pub const DIAGONAL_RANGE: (f64, f64) = (0.0, 5.0);

/// Deterministic generator stream for one experiment.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random labelled tree on `vertices` vertices: each new vertex attaches to a
/// uniformly chosen earlier one.
pub fn random_tree(rng: &mut impl Rng, vertices: usize) -> CombinatorialGraph {
    let edges: Vec<(usize, usize)> =
        (2..=vertices).map(|v| (rng.gen_range(1..v), v)).collect();
    CombinatorialGraph::new(vertices, &edges).expect("tree construction is always valid")
}

/// Random connected graph: a random tree plus `beta` distinct extra edges.
/// `beta` is silently capped by the number of available non-edges.
pub fn random_connected_graph(
    rng: &mut impl Rng,
    vertices: usize,
    beta: usize,
) -> CombinatorialGraph {
    let tree = random_tree(rng, vertices);
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    let mut candidates: Vec<(usize, usize)> = (1..=vertices)
        .flat_map(|u| ((u + 1)..=vertices).map(move |v| (u, v)))
        .filter(|e| !edges.contains(e))
        .collect();
    let extra = beta.min(candidates.len());
    for _ in 0..extra {
        let pick = rng.gen_range(0..candidates.len());
        edges.push(candidates.swap_remove(pick));
    }
    CombinatorialGraph::new(vertices, &edges).expect("tree plus chords stays connected")
}

/// Random graph with size and cycle rank themselves drawn from the stream:
/// `|V|` uniform in `3..=max_vertices`, `beta` uniform in
/// `min_beta..=max_beta`.
pub fn sample_graph(
    rng: &mut impl Rng,
    max_vertices: usize,
    min_beta: usize,
    max_beta: usize,
) -> CombinatorialGraph {
    let vertices = rng.gen_range(3..=max_vertices);
    let beta = rng.gen_range(min_beta..=max_beta);
    random_connected_graph(rng, vertices, beta)
}

/// Random generalized Laplacian on `graph` with the standard sign ranges.
pub fn random_generalized_laplacian(
    rng: &mut impl Rng,
    graph: CombinatorialGraph,
) -> DiscreteOperator {
    let weights: Vec<f64> = (0..graph.edge_count())
        .map(|_| rng.gen_range(WEIGHT_RANGE.0..WEIGHT_RANGE.1))
        .collect();
    let diagonal: Vec<f64> = (0..graph.vertex_count())
        .map(|_| rng.gen_range(DIAGONAL_RANGE.0..DIAGONAL_RANGE.1))
        .collect();
    DiscreteOperator::generalized(graph, &weights, &diagonal)
        .expect("sampled weights are strictly negative")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trees_are_trees() {
        let mut rng = rng_from_seed(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..=8);
            let t = random_tree(&mut rng, n);
            assert!(t.is_tree());
            assert_eq!(t.vertex_count(), n);
        }
    }

    #[test]
    fn connected_graphs_hit_requested_beta() {
        let mut rng = rng_from_seed(11);
        for _ in 0..200 {
            let n = rng.gen_range(3..=8);
            let beta = rng.gen_range(0..=3);
            let g = random_connected_graph(&mut rng, n, beta);
            let max_extra = n * (n - 1) / 2 - (n - 1);
            assert_eq!(g.betti_number(), beta.min(max_extra));
        }
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let mut a = rng_from_seed(42);
        let mut b = rng_from_seed(42);
        for _ in 0..20 {
            let ga = sample_graph(&mut a, 8, 1, 3);
            let gb = sample_graph(&mut b, 8, 1, 3);
            assert_eq!(ga.edges(), gb.edges());
            let oa = random_generalized_laplacian(&mut a, ga);
            let ob = random_generalized_laplacian(&mut b, gb);
            assert_eq!(oa.base(), ob.base());
        }
    }

    #[test]
    fn sampled_operators_have_valid_signs() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let g = sample_graph(&mut rng, 8, 0, 3);
            let op = random_generalized_laplacian(&mut rng, g);
            for &(u, v) in op.graph().edges() {
                let w = op.base()[(u - 1, v - 1)];
                assert!((-2.0..-0.5).contains(&w));
            }
        }
    }
}
