//! Combinatorial graphs: validation, directed-bond bookkeeping, cycle bases,
//! girth, and edge subdivision.
//!
//! Vertices are 1-based contiguous integers. Edges are canonicalized with
//! `u < v` and indexed by their position in the input list. Directed bonds are
//! ordered with all forward bonds (`u -> v`, `u < v`) first by edge index,
//! followed by their reversals; this ordering fixes the layout of every
//! scattering and magnetic matrix downstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("edge {{{u},{v}}} is a self-loop")]
    SelfLoop { u: usize, v: usize },
    #[error("edge {{{u},{v}}} appears more than once")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge {{{u},{v}}} references a vertex outside 1..={vertex_count}")]
    VertexOutOfRange { u: usize, v: usize, vertex_count: usize },
    #[error("graph is disconnected: vertex {vertex} is not reachable from vertex 1")]
    Disconnected { vertex: usize },
    #[error("subdivision count for edge {edge} must be at least 1")]
    InvalidSubdivisionCount { edge: usize },
    #[error("expected {expected} per-edge values, got {got}")]
    EdgeCountMismatch { expected: usize, got: usize },
}

/// A connected simple graph with 1-based vertices and canonicalized edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// Per vertex (0-based slot), incident `(neighbor, edge index)` pairs in
    /// ascending neighbor order.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl CombinatorialGraph {
    /// Validates and canonicalizes; rejects self-loops, duplicate edges,
    /// out-of-range endpoints, and disconnected graphs.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { u: a, v: b });
            }
            if a < 1 || a > vertex_count || b < 1 || b > vertex_count {
                return Err(GraphError::VertexOutOfRange { u: a, v: b, vertex_count });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if canonical.contains(&(u, v)) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            canonical.push((u, v));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (idx, &(u, v)) in canonical.iter().enumerate() {
            adjacency[u - 1].push((v, idx));
            adjacency[v - 1].push((u, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = Self { vertex_count, edges: canonical, adjacency };
        // Connectivity: BFS from vertex 1 must reach everything.
        let order = graph.bfs_order();
        if order.len() != vertex_count {
            let mut seen = vec![false; vertex_count];
            for v in order {
                seen[v - 1] = true;
            }
            let vertex = seen.iter().position(|s| !s).unwrap() + 1;
            return Err(GraphError::Disconnected { vertex });
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v - 1].len()
    }

    /// Incident `(neighbor, edge index)` pairs of `v`, ascending by neighbor.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v - 1]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().position(|&e| e == (u, v))
    }

    /// Number of directed bonds, `2 |E|`.
    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// Origin vertex of bond `b`; forward bonds run `u -> v` with `u < v`.
    pub fn bond_origin(&self, b: usize) -> usize {
        let m = self.edges.len();
        if b < m {
            self.edges[b].0
        } else {
            self.edges[b - m].1
        }
    }

    /// Terminal vertex of bond `b`.
    pub fn bond_terminus(&self, b: usize) -> usize {
        let m = self.edges.len();
        if b < m {
            self.edges[b].1
        } else {
            self.edges[b - m].0
        }
    }

    /// The reversal involution on bonds; fixed-point free.
    pub fn bond_reverse(&self, b: usize) -> usize {
        let m = self.edges.len();
        if b < m {
            b + m
        } else {
            b - m
        }
    }

    /// Edge index underlying bond `b`.
    pub fn bond_edge(&self, b: usize) -> usize {
        let m = self.edges.len();
        if b < m {
            b
        } else {
            b - m
        }
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn is_tree(&self) -> bool {
        self.betti_number() == 0
    }

    fn bfs_order(&self) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut order = Vec::with_capacity(self.vertex_count);
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(1);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, _) in self.incident(v) {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Deterministic cycle basis: BFS spanning tree from vertex 1 with
    /// ascending neighbor order; chords ordered by edge index. This choice is
    /// the gauge used by every magnetic operator in the crate.
    pub fn cycle_basis(&self) -> CycleBasis {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        let mut tree_edges = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        seen[0] = true;
        queue.push_back(1);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in self.incident(v) {
                if !seen[w - 1] {
                    seen[w - 1] = true;
                    parent[w - 1] = Some((v, e));
                    tree_edges.push(e);
                    queue.push_back(w);
                }
            }
        }
        tree_edges.sort_unstable();
        let chords: Vec<usize> =
            (0..self.edges.len()).filter(|e| !tree_edges.contains(e)).collect();

        let path_to_root = |start: usize| -> Vec<usize> {
            let mut path = vec![start];
            let mut cur = start;
            while let Some((p, _)) = parent[cur - 1] {
                path.push(p);
                cur = p;
            }
            path
        };

        // Each basis cycle starts at the chord's lower endpoint u, crosses the
        // chord to v, and returns to u through the tree. Orientation matters:
        // traversing the chord u -> v is the +alpha_i direction downstream.
        let cycles = chords
            .iter()
            .map(|&e| {
                let (u, v) = self.edges[e];
                let pu = path_to_root(u);
                let pv = path_to_root(v);
                let (iu, lca) = pu
                    .iter()
                    .enumerate()
                    .find(|(_, x)| pv.contains(x))
                    .map(|(i, &x)| (i, x))
                    .expect("tree paths always meet at the root");
                let iv = pv.iter().position(|&x| x == lca).unwrap();
                let mut cycle = vec![u, v];
                cycle.extend_from_slice(&pv[1..iv]);
                if lca != u && lca != v {
                    cycle.push(lca);
                }
                cycle.extend(pu[1..iu].iter().rev());
                cycle
            })
            .collect();

        CycleBasis { tree_edges, chords, cycles }
    }

    /// Girth via BFS from every vertex; `None` for trees.
    pub fn girth(&self) -> Option<usize> {
        if self.is_tree() {
            return None;
        }
        let mut best = usize::MAX;
        for start in 1..=self.vertex_count {
            let mut dist = vec![usize::MAX; self.vertex_count];
            let mut via_edge = vec![usize::MAX; self.vertex_count];
            let mut queue = std::collections::VecDeque::new();
            dist[start - 1] = 0;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &(w, e) in self.incident(v) {
                    if dist[w - 1] == usize::MAX {
                        dist[w - 1] = dist[v - 1] + 1;
                        via_edge[w - 1] = e;
                        queue.push_back(w);
                    } else if via_edge[v - 1] != e && via_edge[w - 1] != e {
                        // Non-tree edge closes a walk of this length; the walk
                        // contains a cycle no longer than it, and BFS from a
                        // vertex on a shortest cycle realizes the girth.
                        best = best.min(dist[v - 1] + dist[w - 1] + 1);
                    }
                }
            }
        }
        Some(best)
    }

    /// Replaces edge `e` by a path of `counts[e]` edges through fresh degree-2
    /// vertices. New vertices are appended after the originals, in edge order.
    pub fn subdivide(&self, counts: &[usize]) -> Result<(Self, SubdivisionMap), GraphError> {
        if counts.len() != self.edges.len() {
            return Err(GraphError::EdgeCountMismatch {
                expected: self.edges.len(),
                got: counts.len(),
            });
        }
        if let Some(e) = counts.iter().position(|&c| c == 0) {
            return Err(GraphError::InvalidSubdivisionCount { edge: e });
        }
        let mut next_vertex = self.vertex_count + 1;
        let mut new_edges = Vec::new();
        let mut lineage = Vec::new();
        let mut edge_paths = Vec::with_capacity(self.edges.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let mut path = Vec::with_capacity(counts[e]);
            let mut prev = u;
            for pos in 1..counts[e] {
                let w = next_vertex;
                next_vertex += 1;
                lineage.push((e, pos));
                path.push(new_edges.len());
                new_edges.push((prev, w));
                prev = w;
            }
            path.push(new_edges.len());
            new_edges.push((prev, v));
            edge_paths.push(path);
        }
        let graph = Self::new(next_vertex - 1, &new_edges)?;
        Ok((graph, SubdivisionMap { original_vertices: self.vertex_count, lineage, edge_paths }))
    }
}

/// Spanning-tree cycle basis; one cycle per chord, each containing exactly
/// that chord.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    /// Edge indices of the BFS spanning tree, ascending.
    pub tree_edges: Vec<usize>,
    /// Edge indices of the chords, ascending; `chords.len()` equals beta.
    pub chords: Vec<usize>,
    /// Vertex cycles: `cycles[i]` starts at the lower endpoint of chord `i`,
    /// crosses it, and walks back through the tree.
    pub cycles: Vec<Vec<usize>>,
}

impl CycleBasis {
    /// Edge-index incidence sets of the basis cycles (for GF(2) span checks).
    pub fn cycle_edge_sets(&self, graph: &CombinatorialGraph) -> Vec<Vec<usize>> {
        self.cycles
            .iter()
            .map(|cycle| {
                let mut set: Vec<usize> = cycle
                    .windows(2)
                    .chain(std::iter::once(
                        &[cycle[cycle.len() - 1], cycle[0]][..],
                    ))
                    .map(|w| graph.edge_index(w[0], w[1]).expect("cycle steps are edges"))
                    .collect();
                set.sort_unstable();
                set
            })
            .collect()
    }
}

/// Lineage data of a subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionMap {
    pub original_vertices: usize,
    /// For each new vertex `original_vertices + 1 + i`, the source edge and its
    /// 1-based position along that edge's path.
    pub lineage: Vec<(usize, usize)>,
    /// For each original edge, the new edge indices of its path, ordered from
    /// the lower original endpoint to the higher.
    pub edge_paths: Vec<Vec<usize>>,
}

/// Union-find over `0..n`, used for nodal-domain counting.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    pub fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&x| self.find(x) == x).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig_graph() -> CombinatorialGraph {
        // 4 vertices, 5 edges, beta = 2.
        CombinatorialGraph::new(4, &[(1, 2), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn validates_path() {
        let g = CombinatorialGraph::new(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(g.betti_number(), 0);
        assert!(g.is_tree());
    }

    #[test]
    fn rejects_self_loop() {
        let err = CombinatorialGraph::new(2, &[(1, 1)]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop { u: 1, v: 1 });
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = CombinatorialGraph::new(2, &[(1, 2), (2, 1)]).unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { u: 1, v: 2 });
    }

    #[test]
    fn rejects_disconnected() {
        let err = CombinatorialGraph::new(4, &[(1, 2), (3, 4)]).unwrap_err();
        assert_eq!(err, GraphError::Disconnected { vertex: 3 });
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(fig_graph().betti_number(), 2);
        let c4 = CombinatorialGraph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert_eq!(c4.betti_number(), 1);
    }

    #[test]
    fn bond_ordering_and_involution() {
        let g = fig_graph();
        assert_eq!(g.bond_count(), 10);
        for b in 0..g.bond_count() {
            let r = g.bond_reverse(b);
            assert_ne!(r, b);
            assert_eq!(g.bond_reverse(r), b);
            assert_eq!(g.bond_origin(b), g.bond_terminus(r));
            assert_eq!(g.bond_edge(b), g.bond_edge(r));
        }
        assert_eq!(g.bond_origin(0), 1);
        assert_eq!(g.bond_terminus(0), 2);
        assert_eq!(g.bond_origin(5), 2);
    }

    #[test]
    fn cycle_basis_tree_is_empty() {
        let g = CombinatorialGraph::new(4, &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let basis = g.cycle_basis();
        assert!(basis.chords.is_empty());
        assert_eq!(basis.tree_edges, vec![0, 1, 2]);
    }

    #[test]
    fn cycle_basis_triangle() {
        let g = CombinatorialGraph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let basis = g.cycle_basis();
        assert_eq!(basis.chords, vec![2]);
        assert_eq!(basis.cycles[0], vec![2, 3, 1]);
    }

    #[test]
    fn cycle_basis_fig_graph() {
        // BFS from 1 takes edges {1,2},{1,4},{2,3}; chords are {2,4},{3,4}.
        let g = fig_graph();
        let basis = g.cycle_basis();
        assert_eq!(basis.tree_edges, vec![0, 1, 2]);
        assert_eq!(basis.chords, vec![3, 4]);
        for (i, cycle) in basis.cycles.iter().enumerate() {
            let (u, v) = g.edges()[basis.chords[i]];
            assert_eq!(cycle[0], u);
            assert_eq!(cycle[1], v);
            // Every consecutive pair (cyclically) must be an edge, and the
            // chord must appear exactly once.
            let sets = basis.cycle_edge_sets(&g);
            assert_eq!(sets[i].iter().filter(|&&e| e == basis.chords[i]).count(), 1);
        }
    }

    #[test]
    fn basis_cycles_are_independent_over_gf2() {
        let g = fig_graph();
        let basis = g.cycle_basis();
        let sets = basis.cycle_edge_sets(&g);
        // Rank over GF(2) of the edge-incidence vectors must equal beta.
        let mut rows: Vec<u64> = sets
            .iter()
            .map(|set| set.iter().fold(0u64, |acc, &e| acc | (1 << e)))
            .collect();
        let mut rank = 0;
        for bit in 0..g.edge_count() {
            if let Some(pos) = rows.iter().position(|&r| r & (1 << bit) != 0) {
                let pivot = rows.swap_remove(pos);
                for r in &mut rows {
                    if *r & (1 << bit) != 0 {
                        *r ^= pivot;
                    }
                }
                rank += 1;
            }
        }
        assert_eq!(rank, g.betti_number());
    }

    #[test]
    fn girth_examples() {
        let c5 =
            CombinatorialGraph::new(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)]).unwrap();
        assert_eq!(c5.girth(), Some(5));
        assert_eq!(fig_graph().girth(), Some(3));
        let star = CombinatorialGraph::new(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        assert_eq!(star.girth(), None);
    }

    #[test]
    fn subdivision_identity_and_paths() {
        let g = fig_graph();
        let (same, map) = g.subdivide(&[1; 5]).unwrap();
        assert_eq!(same.vertex_count(), 4);
        assert_eq!(same.edges(), g.edges());
        assert!(map.lineage.is_empty());

        let k2 = CombinatorialGraph::new(2, &[(1, 2)]).unwrap();
        let (p4, map) = k2.subdivide(&[3]).unwrap();
        assert_eq!(p4.vertex_count(), 4);
        assert_eq!(p4.edge_count(), 3);
        assert!(p4.is_tree());
        assert_eq!(map.lineage, vec![(0, 1), (0, 2)]);
        assert_eq!(map.edge_paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn subdivision_preserves_betti() {
        let c3 = CombinatorialGraph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let (c6, _) = c3.subdivide(&[2, 2, 2]).unwrap();
        assert_eq!(c6.vertex_count(), 6);
        assert_eq!(c6.betti_number(), 1);
        assert_eq!(c6.girth(), Some(6));
    }

    #[test]
    fn subdivision_rejects_zero_count() {
        let k2 = CombinatorialGraph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(
            k2.subdivide(&[0]).unwrap_err(),
            GraphError::InvalidSubdivisionCount { edge: 0 }
        );
    }

    #[test]
    fn girth_in_basis_span() {
        // Every graph's shortest cycle must be a GF(2) combination of the
        // basis cycles; check on the fig graph by brute force.
        let g = fig_graph();
        let basis = g.cycle_basis();
        let sets = basis.cycle_edge_sets(&g);
        let to_mask =
            |set: &[usize]| set.iter().fold(0u64, |acc, &e| acc | (1 << e));
        let b0 = to_mask(&sets[0]);
        let b1 = to_mask(&sets[1]);
        // Shortest cycle 2-3-4 has edges {2,3},{3,4},{2,4} = indices 2,4,3.
        let target = to_mask(&[2, 3, 4]);
        let span = [0, b0, b1, b0 ^ b1];
        assert!(span.contains(&target));
    }
}
