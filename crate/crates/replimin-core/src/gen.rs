//! Random instance generation: certified untangled multitrees for the
//! differential-test corpus and benchmarks, plus random trees and random
//! cubic graphs for the other suites.
//!
//! The multitree generator is rejection-based: start from disjoint random
//! trees, then try random cross edges and roll back any that break the
//! multitree or untangledness certificates. Every returned instance is
//! re-validated, so downstream consumers never see an uncertified graph.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::graph::{Digraph, VertexId};
use crate::model::{is_multitree, is_untangled};

fn vname(i: usize) -> String {
    format!("v{i}")
}

/// A random arborescence on `n` named vertices: vertex `i` hangs off a
/// uniformly chosen earlier vertex.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Digraph {
    let mut g = Digraph::new();
    assert!(n >= 1);
    g.add_vertex(&vname(0)).unwrap();
    for i in 1..n {
        let p = rng.gen_range(0..i);
        g.add_edge(&vname(p), &vname(i)).unwrap();
    }
    g
}

/// A random untangled multitree with exactly `k` roots and `n` vertices.
/// Cross edges go from non-leaves to non-roots only, so the root and
/// leaf sets stay fixed at their tree values.
pub fn random_untangled_multitree(k: usize, n: usize, rng: &mut impl Rng) -> Digraph {
    assert!(k >= 1 && n >= 2 * k, "need at least two vertices per root");
    // Split n into k parts of at least 2 (a root plus at least one leaf
    // keeps every tree placeable).
    let mut sizes = alloc::vec![2usize; k];
    for _ in 0..n - 2 * k {
        sizes[rng.gen_range(0..k)] += 1;
    }
    let mut g = Digraph::new();
    let mut next = 0usize;
    for &sz in &sizes {
        let base = next;
        g.add_vertex(&vname(base)).unwrap();
        for i in base + 1..base + sz {
            let p = rng.gen_range(base..i);
            g.add_edge(&vname(p), &vname(i)).unwrap();
        }
        next += sz;
    }
    let (roots, leaves) = g.roots_and_leaves();
    debug_assert_eq!(roots.len(), k);

    // Wire in shared structure where the certificates allow it.
    let attempts = 4 * n;
    for _ in 0..attempts {
        let p = VertexId(rng.gen_range(0..n as u32));
        let c = VertexId(rng.gen_range(0..n as u32));
        if p == c || leaves.contains(&p) || roots.contains(&c) {
            continue;
        }
        if g.out_neighbors(p).contains(&c) {
            continue;
        }
        if g.add_edge_ids(p, c).is_err() {
            continue;
        }
        if !(is_multitree(&g) && is_untangled(&g)) {
            g.remove_edge(p, c);
        }
    }
    assert!(is_multitree(&g) && is_untangled(&g));
    assert_eq!(g.roots(), roots);
    assert_eq!(g.leaves(), leaves);
    g
}

/// A random simple 3-regular graph on `n` vertices (n even, ≥ 4) via the
/// pairing model with rejection; returns the undirected edge list.
pub fn random_cubic(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    assert!(n >= 4 && n.is_multiple_of(2), "cubic graphs need even n >= 4");
    'outer: loop {
        // 3n stubs, shuffled, paired off.
        let mut stubs: Vec<usize> = (0..3 * n).map(|s| s / 3).collect();
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * n / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || edges.contains(&(u, v)) {
                continue 'outer;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        return edges;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trees_are_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=20 {
            let g = random_tree(n, &mut rng);
            assert_eq!(g.vertex_count(), n);
            assert_eq!(g.edge_count(), n - 1);
            assert_eq!(g.roots().len(), 1);
            assert!(is_multitree(&g));
            assert!(g.connectors().is_empty());
        }
    }

    #[test]
    fn multitrees_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut saw_connector = false;
        for k in 1..=4 {
            for _ in 0..25 {
                let n = rng.gen_range(2 * k..=14);
                let g = random_untangled_multitree(k, n, &mut rng);
                assert_eq!(g.vertex_count(), n);
                assert_eq!(g.roots().len(), k);
                assert!(!g.leaves().is_empty());
                saw_connector |= !g.connectors().is_empty();
            }
        }
        // The cross-edge phase must actually produce shared structure
        // reasonably often, or the corpus would only cover forests.
        assert!(saw_connector);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = random_untangled_multitree(3, 12, &mut ChaCha8Rng::seed_from_u64(5));
        let b = random_untangled_multitree(3, 12, &mut ChaCha8Rng::seed_from_u64(5));
        let edges = |g: &Digraph| g.edges().collect::<Vec<_>>();
        assert_eq!(edges(&a), edges(&b));
    }

    #[test]
    fn cubic_graphs_are_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[4usize, 6, 8, 10] {
            let edges = random_cubic(n, &mut rng);
            assert_eq!(edges.len(), 3 * n / 2);
            let mut deg = alloc::vec![0usize; n];
            for &(u, v) in &edges {
                assert_ne!(u, v);
                deg[u] += 1;
                deg[v] += 1;
            }
            assert!(deg.iter().all(|&d| d == 3));
            let mut dedup = edges.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), edges.len());
        }
    }
}
