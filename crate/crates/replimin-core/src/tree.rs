//! Exact solver for connector-free (tree-shaped) subproblems.
//!
//! Splitting a subtree out of the main decomposition leaves an
//! arborescence, and on an arborescence the lexicographic minimum for
//! every replica count can be computed in one post-order sweep: each
//! vertex's failure number is just the number of replicas placed in its
//! own subtree, so child tables combine by knapsack convolution.

use alloc::vec::Vec;

use crate::graph::{Digraph, VertexId, VertexSet};
use crate::lexvec::{add_assign, bump, FailAgg};

/// Per-replica-count results for one tree: `table[x]` is the lex-minimum
/// aggregate over placements of exactly `x` replicas, together with the
/// witnessing leaf set; `None` where `x` exceeds the available leaves.
/// Aggregates have length `rho + 1`, with `rho` fixed by the enclosing
/// instance so tables from different subproblems stay comparable.
pub type TreeTable = Vec<Option<(FailAgg, VertexSet)>>;

/// Solves the induced subgraph on `within`, which must be an
/// arborescence: exactly one local root, every other member with local
/// in-degree 1. Only global leaves may carry replicas.
pub fn solve_tree(g: &Digraph, within: &VertexSet, rho: usize) -> TreeTable {
    let roots = g.roots_in(within);
    assert_eq!(roots.len(), 1, "tree subproblem must have a single root");
    for &u in within {
        debug_assert!(
            g.in_degree_in(u, within) <= 1,
            "tree subproblem contains a connector"
        );
    }
    solve_subtree(g, within, roots[0], rho)
}

fn solve_subtree(g: &Digraph, within: &VertexSet, u: VertexId, rho: usize) -> TreeTable {
    // acc starts as the table of the empty forest and folds in one child
    // subtree at a time.
    let mut acc: Vec<Option<(Vec<i64>, VertexSet)>> = alloc::vec![None; rho + 1];
    acc[0] = Some((alloc::vec![0; rho + 1], VertexSet::new()));
    for c in g.out_neighbors_in(u, within) {
        let child = solve_subtree(g, within, c, rho);
        let mut next: Vec<Option<(Vec<i64>, VertexSet)>> = alloc::vec![None; rho + 1];
        for a in 0..=rho {
            let Some((agg_a, set_a)) = &acc[a] else { continue };
            for b in 0..=rho - a {
                let Some(cell) = &child[b] else { continue };
                let (FailAgg::Finite(agg_b), set_b) = (&cell.0, &cell.1) else {
                    unreachable!("tree tables are finite where present")
                };
                let mut agg = agg_a.clone();
                add_assign(&mut agg, agg_b);
                let slot = &mut next[a + b];
                let better = match slot {
                    None => true,
                    Some((best, best_set)) => match agg.cmp(best) {
                        core::cmp::Ordering::Less => true,
                        core::cmp::Ordering::Greater => false,
                        core::cmp::Ordering::Equal => {
                            // Deterministic witness: lex-smallest leaf set.
                            let mut merged = set_a.clone();
                            merged.extend(set_b.iter().copied());
                            merged < *best_set
                        }
                    },
                };
                if better {
                    let mut merged = set_a.clone();
                    merged.extend(set_b.iter().copied());
                    *slot = Some((agg, merged));
                }
            }
        }
        acc = next;
    }
    if g.out_neighbors(u).is_empty() && acc[0].is_some() && rho >= 1 {
        // A global leaf may itself carry one replica.
        acc[1] = Some((alloc::vec![0; rho + 1], [u].into_iter().collect()));
    }
    acc.into_iter()
        .enumerate()
        .map(|(x, cell)| {
            cell.map(|(mut agg, set)| {
                // u fails exactly the x replicas in its own subtree.
                bump(&mut agg, x, 1);
                (FailAgg::Finite(agg), set)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(&str, &str)]) -> Digraph {
        let mut g = Digraph::new();
        for (u, v) in edges {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    fn fin(v: &[i64]) -> FailAgg {
        FailAgg::Finite(v.to_vec())
    }

    fn names(g: &Digraph, s: &VertexSet) -> Vec<alloc::string::String> {
        s.iter().map(|&u| g.name(u).into()).collect()
    }

    // Caterpillar: r over two internal vertices, leaves split 2/1.
    fn caterpillar() -> Digraph {
        graph(&[
            ("r", "a"),
            ("r", "b"),
            ("a", "l1"),
            ("a", "l2"),
            ("b", "l3"),
        ])
    }

    #[test]
    fn caterpillar_tables() {
        let g = caterpillar();
        let within = g.vertex_set();
        let t = solve_tree(&g, &within, 2);
        let (agg0, set0) = t[0].as_ref().unwrap();
        assert_eq!(*agg0, fin(&[0, 0, 6]));
        assert!(set0.is_empty());

        // One replica: every leaf puts three vertices at failure number
        // 1, so the tie resolves to the smallest-id leaf.
        let (agg1, set1) = t[1].as_ref().unwrap();
        assert_eq!(*agg1, fin(&[0, 3, 3]));
        assert_eq!(names(&g, set1), ["l1"]);

        // Two replicas: splitting across a and b confines the double
        // failure to r alone; {l1, l2} would take out a as well.
        let (agg2, set2) = t[2].as_ref().unwrap();
        assert_eq!(*agg2, fin(&[1, 4, 1]));
        assert_eq!(names(&g, set2), ["l1", "l3"]);

        let t3 = solve_tree(&g, &within, 3);
        let (agg3, set3) = t3[3].as_ref().unwrap();
        assert_eq!(*agg3, fin(&[1, 1, 4, 0]));
        assert_eq!(names(&g, set3), ["l1", "l2", "l3"]);

        // Infeasible beyond the leaf count.
        assert!(solve_tree(&g, &within, 4)[4].is_none());
    }

    #[test]
    fn two_leaf_star() {
        let g = graph(&[("r", "l1"), ("r", "l2")]);
        let t = solve_tree(&g, &g.vertex_set(), 1);
        let (agg, set) = t[1].as_ref().unwrap();
        assert_eq!(*agg, fin(&[2, 1]));
        assert_eq!(names(&g, set), ["l1"]);
    }

    #[test]
    fn star_tables() {
        let g = graph(&[("r", "l1"), ("r", "l2"), ("r", "l3")]);
        let within = g.vertex_set();
        let t = solve_tree(&g, &within, 2);
        // Only the root sees both replicas; leaves are symmetric, so the
        // witness is the id-lex-smallest pair.
        let (agg2, set2) = t[2].as_ref().unwrap();
        assert_eq!(*agg2, fin(&[1, 2, 1]));
        assert_eq!(names(&g, set2), ["l1", "l2"]);
    }

    #[test]
    fn single_vertex_tree() {
        let mut g = Digraph::new();
        g.add_vertex("l1").unwrap();
        let within = g.vertex_set();
        let t = solve_tree(&g, &within, 1);
        assert_eq!(t[0].as_ref().unwrap().0, fin(&[0, 1]));
        assert_eq!(t[1].as_ref().unwrap().0, fin(&[1, 0]));
    }

    #[test]
    fn subtree_of_larger_graph() {
        // The tree hangs off a larger structure; `within` restricts to it
        // and aggregates only count members.
        let g = graph(&[("top", "s1"), ("s1", "l1"), ("s1", "s2"), ("s2", "l2")]);
        let within: VertexSet = ["s1", "s2", "l1", "l2"]
            .iter()
            .map(|n| g.lookup(n).unwrap())
            .collect();
        let t = solve_tree(&g, &within, 1);
        let (agg1, set1) = t[1].as_ref().unwrap();
        assert_eq!(*agg1, fin(&[2, 2]));
        assert_eq!(names(&g, set1), ["l1"]);
    }
}
