//! Structural side of the failure-domain model: multitree and
//! untangledness validation (with witnesses), connector shadows, the
//! canonical placement model, and failure-aggregate evaluation.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Digraph, VertexId, VertexSet};
use crate::lexvec::FailAgg;

/// Why a digraph failed the multitree check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultitreeViolation {
    /// A directed cycle, listed in traversal order.
    Cycle(Vec<VertexId>),
    /// Two distinct directed paths from `top` to `bottom`, splitting at
    /// `left`/`right`. When `left == top` the direct edge `top -> bottom`
    /// is one of the paths (the three-vertex diamond shape).
    Diamond {
        top: VertexId,
        left: VertexId,
        right: VertexId,
        bottom: VertexId,
    },
}

impl MultitreeViolation {
    /// 1 for the three-vertex diamond, 2 for the four-vertex one.
    pub fn diamond_kind(&self) -> Option<u8> {
        match self {
            MultitreeViolation::Cycle(_) => None,
            MultitreeViolation::Diamond { top, left, right, .. } => {
                Some(if top == left || top == right { 1 } else { 2 })
            }
        }
    }
}

impl fmt::Display for MultitreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultitreeViolation::Cycle(c) => write!(f, "cycle through {} vertices", c.len()),
            MultitreeViolation::Diamond { .. } => {
                write!(f, "diamond (type {})", self.diamond_kind().unwrap())
            }
        }
    }
}

fn find_cycle(g: &Digraph) -> Option<Vec<VertexId>> {
    // Iterative DFS with colors; returns the cycle vertices in order.
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = g.vertex_count();
    let mut color = alloc::vec![WHITE; n];
    let mut parent = alloc::vec![None; n];
    for s in g.vertices() {
        if color[s.index()] != WHITE {
            continue;
        }
        let mut stack = alloc::vec![(s, 0usize)];
        color[s.index()] = GRAY;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < g.out_neighbors(u).len() {
                let v = g.out_neighbors(u)[*i];
                *i += 1;
                match color[v.index()] {
                    WHITE => {
                        color[v.index()] = GRAY;
                        parent[v.index()] = Some(u);
                        stack.push((v, 0));
                    }
                    GRAY => {
                        // Back edge u -> v closes a cycle.
                        let mut cyc = alloc::vec![v];
                        let mut w = u;
                        while w != v {
                            cyc.push(w);
                            w = parent[w.index()].unwrap();
                        }
                        cyc.reverse();
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                color[u.index()] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// Checks the diamond-free DAG condition: the subgraph induced by the
/// vertices reachable from any `u` must be an arborescence rooted at `u`.
pub fn check_multitree(g: &Digraph) -> Result<(), MultitreeViolation> {
    if let Some(cycle) = find_cycle(g) {
        return Err(MultitreeViolation::Cycle(cycle));
    }
    for u in g.vertices() {
        let reach = g.reachable(u);
        for &v in reach.iter() {
            if v == u {
                continue;
            }
            let mut parents = g.in_neighbors(v).iter().filter(|p| reach.contains(p));
            let p1 = parents.next();
            if let (Some(&p1), Some(&p2)) = (p1, parents.next()) {
                return Err(MultitreeViolation::Diamond {
                    top: u,
                    left: p1,
                    right: p2,
                    bottom: v,
                });
            }
        }
    }
    Ok(())
}

pub fn is_multitree(g: &Digraph) -> bool {
    check_multitree(g).is_ok()
}

/// Connectors of `g` that are descendants of `u` (reflexive: a connector
/// is in its own shadow).
pub fn connector_shadow(g: &Digraph, u: VertexId) -> VertexSet {
    let connectors = g.connectors();
    g.reachable(u)
        .intersection(&connectors)
        .copied()
        .collect()
}

/// One shadow per out-neighbor of `u`, in out-neighbor order. Empty
/// shadows are retained.
pub fn child_shadows(g: &Digraph, u: VertexId) -> Vec<VertexSet> {
    g.out_neighbors(u)
        .iter()
        .map(|&c| connector_shadow(g, c))
        .collect()
}

/// Subset-restricted variants, used on subproblems of the decomposition.
pub fn connector_shadow_in(g: &Digraph, u: VertexId, within: &VertexSet) -> VertexSet {
    let connectors = g.connectors_in(within);
    g.reachable_in(u, within)
        .intersection(&connectors)
        .copied()
        .collect()
}

pub fn child_shadows_in(g: &Digraph, u: VertexId, within: &VertexSet) -> Vec<VertexSet> {
    g.out_neighbors_in(u, within)
        .map(|c| connector_shadow_in(g, c, within))
        .collect()
}

/// True iff every cross pair of sets is nested or disjoint.
pub fn laminar_pair(f1: &[VertexSet], f2: &[VertexSet]) -> bool {
    f1.iter().all(|u| {
        f2.iter().all(|v| {
            u.is_subset(v) || v.is_subset(u) || u.intersection(v).next().is_none()
        })
    })
}

/// An incomparable vertex pair whose child-shadow families fail to form
/// a laminar pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangleWitness {
    pub u: VertexId,
    pub v: VertexId,
}

/// Scans every mutually-unreachable vertex pair. Quadratic, which is
/// fine at the instance sizes this crate targets.
pub fn check_untangled(g: &Digraph) -> Result<(), TangleWitness> {
    let n = g.vertex_count();
    let reach: Vec<VertexSet> = g.vertices().map(|u| g.reachable(u)).collect();
    let shadows: Vec<Vec<VertexSet>> = g.vertices().map(|u| child_shadows(g, u)).collect();
    for ui in 0..n {
        for vi in ui + 1..n {
            let (u, v) = (VertexId(ui as u32), VertexId(vi as u32));
            if reach[ui].contains(&v) || reach[vi].contains(&u) {
                continue;
            }
            if !laminar_pair(&shadows[ui], &shadows[vi]) {
                return Err(TangleWitness { u, v });
            }
        }
    }
    Ok(())
}

pub fn is_untangled(g: &Digraph) -> bool {
    check_untangled(g).is_ok()
}

/// Flattens any digraph to its canonical placement model: same vertex
/// set, edges exactly from non-leaves to the leaves they can reach. The
/// output is an untangled multitree of depth 2 and preserves every
/// non-leaf failure number, so placements transfer between the two.
///
/// Defined through reachability, this accepts cyclic inputs too.
pub fn canonicalize(g: &Digraph) -> Digraph {
    let leaves = g.leaves();
    let mut out = Digraph::new();
    for u in g.vertices() {
        out.add_vertex(g.name(u)).expect("names already validated");
    }
    for u in g.vertices() {
        if leaves.contains(&u) {
            continue;
        }
        for v in g.reachable(u) {
            if leaves.contains(&v) {
                out.add_edge_ids(u, v).expect("reachable sets are duplicate-free");
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementError {
    NotALeaf(VertexId),
}

/// A set of leaves carrying replicas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    leaves: VertexSet,
}

impl Placement {
    pub fn new(g: &Digraph, leaves: VertexSet) -> Result<Self, PlacementError> {
        for &l in &leaves {
            if !g.out_neighbors(l).is_empty() {
                return Err(PlacementError::NotALeaf(l));
            }
        }
        Ok(Placement { leaves })
    }

    pub fn leaves(&self) -> &VertexSet {
        &self.leaves
    }

    pub fn rho(&self) -> usize {
        self.leaves.len()
    }
}

/// Number of placed replicas `u` can take down; a placed leaf counts
/// itself (reflexive reachability).
pub fn failure_number(g: &Digraph, u: VertexId, p: &Placement) -> usize {
    g.reachable(u)
        .intersection(p.leaves())
        .count()
}

/// Aggregate over all vertices of `g`: entry `i` counts vertices whose
/// failure would leave `i` replicas surviving.
pub fn failure_aggregate(g: &Digraph, p: &Placement) -> FailAgg {
    let within = g.vertex_set();
    failure_aggregate_within(g, &within, p.leaves(), p.rho())
}

/// Aggregate of the induced subgraph on `within`, with vector length
/// fixed by the global `rho`. Used to validate DP cells against direct
/// evaluation.
pub fn failure_aggregate_within(
    g: &Digraph,
    within: &VertexSet,
    placed: &VertexSet,
    rho: usize,
) -> FailAgg {
    let mut counts = alloc::vec![0i64; rho + 1];
    for &u in within {
        let f = g
            .reachable_in(u, within)
            .intersection(placed)
            .count();
        counts[rho - f] += 1;
    }
    FailAgg::Finite(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    pub(crate) fn graph(edges: &[(&str, &str)]) -> Digraph {
        let mut g = Digraph::new();
        for (u, v) in edges {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    fn set(g: &Digraph, names: &[&str]) -> VertexSet {
        names.iter().map(|n| g.lookup(n).unwrap()).collect()
    }

    fn cyclic_sample() -> Digraph {
        graph(&[
            ("a", "b"),
            ("b", "d"),
            ("d", "h"),
            ("d", "g"),
            ("a", "c"),
            ("c", "a"),
            ("c", "e"),
            ("c", "d"),
            ("e", "f"),
        ])
    }

    fn flat_sample() -> Digraph {
        graph(&[
            ("a", "f"),
            ("a", "g"),
            ("a", "h"),
            ("b", "g"),
            ("b", "h"),
            ("c", "f"),
            ("c", "g"),
            ("c", "h"),
            ("d", "g"),
            ("d", "h"),
            ("e", "f"),
        ])
    }

    pub(crate) fn merge_sample() -> Digraph {
        graph(&[
            ("r1", "a"),
            ("r1", "e"),
            ("r2", "c"),
            ("r2", "e"),
            ("r3", "d"),
            ("r3", "e"),
            ("r4", "b"),
            ("r4", "e"),
            ("a", "m1"),
            ("m1", "n1"),
            ("m1", "n2"),
            ("b", "n1"),
            ("c", "m2"),
            ("m2", "n3"),
            ("m2", "n4"),
            ("d", "m3"),
            ("d", "m4"),
            ("m3", "n1"),
            ("m3", "n2"),
            ("m4", "n3"),
            ("m4", "n4"),
        ])
    }

    #[test]
    fn multitree_accepts_and_witnesses() {
        assert!(is_multitree(&flat_sample()));
        assert!(is_multitree(&merge_sample()));

        let diamond = graph(&[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]);
        let err = check_multitree(&diamond).unwrap_err();
        assert_eq!(err.diamond_kind(), Some(2));

        let tri = graph(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let err = check_multitree(&tri).unwrap_err();
        assert_eq!(err.diamond_kind(), Some(1));

        let cyc = graph(&[("a", "c"), ("c", "a")]);
        assert!(matches!(
            check_multitree(&cyc),
            Err(MultitreeViolation::Cycle(_))
        ));
    }

    // Independent check: a DAG is a multitree iff no ordered vertex pair
    // is joined by two distinct directed paths.
    fn count_paths(g: &Digraph, u: VertexId, v: VertexId) -> u64 {
        if u == v {
            return 1;
        }
        g.out_neighbors(u)
            .iter()
            .map(|&w| count_paths(g, w, v))
            .sum()
    }

    #[test]
    fn multitree_matches_path_counting_oracle() {
        let samples = [
            flat_sample(),
            merge_sample(),
            graph(&[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]),
            graph(&[("a", "b"), ("b", "c"), ("a", "c")]),
            graph(&[("r", "x"), ("r", "y"), ("x", "z"), ("y", "w")]),
        ];
        for g in &samples {
            let unique = g.vertices().all(|u| {
                g.vertices().all(|v| count_paths(g, u, v) <= 1)
            });
            assert_eq!(is_multitree(g), unique);
        }
    }

    #[test]
    fn merge_sample_connectors_and_shadows() {
        let g = merge_sample();
        assert_eq!(g.roots().len(), 4);
        assert_eq!(g.connectors(), set(&g, &["n1", "n2", "n3", "n4", "e"]));
        let c = g.lookup("c").unwrap();
        assert_eq!(connector_shadow(&g, c), set(&g, &["n3", "n4"]));
        let e = g.lookup("e").unwrap();
        assert_eq!(connector_shadow(&g, e), set(&g, &["e"]));
        let b = g.lookup("b").unwrap();
        assert_eq!(connector_shadow(&g, b), set(&g, &["n1"]));
        // A non-connector leaf has an empty shadow.
        let path = graph(&[("x", "y")]);
        let y = path.lookup("y").unwrap();
        assert_eq!(connector_shadow(&path, y), VertexSet::new());
        // Root with children {a, e}.
        let r1 = g.lookup("r1").unwrap();
        assert_eq!(
            child_shadows(&g, r1),
            alloc::vec![set(&g, &["n1", "n2"]), set(&g, &["e"])]
        );
        let r3 = g.lookup("r3").unwrap();
        assert_eq!(
            child_shadows(&g, r3),
            alloc::vec![set(&g, &["n1", "n2", "n3", "n4"]), set(&g, &["e"])]
        );
    }

    #[test]
    fn laminar_pairs() {
        let mk = |sets: &[&[u32]]| -> Vec<VertexSet> {
            sets.iter()
                .map(|s| s.iter().map(|&x| VertexId(x)).collect())
                .collect()
        };
        assert!(laminar_pair(
            &mk(&[&[1], &[3, 4]]),
            &mk(&[&[1, 2], &[1, 2, 3, 4]])
        ));
        assert!(!laminar_pair(&mk(&[&[1, 2]]), &mk(&[&[2, 3]])));
        assert!(laminar_pair(&mk(&[&[1, 2]]), &mk(&[])));
    }

    #[test]
    fn untangled_examples() {
        assert!(is_untangled(&merge_sample()));
        assert!(is_untangled(&flat_sample()));
        // Tangle: incomparable u, v whose child shadows properly overlap.
        let tangled = graph(&[
            ("u", "x"),
            ("v", "y"),
            ("t", "z"),
            ("x", "c1"),
            ("x", "c2"),
            ("y", "c2"),
            ("y", "c3"),
            ("z", "c1"),
            ("z", "c2"),
            ("z", "c3"),
        ]);
        assert!(is_multitree(&tangled));
        let w = check_untangled(&tangled).unwrap_err();
        assert_eq!(
            set(&tangled, &["u", "v"]),
            [w.u, w.v].into_iter().collect()
        );
    }

    #[test]
    fn canonicalize_cyclic_sample() {
        let left = cyclic_sample();
        let canon = canonicalize(&left);
        let want = flat_sample();
        let edges = |g: &Digraph| -> alloc::collections::BTreeSet<(alloc::string::String, alloc::string::String)> {
            g.edges()
                .map(|(u, v)| (g.name(u).into(), g.name(v).into()))
                .collect()
        };
        assert_eq!(edges(&canon), edges(&want));
        assert!(is_multitree(&canon));
        assert!(is_untangled(&canon));
        // Idempotent up to edge order.
        assert_eq!(edges(&canonicalize(&canon)), edges(&canon));

        let single = graph(&[("a", "b")]);
        assert_eq!(edges(&canonicalize(&single)), edges(&single));
    }

    #[test]
    fn failure_numbers_flat_sample() {
        let g = flat_sample();
        let p = Placement::new(&g, set(&g, &["f", "g"])).unwrap();
        let f = |n: &str| failure_number(&g, g.lookup(n).unwrap(), &p);
        assert_eq!(
            [f("a"), f("b"), f("c"), f("d"), f("e")],
            [2, 1, 2, 1, 1]
        );
        assert_eq!(f("h"), 0);
        assert_eq!(f("f"), 1);
        assert_eq!(
            failure_aggregate(&g, &p),
            FailAgg::Finite(alloc::vec![2, 5, 1])
        );

        let p2 = Placement::new(&g, set(&g, &["g", "h"])).unwrap();
        assert_eq!(
            failure_aggregate(&g, &p2),
            FailAgg::Finite(alloc::vec![4, 2, 2])
        );

        let empty = Placement::new(&g, VertexSet::new()).unwrap();
        assert_eq!(
            failure_aggregate(&g, &empty),
            FailAgg::Finite(alloc::vec![g.vertex_count() as i64])
        );
    }

    #[test]
    fn canonical_model_preserves_failure_numbers() {
        let left = cyclic_sample();
        let canon = canonicalize(&left);
        let p = Placement::new(&left, set(&left, &["f", "g"])).unwrap();
        let leaves = left.leaves();
        for u in left.vertices() {
            if leaves.contains(&u) {
                continue;
            }
            assert_eq!(
                failure_number(&left, u, &p),
                failure_number(&canon, u, &p)
            );
        }
    }

    #[test]
    fn shadows_nest_along_edges() {
        let g = merge_sample();
        for (u, v) in g.edges() {
            let mut bound = connector_shadow(&g, u);
            bound.insert(v);
            assert!(connector_shadow(&g, v).is_subset(&bound));
        }
    }

    #[test]
    fn placement_rejects_internal_vertices() {
        let g = flat_sample();
        let a = g.lookup("a").unwrap();
        assert!(Placement::new(&g, [a].into_iter().collect()).is_err());
    }
}
