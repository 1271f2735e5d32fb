//! Decomposition phase: repeatedly split admissible subproblems until
//! only tree-shaped, discrete, or leafless pieces remain, producing the
//! full binary tree the optimization phase walks.
//!
//! Connectors and shadows are always taken in the subgraph induced by the
//! subproblem, not the whole graph: a vertex that loses all but one
//! parent in a split stops being a connector for every structural
//! decision below that split.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{Digraph, VertexId, VertexSet};
use crate::model::{
    check_multitree, check_untangled, child_shadows_in, laminar_pair, MultitreeViolation,
    TangleWitness,
};

/// What a decomposition-tree node holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Split further; carries a [`Case`].
    Internal,
    /// No global leaves: nothing can be placed here.
    Trivial,
    /// Single local root, connector-free: solved by the tree solver.
    BaseTree,
    /// Edgeless, at least one placeable leaf among isolated roots.
    BaseDiscrete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subproblem {
    pub vertices: VertexSet,
    /// In-degree-0 vertices of the induced subgraph, in id order. Index
    /// positions here are the signature indexes used by the DP.
    pub local_roots: Vec<VertexId>,
    pub kind: Kind,
}

impl Subproblem {
    pub fn new(g: &Digraph, vertices: VertexSet) -> Self {
        let local_roots = g.roots_in(&vertices);
        let has_leaf = !g.leaves_in(&vertices).is_empty();
        let kind = if !has_leaf {
            Kind::Trivial
        } else if local_roots.len() == 1 {
            Kind::BaseTree
        } else if !g.has_edge_in(&vertices) {
            Kind::BaseDiscrete
        } else {
            Kind::Internal
        };
        Subproblem {
            vertices,
            local_roots,
            kind,
        }
    }

    pub fn root_index(&self, r: VertexId) -> Option<usize> {
        self.local_roots.binary_search(&r).ok()
    }
}

/// The split applied at an internal node. Root indexes refer to the
/// node's own `local_roots` ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Case {
    /// Derived extension of the case list: a local root that is itself a
    /// placeable leaf and has no children here is split off before
    /// anything else, so later merges never share placeable vertices
    /// between their sides.
    Isolate { root_idx: usize },
    /// Root with a single non-connector child; the root is peeled off.
    Up { root_idx: usize },
    /// A root child whose subtree holds no connectors; the subtree is
    /// split off as a base tree.
    Out { root_idx: usize, child: VertexId },
    /// Roots `q` all share `shared` as their only child, and `shared`
    /// has no other parents; the roots are peeled off together.
    Include { q: VertexSet, shared: VertexId },
    /// Split along the connector-shadow hypergraph's components.
    Merge,
}

#[derive(Debug, Clone)]
pub struct DecompNode {
    pub subproblem: Subproblem,
    pub case: Option<Case>,
    /// Indices into the tree's node arena.
    pub children: Option<(usize, usize)>,
    /// Parent signature index -> left/right child signature index.
    pub align_left: Vec<Option<usize>>,
    pub align_right: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub struct DecompTree {
    pub nodes: Vec<DecompNode>,
    pub root: usize,
}

impl DecompTree {
    pub fn node(&self, id: usize) -> &DecompNode {
        &self.nodes[id]
    }

    pub fn merge_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.case, Some(Case::Merge)))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityWitness {
    /// Non-root member with a parent left outside.
    NotConnectorComplete(VertexId),
    /// Non-root member with a child left outside.
    NotChildDescendantComplete(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    NotMultitree(MultitreeViolation),
    Tangled(TangleWitness),
    /// A structural guarantee failed at runtime; indicates either a bug
    /// or an input that slipped past validation.
    Invariant(String),
}

impl core::fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DecomposeError::NotMultitree(v) => write!(f, "not a multitree: {v}"),
            DecomposeError::Tangled(w) => {
                write!(f, "tangled vertex pair ({:?}, {:?})", w.u, w.v)
            }
            DecomposeError::Invariant(s) => write!(f, "invariant violation: {s}"),
        }
    }
}

/// Connector completeness + child-descendant completeness. A vertex with
/// at least one parent inside must have all of them inside; every
/// non-root member must keep all its children.
pub fn verify_admissible(g: &Digraph, vertices: &VertexSet) -> Result<(), AdmissibilityWitness> {
    for &v in vertices {
        let deg_in = g.in_degree_in(v, vertices);
        if deg_in > 0 {
            if deg_in < g.in_neighbors(v).len() {
                return Err(AdmissibilityWitness::NotConnectorComplete(v));
            }
            if g.out_neighbors(v)
                .iter()
                .any(|c| !vertices.contains(c))
            {
                return Err(AdmissibilityWitness::NotChildDescendantComplete(v));
            }
        }
    }
    Ok(())
}

/// One child shadow with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperEdge {
    pub shadow: VertexSet,
    pub root: VertexId,
    pub child: VertexId,
}

/// H = (κ(Γ), child shadows of all local roots), connectors taken in the
/// induced subgraph.
#[derive(Debug, Clone)]
pub struct ShadowHypergraph {
    pub vertices: VertexSet,
    pub edges: Vec<HyperEdge>,
}

pub fn build_hypergraph(g: &Digraph, s: &Subproblem) -> ShadowHypergraph {
    let vertices = g.connectors_in(&s.vertices);
    let mut edges = Vec::new();
    for &r in &s.local_roots {
        let children: Vec<VertexId> = g.out_neighbors_in(r, &s.vertices).collect();
        for (child, shadow) in children
            .into_iter()
            .zip(child_shadows_in(g, r, &s.vertices))
        {
            edges.push(HyperEdge {
                shadow,
                root: r,
                child,
            });
        }
    }
    ShadowHypergraph { vertices, edges }
}

/// One maximal component: its connectors plus the indices of the edges
/// lying inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: VertexSet,
    pub edge_indices: Vec<usize>,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a] = b;
        }
    }
}

/// Maximal components of the "hyperedges sharing a vertex" relation,
/// ordered by smallest contained connector id.
pub fn hypergraph_components(h: &ShadowHypergraph) -> Vec<Component> {
    let ids: Vec<VertexId> = h.vertices.iter().copied().collect();
    let index_of = |v: VertexId| ids.binary_search(&v).expect("shadow vertex not a connector");
    let mut dsu = Dsu::new(ids.len());
    for e in &h.edges {
        let mut it = e.shadow.iter();
        if let Some(&first) = it.next() {
            for &v in it {
                dsu.union(index_of(first), index_of(v));
            }
        }
    }
    let mut comps: Vec<Component> = Vec::new();
    let mut rep_to_comp: Vec<Option<usize>> = alloc::vec![None; ids.len()];
    for (i, &v) in ids.iter().enumerate() {
        let r = dsu.find(i);
        let ci = match rep_to_comp[r] {
            Some(ci) => ci,
            None => {
                comps.push(Component {
                    vertices: VertexSet::new(),
                    edge_indices: Vec::new(),
                });
                rep_to_comp[r] = Some(comps.len() - 1);
                comps.len() - 1
            }
        };
        comps[ci].vertices.insert(v);
    }
    for (ei, e) in h.edges.iter().enumerate() {
        if let Some(&v) = e.shadow.iter().next() {
            let r = dsu.find(index_of(v));
            comps[rep_to_comp[r].unwrap()].edge_indices.push(ei);
        }
    }
    // `ids` is sorted, so components already appear in order of their
    // smallest connector.
    comps
}

/// The structural properties every component decomposition must satisfy
/// on untangled input: (i) each component is covered by one of its own
/// edges, (ii) components partition the connectors, (iii) per component,
/// any two roots' restricted shadow families form a laminar pair.
pub fn check_components(h: &ShadowHypergraph, comps: &[Component]) -> Result<(), String> {
    let mut seen = VertexSet::new();
    for (ci, comp) in comps.iter().enumerate() {
        if !comp
            .edge_indices
            .iter()
            .any(|&e| comp.vertices.is_subset(&h.edges[e].shadow))
        {
            return Err(format!("component {ci} not covered by any single edge"));
        }
        for &v in &comp.vertices {
            if !seen.insert(v) {
                return Err(format!("connector {v:?} in two components"));
            }
        }
        let mut roots: Vec<VertexId> = comp
            .edge_indices
            .iter()
            .map(|&e| h.edges[e].root)
            .collect();
        roots.sort_unstable();
        roots.dedup();
        let family = |r: VertexId| -> Vec<VertexSet> {
            comp.edge_indices
                .iter()
                .map(|&e| &h.edges[e])
                .filter(|e| e.root == r)
                .map(|e| &e.shadow & &comp.vertices)
                .collect()
        };
        for (i, &r1) in roots.iter().enumerate() {
            for &r2 in &roots[i + 1..] {
                if !laminar_pair(&family(r1), &family(r2)) {
                    return Err(format!(
                        "component {ci}: shadows of roots {r1:?}, {r2:?} not laminar"
                    ));
                }
            }
        }
    }
    if seen != h.vertices {
        return Err("components do not cover all connectors".into());
    }
    Ok(())
}

/// Picks the first applicable case, in a fixed order, for an admissible
/// internal subproblem. Site ties resolve to the smallest root index
/// (and smallest child id), keeping the tree deterministic.
pub fn classify(g: &Digraph, s: &Subproblem) -> Result<Case, String> {
    debug_assert_eq!(s.kind, Kind::Internal);
    let within = &s.vertices;
    let connectors = g.connectors_in(within);

    for (i, &r) in s.local_roots.iter().enumerate() {
        if g.out_neighbors_in(r, within).next().is_none() && g.out_neighbors(r).is_empty() {
            return Ok(Case::Isolate { root_idx: i });
        }
    }

    for (i, &r) in s.local_roots.iter().enumerate() {
        let mut kids = g.out_neighbors_in(r, within);
        if let (Some(c), None) = (kids.next(), kids.next()) {
            if !connectors.contains(&c) {
                return Ok(Case::Up { root_idx: i });
            }
        }
    }

    for (i, &r) in s.local_roots.iter().enumerate() {
        let mut kids: Vec<VertexId> = g.out_neighbors_in(r, within).collect();
        kids.sort_unstable();
        for c in kids {
            let d = g.reachable_in(c, within);
            if d.intersection(&connectors).next().is_none() {
                return Ok(Case::Out { root_idx: i, child: c });
            }
        }
    }

    for &c in &connectors {
        let q: VertexSet = g.in_neighbors_in(c, within).collect();
        let all_roots = q
            .iter()
            .all(|&p| s.root_index(p).is_some());
        if !all_roots {
            continue;
        }
        let only_child = q.iter().all(|&p| {
            let mut kids = g.out_neighbors_in(p, within);
            kids.next() == Some(c) && kids.next().is_none()
        });
        // Connector completeness puts all of c's parents inside, so
        // "every parent of c is in Q" is the in-neighbor check above.
        if only_child && q.len() >= 2 {
            return Ok(Case::Include { q, shared: c });
        }
    }

    let h = build_hypergraph(g, s);
    for e in &h.edges {
        if e.shadow.is_empty() {
            return Err(format!(
                "empty shadow for child {:?} at merge-eligible node",
                e.child
            ));
        }
    }
    let comps = hypergraph_components(&h);
    check_components(&h, &comps)?;
    if comps.len() < 2 {
        return Err("merge reached with fewer than two shadow components".into());
    }
    Ok(Case::Merge)
}

fn desc_union(g: &Digraph, seeds: impl IntoIterator<Item = VertexId>, within: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new();
    for s in seeds {
        out.extend(g.reachable_in(s, within));
    }
    out
}

/// Vertex sets of the two children produced by `case`.
fn split(g: &Digraph, s: &Subproblem, case: &Case) -> Result<(VertexSet, VertexSet), String> {
    let within = &s.vertices;
    match case {
        Case::Isolate { root_idx } | Case::Up { root_idx } => {
            let r = s.local_roots[*root_idx];
            let mut left = within.clone();
            left.remove(&r);
            Ok((left, [r].into_iter().collect()))
        }
        Case::Out { child, .. } => {
            let d = g.reachable_in(*child, within);
            Ok((within.difference(&d).copied().collect(), d))
        }
        Case::Include { q, .. } => {
            Ok((within.difference(q).copied().collect(), q.clone()))
        }
        Case::Merge => {
            let h = build_hypergraph(g, s);
            let comps = hypergraph_components(&h);
            let first = &comps[0].vertices;
            let (mut x1, mut x2) = (Vec::new(), Vec::new());
            for e in &h.edges {
                if e.shadow.is_subset(first) {
                    x1.push(e.child);
                } else {
                    x2.push(e.child);
                }
            }
            let roots = s.local_roots.iter().copied();
            let mut left = desc_union(g, x1, within);
            left.extend(roots.clone());
            let mut right = desc_union(g, x2, within);
            right.extend(roots);

            let shared: VertexSet = left.intersection(&right).copied().collect();
            let root_set: VertexSet = s.local_roots.iter().copied().collect();
            if shared != root_set {
                return Err("merge sides share non-root vertices".into());
            }
            if left.len() >= within.len() || right.len() >= within.len() {
                return Err("merge side failed to shrink".into());
            }
            Ok((left, right))
        }
    }
}

fn align(parent: &Subproblem, child: &Subproblem, case: &Case, left_side: bool) -> Vec<Option<usize>> {
    let mut map = alloc::vec![None; parent.local_roots.len()];
    if !left_side {
        return map; // split-off siblings are never read through signatures
    }
    match case {
        Case::Isolate { root_idx } | Case::Up { root_idx } => {
            for (i, &r) in parent.local_roots.iter().enumerate() {
                if i == *root_idx {
                    continue;
                }
                map[i] = Some(child.root_index(r).expect("kept root"));
            }
            if let Case::Up { .. } = case {
                // The peeled root hands its signature slot to its child,
                // which is the one new local root on the left side.
                let fresh = child
                    .local_roots
                    .iter()
                    .position(|r| parent.root_index(*r).is_none())
                    .expect("UP exposes exactly one new root");
                map[*root_idx] = Some(fresh);
            }
        }
        Case::Out { .. } | Case::Merge => {
            for (i, &r) in parent.local_roots.iter().enumerate() {
                map[i] = Some(child.root_index(r).expect("roots preserved"));
            }
        }
        Case::Include { q, shared } => {
            let ell = child.root_index(*shared).expect("shared child becomes a root");
            for (i, &r) in parent.local_roots.iter().enumerate() {
                map[i] = if q.contains(&r) {
                    Some(ell)
                } else {
                    Some(child.root_index(r).expect("kept root"))
                };
            }
        }
    }
    map
}

fn build(
    g: &Digraph,
    vertices: VertexSet,
    nodes: &mut Vec<DecompNode>,
    budget: &mut usize,
) -> Result<usize, DecomposeError> {
    if *budget == 0 {
        return Err(DecomposeError::Invariant("node budget exhausted".into()));
    }
    *budget -= 1;
    let s = Subproblem::new(g, vertices);
    if let Err(w) = verify_admissible(g, &s.vertices) {
        return Err(DecomposeError::Invariant(format!(
            "inadmissible subproblem: {w:?}"
        )));
    }
    let id = nodes.len();
    nodes.push(DecompNode {
        subproblem: s,
        case: None,
        children: None,
        align_left: Vec::new(),
        align_right: Vec::new(),
    });
    if nodes[id].subproblem.kind != Kind::Internal {
        return Ok(id);
    }
    let s = nodes[id].subproblem.clone();
    let case = classify(g, &s).map_err(DecomposeError::Invariant)?;
    let (lv, rv) = split(g, &s, &case).map_err(DecomposeError::Invariant)?;
    let left = build(g, lv, nodes, budget)?;
    let right = build(g, rv, nodes, budget)?;
    nodes[id].align_left = align(&s, &nodes[left].subproblem, &case, true);
    nodes[id].align_right = align(&s, &nodes[right].subproblem, &case, false);
    nodes[id].case = Some(case);
    nodes[id].children = Some((left, right));
    Ok(id)
}

/// Validates the input and builds the full decomposition tree. Internal
/// assertions surface as [`DecomposeError::Invariant`] instead of
/// silently proceeding; on validated untangled multitrees they double as
/// runtime checks of the structural guarantees this construction rests
/// on.
pub fn decompose(g: &Digraph) -> Result<DecompTree, DecomposeError> {
    check_multitree(g).map_err(DecomposeError::NotMultitree)?;
    check_untangled(g).map_err(DecomposeError::Tangled)?;
    if g.vertex_count() == 0 {
        return Err(DecomposeError::Invariant("empty graph".into()));
    }
    let n = g.vertex_count();
    let k = g.roots().len().max(1);
    // Loose sanity bound on tree size; merges copy at most the local
    // roots, and there are at most as many merges as connectors.
    let mut budget = 2 * n * (k + 1) + 2;
    let mut nodes = Vec::new();
    let root = build(g, g.vertex_set(), &mut nodes, &mut budget)?;
    let connectors = g.connectors().len();
    let tree = DecompTree { nodes, root };
    if tree.merge_count() > connectors {
        return Err(DecomposeError::Invariant(format!(
            "{} merges exceed {} connectors",
            tree.merge_count(),
            connectors
        )));
    }
    Ok(tree)
}
