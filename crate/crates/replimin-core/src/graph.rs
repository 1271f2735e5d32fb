//! Digraph representation with the structural queries the rest of the
//! crate is built on: reachability, roots/leaves, connectors, induced
//! subgraph views.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Index of a vertex inside one [`Digraph`]. Ids are assigned in
/// first-seen order, so id order is input order and every derived
/// ordering (root lists, signature indexes) is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A subset of one graph's vertices.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    UnknownVertex(String),
    DuplicateEdge(String, String),
    SelfLoop(String),
    InvalidName(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex `{v}`"),
            GraphError::DuplicateEdge(u, v) => write!(f, "duplicate edge `{u} {v}`"),
            GraphError::SelfLoop(v) => write!(f, "self-loop on `{v}`"),
            GraphError::InvalidName(v) => write!(f, "invalid vertex name `{v}`"),
        }
    }
}

/// Vertex names are restricted so the line-oriented text format stays
/// unambiguous.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A digraph with named vertices. No duplicate edges, no self-loops.
///
/// Construction is mutable; every analysis takes `&self`, so a built
/// graph can be shared freely across threads.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    names: Vec<String>,
    by_name: BTreeMap<String, VertexId>,
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name`, returning the existing id if already present.
    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId, GraphError> {
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        if !valid_name(name) {
            return Err(GraphError::InvalidName(name.into()));
        }
        let id = VertexId(self.names.len() as u32);
        self.names.push(name.into());
        self.by_name.insert(name.into(), id);
        self.out.push(Vec::new());
        self.inn.push(Vec::new());
        Ok(id)
    }

    /// Adds `u -> v`, interning both endpoints.
    pub fn add_edge(&mut self, u: &str, v: &str) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u.into()));
        }
        let ui = self.add_vertex(u)?;
        let vi = self.add_vertex(v)?;
        self.add_edge_ids(ui, vi)
    }

    pub fn add_edge_ids(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(self.name(u).into()));
        }
        if self.out[u.index()].contains(&v) {
            return Err(GraphError::DuplicateEdge(
                self.name(u).into(),
                self.name(v).into(),
            ));
        }
        self.out[u.index()].push(v);
        self.inn[v.index()].push(u);
        Ok(())
    }

    /// Removes `u -> v` if present. Used by the instance generator to
    /// roll back rejected mutations.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) {
        self.out[u.index()].retain(|&w| w != v);
        self.inn[v.index()].retain(|&w| w != u);
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: VertexId) -> &str {
        &self.names[id.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn out_neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.out[u.index()]
    }

    pub fn in_neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.inn[u.index()]
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.out[u.index()].iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Everything reachable from `u`, including `u` itself.
    pub fn reachable(&self, u: VertexId) -> VertexSet {
        let within = self.vertex_set();
        self.reachable_in(u, &within)
    }

    /// Reachability restricted to the induced subgraph on `within`.
    /// `u` must be a member of `within`.
    pub fn reachable_in(&self, u: VertexId, within: &VertexSet) -> VertexSet {
        debug_assert!(within.contains(&u));
        let mut seen = VertexSet::new();
        let mut stack = alloc::vec![u];
        seen.insert(u);
        while let Some(x) = stack.pop() {
            for &y in &self.out[x.index()] {
                if within.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// In-degree-zero and out-degree-zero vertices, respectively.
    pub fn roots_and_leaves(&self) -> (VertexSet, VertexSet) {
        let roots = self
            .vertices()
            .filter(|u| self.inn[u.index()].is_empty())
            .collect();
        let leaves = self
            .vertices()
            .filter(|u| self.out[u.index()].is_empty())
            .collect();
        (roots, leaves)
    }

    pub fn roots(&self) -> VertexSet {
        self.roots_and_leaves().0
    }

    pub fn leaves(&self) -> VertexSet {
        self.roots_and_leaves().1
    }

    /// Vertices with in-degree at least 2.
    pub fn connectors(&self) -> VertexSet {
        self.vertices()
            .filter(|u| self.inn[u.index()].len() >= 2)
            .collect()
    }

    pub fn in_degree_in(&self, u: VertexId, within: &VertexSet) -> usize {
        self.inn[u.index()]
            .iter()
            .filter(|p| within.contains(p))
            .count()
    }

    pub fn out_neighbors_in<'a>(
        &'a self,
        u: VertexId,
        within: &'a VertexSet,
    ) -> impl Iterator<Item = VertexId> + 'a {
        self.out[u.index()]
            .iter()
            .copied()
            .filter(move |v| within.contains(v))
    }

    pub fn in_neighbors_in<'a>(
        &'a self,
        u: VertexId,
        within: &'a VertexSet,
    ) -> impl Iterator<Item = VertexId> + 'a {
        self.inn[u.index()]
            .iter()
            .copied()
            .filter(move |v| within.contains(v))
    }

    /// Connectors of the induced subgraph on `within`.
    pub fn connectors_in(&self, within: &VertexSet) -> VertexSet {
        within
            .iter()
            .copied()
            .filter(|&u| self.in_degree_in(u, within) >= 2)
            .collect()
    }

    /// Roots (in-degree 0) of the induced subgraph, in id order.
    pub fn roots_in(&self, within: &VertexSet) -> Vec<VertexId> {
        within
            .iter()
            .copied()
            .filter(|&u| self.in_degree_in(u, within) == 0)
            .collect()
    }

    /// Global leaves that lie inside `within`. These are the vertices a
    /// placement restricted to `within` may use.
    pub fn leaves_in(&self, within: &VertexSet) -> VertexSet {
        within
            .iter()
            .copied()
            .filter(|&u| self.out[u.index()].is_empty())
            .collect()
    }

    pub fn has_edge_in(&self, within: &VertexSet) -> bool {
        self.edges()
            .any(|(u, v)| within.contains(&u) && within.contains(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_sample() -> Digraph {
        let mut g = Digraph::new();
        for (u, v) in [
            ("a", "b"),
            ("b", "d"),
            ("d", "h"),
            ("d", "g"),
            ("a", "c"),
            ("c", "a"),
            ("c", "e"),
            ("c", "d"),
            ("e", "f"),
        ] {
            g.add_edge(u, v).unwrap();
        }
        g
    }

    fn set(g: &Digraph, names: &[&str]) -> VertexSet {
        names.iter().map(|n| g.lookup(n).unwrap()).collect()
    }

    #[test]
    fn reachable_includes_self() {
        let g = cyclic_sample();
        let e = g.lookup("e").unwrap();
        assert_eq!(g.reachable(e), set(&g, &["e", "f"]));
        let d = g.lookup("d").unwrap();
        assert_eq!(g.reachable(d), set(&g, &["d", "g", "h"]));
    }

    #[test]
    fn reachable_isolated_vertex() {
        let mut g = Digraph::new();
        let v = g.add_vertex("v").unwrap();
        assert_eq!(g.reachable(v), [v].into_iter().collect());
    }

    #[test]
    fn roots_and_leaves_path() {
        let mut g = Digraph::new();
        g.add_edge("a", "b").unwrap();
        g.add_edge("b", "c").unwrap();
        let (roots, leaves) = g.roots_and_leaves();
        assert_eq!(roots, set(&g, &["a"]));
        assert_eq!(leaves, set(&g, &["c"]));
    }

    #[test]
    fn single_vertex_is_root_and_leaf() {
        let mut g = Digraph::new();
        g.add_vertex("x").unwrap();
        let (roots, leaves) = g.roots_and_leaves();
        assert_eq!(roots, leaves);
        assert_eq!(roots.len(), 1);
    }

    #[test]
    fn connectors_simple() {
        let mut g = Digraph::new();
        g.add_edge("a", "b").unwrap();
        g.add_edge("c", "b").unwrap();
        assert_eq!(g.connectors(), set(&g, &["b"]));
    }

    #[test]
    fn arborescence_has_no_connectors() {
        let mut g = Digraph::new();
        g.add_edge("r", "x").unwrap();
        g.add_edge("r", "y").unwrap();
        g.add_edge("x", "z").unwrap();
        assert!(g.connectors().is_empty());
    }

    #[test]
    fn rejects_duplicates_and_loops() {
        let mut g = Digraph::new();
        g.add_edge("a", "b").unwrap();
        assert!(matches!(
            g.add_edge("a", "b"),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(g.add_edge("a", "a"), Err(GraphError::SelfLoop(_))));
    }
}
