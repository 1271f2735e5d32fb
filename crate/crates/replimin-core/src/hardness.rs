//! Hardness-instance generator: turn a 3-edge-colored cubic graph into a
//! 3-multitree whose placement problem encodes independent set, plus the
//! machinery to verify that encoding by double brute force on small
//! inputs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::Digraph;
use crate::model::is_multitree;
use crate::oracle::{brute_force_independent_set, brute_force_lsp, OracleError};

/// A simple undirected graph with named vertices.
#[derive(Debug, Clone, Default)]
pub struct Ugraph {
    names: Vec<String>,
    by_name: BTreeMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Ugraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.by_name.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.into());
        self.by_name.insert(name.into(), i);
        self.adj.push(Vec::new());
        i
    }

    pub fn add_edge(&mut self, u: &str, v: &str) {
        let (ui, vi) = (self.add_vertex(u), self.add_vertex(v));
        assert_ne!(ui, vi, "self-loop");
        let e = (ui.min(vi), ui.max(vi));
        assert!(!self.edges.contains(&e), "duplicate edge");
        self.edges.push(e);
        self.adj[ui].push(vi);
        self.adj[vi].push(ui);
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }
}

/// Edge colors, parallel to `Ugraph::edges`, values in 1..=3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring(pub Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HardnessError {
    NotCubic { vertex: String, degree: usize },
    InvalidColor { value: u8 },
    ColoringLengthMismatch { got: usize, want: usize },
    /// Two edges at `vertex` share a color.
    ImproperColoring { vertex: String },
    TooLarge { edges: usize, cap: usize },
    Oracle(OracleError),
}

impl core::fmt::Display for HardnessError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HardnessError::NotCubic { vertex, degree } => {
                write!(f, "vertex `{vertex}` has degree {degree}, expected 3")
            }
            HardnessError::InvalidColor { value } => write!(f, "color {value} outside 1..=3"),
            HardnessError::ColoringLengthMismatch { got, want } => {
                write!(f, "coloring covers {got} edges, graph has {want}")
            }
            HardnessError::ImproperColoring { vertex } => {
                write!(f, "two same-colored edges meet at `{vertex}`")
            }
            HardnessError::TooLarge { edges, cap } => {
                write!(f, "{edges} edges exceed the search cap {cap}")
            }
            HardnessError::Oracle(e) => write!(f, "oracle refused: {e:?}"),
        }
    }
}

fn check_cubic(g: &Ugraph) -> Result<(), HardnessError> {
    for i in 0..g.vertex_count() {
        if g.degree(i) != 3 {
            return Err(HardnessError::NotCubic {
                vertex: g.name(i).into(),
                degree: g.degree(i),
            });
        }
    }
    Ok(())
}

/// Properness check: no vertex sees the same color twice.
pub fn check_coloring(g: &Ugraph, coloring: &EdgeColoring) -> Result<(), HardnessError> {
    if coloring.0.len() != g.edges.len() {
        return Err(HardnessError::ColoringLengthMismatch {
            got: coloring.0.len(),
            want: g.edges.len(),
        });
    }
    if let Some(&c) = coloring.0.iter().find(|c| !(1..=3).contains(*c)) {
        return Err(HardnessError::InvalidColor { value: c });
    }
    let mut seen = alloc::vec![[false; 4]; g.vertex_count()];
    for (&(u, v), &c) in g.edges.iter().zip(&coloring.0) {
        for w in [u, v] {
            if seen[w][c as usize] {
                return Err(HardnessError::ImproperColoring {
                    vertex: g.name(w).into(),
                });
            }
            seen[w][c as usize] = true;
        }
    }
    Ok(())
}

/// Exhaustive proper 3-edge-coloring by backtracking; refuses beyond 24
/// edges.
pub fn brute_force_coloring(g: &Ugraph) -> Result<Option<EdgeColoring>, HardnessError> {
    check_cubic(g)?;
    const CAP: usize = 24;
    if g.edges.len() > CAP {
        return Err(HardnessError::TooLarge {
            edges: g.edges.len(),
            cap: CAP,
        });
    }
    fn rec(g: &Ugraph, colors: &mut Vec<u8>, seen: &mut Vec<[bool; 4]>) -> bool {
        let i = colors.len();
        if i == g.edges.len() {
            return true;
        }
        let (u, v) = g.edges[i];
        for c in 1..=3u8 {
            if seen[u][c as usize] || seen[v][c as usize] {
                continue;
            }
            colors.push(c);
            seen[u][c as usize] = true;
            seen[v][c as usize] = true;
            if rec(g, colors, seen) {
                return true;
            }
            colors.pop();
            seen[u][c as usize] = false;
            seen[v][c as usize] = false;
        }
        false
    }
    let mut colors = Vec::new();
    let mut seen = alloc::vec![[false; 4]; g.vertex_count()];
    if rec(g, &mut colors, &mut seen) {
        Ok(Some(EdgeColoring(colors)))
    } else {
        Ok(None)
    }
}

/// Names for the three color-class roots, in color order.
pub const ROOT_NAMES: [&str; 3] = ["alpha", "beta", "gamma"];

/// The reduction output: one vertex per input vertex (the leaves), one
/// per edge (named `u_v` with endpoints in id order), three roots wired
/// to their color classes, and each edge vertex pointing at its two
/// endpoints. Always a 3-multitree, which is asserted before returning.
pub fn build_reduction(g: &Ugraph, coloring: &EdgeColoring) -> Result<Digraph, HardnessError> {
    check_cubic(g)?;
    check_coloring(g, coloring)?;
    let mut h = Digraph::new();
    for r in ROOT_NAMES {
        h.add_vertex(r).expect("fixed root names are valid");
    }
    let edge_name = |&(u, v): &(usize, usize)| format!("{}_{}", g.name(u), g.name(v));
    for (e, &c) in g.edges.iter().zip(&coloring.0) {
        let en = edge_name(e);
        h.add_edge(ROOT_NAMES[c as usize - 1], &en)
            .expect("edge names are unique");
        h.add_edge(&en, g.name(e.0)).expect("simple graph");
        h.add_edge(&en, g.name(e.1)).expect("simple graph");
    }
    assert_eq!(
        h.vertex_count(),
        g.vertex_count() + g.edges.len() + 3,
        "reduction size"
    );
    assert_eq!(h.roots().len(), 3, "reduction roots");
    assert_eq!(
        h.leaves().len(),
        g.vertex_count(),
        "leaves must be exactly the original vertices"
    );
    assert!(is_multitree(&h), "reduction must be a 3-multitree");
    Ok(h)
}

/// Lexicographic bound with a trailing run of don't-care entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundVector {
    pub prefix: Vec<i64>,
    pub wildcards: usize,
}

impl BoundVector {
    /// `f ≤ bound` in the lexicographic order where wildcard positions
    /// compare greater than any finite entry: once the prefix is
    /// exhausted without a decision, the bound wins.
    pub fn admits(&self, f: &[i64]) -> bool {
        assert_eq!(f.len(), self.prefix.len() + self.wildcards);
        for (x, b) in f.iter().zip(&self.prefix) {
            match x.cmp(b) {
                core::cmp::Ordering::Less => return true,
                core::cmp::Ordering::Greater => return false,
                core::cmp::Ordering::Equal => {}
            }
        }
        true
    }
}

/// The equivalence bound for placements of size ρ: at most 3 vertices at
/// failure number ρ, none in 2..ρ−1, last two entries free.
pub fn hardness_bound(rho: usize) -> BoundVector {
    let prefix_len = rho.saturating_sub(1);
    let mut prefix = alloc::vec![0i64; prefix_len];
    if prefix_len > 0 {
        prefix[0] = 3;
    }
    BoundVector {
        prefix,
        wildcards: rho + 1 - prefix_len,
    }
}

/// Double brute force: does [some size-k placement on the reduction meet
/// the bound] agree with [the graph has a size-k independent set]?
pub fn check_reduction_equivalence(
    g: &Ugraph,
    coloring: &EdgeColoring,
    k: usize,
    cap: u128,
) -> Result<bool, HardnessError> {
    let h = build_reduction(g, coloring)?;
    let (best, _) = brute_force_lsp(&h, k, cap).map_err(HardnessError::Oracle)?;
    let placement_side = hardness_bound(k).admits(best.as_finite().expect("finite oracle result"));
    let is_side =
        brute_force_independent_set(g.adjacency(), k, cap).map_err(HardnessError::Oracle)?;
    Ok(placement_side == is_side)
}
