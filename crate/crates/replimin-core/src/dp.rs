//! Optimization phase: bottom-up table evaluation over the decomposition
//! tree, followed by placement recovery and a direct re-evaluation of the
//! reported aggregate as a bug trap.
//!
//! A table maps `(r, signature)` to the lex-minimum aggregate over
//! placements of `r` replicas on the subproblem's leaves whose per-root
//! ancestry counts match the signature. Absent cells mean no such
//! placement exists.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::decompose::{decompose, Case, DecompTree, DecomposeError, Kind};
use crate::graph::{Digraph, VertexSet};
use crate::lexvec::{add_assign, bump, FailAgg};
use crate::model::{failure_aggregate, Placement};
use crate::tree::{solve_tree, TreeTable};

/// Per-root replica counts, aligned with the owning subproblem's
/// `local_roots` order.
pub type Signature = Vec<u32>;

pub type Key = (u32, Signature);

/// How a cell's value was obtained; enough to rebuild the placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Choice {
    BaseTree,
    BaseDiscrete,
    Up { key: Key },
    Out { key: Key, x: u32 },
    Include { key: Key },
    Isolate { key: Key, placed: bool },
    Merge { left: Key, right: Key },
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub agg: Vec<i64>,
    pub choice: Choice,
}

pub type DpTable = BTreeMap<Key, Cell>;

/// Re-keys a child signature through an alignment map; entry `i` of the
/// result reads the child entry the parent's root `i` is aligned to.
pub fn lift_signature(align: &[Option<usize>], beta: &[u32]) -> Signature {
    align
        .iter()
        .map(|slot| beta[slot.expect("lift through total alignment")])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// ρ must leave at least one leaf empty.
    RhoTooLarge { rho: usize, leaves: usize },
    Decompose(DecomposeError),
    /// Realizability or size checks failed; a bug, not an input problem.
    Invariant(String),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::RhoTooLarge { rho, leaves } => {
                write!(f, "rho {rho} must be smaller than the leaf count {leaves}")
            }
            SolveError::Decompose(e) => write!(f, "{e}"),
            SolveError::Invariant(s) => write!(f, "invariant violation: {s}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub tau_nodes: usize,
    pub table_cells: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub placement: Placement,
    pub aggregate: FailAgg,
    pub stats: Stats,
}

struct Solver<'a> {
    g: &'a Digraph,
    tree: &'a DecompTree,
    rho: usize,
    tables: Vec<Option<DpTable>>,
    tree_tables: Vec<Option<TreeTable>>,
}

/// Keeps the lex-smaller aggregate; the first writer wins ties, which is
/// deterministic because every enumeration below walks keys in ascending
/// order.
fn upsert(table: &mut DpTable, key: Key, agg: Vec<i64>, choice: Choice) {
    match table.get_mut(&key) {
        None => {
            table.insert(key, Cell { agg, choice });
        }
        Some(cell) => {
            if agg < cell.agg {
                *cell = Cell { agg, choice };
            }
        }
    }
}

impl<'a> Solver<'a> {
    fn node(&self, id: usize) -> &crate::decompose::DecompNode {
        self.tree.node(id)
    }

    fn compute(&mut self, id: usize) -> Result<(), SolveError> {
        if let Some((l, r)) = self.node(id).children {
            self.compute(l)?;
            self.compute(r)?;
        }
        let table = match self.node(id).subproblem.kind {
            Kind::Trivial => None,
            Kind::BaseTree => Some(self.base_tree(id)),
            Kind::BaseDiscrete => Some(self.base_discrete(id)),
            Kind::Internal => Some(self.internal(id)?),
        };
        if let Some(t) = &table {
            let k = self.node(id).subproblem.local_roots.len();
            let cap = ((self.rho + 1) as u128).saturating_pow(k as u32 + 1);
            if t.len() as u128 > cap {
                return Err(SolveError::Invariant(format!(
                    "node {id}: {} cells exceed ({}+1)^{} cap",
                    t.len(),
                    self.rho,
                    k + 1
                )));
            }
        }
        self.tables[id] = table;
        Ok(())
    }

    fn base_tree(&mut self, id: usize) -> DpTable {
        let s = &self.node(id).subproblem;
        let tt = solve_tree(self.g, &s.vertices, self.rho);
        let mut out = DpTable::new();
        for (x, cell) in tt.iter().enumerate() {
            if let Some((FailAgg::Finite(agg), _)) = cell {
                out.insert(
                    (x as u32, alloc::vec![x as u32]),
                    Cell {
                        agg: agg.clone(),
                        choice: Choice::BaseTree,
                    },
                );
            }
        }
        self.tree_tables[id] = Some(tt);
        out
    }

    fn base_discrete(&mut self, id: usize) -> DpTable {
        let s = &self.node(id).subproblem;
        let k = s.local_roots.len();
        let placeable: Vec<bool> = s
            .local_roots
            .iter()
            .map(|&q| self.g.out_neighbors(q).is_empty())
            .collect();
        let mut out = DpTable::new();
        // Subsets of placeable roots, capped at ρ replicas.
        let mut sig: Signature = alloc::vec![0; k];
        fn rec(
            i: usize,
            used: usize,
            sig: &mut Signature,
            placeable: &[bool],
            rho: usize,
            k: usize,
            out: &mut DpTable,
        ) {
            if i == k {
                let mut agg = alloc::vec![0i64; rho + 1];
                for &s in sig.iter() {
                    bump(&mut agg, s as usize, 1);
                }
                out.insert(
                    (used as u32, sig.clone()),
                    Cell {
                        agg,
                        choice: Choice::BaseDiscrete,
                    },
                );
                return;
            }
            rec(i + 1, used, sig, placeable, rho, k, out);
            if placeable[i] && used < rho {
                sig[i] = 1;
                rec(i + 1, used + 1, sig, placeable, rho, k, out);
                sig[i] = 0;
            }
        }
        rec(0, 0, &mut sig, &placeable, self.rho, k, &mut out);
        out
    }

    fn internal(&mut self, id: usize) -> Result<DpTable, SolveError> {
        let node = self.node(id);
        let (left_id, right_id) = node.children.expect("internal node has children");
        let case = node.case.clone().expect("internal node has a case");
        let align = node.align_left.clone();
        let roots = node.subproblem.local_roots.clone();
        let rho = self.rho;
        let mut out = DpTable::new();
        // Taken out (and restored below) so the borrow checker lets the
        // OUT arm stash its tree table on `self` while iterating.
        let left = self.tables[left_id]
            .take()
            .ok_or_else(|| SolveError::Invariant(format!("node {left_id}: missing table")))?;

        match case {
            Case::Up { root_idx } => {
                for ((r, beta), cell) in &left {
                    let alpha = lift_signature(&align, beta);
                    let mut agg = cell.agg.clone();
                    bump(&mut agg, alpha[root_idx] as usize, 1);
                    upsert(
                        &mut out,
                        (*r, alpha),
                        agg,
                        Choice::Up {
                            key: (*r, beta.clone()),
                        },
                    );
                }
            }
            Case::Include { q, shared: _ } => {
                // All q-indexes alias the shared child's slot ℓ.
                let ell = align[roots
                    .iter()
                    .position(|r| q.contains(r))
                    .expect("include removes at least two roots")]
                .expect("aligned");
                for ((r, beta), cell) in &left {
                    let alpha = lift_signature(&align, beta);
                    let mut agg = cell.agg.clone();
                    bump(&mut agg, beta[ell] as usize, q.len() as i64);
                    upsert(
                        &mut out,
                        (*r, alpha),
                        agg,
                        Choice::Include {
                            key: (*r, beta.clone()),
                        },
                    );
                }
            }
            Case::Isolate { root_idx } => {
                let placeable = self.g.out_neighbors(roots[root_idx]).is_empty();
                for ((r, beta), cell) in &left {
                    for x in 0..=u32::from(placeable) {
                        let r_new = r + x;
                        if r_new as usize > rho {
                            continue;
                        }
                        let mut alpha: Signature = alloc::vec![0; roots.len()];
                        for (i, slot) in align.iter().enumerate() {
                            if let Some(j) = slot {
                                alpha[i] = beta[*j];
                            }
                        }
                        alpha[root_idx] = x;
                        let mut agg = cell.agg.clone();
                        bump(&mut agg, x as usize, 1);
                        upsert(
                            &mut out,
                            (r_new, alpha),
                            agg,
                            Choice::Isolate {
                                key: (*r, beta.clone()),
                                placed: x == 1,
                            },
                        );
                    }
                }
            }
            Case::Out { root_idx, .. } => {
                let d = self.node(right_id).subproblem.vertices.clone();
                let tt = solve_tree(self.g, &d, rho);
                for ((r, beta), cell) in &left {
                    for (x, tcell) in tt.iter().enumerate() {
                        let Some((FailAgg::Finite(tagg), _)) = tcell else { continue };
                        let r_new = *r as usize + x;
                        if r_new > rho {
                            continue;
                        }
                        let mut alpha = lift_signature(&align, beta);
                        alpha[root_idx] += x as u32;
                        let mut agg = cell.agg.clone();
                        add_assign(&mut agg, tagg);
                        bump(&mut agg, alpha[root_idx] as usize, 1);
                        bump(&mut agg, beta[align[root_idx].unwrap()] as usize, -1);
                        upsert(
                            &mut out,
                            (r_new as u32, alpha),
                            agg,
                            Choice::Out {
                                key: (*r, beta.clone()),
                                x: x as u32,
                            },
                        );
                    }
                }
                self.tree_tables[right_id] = Some(tt);
            }
            Case::Merge => {
                let right = self.tables[right_id].take().ok_or_else(|| {
                    SolveError::Invariant(format!("node {right_id}: missing table"))
                })?;
                let k = roots.len();
                for ((r1, b1), c1) in &left {
                    for ((r2, b2), c2) in &right {
                        let r = r1 + r2;
                        if r as usize > rho {
                            continue;
                        }
                        let mut alpha: Signature = alloc::vec![0; k];
                        let mut agg = c1.agg.clone();
                        add_assign(&mut agg, &c2.agg);
                        for i in 0..k {
                            alpha[i] = b1[i] + b2[i];
                            // Shared roots are counted by both sides;
                            // replace the two partial counts with one
                            // combined one.
                            bump(&mut agg, alpha[i] as usize, 1);
                            bump(&mut agg, b1[i] as usize, -1);
                            bump(&mut agg, b2[i] as usize, -1);
                        }
                        upsert(
                            &mut out,
                            (r, alpha),
                            agg,
                            Choice::Merge {
                                left: (*r1, b1.clone()),
                                right: (*r2, b2.clone()),
                            },
                        );
                    }
                }
                self.tables[right_id] = Some(right);
            }
        }
        self.tables[left_id] = Some(left);
        Ok(out)
    }

    fn backtrack(&self, id: usize, key: &Key, out: &mut VertexSet) -> Result<(), SolveError> {
        let cell = self.tables[id]
            .as_ref()
            .and_then(|t| t.get(key))
            .ok_or_else(|| SolveError::Invariant(format!("node {id}: missing cell {key:?}")))?;
        let node = self.node(id);
        match &cell.choice {
            Choice::BaseTree => {
                let tt = self.tree_tables[id]
                    .as_ref()
                    .ok_or_else(|| SolveError::Invariant(format!("node {id}: no tree table")))?;
                let (_, leaves) = tt[key.0 as usize]
                    .as_ref()
                    .ok_or_else(|| SolveError::Invariant("infeasible tree entry".into()))?;
                out.extend(leaves.iter().copied());
            }
            Choice::BaseDiscrete => {
                for (i, &q) in node.subproblem.local_roots.iter().enumerate() {
                    if key.1[i] == 1 {
                        out.insert(q);
                    }
                }
            }
            Choice::Up { key } | Choice::Include { key } => {
                self.backtrack(node.children.unwrap().0, key, out)?;
            }
            Choice::Isolate { key, placed } => {
                self.backtrack(node.children.unwrap().0, key, out)?;
                if *placed {
                    let Some(Case::Isolate { root_idx }) = &node.case else {
                        unreachable!()
                    };
                    out.insert(node.subproblem.local_roots[*root_idx]);
                }
            }
            Choice::Out { key, x } => {
                let (l, r) = node.children.unwrap();
                self.backtrack(l, key, out)?;
                let tt = self.tree_tables[r]
                    .as_ref()
                    .ok_or_else(|| SolveError::Invariant(format!("node {r}: no tree table")))?;
                let (_, leaves) = tt[*x as usize]
                    .as_ref()
                    .ok_or_else(|| SolveError::Invariant("infeasible tree entry".into()))?;
                out.extend(leaves.iter().copied());
            }
            Choice::Merge { left, right } => {
                let (l, r) = node.children.unwrap();
                self.backtrack(l, left, out)?;
                self.backtrack(r, right, out)?;
            }
        }
        Ok(())
    }
}

/// Solves on a prebuilt decomposition tree.
pub fn solve_with_tree(
    g: &Digraph,
    tree: &DecompTree,
    rho: usize,
) -> Result<Solution, SolveError> {
    let leaves = g.leaves().len();
    if rho >= leaves {
        return Err(SolveError::RhoTooLarge { rho, leaves });
    }
    let mut solver = Solver {
        g,
        tree,
        rho,
        tables: alloc::vec![None; tree.nodes.len()],
        tree_tables: alloc::vec![None; tree.nodes.len()],
    };
    solver.compute(tree.root)?;

    // The optimum is unconstrained over signatures: every placement of ρ
    // replicas realizes some signature at the root subproblem.
    let root_table = solver.tables[tree.root]
        .as_ref()
        .ok_or_else(|| SolveError::Invariant("root subproblem has no table".into()))?;
    let best = root_table
        .iter()
        .filter(|((r, _), _)| *r as usize == rho)
        .min_by(|(ka, a), (kb, b)| a.agg.cmp(&b.agg).then_with(|| ka.cmp(kb)))
        .map(|(k, _)| k.clone())
        .ok_or_else(|| {
            SolveError::Invariant(format!("no feasible placement of size {rho} in root table"))
        })?;

    let mut placed = VertexSet::new();
    solver.backtrack(tree.root, &best, &mut placed)?;
    if placed.len() != rho {
        return Err(SolveError::Invariant(format!(
            "backtracked placement has {} replicas, expected {rho}",
            placed.len()
        )));
    }
    let placement = Placement::new(g, placed)
        .map_err(|e| SolveError::Invariant(format!("non-leaf in placement: {e:?}")))?;
    let aggregate = failure_aggregate(g, &placement);
    let claimed = FailAgg::Finite(root_table[&best].agg.clone());
    if aggregate != claimed {
        return Err(SolveError::Invariant(format!(
            "re-evaluated aggregate {aggregate:?} disagrees with table value {claimed:?}"
        )));
    }
    if !aggregate.is_nonnegative() {
        return Err(SolveError::Invariant("negative aggregate entry".into()));
    }
    let stats = Stats {
        tau_nodes: tree.nodes.len(),
        table_cells: solver
            .tables
            .iter()
            .flatten()
            .map(BTreeMap::len)
            .sum::<usize>(),
    };
    Ok(Solution {
        placement,
        aggregate,
        stats,
    })
}

/// Decomposes and solves in one call.
pub fn solve(g: &Digraph, rho: usize) -> Result<Solution, SolveError> {
    let tree = decompose(g).map_err(SolveError::Decompose)?;
    solve_with_tree(g, &tree, rho)
}
