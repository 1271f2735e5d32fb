//! Exhaustive ground truth. Enumerates every candidate subset outright —
//! deliberately free of pruning or cleverness so it stays auditable — and
//! is what the solvers are differentially tested against.

use alloc::vec::Vec;

use crate::graph::{Digraph, VertexId, VertexSet};
use crate::lexvec::FailAgg;
use crate::model::{failure_aggregate, Placement};

/// Refusal threshold on the number of subsets to enumerate.
pub const DEFAULT_CAP: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// ρ exceeds the number of leaves.
    TooManyReplicas { rho: usize, leaves: usize },
    /// C(n, k) subsets would exceed the cap.
    TooLarge { combinations: u128, cap: u128 },
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Visits all k-subsets of `0..n` in colex order, i.e. ordered by the
/// reversed index tuple. Indices in `idx` are kept increasing.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // Advance the lowest index that still has room, colex-style.
        let mut i = 0;
        while i < k {
            let limit = if i + 1 < k { idx[i + 1] } else { n };
            if idx[i] + 1 < limit {
                idx[i] += 1;
                for (j, slot) in idx.iter_mut().enumerate().take(i) {
                    *slot = j;
                }
                break;
            }
            i += 1;
        }
        if i == k {
            return;
        }
        if k == 0 {
            return;
        }
    }
}

/// Lex-minimum aggregate over all exactly-ρ leaf placements, plus every
/// placement achieving it (sorted, so the report is deterministic).
pub fn brute_force_lsp(
    g: &Digraph,
    rho: usize,
    cap: u128,
) -> Result<(FailAgg, Vec<VertexSet>), OracleError> {
    let leaves: Vec<VertexId> = g.leaves().into_iter().collect();
    if rho > leaves.len() {
        return Err(OracleError::TooManyReplicas {
            rho,
            leaves: leaves.len(),
        });
    }
    let combinations = binomial(leaves.len(), rho);
    if combinations > cap {
        return Err(OracleError::TooLarge { combinations, cap });
    }
    let mut best: Option<(FailAgg, Vec<VertexSet>)> = None;
    for_each_combination(leaves.len(), rho, |idx| {
        let set: VertexSet = idx.iter().map(|&i| leaves[i]).collect();
        let p = Placement::new(g, set.clone()).expect("leaves by construction");
        let agg = failure_aggregate(g, &p);
        match &mut best {
            None => best = Some((agg, alloc::vec![set])),
            Some((b, wins)) => match agg.cmp(b) {
                core::cmp::Ordering::Less => best = Some((agg, alloc::vec![set])),
                core::cmp::Ordering::Equal => wins.push(set),
                core::cmp::Ordering::Greater => {}
            },
        }
    });
    let (agg, mut wins) = best.expect("at least the empty/first combination exists");
    wins.sort();
    Ok((agg, wins))
}

/// Undirected adjacency check used by the hardness-reduction tests:
/// does `g` contain an independent set of exactly `k` vertices?
/// `adj[i]` holds the neighbors of vertex `i`.
pub fn brute_force_independent_set(
    adj: &[Vec<usize>],
    k: usize,
    cap: u128,
) -> Result<bool, OracleError> {
    let n = adj.len();
    if k > n {
        return Ok(false);
    }
    let combinations = binomial(n, k);
    if combinations > cap {
        return Err(OracleError::TooLarge { combinations, cap });
    }
    let mut found = false;
    for_each_combination(n, k, |idx| {
        if found {
            return;
        }
        let independent = idx.iter().enumerate().all(|(a, &u)| {
            idx[a + 1..]
                .iter()
                .all(|&v| !adj[u].contains(&v))
        });
        if independent {
            found = true;
        }
    });
    Ok(found)
}
