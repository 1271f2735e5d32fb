//! `replimin`: command-line front end for the lexico-minimum replica
//! placement toolkit. All results go to stdout as JSON lines;
//! diagnostics go to stderr. Exit codes: 0 success, 2 input or
//! validation error, 3 internal invariant violation.

mod format;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use replimin_core::decompose::{decompose, Case, DecompTree, DecomposeError, Kind};
use replimin_core::dp::{solve_with_tree, SolveError};
use replimin_core::gen::random_untangled_multitree;
use replimin_core::hardness::{
    brute_force_coloring, build_reduction, check_coloring, hardness_bound, BoundVector,
};
use replimin_core::model::{canonicalize, check_multitree, check_untangled, MultitreeViolation};
use replimin_core::oracle::brute_force_lsp;
use replimin_core::{Digraph, FailAgg};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "replimin", version, about = "Exact lexico-minimum replica placement on multitree failure-domain models")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Report structural facts about a graph file.
    Validate { input: PathBuf },
    /// Flatten a digraph to its canonical placement model.
    Canonicalize {
        input: PathBuf,
        /// Output graph file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the decomposition tree of an untangled multitree.
    Decompose {
        input: PathBuf,
        /// Write the tree JSON here instead of stdout.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Compute the lex-minimum placement of a given size.
    Solve {
        input: PathBuf,
        #[arg(long)]
        rho: usize,
    },
    /// Exhaustive reference answer (small instances only).
    Oracle {
        input: PathBuf,
        #[arg(long)]
        rho: usize,
        /// Refusal threshold on the number of enumerated subsets.
        #[arg(long, default_value_t = replimin_core::oracle::DEFAULT_CAP)]
        cap: u128,
    },
    /// Build the hardness-reduction multitree from a cubic graph.
    Reduce {
        input: PathBuf,
        /// `u v c` lines; brute-forced when omitted (small graphs only).
        #[arg(long)]
        coloring: Option<PathBuf>,
        /// Output graph file for the reduction; stdout JSON always.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the solver on generated instances (one JSON line each).
    Bench {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_err(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn internal_err(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        input_err(format!("{e:#}"))
    }
}

impl From<DecomposeError> for Failure {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::Invariant(_) => internal_err(e.to_string()),
            _ => input_err(e.to_string()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Invariant(_) => internal_err(e.to_string()),
            SolveError::Decompose(d) => d.into(),
            SolveError::RhoTooLarge { .. } => input_err(e.to_string()),
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<Digraph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    Ok(format::parse_graph(&text)?)
}

fn names(g: &Digraph, ids: impl IntoIterator<Item = replimin_core::VertexId>) -> Vec<String> {
    ids.into_iter().map(|u| g.name(u).to_string()).collect()
}

fn agg_json(a: &FailAgg) -> Value {
    match a.as_finite() {
        Some(v) => json!(v),
        None => json!("inf"),
    }
}

fn bound_json(b: &BoundVector) -> Value {
    let mut entries: Vec<Value> = b.prefix.iter().map(|&x| json!(x)).collect();
    entries.extend(std::iter::repeat_n(json!("inf"), b.wildcards));
    json!(entries)
}

fn emit(value: &Value) {
    println!("{value}");
}

fn cmd_validate(input: &PathBuf) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let (roots, leaves) = g.roots_and_leaves();
    let mut witnesses = serde_json::Map::new();
    let multitree = check_multitree(&g);
    let is_dag = !matches!(multitree, Err(MultitreeViolation::Cycle(_)));
    match &multitree {
        Ok(()) => {}
        Err(MultitreeViolation::Cycle(c)) => {
            witnesses.insert("cycle".into(), json!(names(&g, c.iter().copied())));
        }
        Err(MultitreeViolation::Diamond { top, left, right, bottom }) => {
            witnesses.insert(
                "diamond".into(),
                json!({
                    "top": g.name(*top), "left": g.name(*left),
                    "right": g.name(*right), "bottom": g.name(*bottom),
                }),
            );
        }
    }
    let untangled = check_untangled(&g);
    if let Err(w) = &untangled {
        witnesses.insert(
            "tangled_pair".into(),
            json!([g.name(w.u), g.name(w.v)]),
        );
    }
    emit(&json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "is_dag": is_dag,
        "is_multitree": multitree.is_ok(),
        "is_untangled": untangled.is_ok(),
        "roots": names(&g, roots),
        "leaves": names(&g, leaves),
        "connectors": names(&g, g.connectors()),
        "witnesses": witnesses,
    }));
    Ok(())
}

fn cmd_canonicalize(input: &PathBuf, output: Option<&PathBuf>) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let c = canonicalize(&g);
    let text = format::write_graph(&c);
    match output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            emit(&json!({
                "vertices": c.vertex_count(),
                "edges": c.edge_count(),
                "output": path.display().to_string(),
            }));
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn tree_json(g: &Digraph, t: &DecompTree) -> Value {
    let case_json = |case: &Case| match case {
        Case::Isolate { root_idx } => json!({"case": "ISOLATE", "root_idx": root_idx}),
        Case::Up { root_idx } => json!({"case": "UP", "root_idx": root_idx}),
        Case::Out { root_idx, child } => {
            json!({"case": "OUT", "root_idx": root_idx, "child": g.name(*child)})
        }
        Case::Include { q, shared } => json!({
            "case": "INCLUDE",
            "q": names(g, q.iter().copied()),
            "shared": g.name(*shared),
        }),
        Case::Merge => json!({"case": "MERGE"}),
    };
    let nodes: Vec<Value> = t
        .nodes
        .iter()
        .enumerate()
        .map(|(id, n)| {
            json!({
                "id": id,
                "kind": match n.subproblem.kind {
                    Kind::Internal => "internal",
                    Kind::Trivial => "trivial",
                    Kind::BaseTree => "base-tree",
                    Kind::BaseDiscrete => "base-discrete",
                },
                "vertices": names(g, n.subproblem.vertices.iter().copied()),
                "local_roots": names(g, n.subproblem.local_roots.iter().copied()),
                "case": n.case.as_ref().map(case_json),
                "children": n.children.map(|(l, r)| json!([l, r])),
                "align_left": n.align_left,
                "align_right": n.align_right,
            })
        })
        .collect();
    json!({"root": t.root, "merge_count": t.merge_count(), "nodes": nodes})
}

fn cmd_decompose(input: &PathBuf, json_out: Option<&PathBuf>) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let t = decompose(&g)?;
    let v = tree_json(&g, &t);
    match json_out {
        Some(path) => {
            fs::write(path, format!("{v}\n"))
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            emit(&json!({"nodes": t.nodes.len(), "output": path.display().to_string()}));
        }
        None => emit(&v),
    }
    Ok(())
}

fn cmd_solve(input: &PathBuf, rho: usize) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let start = Instant::now();
    let tree = decompose(&g)?;
    let sol = solve_with_tree(&g, &tree, rho)?;
    emit(&json!({
        "rho": rho,
        "placement": names(&g, sol.placement.leaves().iter().copied()),
        "aggregate": agg_json(&sol.aggregate),
        "stats": {
            "tau_nodes": sol.stats.tau_nodes,
            "table_cells": sol.stats.table_cells,
            "wall_ms": start.elapsed().as_secs_f64() * 1e3,
        },
    }));
    Ok(())
}

fn cmd_oracle(input: &PathBuf, rho: usize, cap: u128) -> Result<(), Failure> {
    let g = read_graph(input)?;
    let (agg, wins) = brute_force_lsp(&g, rho, cap).map_err(|e| input_err(format!("{e:?}")))?;
    emit(&json!({
        "rho": rho,
        "aggregate": agg_json(&agg),
        "argmins": wins
            .iter()
            .map(|w| names(&g, w.iter().copied()))
            .collect::<Vec<_>>(),
    }));
    Ok(())
}

fn cmd_reduce(
    input: &PathBuf,
    coloring: Option<&PathBuf>,
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let text = fs::read_to_string(input)
        .map_err(|e| input_err(format!("{}: {e}", input.display())))?;
    let g = format::parse_ugraph(&text)?;
    let coloring = match coloring {
        Some(path) => {
            let ctext = fs::read_to_string(path)
                .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
            let c = format::parse_coloring(&g, &ctext)?;
            check_coloring(&g, &c).map_err(|e| input_err(e.to_string()))?;
            c
        }
        None => brute_force_coloring(&g)
            .map_err(|e| input_err(e.to_string()))?
            .ok_or_else(|| input_err("graph admits no proper 3-edge-coloring"))?,
    };
    let h = build_reduction(&g, &coloring).map_err(|e| input_err(e.to_string()))?;
    let htext = format::write_graph(&h);
    if let Some(path) = output {
        fs::write(path, &htext).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    }
    let bounds: serde_json::Map<String, Value> = (1..=g.vertex_count() / 2)
        .map(|k| (k.to_string(), bound_json(&hardness_bound(k))))
        .collect();
    emit(&json!({
        "input_vertices": g.vertex_count(),
        "input_edges": g.edges().len(),
        "reduction_vertices": h.vertex_count(),
        "roots": names(&h, h.roots()),
        "bounds": bounds,
        "output": output.map(|p| p.display().to_string()),
        "graph": if output.is_none() { Some(htext) } else { None },
    }));
    Ok(())
}

/// FNV-1a over the edge list, so runs are comparable across machines.
fn instance_hash(g: &Digraph) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut byte = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for (u, v) in g.edges() {
        for b in g.name(u).bytes().chain(std::iter::once(b' ')).chain(g.name(v).bytes()) {
            byte(b);
        }
        byte(b'\n');
    }
    h
}

fn cmd_bench(k: usize, n: usize, rho: usize, seed: u64, count: usize) -> Result<(), Failure> {
    if n < 2 * k {
        return Err(input_err(format!("n={n} too small for k={k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let gen_start = Instant::now();
        let g = random_untangled_multitree(k, n, &mut rng);
        let gen_ms = gen_start.elapsed().as_secs_f64() * 1e3;
        if rho >= g.leaves().len() {
            emit(&json!({
                "instance": i, "skipped": "rho exceeds leaf count",
            }));
            continue;
        }
        let start = Instant::now();
        let tree = decompose(&g)?;
        let sol = solve_with_tree(&g, &tree, rho)?;
        emit(&json!({
            "instance": i,
            "seed": seed,
            "k": k,
            "n": n,
            "rho": rho,
            "hash": format!("{:016x}", instance_hash(&g)),
            "gen_ms": gen_ms,
            "solve_ms": start.elapsed().as_secs_f64() * 1e3,
            "tau_nodes": sol.stats.tau_nodes,
            "table_cells": sol.stats.table_cells,
            "aggregate": agg_json(&sol.aggregate),
        }));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Validate { input } => cmd_validate(input),
        Cmd::Canonicalize { input, output } => cmd_canonicalize(input, output.as_ref()),
        Cmd::Decompose { input, json } => cmd_decompose(input, json.as_ref()),
        Cmd::Solve { input, rho } => cmd_solve(input, *rho),
        Cmd::Oracle { input, rho, cap } => cmd_oracle(input, *rho, *cap),
        Cmd::Reduce {
            input,
            coloring,
            output,
        } => cmd_reduce(input, coloring.as_ref(), output.as_ref()),
        Cmd::Bench {
            k,
            n,
            rho,
            seed,
            count,
        } => cmd_bench(*k, *n, *rho, *seed, *count),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
