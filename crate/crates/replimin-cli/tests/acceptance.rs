//! Acceptance gate: nine numbered criteria covering oracle equivalence,
//! worked-example reproductions, structural property suites, the
//! hardness-reduction equivalence, and scaling budgets. Each test prints
//! a single summary line on success; a failed assert is the fail line.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use replimin_core::decompose::{
    build_hypergraph, check_components, classify, decompose, hypergraph_components, verify_admissible,
    Case, Kind, Subproblem,
};
use replimin_core::dp::{lift_signature, solve};
use replimin_core::gen::{random_cubic, random_untangled_multitree};
use replimin_core::hardness::{brute_force_coloring, check_reduction_equivalence, EdgeColoring, Ugraph};
use replimin_core::model::{canonicalize, failure_aggregate, failure_number, Placement};
use replimin_core::oracle::{brute_force_lsp, DEFAULT_CAP};
use replimin_core::{Digraph, FailAgg, VertexSet};

fn graph(edges: &[(&str, &str)]) -> Digraph {
    let mut g = Digraph::new();
    for (u, v) in edges {
        g.add_edge(u, v).unwrap();
    }
    g
}

fn names(g: &Digraph, s: &VertexSet) -> Vec<String> {
    s.iter().map(|&u| g.name(u).to_string()).collect()
}

/// The shared 500-instance corpus referenced by criteria 1, 4, and 5.
fn corpus() -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    (0..500)
        .map(|_| {
            let k = rng.gen_range(1..=4usize);
            let n = rng.gen_range((2 * k).max(4)..=14);
            random_untangled_multitree(k, n, &mut rng)
        })
        .collect()
}

#[test]
fn criterion_1_solver_matches_exhaustive_oracle() {
    let start = Instant::now();
    let mut checked = 0usize;
    for g in corpus() {
        let leaves = g.leaves().len();
        for rho in 1..=4usize {
            if rho >= leaves {
                continue;
            }
            let sol = solve(&g, rho).unwrap();
            let (best, _) = brute_force_lsp(&g, rho, DEFAULT_CAP).unwrap();
            assert_eq!(sol.aggregate, best, "optimum mismatch at rho={rho}");
            let replay = failure_aggregate(&g, &sol.placement);
            assert_eq!(replay, best, "returned placement does not realize the optimum");
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 120.0, "criterion 1 exceeded 2 minutes ({secs:.1}s)");
    println!(
        "criterion 1 PASS: solver == oracle on {checked} (instance, rho) pairs over 500 graphs in {secs:.1}s"
    );
}

#[test]
fn criterion_2_flattening_worked_example() {
    let left = graph(&[
        ("a", "b"),
        ("b", "d"),
        ("d", "h"),
        ("d", "g"),
        ("a", "c"),
        ("c", "a"),
        ("c", "e"),
        ("c", "d"),
        ("e", "f"),
    ]);
    let flat = canonicalize(&left);
    let expect = graph(&[
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
    ]);
    let edge_names = |g: &Digraph| -> Vec<(String, String)> {
        let mut e: Vec<_> = g
            .edges()
            .map(|(u, v)| (g.name(u).to_string(), g.name(v).to_string()))
            .collect();
        e.sort();
        e
    };
    assert_eq!(edge_names(&flat), edge_names(&expect));

    let mut p = VertexSet::new();
    p.insert(flat.lookup("f").unwrap());
    p.insert(flat.lookup("g").unwrap());
    let p = Placement::new(&flat, p).unwrap();
    let got: Vec<usize> = ["a", "b", "c", "d", "e"]
        .iter()
        .map(|n| failure_number(&flat, flat.lookup(n).unwrap(), &p))
        .collect();
    assert_eq!(got, vec![2, 1, 2, 1, 1]);
    println!("criterion 2 PASS: flattening reproduces the worked example edge set and failure numbers (2,1,2,1,1)");
}

#[test]
fn criterion_3_shadow_hypergraph_worked_example() {
    let g = graph(&[
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
    ]);
    let s = Subproblem::new(&g, g.vertex_set());
    let h = build_hypergraph(&g, &s);
    // One hyperedge per (root, child) pair; the distinct shadows are:
    let mut shadows: Vec<Vec<String>> = h.edges.iter().map(|e| names(&g, &e.shadow)).collect();
    shadows.sort();
    shadows.dedup();
    let mut expect = vec![
        vec!["n1".to_string()],
        vec!["n1".into(), "n2".into()],
        vec!["n3".into(), "n4".into()],
        vec!["n1".into(), "n2".into(), "n3".into(), "n4".into()],
        vec!["e".into()],
    ];
    expect.sort();
    assert_eq!(shadows, expect);

    let comps = hypergraph_components(&h);
    let comp_names: Vec<Vec<String>> = comps.iter().map(|c| names(&g, &c.vertices)).collect();
    assert_eq!(
        comp_names,
        vec![
            vec!["e".to_string()],
            vec!["n1".into(), "n2".into(), "n3".into(), "n4".into()],
        ]
    );
    assert_eq!(classify(&g, &s), Ok(Case::Merge));
    println!("criterion 3 PASS: shadow hypergraph has the five expected hyperedges, two components, and classifies as MERGE");
}

#[test]
fn criterion_4_merge_component_properties() {
    let mut merges = 0usize;
    for g in corpus() {
        let t = decompose(&g).unwrap();
        for node in &t.nodes {
            if node.case != Some(Case::Merge) {
                continue;
            }
            merges += 1;
            let h = build_hypergraph(&g, &node.subproblem);
            let comps = hypergraph_components(&h);
            assert_eq!(
                check_components(&h, &comps),
                Ok(()),
                "component property violated in a merge node"
            );
        }
    }
    assert!(merges > 0, "corpus exercised no merges");
    println!("criterion 4 PASS: component cover/disjointness/laminarity held on all {merges} merge nodes");
}

#[test]
fn criterion_5_decomposition_structure() {
    let mut nodes_seen = 0usize;
    for g in corpus() {
        let t = decompose(&g).unwrap(); // termination: build is budgeted
        for node in &t.nodes {
            nodes_seen += 1;
            match node.subproblem.kind {
                Kind::Internal => {
                    assert_eq!(verify_admissible(&g, &node.subproblem.vertices), Ok(()));
                    assert!(node.children.is_some());
                }
                Kind::Trivial | Kind::BaseTree | Kind::BaseDiscrete => {
                    assert!(node.children.is_none(), "leaf kinds carry no children");
                }
            }
        }
        assert!(t.merge_count() <= g.connectors().len());
    }
    println!("criterion 5 PASS: {nodes_seen} decomposition nodes across 500 graphs satisfied kind/admissibility/merge-count checks");
}

fn reduction_holds_for_all_k(g: &Ugraph, coloring: &EdgeColoring) {
    for k in 1..=g.vertex_count() / 2 {
        assert_eq!(
            check_reduction_equivalence(g, coloring, k, DEFAULT_CAP),
            Ok(true),
            "equivalence failed at k={k}"
        );
    }
}

#[test]
fn criterion_6_reduction_equivalence() {
    let start = Instant::now();
    let mut k4 = Ugraph::new();
    for (u, v) in [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")] {
        k4.add_edge(u, v);
    }
    let col = brute_force_coloring(&k4).unwrap().unwrap();
    reduction_holds_for_all_k(&k4, &col);

    // The 8-vertex cubic example, with its printed proper coloring.
    let mut ex = Ugraph::new();
    let colored_edges = [
        ("a", "b", 1),
        ("a", "c", 3),
        ("a", "d", 2),
        ("d", "c", 1),
        ("d", "e", 3),
        ("c", "f", 2),
        ("b", "g", 2),
        ("g", "f", 3),
        ("g", "h", 1),
        ("e", "f", 1),
        ("h", "e", 2),
        ("b", "h", 3),
    ];
    let mut colors = Vec::new();
    for (u, v, c) in colored_edges {
        ex.add_edge(u, v);
        colors.push((u, v, c));
    }
    // Re-order the colors to the graph's normalized edge order.
    let coloring = EdgeColoring(
        ex.edges()
            .iter()
            .map(|&(ui, vi)| {
                colors
                    .iter()
                    .find(|(u, v, _)| {
                        let (a, b) = (ex.lookup(u).unwrap(), ex.lookup(v).unwrap());
                        (a.min(b), a.max(b)) == (ui, vi)
                    })
                    .unwrap()
                    .2
            })
            .collect(),
    );
    reduction_holds_for_all_k(&ex, &coloring);

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0006);
    let mut random_checked = 0usize;
    while random_checked < 10 {
        let n = [4usize, 6, 8, 10][rng.gen_range(0..4)];
        let edges = random_cubic(n, &mut rng);
        let mut g = Ugraph::new();
        for (u, v) in edges {
            g.add_edge(&format!("v{u}"), &format!("v{v}"));
        }
        let Some(col) = brute_force_coloring(&g).unwrap() else {
            continue;
        };
        reduction_holds_for_all_k(&g, &col);
        random_checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "criterion 6 exceeded 1 minute ({secs:.1}s)");
    println!(
        "criterion 6 PASS: reduction equivalence held for K4, the 8-vertex example, and {random_checked} random cubic graphs in {secs:.1}s"
    );
}

#[test]
fn criterion_7_alignment_mapping() {
    // Four roots collapse onto the shared child's slot (index 2).
    let align = [
        Some(0),
        Some(1),
        Some(2),
        Some(2),
        Some(2),
        Some(2),
        Some(3),
        Some(4),
    ];
    assert_eq!(
        lift_signature(&align, &[3, 2, 1, 4, 3]),
        vec![3, 2, 1, 1, 1, 1, 4, 3]
    );
    println!("criterion 7 PASS: signature lift maps (3,2,1,4,3) to (3,2,1,1,1,1,4,3)");
}

#[test]
fn criterion_8_lex_order_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0008);
    fn vector(rng: &mut ChaCha8Rng, len: usize) -> FailAgg {
        FailAgg::Finite((0..len).map(|_| rng.gen_range(0..10i64)).collect())
    }
    for _ in 0..100_000 {
        let len = rng.gen_range(1..=8usize);
        let (a, b, c, d) = (
            vector(&mut rng, len),
            vector(&mut rng, len),
            vector(&mut rng, len),
            vector(&mut rng, len),
        );
        // Translation compatibility.
        assert_eq!(a.cmp(&b), (&a + &c).cmp(&(&b + &c)));
        // Monotonicity under addition of comparable pairs.
        if a <= b && c <= d {
            assert!(&a + &c <= &b + &d);
        }
        // Subtraction inverts addition.
        assert_eq!(&(&a + &b) - &b, a);
    }
    println!("criterion 8 PASS: translation compatibility and sum monotonicity held on 100000 random tuples");
}

#[test]
fn criterion_9_scaling_budgets() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0009);

    let g = random_untangled_multitree(2, 100, &mut rng);
    let start = Instant::now();
    let sol = solve(&g, 6).unwrap();
    let secs_a = start.elapsed().as_secs_f64();
    assert!(sol.aggregate.is_finite());
    assert!(secs_a < 10.0, "k=2 n=100 rho=6 took {secs_a:.2}s");

    let g = random_untangled_multitree(3, 60, &mut rng);
    let start = Instant::now();
    let sol = solve(&g, 5).unwrap();
    let secs_b = start.elapsed().as_secs_f64();
    assert!(sol.aggregate.is_finite());
    assert!(secs_b < 60.0, "k=3 n=60 rho=5 took {secs_b:.2}s");

    // The bench subcommand reports per-instance timings.
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_replimin"))
        .args(["bench", "--k", "2", "--n", "60", "--rho", "4", "--seed", "9", "--count", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    for l in &lines {
        assert!(l["solve_ms"].as_f64().unwrap() > 0.0);
        assert!(l["table_cells"].as_u64().unwrap() > 0);
    }
    println!(
        "criterion 9 PASS: (k=2,n=100,rho=6) in {secs_a:.2}s (<10s) and (k=3,n=60,rho=5) in {secs_b:.2}s (<60s); bench emitted per-instance timings"
    );
}
