//! Line-oriented text formats: edge-list graphs and edge colorings.
//!
//! Graph files: one `u v` edge per line, a single token for an isolated
//! vertex, `#` starts a comment. Names are `[A-Za-z0-9_]+`. Coloring
//! files carry `u v c` lines with `c` in 1..=3.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};
use replimin_core::hardness::{EdgeColoring, Ugraph};
use replimin_core::Digraph;

pub fn parse_graph(text: &str) -> Result<Digraph> {
    let mut g = Digraph::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let report = |e| anyhow!("line {}: {e}", lineno + 1);
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(v), None, _) => {
                g.add_vertex(v).map_err(report)?;
            }
            (Some(u), Some(v), None) => {
                g.add_edge(u, v).map_err(report)?;
            }
            _ => bail!("line {}: expected `u v` or a single vertex", lineno + 1),
        }
    }
    Ok(g)
}

pub fn write_graph(g: &Digraph) -> String {
    let mut out = String::new();
    for u in g.vertices() {
        if g.out_neighbors(u).is_empty() && g.in_neighbors(u).is_empty() {
            writeln!(out, "{}", g.name(u)).unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", g.name(u), g.name(v)).unwrap();
    }
    out
}

/// Undirected reading of the same edge-list format.
pub fn parse_ugraph(text: &str) -> Result<Ugraph> {
    let mut g = Ugraph::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [v] => {
                g.add_vertex(v);
            }
            [u, v] => {
                if u == v {
                    bail!("line {}: self-loop", lineno + 1);
                }
                g.add_edge(u, v);
            }
            _ => bail!("line {}: expected `u v`", lineno + 1),
        }
    }
    Ok(g)
}

/// `u v c` lines, one per edge of `g`, any order.
pub fn parse_coloring(g: &Ugraph, text: &str) -> Result<EdgeColoring> {
    let mut colors = vec![0u8; g.edges().len()];
    let index_of = |u: &str, v: &str| -> Option<usize> {
        let (ui, vi) = (g.lookup(u)?, g.lookup(v)?);
        let key = (ui.min(vi), ui.max(vi));
        g.edges().iter().position(|&e| e == key)
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [u, v, c] = tokens.as_slice() else {
            bail!("line {}: expected `u v c`", lineno + 1);
        };
        let idx = index_of(u, v)
            .ok_or_else(|| anyhow!("line {}: edge `{u} {v}` not in graph", lineno + 1))?;
        if colors[idx] != 0 {
            bail!("line {}: edge `{u} {v}` colored twice", lineno + 1);
        }
        colors[idx] = c.parse()?;
    }
    if let Some(i) = colors.iter().position(|&c| c == 0) {
        let (u, v) = g.edges()[i];
        bail!("edge `{} {}` has no color", g.name(u), g.name(v));
    }
    Ok(EdgeColoring(colors))
}
