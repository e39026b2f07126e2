//! DIMACS-style graph text and cycle-notation generator output.
//!
//! Graphs: `p edge <n> <m>`, then `n <vertex> <color>` and `e <u> <v>` lines
//! with 1-based vertices. `c` lines are comments. Absent colors default to 0.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{build_graph, ColoredGraph, GraphError};
use crate::perm::SparseAutomorphism;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header")]
    MalformedHeader,
    #[error("missing header")]
    MissingHeader,
    #[error("malformed line")]
    MalformedLine,
    #[error("vertex {vertex} out of range [1, {n}]")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} colored twice")]
    DuplicateColor(usize),
    #[error("header announces {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
}

fn fail(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn numbers<const K: usize>(fields: &[&str]) -> Option<[usize; K]> {
    if fields.len() != K {
        return None;
    }
    let mut out = [0; K];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f.parse().ok()?;
    }
    Some(out)
}

pub fn parse_dimacs(text: &str) -> Result<ColoredGraph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut colors = Vec::new();
    let mut colored = Vec::new();
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some((&tag, rest)) = fields.split_first() else { continue };
        if tag == "c" {
            continue;
        }
        if tag == "p" {
            if header.is_some() || rest.first() != Some(&"edge") {
                return Err(fail(line, ParseErrorKind::MalformedHeader));
            }
            let [n, m] = numbers(&rest[1..]).ok_or(fail(line, ParseErrorKind::MalformedHeader))?;
            header = Some((n, m, line));
            colors = vec![0; n];
            colored = vec![false; n];
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(fail(line, ParseErrorKind::MissingHeader));
        };
        let vertex = |v: usize| {
            if (1..=n).contains(&v) {
                Ok(v - 1)
            } else {
                Err(fail(line, ParseErrorKind::OutOfRange { vertex: v, n }))
            }
        };
        match tag {
            "n" => {
                let [v, c] = numbers(rest).ok_or(fail(line, ParseErrorKind::MalformedLine))?;
                let v = vertex(v)?;
                if colored[v] {
                    return Err(fail(line, ParseErrorKind::DuplicateColor(v + 1)));
                }
                colored[v] = true;
                colors[v] = c;
            }
            "e" => {
                let [u, v] = numbers(rest).ok_or(fail(line, ParseErrorKind::MalformedLine))?;
                let (a, b) = (vertex(u)?, vertex(v)?);
                if a == b {
                    return Err(fail(line, ParseErrorKind::SelfLoop(u)));
                }
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(fail(line, ParseErrorKind::DuplicateEdge(u, v)));
                }
                edges.push((a, b));
            }
            _ => return Err(fail(line, ParseErrorKind::MalformedLine)),
        }
    }
    let Some((n, m, header_line)) = header else {
        return Err(fail(last_line.max(1), ParseErrorKind::MissingHeader));
    };
    if edges.len() != m {
        return Err(fail(header_line, ParseErrorKind::EdgeCount { expected: m, found: edges.len() }));
    }
    build_graph(n, &edges, &colors).map_err(|e| {
        let kind = match e {
            GraphError::SelfLoop(v) => ParseErrorKind::SelfLoop(v + 1),
            GraphError::DuplicateEdge(a, b) => ParseErrorKind::DuplicateEdge(a + 1, b + 1),
            GraphError::OutOfRange { vertex, n } => ParseErrorKind::OutOfRange { vertex: vertex + 1, n },
            _ => ParseErrorKind::MalformedLine,
        };
        fail(header_line, kind)
    })
}

/// Canonical text: header, color lines for non-zero colors, then edges
/// sorted with the smaller endpoint first.
pub fn write_dimacs(g: &ColoredGraph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for v in 0..g.n() {
        if g.color(v) != 0 {
            writeln!(out, "n {} {}", v + 1, g.color(v)).unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

/// One permutation in 1-based cycle notation, `()` for the identity.
pub fn format_generator(s: &SparseAutomorphism) -> String {
    if s.is_identity() {
        return "()".to_string();
    }
    let mut out = String::new();
    for cycle in s.cycles() {
        out.push('(');
        let points: Vec<String> = cycle.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&points.join(" "));
        out.push(')');
    }
    out
}

pub fn write_generators(gens: &[SparseAutomorphism]) -> String {
    gens.iter().map(|s| format_generator(s) + "\n").collect()
}
