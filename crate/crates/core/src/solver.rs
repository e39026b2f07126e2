//! Reference solvers: brute-force enumeration, closure of generating sets,
//! and a plain individualization-refinement search.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::ColoredGraph;
use crate::perm::{check_sparse, Marks, SparseAutomorphism};
use crate::probing::OrbitPartition;
use crate::refinement::{individualize_refine, refine};

pub const DEFAULT_ORACLE_LIMIT: usize = 10;
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("graph has {n} vertices, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("group has more than {0} elements")]
    CapExceeded(usize),
}

/// Every color- and edge-preserving permutation of `g`, in lexicographic
/// order.
pub fn brute_force_aut(g: &ColoredGraph, limit: usize) -> Result<Vec<Vec<usize>>, SolverError> {
    let n = g.n();
    if n > limit {
        return Err(SolverError::TooLarge { n, limit });
    }
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(g, 0, &mut image, &mut used, &mut out);
    Ok(out)
}

fn extend(g: &ColoredGraph, v: usize, image: &mut [usize], used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    if v == g.n() {
        out.push(image.to_vec());
        return;
    }
    for w in 0..g.n() {
        if used[w] || g.color(w) != g.color(v) || g.degree(w) != g.degree(v) {
            continue;
        }
        if (0..v).any(|u| g.has_edge(v, u) != g.has_edge(w, image[u])) {
            continue;
        }
        image[v] = w;
        used[w] = true;
        extend(g, v + 1, image, used, out);
        used[w] = false;
    }
    image[v] = usize::MAX;
}

/// All elements generated by full permutations of `0..n`.
pub fn group_closure_full(gens: &[Vec<usize>], n: usize, cap: usize) -> Result<HashSet<Vec<usize>>, SolverError> {
    let identity: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(p) = queue.pop_front() {
        for s in gens {
            let q: Vec<usize> = p.iter().map(|&x| s[x]).collect();
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return Err(SolverError::CapExceeded(cap));
                }
                queue.push_back(q);
            }
        }
    }
    Ok(seen)
}

/// All elements generated by sparse generators acting on `0..n`.
pub fn group_closure(gens: &[SparseAutomorphism], n: usize, cap: usize) -> Result<HashSet<Vec<usize>>, SolverError> {
    let full: Vec<Vec<usize>> = gens.iter().map(|s| s.to_full(n)).collect();
    group_closure_full(&full, n, cap)
}

/// Order of the group generated by `gens`; panics past the default cap.
pub fn group_order(gens: &[SparseAutomorphism], n: usize) -> usize {
    group_closure(gens, n, DEFAULT_CLOSURE_CAP).expect("group too large").len()
}

/// Generating set of `Aut(g, pi)` by depth-first individualization and
/// refinement. Leaves are compared with the first leaf; siblings whose root
/// vertex is already in a known orbit are skipped, and nodes whose cell
/// layout differs from the first path's are pruned.
///
/// `pi` should refine the graph's own coloring.
pub fn ir_solve(g: &ColoredGraph, pi: &Coloring) -> Vec<SparseAutomorphism> {
    let root = refine(g, pi, None);
    let mut first = vec![root];
    let mut chosen = Vec::new();
    loop {
        let cur = first.last().unwrap();
        let Some(t) = target_cell(cur) else { break };
        let v = *cur.cell(t).iter().min().unwrap();
        let mut next = cur.clone();
        individualize_refine(g, &mut next, v);
        chosen.push((t, v));
        first.push(next);
    }
    let leaf = first.last().unwrap().clone();
    let mut search = Search {
        g,
        first: &first,
        leaf: &leaf,
        marks: Marks::new(g.n()),
    };
    let mut gens: Vec<SparseAutomorphism> = Vec::new();
    let mut orbits = OrbitPartition::new(g.n());
    for level in (0..chosen.len()).rev() {
        let (t, v) = chosen[level];
        let node = &first[level];
        let mut candidates = node.cell(t).to_vec();
        candidates.sort_unstable();
        for w in candidates {
            if w == v || orbits.same(v, w) {
                continue;
            }
            let mut child = node.clone();
            individualize_refine(g, &mut child, w);
            if let Some(phi) = search.find(child, level + 1) {
                orbits.record(&phi);
                gens.push(phi);
            }
        }
    }
    gens
}

/// Smallest non-trivial cell, ties broken by id.
fn target_cell(pi: &Coloring) -> Option<usize> {
    pi.cells()
        .filter(|&c| pi.cell_size(c) > 1)
        .min_by_key(|&c| (pi.cell_size(c), c))
}

struct Search<'a> {
    g: &'a ColoredGraph,
    first: &'a [Coloring],
    leaf: &'a Coloring,
    marks: Marks,
}

impl Search<'_> {
    fn find(&mut self, node: Coloring, depth: usize) -> Option<SparseAutomorphism> {
        if self.first.get(depth).map(|c| c.signature()) != Some(node.signature()) {
            return None;
        }
        let Some(t) = target_cell(&node) else {
            let pairs: Vec<(usize, usize)> = (0..node.n())
                .map(|p| (self.leaf.at(p), node.at(p)))
                .filter(|(a, b)| a != b)
                .collect();
            let phi = SparseAutomorphism::from_pairs(pairs)?;
            let ok = check_sparse(self.g, phi.pairs(), |v| phi.apply(v), &mut self.marks);
            return ok.then_some(phi);
        };
        let mut candidates = node.cell(t).to_vec();
        candidates.sort_unstable();
        for w in candidates {
            let mut child = node.clone();
            individualize_refine(self.g, &mut child, w);
            if let Some(phi) = self.find(child, depth + 1) {
                return Some(phi);
            }
        }
        None
    }
}
