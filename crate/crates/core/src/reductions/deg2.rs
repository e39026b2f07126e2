//! Degree-2 heuristics: obfuscated matchings, unique-endpoint paths and
//! obfuscated edge flips.
//!
//! All three look for chains `X - C_1 - ... - C_t - Y` in the quotient graph
//! whose internal cells have degree 2 with one neighbor in each adjacent
//! cell. Detection is done on cell representatives; the vertex-level paths
//! are traced only once a chain qualifies.

use std::collections::BTreeMap;

use super::{Edit, Workspace};
use crate::coloring::Coloring;
use crate::graph::ColoredGraph;
use crate::quotient::{cell_infos, info_index, CellInfo};
use crate::work;

/// Both neighbor cells of a degree-2 cell that has one neighbor in each.
fn chain_links(info: &CellInfo) -> Option<(usize, usize)> {
    match info.links[..] {
        [(a, 1), (b, 1)] if info.degree == 2 && a != info.id && b != info.id => Some((a, b)),
        _ => None,
    }
}

/// A window `x - cells - y` of a chain, with `x < y`.
#[derive(Debug)]
struct Chain {
    x: usize,
    cells: Vec<usize>,
    y: usize,
}

impl Chain {
    fn oriented(a: usize, mut cells: Vec<usize>, b: usize) -> Option<Chain> {
        if a == b {
            return None;
        }
        if a > b {
            cells.reverse();
        }
        Some(Chain {
            x: a.min(b),
            cells,
            y: a.max(b),
        })
    }
}

/// Maximal chains of degree-2 cells including their two (non-chain) end
/// cells, in order of their smallest internal cell. Cycles are skipped.
fn find_chains(infos: &[CellInfo]) -> Vec<Vec<usize>> {
    let index = info_index(infos);
    let links: Vec<Option<(usize, usize)>> = infos.iter().map(chain_links).collect();
    let mut visited = vec![false; infos.len()];
    let mut out = Vec::new();
    for (i, info) in infos.iter().enumerate() {
        let Some((left, right)) = links[i] else { continue };
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let mut walk = |first: usize| {
            let mut seq = Vec::new();
            let (mut prev, mut cur) = (info.id, first);
            loop {
                let j = index(cur);
                match links[j] {
                    Some(_) if visited[j] => return None,
                    Some((a, b)) => {
                        visited[j] = true;
                        seq.push(cur);
                        let next = if a == prev { b } else { a };
                        prev = cur;
                        cur = next;
                    }
                    None => {
                        seq.push(cur);
                        return Some(seq);
                    }
                }
            }
        };
        let (Some(mut seq), Some(right_seq)) = (walk(left), walk(right)) else { continue };
        seq.reverse();
        seq.push(info.id);
        seq.extend(right_seq);
        out.push(seq);
    }
    out
}

/// Maximal runs of consecutive equal-size cells in a chain, as index ranges.
fn equal_size_runs(seq: &[usize], size: impl Fn(usize) -> usize) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=seq.len() {
        if i == seq.len() || size(seq[i]) != size(seq[start]) {
            runs.push((start, i - 1));
            start = i;
        }
    }
    runs
}

fn neighbor_in(g: &ColoredGraph, pi: &Coloring, v: usize, cell: usize, not: usize) -> usize {
    work::charge(g.degree(v));
    *g.neighbors(v)
        .iter()
        .find(|&&u| u != not && pi.cell_of(u) == cell)
        .expect("chain neighbor")
}

/// Follows the path starting `x - c` through `cells` and returns the
/// internal vertices and the endpoint in `y_cell`.
fn trace(g: &ColoredGraph, pi: &Coloring, x: usize, c: usize, cells: &[usize], y_cell: usize) -> (Vec<usize>, usize) {
    let mut path = vec![c];
    let mut prev = x;
    for &next_cell in cells[1..].iter().chain(std::iter::once(&y_cell)) {
        let cur = *path.last().unwrap();
        let next = neighbor_in(g, pi, cur, next_cell, prev);
        prev = cur;
        path.push(next);
    }
    let y = path.pop().unwrap();
    (path, y)
}

fn sorted(pi: &Coloring, c: usize) -> Vec<usize> {
    let mut vs = pi.cell(c).to_vec();
    vs.sort_unstable();
    vs
}

/// Removes middle cells encoding the same perfect matching between two
/// cells `X`, `Y` (paths of length one) and inserts that matching as direct
/// edges. Only middle cells identical to the first one found are removed.
pub fn reduce_obfuscated_matchings(ws: &mut Workspace) -> usize {
    let (g, pi) = (ws.graph(), ws.coloring());
    let infos = cell_infos(g, pi);
    let index = info_index(&infos);
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for info in &infos {
        if let Some((a, b)) = chain_links(info) {
            let size = info.size;
            if infos[index(a)].size == size && infos[index(b)].size == size {
                groups.entry((a, b)).or_default().push(info.id);
            }
        }
    }
    let mut used = vec![false; g.n()];
    let mut edit = Edit::new(g.n());
    for ((x_cell, y_cell), middles) in groups {
        if used[x_cell] || used[y_cell] {
            continue;
        }
        let middles: Vec<usize> = middles.into_iter().filter(|&m| !used[m]).collect();
        if middles.is_empty() {
            continue;
        }
        let matching_of = |m: usize| {
            let mut pairs: Vec<(usize, usize, usize)> = pi
                .cell(m)
                .iter()
                .map(|&v| {
                    let a = neighbor_in(g, pi, v, x_cell, usize::MAX);
                    let b = neighbor_in(g, pi, v, y_cell, usize::MAX);
                    (a, b, v)
                })
                .collect();
            pairs.sort_unstable();
            pairs
        };
        let first = matching_of(middles[0]);
        let same = |p: &[(usize, usize, usize)]| p.iter().zip(&first).all(|(s, t)| s.1 == t.1);
        let layers: Vec<Vec<(usize, usize, usize)>> = middles
            .iter()
            .map(|&m| matching_of(m))
            .filter(|p| same(p))
            .collect();
        let insert = match infos[index(x_cell)].count_into(y_cell) {
            0 => true,
            1 => {
                if !first.iter().all(|&(a, b, _)| g.has_edge(a, b)) {
                    continue;
                }
                false
            }
            _ => continue,
        };
        for &(a, b, _) in &first {
            if insert {
                edit.add_edge(a, b);
            }
        }
        for layer in &layers {
            for &(a, _, v) in layer {
                edit.absorb_into(a, v);
            }
            used[pi.cell_of(layer[0].2)] = true;
        }
        used[x_cell] = true;
        used[y_cell] = true;
    }
    let k = edit.removed_count();
    ws.commit(edit);
    ws.counters.deg2_match += k;
    k
}

/// Contracts chains of at least two degree-2 cells between cells `X`, `Y`
/// of the same size where every vertex starts exactly one path. The path
/// becomes a direct edge and its internal vertices join `x`'s string.
pub fn reduce_unique_endpoint_paths(ws: &mut Workspace, t_cap: Option<usize>) -> usize {
    let (g, pi) = (ws.graph(), ws.coloring());
    let infos = cell_infos(g, pi);
    let index = info_index(&infos);
    let mut used = vec![false; g.n()];
    let mut edit = Edit::new(g.n());
    let size = |c: usize| infos[index(c)].size;
    let mut windows = Vec::new();
    for seq in find_chains(&infos) {
        for (a, b) in equal_size_runs(&seq, size) {
            if b < a + 3 || t_cap.is_some_and(|cap| b - a - 1 > cap) {
                continue;
            }
            windows.extend(Chain::oriented(seq[a], seq[a + 1..b].to_vec(), seq[b]));
        }
    }
    for chain in windows {
        let c1 = chain.cells[0];
        if infos[index(chain.x)].count_into(chain.y) != 0 || used[chain.x] || used[chain.y] {
            continue;
        }
        for x in sorted(pi, chain.x) {
            let c = neighbor_in(g, pi, x, c1, usize::MAX);
            let (path, y) = trace(g, pi, x, c, &chain.cells, chain.y);
            for v in path {
                edit.absorb_into(x, v);
            }
            edit.add_edge(x, y);
        }
        used[chain.x] = true;
        used[chain.y] = true;
    }
    let k = edit.removed_count();
    ws.commit(edit);
    ws.counters.deg2_unique += k;
    k
}

/// Deletes chains that join every `x` in `X` to every `y` in `Y` by exactly
/// one path. No edges are inserted; the paths are kept as side records and
/// follow their endpoints when lifting.
pub fn reduce_obfuscated_edge_flip(ws: &mut Workspace) -> usize {
    let (g, pi) = (ws.graph(), ws.coloring());
    let infos = cell_infos(g, pi);
    let index = info_index(&infos);
    let mut used = vec![false; g.n()];
    let mut edit = Edit::new(g.n());
    let size = |c: usize| infos[index(c)].size;
    let mut windows = Vec::new();
    for seq in find_chains(&infos) {
        for (a, b) in equal_size_runs(&seq, size) {
            if a == 0 || b + 1 == seq.len() {
                continue;
            }
            windows.extend(Chain::oriented(seq[a - 1], seq[a..=b].to_vec(), seq[b + 1]));
        }
    }
    'chains: for chain in windows {
        let (xi, yi) = (&infos[index(chain.x)], &infos[index(chain.y)]);
        let t = chain.cells.len();
        let (c1, ct) = (chain.cells[0], chain.cells[t - 1]);
        if size(c1) != xi.size * yi.size
            || xi.count_into(c1) != yi.size
            || yi.count_into(ct) != xi.size
            || used[chain.x]
            || used[chain.y]
        {
            continue;
        }
        let mut records = Vec::new();
        for x in sorted(pi, chain.x) {
            let mut ends = Vec::new();
            for &c in g.neighbors(x).iter().filter(|&&u| pi.cell_of(u) == c1) {
                let (path, y) = trace(g, pi, x, c, &chain.cells, chain.y);
                ends.push(y);
                records.push((x, y, path));
            }
            ends.sort_unstable();
            if ends.windows(2).any(|w| w[0] == w[1]) {
                continue 'chains;
            }
        }
        for (x, y, path) in records {
            for &v in &path {
                edit.remove(v);
            }
            edit.add_flip(x, y, path);
        }
        used[chain.x] = true;
        used[chain.y] = true;
    }
    let k = edit.removed_count();
    ws.commit(edit);
    ws.counters.deg2_flip += k;
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::build_graph;
    use crate::reductions::tests::assert_sound;
    use crate::reductions::{remove_degree0, remove_degree1};
    use crate::refinement::is_equitable;
    use crate::solver::{brute_force_aut, group_closure_full};

    fn ready(g: &ColoredGraph) -> Workspace {
        let mut ws = Workspace::new(g);
        ws.refine();
        ws
    }

    #[test]
    fn matching_gadget() {
        let g = fixtures::match_gadget();
        let mut ws = ready(&g);
        assert_eq!(reduce_obfuscated_matchings(&mut ws), 8);
        assert_eq!((ws.n(), ws.graph().m()), (8, 4));
        assert!(is_equitable(ws.graph(), ws.coloring()));
        for x in 0..4 {
            assert_eq!(ws.repr().string(x), &[x, 8 + x, 12 + x]);
        }
        assert_sound(&g, &ws);
    }

    #[test]
    fn differing_matchings_remove_one_layer() {
        let g = fixtures::match_gadget_with([1, 0, 2, 3]);
        let mut ws = ready(&g);
        assert_eq!(reduce_obfuscated_matchings(&mut ws), 4);
        assert_eq!(ws.n(), 12);
        ws.refine();
        assert_sound(&g, &ws);
    }

    #[test]
    fn matching_lift_moves_layers_together() {
        let g = fixtures::match_gadget();
        let mut ws = ready(&g);
        reduce_obfuscated_matchings(&mut ws);
        let reduced = ws.colored_graph();
        for p in brute_force_aut(&reduced, 10).unwrap() {
            let phi = crate::SparseAutomorphism::from_full(&p);
            let lifted = ws.repr().lift(&phi).unwrap();
            assert!(lifted.is_automorphism_of(&g));
            for x in 0..4 {
                let img = lifted.apply(x);
                assert_eq!(lifted.apply(8 + x), 8 + img);
                assert_eq!(lifted.apply(12 + x), 12 + img);
            }
        }
    }

    #[test]
    fn theta_graph_is_left_alone() {
        // two hubs joined by three subdivided paths
        let g = ColoredGraph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]);
        let mut ws = ready(&g);
        assert_eq!(reduce_unique_endpoint_paths(&mut ws, None), 0);
        assert_eq!(reduce_obfuscated_matchings(&mut ws), 0);
        assert_eq!(ws.n(), 5);
    }

    fn two_long_paths() -> ColoredGraph {
        // X = {0, 1} colored 0, Y = {2, 3} colored 1, paths x-a-b-c-d-y
        let mut edges = Vec::new();
        let mut colors = vec![0, 0, 1, 1];
        for (x, y) in [(0, 2), (1, 3)] {
            let base = colors.len();
            edges.push((x, base));
            for i in 0..3 {
                edges.push((base + i, base + i + 1));
            }
            edges.push((base + 3, y));
            colors.extend([2, 3, 4, 5]);
        }
        // anchor Y to something so the paths are not the whole graph
        let hub = colors.len();
        colors.push(6);
        edges.push((2, hub));
        edges.push((3, hub));
        build_graph(hub + 1, &edges, &colors).unwrap()
    }

    #[test]
    fn unique_paths_contract() {
        let g = two_long_paths();
        let mut ws = ready(&g);
        assert_eq!(reduce_unique_endpoint_paths(&mut ws, None), 8);
        assert_eq!(ws.n(), 5);
        assert!(ws.graph().has_edge(0, 2));
        assert!(ws.graph().has_edge(1, 3));
        assert_eq!(ws.repr().string(0), &[0, 4, 5, 6, 7]);
        assert_sound(&g, &ws);

        let mut capped = ready(&g);
        assert_eq!(reduce_unique_endpoint_paths(&mut capped, Some(3)), 0);
    }

    #[test]
    fn flip_gadget() {
        let g = fixtures::flip_gadget();
        let mut ws = ready(&g);
        assert_eq!(reduce_obfuscated_matchings(&mut ws), 0);
        assert_eq!(reduce_unique_endpoint_paths(&mut ws, None), 0);
        assert_eq!(reduce_obfuscated_edge_flip(&mut ws), 16);
        assert_eq!((ws.n(), ws.graph().m()), (6, 0));
        assert_eq!(ws.repr().flip_records().len(), 8);
        ws.repr().validate().unwrap();
        ws.refine();
        remove_degree0(&mut ws);
        assert_eq!(ws.n(), 0);
        let gens: Vec<Vec<usize>> = ws.kernel().iter().map(|k| k.to_full(22)).collect();
        for k in ws.kernel() {
            assert!(k.is_automorphism_of(&g));
        }
        assert_eq!(group_closure_full(&gens, 22, 1_000_000).unwrap().len(), 48);
    }

    #[test]
    fn incomplete_flip_gadget_is_left_alone() {
        let g = fixtures::flip_gadget_without(Some((0, 2)));
        let mut ws = ready(&g);
        assert_eq!(reduce_obfuscated_edge_flip(&mut ws), 0);
    }

    /// Random graphs built around the three patterns, with noise edges
    /// attached to the endpoint cells.
    fn pattern_instance(seed: u64) -> ColoredGraph {
        use rand::Rng;
        let mut r = fixtures::rng(seed);
        let k = r.gen_range(1..=3);
        let t = r.gen_range(1..=2);
        let mut edges = Vec::new();
        let mut colors: Vec<usize> = (0..k).map(|_| 0).chain((0..k).map(|_| 1)).collect();
        let sigma = fixtures::random_permutation(k, &mut r);
        for x in 0..k {
            let mut prev = x;
            for step in 0..t {
                let v = colors.len();
                colors.push(2 + step);
                edges.push((prev, v));
                prev = v;
            }
            edges.push((prev, k + sigma[x]));
        }
        // extra pendant per y to break or keep symmetry
        for y in 0..k {
            if r.gen_bool(0.5) {
                let v = colors.len();
                colors.push(9);
                edges.push((k + y, v));
            }
        }
        build_graph(colors.len(), &edges, &colors).unwrap()
    }

    #[test]
    fn pattern_instances_preserve_groups() {
        for seed in 0..60 {
            let g = pattern_instance(seed);
            if g.n() > 12 {
                continue;
            }
            let mut ws = ready(&g);
            reduce_obfuscated_matchings(&mut ws);
            ws.refine();
            reduce_unique_endpoint_paths(&mut ws, None);
            ws.refine();
            reduce_obfuscated_edge_flip(&mut ws);
            ws.refine();
            remove_degree1(&mut ws);
            assert_sound(&g, &ws);
        }
    }
}
