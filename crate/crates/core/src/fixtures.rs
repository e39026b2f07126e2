//! Named fixture graphs and seeded random graph generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, ColoredGraph};

pub fn path(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    ColoredGraph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> ColoredGraph {
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    ColoredGraph::from_edges(n, &edges)
}

/// `K_{1,k}` with center 0.
pub fn star(k: usize) -> ColoredGraph {
    let edges: Vec<_> = (1..=k).map(|v| (0, v)).collect();
    ColoredGraph::from_edges(k + 1, &edges)
}

pub fn complete(n: usize) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

/// `K_{a,b}` with parts `0..a` (color 0) and `a..a+b` (color 1).
pub fn complete_bipartite(a: usize, b: usize) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..a {
        for v in a..a + b {
            edges.push((u, v));
        }
    }
    let colors: Vec<usize> = (0..a + b).map(|v| usize::from(v >= a)).collect();
    build_graph(a + b, &edges, &colors).unwrap()
}

/// Wheel with hub 0 and a rim cycle of length `k`.
pub fn wheel(k: usize) -> ColoredGraph {
    let mut edges: Vec<_> = (1..=k).map(|v| (0, v)).collect();
    edges.extend((0..k).map(|i| (1 + i, 1 + (i + 1) % k)));
    ColoredGraph::from_edges(k + 1, &edges)
}

pub fn p3() -> ColoredGraph {
    path(3)
}

pub fn p4() -> ColoredGraph {
    path(4)
}

pub fn star3() -> ColoredGraph {
    star(3)
}

pub fn c4() -> ColoredGraph {
    cycle(4)
}

/// 3-cube on `0..8`, adjacent iff the labels differ in one bit.
pub fn q3() -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..8usize {
        for b in 0..3 {
            let v = u ^ (1 << b);
            if u < v {
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(8, &edges)
}

/// Outer cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
pub fn petersen() -> ColoredGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, i + 5));
    }
    ColoredGraph::from_edges(10, &edges)
}

/// Two matchings between `X = 0..4` and `Y = 4..8` encoded through middle
/// layers `8..12` and `12..16`; the second layer encodes `x_i -- y_{sigma(i)}`.
pub fn match_gadget_with(sigma: [usize; 4]) -> ColoredGraph {
    let mut edges = Vec::new();
    for i in 0..4 {
        edges.push((i, 8 + i));
        edges.push((8 + i, 4 + i));
        edges.push((i, 12 + i));
        edges.push((12 + i, 4 + sigma[i]));
    }
    let colors: Vec<usize> = (0..16).map(|v| v / 4).collect();
    build_graph(16, &edges, &colors).unwrap()
}

pub fn match_gadget() -> ColoredGraph {
    match_gadget_with([0, 1, 2, 3])
}

/// `X = {0, 1}`, `Y = 2..6`, and for every pair a path `x - a - b - y`
/// through two fresh internal vertices (22 vertices total).
pub fn flip_gadget() -> ColoredGraph {
    flip_gadget_without(None)
}

/// The flip gadget, optionally leaving out the path of one `(x, y)` pair.
pub fn flip_gadget_without(skip: Option<(usize, usize)>) -> ColoredGraph {
    let mut edges = Vec::new();
    let mut next = 6;
    for x in 0..2 {
        for y in 2..6 {
            if skip == Some((x, y)) {
                continue;
            }
            edges.push((x, next));
            edges.push((next, next + 1));
            edges.push((next + 1, y));
            next += 2;
        }
    }
    ColoredGraph::from_edges(next, &edges)
}

/// Center 0 with legs of the given lengths.
pub fn spider(legs: &[usize]) -> ColoredGraph {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in legs {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    ColoredGraph::from_edges(next, &edges)
}

/// The smallest asymmetric tree (legs 1, 2, 3; 7 vertices).
pub fn asymmetric_tree() -> ColoredGraph {
    spider(&[1, 2, 3])
}

pub fn disjoint_union(a: &ColoredGraph, b: &ColoredGraph, distinct_colors: bool) -> ColoredGraph {
    let shift = a.n();
    let mut edges: Vec<_> = a.edges().collect();
    edges.extend(b.edges().map(|(u, v)| (u + shift, v + shift)));
    let offset = if distinct_colors { a.num_colors() } else { 0 };
    let mut colors = a.colors().to_vec();
    colors.extend(b.colors().iter().map(|c| c + offset));
    build_graph(a.n() + b.n(), &edges, &colors).unwrap()
}

/// Named fixture set used across tests.
pub fn named() -> Vec<(&'static str, ColoredGraph)> {
    vec![
        ("P3", p3()),
        ("P4", p4()),
        ("STAR3", star3()),
        ("C4", c4()),
        ("Q3", q3()),
        ("PETERSEN", petersen()),
        ("MATCH-GADGET", match_gadget()),
        ("FLIP-GADGET", flip_gadget()),
    ]
}

pub fn all() -> Vec<ColoredGraph> {
    named().into_iter().map(|(_, g)| g).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> ColoredGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ColoredGraph::from_edges(n, &edges)
}

/// Uniform random labelled tree via a random Prüfer-like attachment.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> ColoredGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let edges: Vec<_> = (1..n)
        .map(|i| (order[rng.gen_range(0..i)], order[i]))
        .collect();
    ColoredGraph::from_edges(n, &edges)
}

/// Random tree where attachment favors recent vertices, giving long paths
/// and many equal subtrees.
pub fn random_caterpillar_tree(n: usize, rng: &mut impl Rng) -> ColoredGraph {
    let edges: Vec<_> = (1..n)
        .map(|i| {
            let lo = i.saturating_sub(3);
            (rng.gen_range(lo..i), i)
        })
        .collect();
    ColoredGraph::from_edges(n, &edges)
}

/// Random `d`-regular simple graph (pairing model with restarts).
pub fn random_regular(n: usize, d: usize, rng: &mut impl Rng) -> ColoredGraph {
    assert!((n * d).is_multiple_of(2) && d < n);
    'retry: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'retry;
            }
            edges.push((u, v));
        }
        return ColoredGraph::from_edges(n, &edges);
    }
}

/// Sparse series-parallel-like graph: a random tree whose edges are
/// occasionally doubled by a parallel path, with pendant trees hanging off.
pub fn random_series_parallel(n: usize, rng: &mut impl Rng) -> ColoredGraph {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut count = 1;
    while count < n {
        let attach = rng.gen_range(0..count);
        let roll = rng.gen_range(0..10);
        if roll < 2 && count + 2 <= n {
            // parallel composition: two internally disjoint paths to a new vertex
            let (a, b, t) = (count, count + 1, count + 2);
            if t < n {
                edges.extend([(attach, a), (a, t), (attach, b), (b, t)]);
                count += 3;
                continue;
            }
        }
        edges.push((attach, count));
        count += 1;
    }
    ColoredGraph::from_edges(n, &edges)
}

/// A random tree with one extra rigid anchor (an asymmetric tree glued on a
/// random vertex through a triangle) so reduction leaves a nonempty core.
pub fn tree_with_anchor(n: usize, rng: &mut impl Rng) -> ColoredGraph {
    let tree = random_tree(n, rng);
    let mut edges: Vec<_> = tree.edges().collect();
    let root = rng.gen_range(0..n);
    let (a, b, c) = (n, n + 1, n + 2);
    edges.extend([(root, a), (a, b), (b, c), (c, a), (c, n + 3), (n + 3, n + 4)]);
    ColoredGraph::from_edges(n + 5, &edges)
}

/// Random coloring with `k` colors.
pub fn random_colors(g: &ColoredGraph, k: usize, rng: &mut impl Rng) -> ColoredGraph {
    let colors: Vec<usize> = (0..g.n()).map(|_| rng.gen_range(0..k)).collect();
    g.recolored(&colors)
}

/// Random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Seeded corpus of small graphs (`n <= 10`): fixtures that fit, G(n,p) for
/// p in {0.2, 0.5, 0.8}, random trees, and pre-colored variants.
pub fn small_corpus(seed: u64) -> Vec<ColoredGraph> {
    let mut r = rng(seed);
    let mut out: Vec<ColoredGraph> = all().into_iter().filter(|g| g.n() <= 10).collect();
    out.extend([
        star(4),
        complete(4),
        wheel(5),
        asymmetric_tree(),
        spider(&[2, 2, 2]),
        cycle(6),
        disjoint_union(&cycle(3), &cycle(3), false),
        disjoint_union(&c4(), &c4(), false),
        disjoint_union(&c4(), &c4(), true),
        complete_bipartite(2, 3),
        disjoint_union(&complete(2), &complete(2), false),
    ]);
    for n in 2..=10 {
        for &p in &[0.2, 0.5, 0.8] {
            for _ in 0..4 {
                out.push(gnp(n, p, &mut r));
            }
        }
        for _ in 0..3 {
            out.push(random_tree(n, &mut r));
        }
    }
    let colored: Vec<ColoredGraph> = out
        .iter()
        .step_by(3)
        .map(|g| random_colors(g, 2, &mut r))
        .collect();
    out.extend(colored);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_sizes() {
        assert_eq!((q3().n(), q3().m()), (8, 12));
        assert_eq!((petersen().n(), petersen().m()), (10, 15));
        assert_eq!((match_gadget().n(), match_gadget().m()), (16, 16));
        assert_eq!((flip_gadget().n(), flip_gadget().m()), (22, 24));
        assert_eq!(asymmetric_tree().n(), 7);
        assert!(petersen().edges().count() == 15);
    }

    #[test]
    fn regular_is_regular() {
        let g = random_regular(100, 3, &mut rng(1));
        assert!((0..100).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn corpus_is_large_enough() {
        let c = small_corpus(7);
        assert!(c.len() >= 200, "{}", c.len());
        assert!(c.iter().all(|g| g.n() <= 10));
    }
}
