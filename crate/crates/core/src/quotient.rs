//! Quotient graphs of equitable colorings, edge flips between cells, and
//! quotient components.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::ColoredGraph;
use crate::perm::Marks;
use crate::probing::OrbitPartition;
use crate::refinement::is_equitable;
use crate::work;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("coloring is not equitable")]
    NotEquitable,
    #[error("cannot flip a cell against itself")]
    SameCell,
    #[error("flip would not reduce the {0} edges between the cells")]
    NotReducing(usize),
}

/// Cells with sizes, and the neighbor count of a vertex of `c1` into `c2`
/// for every pair with a nonzero count (absent pairs weigh 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    pub nodes: Vec<(usize, usize)>,
    pub weights: BTreeMap<(usize, usize), usize>,
}

impl QuotientGraph {
    pub fn weight(&self, c1: usize, c2: usize) -> usize {
        self.weights.get(&(c1, c2)).copied().unwrap_or(0)
    }
}

/// Per-cell view of an equitable coloring, read off one representative.
#[derive(Debug, Clone)]
pub(crate) struct CellInfo {
    pub id: usize,
    pub size: usize,
    pub degree: usize,
    /// `(neighbor cell, count)` sorted by cell id.
    pub links: Vec<(usize, usize)>,
}

impl CellInfo {
    pub fn count_into(&self, cell: usize) -> usize {
        self.links
            .binary_search_by_key(&cell, |l| l.0)
            .map(|i| self.links[i].1)
            .unwrap_or(0)
    }
}

/// Cell summaries from representatives; costs the representatives' degrees.
pub(crate) fn cell_infos(g: &ColoredGraph, pi: &Coloring) -> Vec<CellInfo> {
    let mut out = Vec::with_capacity(pi.num_cells());
    for c in pi.cells() {
        let rep = pi.cell(c)[0];
        let mut cells: Vec<usize> = g.neighbors(rep).iter().map(|&u| pi.cell_of(u)).collect();
        work::charge(1 + cells.len());
        cells.sort_unstable();
        let mut links: Vec<(usize, usize)> = Vec::new();
        for d in cells {
            match links.last_mut() {
                Some((cell, k)) if *cell == d => *k += 1,
                _ => links.push((d, 1)),
            }
        }
        out.push(CellInfo {
            id: c,
            size: pi.cell_size(c),
            degree: g.degree(rep),
            links,
        });
    }
    out
}

/// Index from cell id to position in a `cell_infos` vector.
pub(crate) fn info_index(infos: &[CellInfo]) -> impl Fn(usize) -> usize + '_ {
    move |cell| infos.binary_search_by_key(&cell, |i| i.id).unwrap()
}

pub fn build_quotient(g: &ColoredGraph, pi: &Coloring) -> Result<QuotientGraph, QuotientError> {
    if !is_equitable(g, pi) {
        return Err(QuotientError::NotEquitable);
    }
    let infos = cell_infos(g, pi);
    let mut weights = BTreeMap::new();
    for info in &infos {
        for &(d, k) in &info.links {
            weights.insert((info.id, d), k);
        }
    }
    Ok(QuotientGraph {
        nodes: infos.iter().map(|i| (i.id, i.size)).collect(),
        weights,
    })
}

pub fn quotient_equal(a: &QuotientGraph, b: &QuotientGraph) -> bool {
    a == b
}

/// Complements the edges between cells `c1` and `c2`. Only allowed when
/// that strictly lowers their edge count.
pub fn flip_edges(
    g: &ColoredGraph,
    pi: &Coloring,
    c1: usize,
    c2: usize,
) -> Result<ColoredGraph, QuotientError> {
    if c1 == c2 {
        return Err(QuotientError::SameCell);
    }
    let between = pi
        .cell(c1)
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&u| pi.cell_of(u) == c2).count())
        .sum::<usize>();
    let full = pi.cell_size(c1) * pi.cell_size(c2);
    if full - between >= between {
        return Err(QuotientError::NotReducing(between));
    }
    Ok(complement_pairs(g, pi, &HashSet::from([(c1.min(c2), c1.max(c2))])))
}

/// Flips every cell pair whose complement is strictly sparser. Requires an
/// equitable coloring. Returns the new graph and the number of edges saved.
pub fn flip_all(g: &ColoredGraph, pi: &Coloring) -> Option<(ColoredGraph, usize)> {
    let infos = cell_infos(g, pi);
    let mut pairs = HashSet::new();
    let mut saved = 0;
    for info in &infos {
        for &(d, k) in &info.links {
            if d <= info.id {
                continue;
            }
            let between = info.size * k;
            let full = info.size * pi.cell_size(d);
            if full - between < between {
                pairs.insert((info.id, d));
                saved += 2 * between - full;
            }
        }
    }
    if pairs.is_empty() {
        return None;
    }
    Some((complement_pairs(g, pi, &pairs), saved))
}

fn complement_pairs(g: &ColoredGraph, pi: &Coloring, pairs: &HashSet<(usize, usize)>) -> ColoredGraph {
    let mut partners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in pairs {
        partners.entry(a).or_default().push(b);
        partners.entry(b).or_default().push(a);
    }
    let mut marks = Marks::new(g.n());
    let mut adj = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let cv = pi.cell_of(v);
        let flipped = partners.get(&cv);
        let mut list: Vec<usize> = match flipped {
            None => g.neighbors(v).to_vec(),
            Some(ds) => {
                marks.clear();
                let mut keep = Vec::new();
                for &u in g.neighbors(v) {
                    marks.set(u);
                    if !ds.contains(&pi.cell_of(u)) {
                        keep.push(u);
                    }
                }
                for &d in ds {
                    keep.extend(pi.cell(d).iter().filter(|&&u| !marks.get(u)));
                }
                keep
            }
        };
        work::charge(list.len() + g.degree(v));
        list.sort_unstable();
        adj.push(list);
    }
    ColoredGraph::from_sorted_lists(adj, g.colors().to_vec())
}

/// Weakly connected components of the quotient graph, as lists of cell ids,
/// ordered by their smallest cell id.
pub fn component_cells(g: &ColoredGraph, pi: &Coloring) -> Vec<Vec<usize>> {
    let infos = cell_infos(g, pi);
    let index = info_index(&infos);
    let mut uf = OrbitPartition::new(infos.len());
    for (i, info) in infos.iter().enumerate() {
        for &(d, _) in &info.links {
            uf.union(i, index(d));
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, info) in infos.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(info.id);
    }
    let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Quotient components as sorted vertex sets, ordered by smallest cell id.
pub fn quotient_components(g: &ColoredGraph, pi: &Coloring) -> Vec<Vec<usize>> {
    component_cells(g, pi)
        .into_iter()
        .map(|cells| {
            let mut vs: Vec<usize> = cells.iter().flat_map(|&c| pi.cell(c).iter().copied()).collect();
            vs.sort_unstable();
            vs
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::apply_permutation;
    use crate::refinement::refine_graph;

    #[test]
    fn quotient_examples() {
        let c4 = fixtures::c4();
        let q = build_quotient(&c4, &refine_graph(&c4)).unwrap();
        assert_eq!(q.nodes, vec![(0, 4)]);
        assert_eq!(q.weight(0, 0), 2);

        let star = fixtures::star3();
        let pi = refine_graph(&star);
        let q = build_quotient(&star, &pi).unwrap();
        let (center, leaves) = (pi.cell_of(0), pi.cell_of(1));
        assert_eq!(q.weight(center, leaves), 3);
        assert_eq!(q.weight(leaves, center), 1);
        assert_eq!(q.weight(leaves, leaves), 0);

        let p4 = fixtures::p4();
        let pi = refine_graph(&p4);
        let q = build_quotient(&p4, &pi).unwrap();
        let (ends, mids) = (pi.cell_of(0), pi.cell_of(1));
        assert_eq!(q.weight(ends, mids), 1);
        assert_eq!(q.weight(mids, ends), 1);
        assert_eq!(q.weight(mids, mids), 1);

        assert_eq!(
            build_quotient(&star, &Coloring::unit(4)),
            Err(QuotientError::NotEquitable)
        );
    }

    #[test]
    fn double_counting() {
        for g in fixtures::small_corpus(3) {
            let pi = refine_graph(&g);
            let q = build_quotient(&g, &pi).unwrap();
            for (&(a, b), &w) in &q.weights {
                assert_eq!(w * pi.cell_size(a), q.weight(b, a) * pi.cell_size(b));
            }
        }
    }

    #[test]
    fn quotient_equality() {
        let c4 = fixtures::c4();
        let h = apply_permutation(&c4, &[2, 0, 3, 1]).unwrap();
        let q = |g: &ColoredGraph| build_quotient(g, &refine_graph(g)).unwrap();
        assert!(quotient_equal(&q(&c4), &q(&h)));
        assert!(!quotient_equal(&q(&c4), &q(&fixtures::p4())));
        let two_triangles = fixtures::disjoint_union(&fixtures::cycle(3), &fixtures::cycle(3), false);
        assert!(quotient_equal(&q(&fixtures::cycle(6)), &q(&two_triangles)));
    }

    #[test]
    fn flip_examples() {
        let k23 = fixtures::complete_bipartite(2, 3);
        let pi = refine_graph(&k23);
        let flipped = flip_edges(&k23, &pi, pi.cell_of(0), pi.cell_of(2)).unwrap();
        assert_eq!(flipped.m(), 0);
        assert_eq!(flipped.colors(), k23.colors());

        let k24 = fixtures::complete_bipartite(2, 4);
        let pi = refine_graph(&k24);
        let (g, saved) = flip_all(&k24, &pi).unwrap();
        assert_eq!((g.m(), saved), (0, 8));

        let c4 = fixtures::c4();
        let pi = Coloring::from_cells(4, &[vec![0, 2], vec![1, 3]]);
        assert_eq!(flip_edges(&c4, &pi, 0, 2).unwrap().m(), 0);
        assert_eq!(flip_edges(&c4, &pi, 0, 0), Err(QuotientError::SameCell));

        let p4 = fixtures::p4();
        let pi = refine_graph(&p4);
        assert_eq!(
            flip_edges(&p4, &pi, pi.cell_of(0), pi.cell_of(1)),
            Err(QuotientError::NotReducing(2))
        );
    }

    #[test]
    fn flip_is_involution() {
        let mut r = fixtures::rng(9);
        for _ in 0..30 {
            let g = fixtures::gnp(9, 0.6, &mut r);
            let g = fixtures::random_colors(&g, 3, &mut r);
            let pi = Coloring::of_graph(&g);
            let cells: Vec<usize> = pi.cells().collect();
            for &a in &cells {
                for &b in &cells {
                    if let Ok(h) = flip_edges(&g, &pi, a, b) {
                        assert!(h.m() < g.m());
                        let back = complement_pairs(&h, &pi, &HashSet::from([(a.min(b), a.max(b))]));
                        assert_eq!(back, g);
                    }
                }
            }
        }
    }

    #[test]
    fn component_examples() {
        let c4 = fixtures::c4();
        let same = fixtures::disjoint_union(&c4, &c4, false);
        assert_eq!(quotient_components(&same, &refine_graph(&same)).len(), 1);
        let distinct = fixtures::disjoint_union(&c4, &c4, true);
        let comps = quotient_components(&distinct, &refine_graph(&distinct));
        assert_eq!(comps, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);

        let k23 = fixtures::complete_bipartite(2, 3);
        let pi = refine_graph(&k23);
        let (flipped, _) = flip_all(&k23, &pi).unwrap();
        assert_eq!(
            quotient_components(&flipped, &pi),
            vec![vec![0, 1], vec![2, 3, 4]]
        );
    }
}
