//! Color refinement and individualization.
//!
//! Refinement is the Hopcroft-style partition refinement: a splitter cell is
//! taken from the worklist (smallest first, ties by id), neighbor counts into
//! it are tallied, and every touched cell splits by count. Fragments are laid
//! out by ascending count, so cell ids stay isomorphism-invariant. A cell
//! that was not queued re-enqueues all fragments but its first largest one.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::coloring::Coloring;
use crate::graph::ColoredGraph;
use crate::work;

/// Coarsest equitable refinement of `pi`. `worklist` seeds the splitter
/// queue; `None` seeds every cell.
pub fn refine(g: &ColoredGraph, pi: &Coloring, worklist: Option<&[usize]>) -> Coloring {
    let mut out = pi.clone();
    refine_in_place(g, &mut out, worklist);
    out
}

/// Refines the coloring given by the graph's own colors.
pub fn refine_graph(g: &ColoredGraph) -> Coloring {
    refine(g, &Coloring::of_graph(g), None)
}

/// In-place refinement. Returns `false` if the active work budget ran out;
/// the coloring is then a valid but not necessarily equitable refinement.
pub fn refine_in_place(g: &ColoredGraph, pi: &mut Coloring, worklist: Option<&[usize]>) -> bool {
    Refiner::new(g.n()).run(g, pi, worklist)
}

/// Moves `v` into a new singleton cell placed at the end of its old cell and
/// returns the singleton's id. A vertex that is already a singleton keeps
/// its cell and id.
pub fn individualize_in_place(pi: &mut Coloring, v: usize) -> usize {
    let c = pi.cell_of(v);
    let size = pi.cell_size(c);
    if size == 1 {
        return c;
    }
    let last = c + size - 1;
    pi.swap_positions(pi.position(v), last);
    pi.split_into(c, &[size - 1, 1]);
    last
}

pub fn individualize(pi: &Coloring, v: usize) -> Coloring {
    let mut out = pi.clone();
    individualize_in_place(&mut out, v);
    out
}

/// Individualizes `v` and refines from the new singleton.
pub fn individualize_refine(g: &ColoredGraph, pi: &mut Coloring, v: usize) -> bool {
    let cell = individualize_in_place(pi, v);
    refine_in_place(g, pi, Some(&[cell]))
}

/// Direct check: any two vertices of a cell have equally many neighbors in
/// every cell.
pub fn is_equitable(g: &ColoredGraph, pi: &Coloring) -> bool {
    let profile = |v: usize| {
        let mut cells: Vec<usize> = g.neighbors(v).iter().map(|&u| pi.cell_of(u)).collect();
        cells.sort_unstable();
        cells
    };
    pi.cells().all(|c| {
        let cell = pi.cell(c);
        let first = profile(cell[0]);
        cell[1..].iter().all(|&v| profile(v) == first)
    })
}

struct Refiner {
    count: Vec<usize>,
    back: Vec<usize>,
    touched_cell: Vec<bool>,
    queued: Vec<bool>,
    heap: BinaryHeap<Reverse<(usize, usize)>>,
}

impl Refiner {
    fn new(n: usize) -> Self {
        Refiner {
            count: vec![0; n],
            back: vec![0; n],
            touched_cell: vec![false; n],
            queued: vec![false; n],
            heap: BinaryHeap::new(),
        }
    }

    fn push(&mut self, pi: &Coloring, c: usize) {
        self.queued[c] = true;
        self.heap.push(Reverse((pi.cell_size(c), c)));
    }

    fn run(&mut self, g: &ColoredGraph, pi: &mut Coloring, seeds: Option<&[usize]>) -> bool {
        match seeds {
            Some(cells) => {
                for &c in cells {
                    self.push(pi, c);
                }
            }
            None => {
                let all: Vec<usize> = pi.cells().collect();
                for c in all {
                    self.push(pi, c);
                }
            }
        }
        let mut touched_vertices = Vec::new();
        let mut touched_cells = Vec::new();
        while let Some(Reverse((size, w))) = self.heap.pop() {
            if !self.queued[w] || pi.cell_size(w) != size {
                continue;
            }
            if work::exhausted() {
                return false;
            }
            self.queued[w] = false;
            if pi.is_discrete() {
                break;
            }
            let members = pi.cell(w).to_vec();
            let mut cost = members.len();
            for &x in &members {
                cost += g.degree(x);
                for &u in g.neighbors(x) {
                    self.count[u] += 1;
                    if self.count[u] == 1 {
                        touched_vertices.push(u);
                        let c = pi.cell_of(u);
                        if !self.touched_cell[c] {
                            self.touched_cell[c] = true;
                            self.back[c] = c + pi.cell_size(c);
                            touched_cells.push(c);
                        }
                    }
                }
            }
            // move touched vertices to the back of their cells
            for &u in &touched_vertices {
                let c = pi.cell_of(u);
                self.back[c] -= 1;
                pi.swap_positions(pi.position(u), self.back[c]);
            }
            cost += touched_vertices.len();
            for &c in &touched_cells {
                self.touched_cell[c] = false;
                cost += self.split_cell(pi, c);
            }
            for &u in &touched_vertices {
                self.count[u] = 0;
            }
            touched_vertices.clear();
            touched_cells.clear();
            work::charge(cost);
        }
        // drain stale flags so the refiner could be reused
        for Reverse((_, c)) in self.heap.drain() {
            self.queued[c] = false;
        }
        true
    }

    /// Splits cell `c` whose touched vertices occupy `[back[c], end)`.
    /// Returns the work spent.
    fn split_cell(&mut self, pi: &mut Coloring, c: usize) -> usize {
        let size = pi.cell_size(c);
        let end = c + size;
        let begin = self.back[c];
        let touched = end - begin;
        let count = &self.count;
        let first = count[pi.at(begin)];
        if touched == size && (begin..end).all(|i| count[pi.at(i)] == first) {
            return touched;
        }
        let region = pi.order_slice_mut(begin, end);
        sort_by_count(region, count);
        pi.fix_positions(begin, end);
        let mut sizes = Vec::new();
        if begin > c {
            sizes.push(begin - c);
        }
        let mut run_start = begin;
        for i in begin + 1..=end {
            if i == end || count[pi.at(i)] != count[pi.at(run_start)] {
                sizes.push(i - run_start);
                run_start = i;
            }
        }
        let was_queued = self.queued[c];
        let new_ids = pi.split_into(c, &sizes);
        let largest = (0..sizes.len())
            .max_by_key(|&i| (sizes[i], Reverse(i)))
            .unwrap();
        let ids: Vec<usize> = std::iter::once(c).chain(new_ids).collect();
        for (i, &id) in ids.iter().enumerate() {
            if was_queued || i != largest {
                self.push(pi, id);
            }
        }
        touched * 2
    }
}

/// Stable-free sort of a small region by neighbor count; counting sort when
/// the count range is narrow.
fn sort_by_count(region: &mut [usize], count: &[usize]) {
    let (lo, hi) = region
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &v| (lo.min(count[v]), hi.max(count[v])));
    let range = hi - lo + 1;
    if range <= 2 * region.len() {
        let mut buckets = vec![0usize; range + 1];
        for &v in region.iter() {
            buckets[count[v] - lo + 1] += 1;
        }
        for i in 1..=range {
            buckets[i] += buckets[i - 1];
        }
        let mut out = vec![0; region.len()];
        for &v in region.iter() {
            let b = &mut buckets[count[v] - lo];
            out[*b] = v;
            *b += 1;
        }
        region.copy_from_slice(&out);
    } else {
        region.sort_by_key(|&v| count[v]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::apply_permutation;
    use std::collections::BTreeMap;

    /// Naive iterated splitting: new color = (old color, sorted neighbor
    /// colors), until the number of classes stops growing.
    pub(crate) fn naive_closure(g: &ColoredGraph, colors: &[usize]) -> Vec<usize> {
        let mut cur = colors.to_vec();
        loop {
            let keys: Vec<(usize, Vec<usize>)> = (0..g.n())
                .map(|v| {
                    let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| cur[u]).collect();
                    nb.sort_unstable();
                    (cur[v], nb)
                })
                .collect();
            let mut ids = BTreeMap::new();
            for k in &keys {
                let next = ids.len();
                ids.entry(k.clone()).or_insert(next);
            }
            let next: Vec<usize> = keys.iter().map(|k| ids[k]).collect();
            let before = cur.iter().collect::<std::collections::HashSet<_>>().len();
            if ids.len() == before {
                return next;
            }
            cur = next;
        }
    }

    fn cells(pi: &Coloring) -> Vec<Vec<usize>> {
        let mut s = pi.cell_sets();
        s.sort();
        s
    }

    #[test]
    fn documented_examples() {
        let star = refine_graph(&fixtures::star3());
        assert_eq!(cells(&star), vec![vec![0], vec![1, 2, 3]]);
        let c4 = refine_graph(&fixtures::c4());
        assert_eq!(c4.num_cells(), 1);
        let p4 = refine_graph(&fixtures::p4());
        assert_eq!(cells(&p4), vec![vec![0, 3], vec![1, 2]]);
        assert!(!is_equitable(&fixtures::star3(), &Coloring::unit(4)));
        assert!(is_equitable(&fixtures::c4(), &Coloring::unit(4)));
        assert!(is_equitable(&fixtures::p4(), &p4));
    }

    #[test]
    fn individualization() {
        let pi = individualize(&Coloring::unit(4), 0);
        assert_eq!(cells(&pi), vec![vec![0], vec![1, 2, 3]]);
        assert_eq!(pi.cell_of(0), 3);
        // already singleton: same partition, same id
        let again = individualize(&pi, 0);
        assert_eq!(again, pi);

        let g = fixtures::p4();
        let mut p = refine_graph(&g);
        assert!(individualize_refine(&g, &mut p, 0));
        assert!(p.is_discrete());
    }

    #[test]
    fn equitable_coarsest_on_corpus() {
        for g in fixtures::small_corpus(11).into_iter().chain(fixtures::all()) {
            let pi = refine_graph(&g);
            assert!(is_equitable(&g, &pi));
            assert!(pi.refines(&Coloring::of_graph(&g)));
            let oracle = Coloring::from_colors(&naive_closure(&g, g.colors()));
            assert!(pi.same_partition(&oracle), "{g:?}");
        }
    }

    #[test]
    fn equivariant_ids() {
        let mut r = fixtures::rng(5);
        for g in fixtures::all() {
            let pi = refine_graph(&g);
            for _ in 0..20 {
                let gamma = fixtures::random_permutation(g.n(), &mut r);
                let h = apply_permutation(&g, &gamma).unwrap();
                let rho = refine_graph(&h);
                for v in 0..g.n() {
                    assert_eq!(pi.cell_of(v), rho.cell_of(gamma[v]));
                }
            }
        }
    }

    #[test]
    fn near_linear_on_star_of_paths() {
        let star_of_paths = |legs: usize| fixtures::spider(&vec![20; legs]);
        let cost = |g: &ColoredGraph| {
            let (_, c) = work::measure(|| {
                let mut pi = refine_graph(g);
                // individualize a leg end to force a long cascade
                individualize_refine(g, &mut pi, g.n() - 1);
            });
            c as f64
        };
        let mut prev = cost(&star_of_paths(50));
        for legs in [100, 200, 400] {
            let c = cost(&star_of_paths(legs));
            assert!(c / prev <= 2.5, "growth {} at {legs}", c / prev);
            prev = c;
        }
    }

    #[test]
    fn budget_aborts() {
        let g = fixtures::random_regular(200, 3, &mut fixtures::rng(2));
        let mut pi = Coloring::unit(200);
        let ok = work::with_budget(10, || individualize_refine(&g, &mut pi, 0));
        assert!(!ok);
    }
}
