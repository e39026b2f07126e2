//! Probing for sparse automorphisms that make a whole cell one orbit.
//!
//! Two individualization-refinement paths start from different vertices of
//! the probed cell. Whenever both colorings agree on their singletons, the
//! induced singleton map is checked as an automorphism. If automorphisms
//! covering the whole cell are certified, the cell is an orbit and one of
//! its vertices can be individualized without losing symmetry.

use crate::coloring::Coloring;
use crate::graph::ColoredGraph;
use crate::perm::{check_sparse, Marks, SparseAutomorphism};
use crate::refinement::individualize_refine;
use crate::work;

/// Union-find over vertices, with the certified automorphisms whose cycles
/// were merged in. Resetting costs only the touched entries.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    parent: Vec<usize>,
    size: Vec<usize>,
    touched: Vec<usize>,
    witnesses: Vec<SparseAutomorphism>,
}

impl OrbitPartition {
    pub fn new(n: usize) -> Self {
        OrbitPartition {
            parent: (0..n).collect(),
            size: vec![1; n],
            touched: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            let up = self.parent[self.parent[v]];
            self.parent[v] = up;
            v = up;
        }
        v
    }

    /// Merges the orbits of `a` and `b`; returns whether they were apart.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.touched.push(rb);
        self.touched.push(ra);
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn orbit_size(&mut self, v: usize) -> usize {
        let r = self.find(v);
        self.size[r]
    }

    /// Merges the cycles of a certified automorphism and keeps it.
    pub fn record(&mut self, phi: &SparseAutomorphism) {
        if phi.is_identity() {
            return;
        }
        for &(a, b) in phi.pairs() {
            self.union(a, b);
        }
        work::charge(phi.support_len());
        self.witnesses.push(phi.clone());
    }

    pub fn witnesses(&self) -> &[SparseAutomorphism] {
        &self.witnesses
    }

    /// Forgets all orbits and witnesses.
    pub fn reset(&mut self) {
        for v in self.touched.drain(..) {
            self.parent[v] = v;
            self.size[v] = 1;
        }
        self.witnesses.clear();
    }
}

/// Maps every vertex that is a singleton in both `pi1` and `pi2` to the
/// vertex of `pi2` in the cell with the same id, fixing everything else.
/// Returns the map if it is a bijection and an automorphism of `(g, pi)`;
/// the check only looks at the support and its neighbors.
pub fn singleton_correspondence(
    g: &ColoredGraph,
    pi: &Coloring,
    pi1: &Coloring,
    pi2: &Coloring,
) -> Option<SparseAutomorphism> {
    work::charge(pi1.num_cells());
    let mut pairs = Vec::new();
    for c in pi1.cells() {
        if pi1.cell_size(c) != 1 {
            continue;
        }
        let v = pi1.at(c);
        if !pi2.is_singleton(v) {
            continue;
        }
        let w = pi2.at(c);
        if pi2.cell_of(w) != c || pi2.cell_size(c) != 1 {
            return None;
        }
        if v != w {
            pairs.push((v, w));
        }
    }
    let phi = SparseAutomorphism::from_pairs(pairs)?;
    if phi.pairs().iter().any(|&(v, w)| pi.cell_of(v) != pi.cell_of(w)) {
        return None;
    }
    let mut marks = Marks::new(g.n());
    check_sparse(g, phi.pairs(), |v| phi.apply(v), &mut marks).then_some(phi)
}

/// Result of a probing strategy.
#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub coloring: Coloring,
    pub gens: Vec<SparseAutomorphism>,
    pub attempted: usize,
    pub succeeded: usize,
}

impl ProbeOutcome {
    fn start(pi: &Coloring) -> Self {
        ProbeOutcome {
            coloring: pi.clone(),
            gens: Vec::new(),
            attempted: 0,
            succeeded: 0,
        }
    }

    fn absorb(&mut self, result: Option<(Coloring, Vec<SparseAutomorphism>)>) -> bool {
        self.attempted += 1;
        match result {
            Some((pi, gens)) => {
                self.succeeded += 1;
                self.coloring = pi;
                self.gens.extend(gens);
                true
            }
            None => false,
        }
    }
}

/// Bounded IR probing of one cell. `limit` bounds the number of
/// individualizations per path (`None` for no bound). On success returns
/// the coloring with the smallest vertex of the cell individualized and
/// refined, plus automorphisms making the cell one orbit; on failure
/// returns `pi` unchanged and no automorphisms.
pub fn bounded_probe_ir(
    g: &ColoredGraph,
    pi: &Coloring,
    cell: usize,
    limit: Option<usize>,
) -> (Coloring, Vec<SparseAutomorphism>) {
    let mut orbits = OrbitPartition::new(g.n());
    match probe_with(g, pi, cell, limit, &mut orbits) {
        Some(found) => found,
        None => (pi.clone(), Vec::new()),
    }
}

fn smallest_nontrivial(pi: &Coloring) -> Option<usize> {
    pi.cells().find(|&c| pi.cell_size(c) > 1)
}

fn min_of(pi: &Coloring, c: usize) -> usize {
    work::charge(pi.cell_size(c));
    *pi.cell(c).iter().min().unwrap()
}

fn step(g: &ColoredGraph, pi: &Coloring, v: usize) -> Option<Coloring> {
    let mut next = pi.clone();
    work::charge(pi.n());
    individualize_refine(g, &mut next, v).then_some(next)
}

/// Probe sharing `orbits` with earlier probes on the same coloring. The
/// automorphisms certified along the way stay in `orbits` even when the
/// probe fails; on success they are all returned and `orbits` is reset.
pub fn probe_with(
    g: &ColoredGraph,
    pi: &Coloring,
    cell: usize,
    limit: Option<usize>,
    orbits: &mut OrbitPartition,
) -> Option<(Coloring, Vec<SparseAutomorphism>)> {
    let mut members = pi.cell(cell).to_vec();
    if members.len() < 2 {
        return None;
    }
    work::charge(members.len());
    members.sort_unstable();
    let (v1, v2) = (members[0], members[1]);
    let first = step(g, pi, v1)?;
    let mut p1 = first.clone();
    let mut p2 = step(g, pi, v2)?;
    let mut trail = vec![cell];
    loop {
        work::charge(p1.num_cells());
        if p1.signature() != p2.signature() {
            return None;
        }
        if let Some(phi) = singleton_correspondence(g, pi, &p1, &p2) {
            orbits.record(&phi);
            if orbits.same(v1, v2) {
                break;
            }
        }
        if limit.is_some_and(|l| trail.len() >= l) {
            return None;
        }
        let c = smallest_nontrivial(&p1)?;
        let (u1, u2) = (min_of(&p1, c), min_of(&p2, c));
        p1 = step(g, &p1, u1)?;
        p2 = step(g, &p2, u2)?;
        trail.push(c);
    }
    for &w in &members[2..] {
        if orbits.same(v1, w) {
            continue;
        }
        let mut p = step(g, pi, w)?;
        for &c in &trail[1..] {
            if p.cell_of(p.at(c)) != c || p.cell_size(c) < 2 {
                return None;
            }
            let u = min_of(&p, c);
            p = step(g, &p, u)?;
        }
        work::charge(p.num_cells());
        if p.signature() != p1.signature() {
            return None;
        }
        let phi = singleton_correspondence(g, pi, &p1, &p)?;
        orbits.record(&phi);
        if !orbits.same(v1, w) {
            return None;
        }
    }
    let gens = orbits.witnesses().to_vec();
    orbits.reset();
    Some((first, gens))
}

fn in_scope(pi: &Coloring, c: usize, scope: Option<&[bool]>) -> bool {
    scope.is_none_or(|s| s[pi.cell(c)[0]])
}

/// Probes every non-trivial cell with paths of length one, in ascending id
/// order. After a success the scan continues from the probed cell's id on
/// the new coloring.
pub fn probe_1ir_all_classes(g: &ColoredGraph, pi: &Coloring, orbits: &mut OrbitPartition) -> ProbeOutcome {
    probe_1ir_scoped(g, pi, orbits, None)
}

pub(crate) fn probe_1ir_scoped(
    g: &ColoredGraph,
    pi: &Coloring,
    orbits: &mut OrbitPartition,
    scope: Option<&[bool]>,
) -> ProbeOutcome {
    let mut out = ProbeOutcome::start(pi);
    let mut from = 0;
    while from < out.coloring.n() {
        let next = out
            .coloring
            .cells()
            .skip_while(|&c| c < from)
            .find(|&c| out.coloring.cell_size(c) > 1 && in_scope(&out.coloring, c, scope));
        let Some(c) = next else { break };
        if work::exhausted() {
            break;
        }
        let result = probe_with(g, &out.coloring, c, Some(1), orbits);
        if !out.absorb(result) {
            from = c + 1;
        } else {
            from = c;
        }
    }
    out
}

/// Probes size-2 cells without a length bound, smallest id first, until a
/// probe fails or none are left.
pub fn probe_inf_size2(g: &ColoredGraph, pi: &Coloring) -> ProbeOutcome {
    probe_size2_scoped(g, pi, None)
}

pub(crate) fn probe_size2_scoped(g: &ColoredGraph, pi: &Coloring, scope: Option<&[bool]>) -> ProbeOutcome {
    let mut out = ProbeOutcome::start(pi);
    loop {
        let next = out
            .coloring
            .cells()
            .find(|&c| out.coloring.cell_size(c) == 2 && in_scope(&out.coloring, c, scope));
        let Some(c) = next else { break };
        let mut orbits = OrbitPartition::new(g.n());
        if !out.absorb(probe_with(g, &out.coloring, c, None, &mut orbits)) {
            break;
        }
    }
    out
}

/// Probes one cell of size in `3..=bound` (smallest, then lowest id)
/// without a length bound.
#[allow(non_snake_case)]
pub fn probe_inf_sizeB(g: &ColoredGraph, pi: &Coloring, orbits: &mut OrbitPartition, bound: usize) -> ProbeOutcome {
    probe_size_bound_scoped(g, pi, orbits, bound, None)
}

pub(crate) fn probe_size_bound_scoped(
    g: &ColoredGraph,
    pi: &Coloring,
    orbits: &mut OrbitPartition,
    bound: usize,
    scope: Option<&[bool]>,
) -> ProbeOutcome {
    let mut out = ProbeOutcome::start(pi);
    let target = pi
        .cells()
        .filter(|&c| (3..=bound).contains(&pi.cell_size(c)) && in_scope(pi, c, scope))
        .min_by_key(|&c| (pi.cell_size(c), c));
    if let Some(c) = target {
        out.absorb(probe_with(g, pi, c, None, orbits));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::refinement::{individualize, refine, refine_graph};
    use crate::solver::{brute_force_aut, group_order};

    fn after(g: &ColoredGraph, pi: &Coloring, v: usize) -> Coloring {
        let mut p = pi.clone();
        individualize_refine(g, &mut p, v);
        p
    }

    #[test]
    fn correspondence_examples() {
        let p4 = fixtures::p4();
        let pi = refine_graph(&p4);
        let phi = singleton_correspondence(&p4, &pi, &after(&p4, &pi, 0), &after(&p4, &pi, 3)).unwrap();
        assert_eq!(phi, SparseAutomorphism::from_cycles(&[&[0, 3], &[1, 2]]));

        let c4 = fixtures::c4();
        let pi = Coloring::unit(4);
        for other in [1, 3] {
            let phi = singleton_correspondence(&c4, &pi, &after(&c4, &pi, 0), &after(&c4, &pi, other)).unwrap();
            assert!(phi.is_identity());
        }
    }

    #[test]
    fn correspondence_rejects_non_automorphisms() {
        // an end of P4 against a middle vertex: the induced map sends an end
        // to a middle and is not an automorphism
        let g = fixtures::p4();
        let pi = Coloring::unit(4);
        let p1 = refine(&g, &individualize(&pi, 0), None);
        let p2 = refine(&g, &individualize(&pi, 1), None);
        assert_eq!(singleton_correspondence(&g, &pi, &p1, &p2), None);
        // unrefined, only the two individualized vertices are singletons and
        // neither is a singleton on both sides
        let (p1, p2) = (individualize(&pi, 0), individualize(&pi, 1));
        assert!(singleton_correspondence(&g, &pi, &p1, &p2).unwrap().is_identity());
    }

    #[test]
    fn correspondence_check_is_support_local() {
        // a big graph where two far-apart pendant pairs get swapped
        let mut r = fixtures::rng(2);
        let base = fixtures::random_regular(2000, 3, &mut r);
        let mut edges: Vec<_> = base.edges().collect();
        edges.extend([(0, 2000), (0, 2001)]);
        let g = ColoredGraph::from_edges(2002, &edges);
        let pi = Coloring::from_colors(&(0..2002).map(|v| usize::from(v >= 2000)).collect::<Vec<_>>());
        let p1 = individualize(&pi, 2000);
        let p2 = individualize(&pi, 2001);
        let (phi, cost) = work::measure(|| singleton_correspondence(&g, &pi, &p1, &p2));
        let phi = phi.unwrap();
        assert_eq!(phi, SparseAutomorphism::transposition(2000, 2001));
        let touched: usize = phi.support().map(|v| 1 + g.degree(v)).sum();
        // cell scan plus at most three units per touched entry
        assert!(cost as usize <= p1.num_cells() + 3 * touched);
    }

    #[test]
    fn probe_examples() {
        let p4 = fixtures::p4();
        let pi = refine_graph(&p4);
        let (out, gens) = bounded_probe_ir(&p4, &pi, pi.cell_of(0), None);
        assert!(out.is_discrete());
        assert_eq!(gens, vec![SparseAutomorphism::from_cycles(&[&[0, 3], &[1, 2]])]);

        let c4 = fixtures::c4();
        let (out, gens) = bounded_probe_ir(&c4, &Coloring::unit(4), 0, Some(1));
        assert_eq!(out, Coloring::unit(4));
        assert!(gens.is_empty());

        let q3 = fixtures::q3();
        let pi = Coloring::unit(8);
        let (out, gens) = bounded_probe_ir(&q3, &pi, 0, None);
        assert!(!gens.is_empty() && gens.len() <= 7);
        assert_eq!(out, after(&q3, &pi, 0));
        let mut orbits = OrbitPartition::new(8);
        for s in &gens {
            assert!(s.is_automorphism_of(&q3));
            orbits.record(s);
        }
        assert_eq!(orbits.orbit_size(0), 8);
    }

    #[test]
    fn strategies() {
        let p4 = fixtures::p4();
        let pi = refine_graph(&p4);
        let out = probe_1ir_all_classes(&p4, &pi, &mut OrbitPartition::new(4));
        assert!(out.coloring.is_discrete());
        assert_eq!(out.succeeded, 1);

        let pet = fixtures::petersen();
        let pi = refine_graph(&pet);
        let out = probe_1ir_all_classes(&pet, &pi, &mut OrbitPartition::new(10));
        assert_eq!((out.succeeded, out.coloring), (0, pi.clone()));
        let out = probe_inf_sizeB(&pet, &pi, &mut OrbitPartition::new(10), 8);
        assert_eq!(out.attempted, 0);

        let tree = fixtures::asymmetric_tree();
        let out = probe_1ir_all_classes(&tree, &refine_graph(&tree), &mut OrbitPartition::new(7));
        assert!(out.gens.is_empty());

        let out = probe_inf_size2(&p4, &refine_graph(&p4));
        assert!(out.coloring.is_discrete());
        assert_eq!(out.gens.len(), 1);

        let c4 = fixtures::c4();
        let out = probe_inf_sizeB(&c4, &Coloring::unit(4), &mut OrbitPartition::new(4), 8);
        assert_eq!((out.attempted, out.succeeded), (1, 1));
        assert_eq!(group_order(&out.gens, 4) % 4, 0);
        assert_eq!(probe_inf_size2(&c4, &Coloring::unit(4)).attempted, 0);

        let q3 = fixtures::q3();
        let out = probe_inf_sizeB(&q3, &Coloring::unit(8), &mut OrbitPartition::new(8), 8);
        assert_eq!(out.succeeded, 1);
    }

    #[test]
    fn two_dependent_pairs() {
        // K4 with colors {0,1} and {2,3}: swapping one pair forces nothing on
        // the other, group order 4
        let g = crate::graph::build_graph(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            &[0, 0, 1, 1],
        )
        .unwrap();
        let out = probe_inf_size2(&g, &refine_graph(&g));
        assert_eq!(out.succeeded, 2);
        assert!(out.coloring.is_discrete());
        assert_eq!(group_order(&out.gens, 4) % 4, 0);
        assert_eq!(brute_force_aut(&g, 10).unwrap().len(), 4);
    }

    /// `|Aut(G, pi)| = |orbit| * |Aut(G, pi')|` on every successful probe.
    #[test]
    fn orbit_stabilizer_identity() {
        let order = |g: &ColoredGraph, pi: &Coloring| brute_force_aut(&g.recolored(&pi.dense_colors()), 12).unwrap().len();
        let mut successes = 0;
        for g in fixtures::small_corpus(14) {
            let pi = refine_graph(&g);
            for c in pi.cells().filter(|&c| pi.cell_size(c) > 1) {
                for limit in [Some(1), None] {
                    let (next, gens) = bounded_probe_ir(&g, &pi, c, limit);
                    if gens.is_empty() && next == pi {
                        continue;
                    }
                    successes += 1;
                    for s in &gens {
                        assert!(s.is_automorphism_of(&g));
                    }
                    assert_eq!(order(&g, &pi), pi.cell_size(c) * order(&g, &next));
                }
            }
        }
        assert!(successes > 50);
    }

    #[test]
    fn deterministic() {
        let q3 = fixtures::q3();
        let a = bounded_probe_ir(&q3, &Coloring::unit(8), 0, None);
        let b = bounded_probe_ir(&q3, &Coloring::unit(8), 0, None);
        assert_eq!(a, b);
    }
}
