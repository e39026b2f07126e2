//! Low-degree reductions working on a shared [`Workspace`].
//!
//! A workspace holds the current reduced graph, its equitable coloring, the
//! flattened representation map back to the input graph, and every kernel
//! generator emitted so far (already over input ids). Each reduction builds
//! an [`Edit`] against the current graph and commits it in one step.

mod deg2;
mod lowdeg;

use std::borrow::Cow;
use std::collections::HashMap;

use serde::Serialize;

use crate::coloring::Coloring;
use crate::graph::{compact_colors, induced_with_extra_edges, ColoredGraph};
use crate::lifting::{FlipRecord, RepresentationMap};
use crate::perm::SparseAutomorphism;
use crate::refinement::refine_in_place;
use crate::work;

pub use deg2::{reduce_obfuscated_edge_flip, reduce_obfuscated_matchings, reduce_unique_endpoint_paths};
pub use lowdeg::{remove_degree0, remove_degree1, remove_universal};

/// Vertices (or edges) removed per technique, plus probing tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub singletons: usize,
    pub deg0: usize,
    pub universal: usize,
    pub deg1: usize,
    pub deg2_match: usize,
    pub deg2_unique: usize,
    pub deg2_flip: usize,
    pub edges_flipped: usize,
    pub probes_attempted: usize,
    pub probes_succeeded: usize,
}

impl Counters {
    pub fn vertices_removed(&self) -> usize {
        self.singletons
            + self.deg0
            + self.universal
            + self.deg1
            + self.deg2_match
            + self.deg2_unique
            + self.deg2_flip
    }
}

#[derive(Debug, Clone)]
pub struct Workspace {
    graph: ColoredGraph,
    coloring: Coloring,
    repr: RepresentationMap,
    kernel: Vec<SparseAutomorphism>,
    probe_gens: Vec<SparseAutomorphism>,
    pub counters: Counters,
    chain: Option<Vec<RepresentationMap>>,
}

impl Workspace {
    /// Starts from the graph's own coloring (not yet refined).
    pub fn new(g: &ColoredGraph) -> Self {
        Workspace {
            graph: g.clone(),
            coloring: Coloring::of_graph(g),
            repr: RepresentationMap::identity(g.n()),
            kernel: Vec::new(),
            probe_gens: Vec::new(),
            counters: Counters::default(),
            chain: None,
        }
    }

    /// Also keeps every committed stage map, for chain-vs-flat checks.
    pub fn with_chain(mut self) -> Self {
        self.chain = Some(Vec::new());
        self
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn repr(&self) -> &RepresentationMap {
        &self.repr
    }

    pub fn kernel(&self) -> &[SparseAutomorphism] {
        &self.kernel
    }

    pub fn probe_gens(&self) -> &[SparseAutomorphism] {
        &self.probe_gens
    }

    pub fn chain(&self) -> Option<&[RepresentationMap]> {
        self.chain.as_deref()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Refines the current coloring to its coarsest equitable refinement.
    pub fn refine(&mut self) {
        refine_in_place(&self.graph, &mut self.coloring, None);
    }

    /// Replaces the coloring by a finer one (e.g. after a successful probe).
    pub fn set_coloring(&mut self, pi: Coloring) {
        debug_assert!(pi.refines(&self.coloring));
        self.coloring = pi;
    }

    /// Replaces the graph by one on the same vertices with the same
    /// automorphisms under the current coloring (edge flips).
    pub fn set_graph(&mut self, g: ColoredGraph) {
        debug_assert_eq!(g.n(), self.graph.n());
        self.graph = g;
    }

    /// The current graph colored by the current coloring's cell ranks.
    pub fn colored_graph(&self) -> ColoredGraph {
        self.graph.recolored(&self.coloring.dense_colors())
    }

    /// Lifts automorphisms of the current colored graph found by probing and
    /// stores them.
    pub fn add_probe_gens(&mut self, gens: &[SparseAutomorphism]) {
        for g in gens {
            let lifted = self.repr.lift(g).expect("probe generator lifts");
            if !lifted.is_identity() {
                self.probe_gens.push(lifted);
            }
        }
    }

    /// Deletes every vertex in a singleton cell; those vertices are fixed by
    /// all automorphisms. Returns the number removed.
    pub fn remove_singletons(&mut self) -> usize {
        let mut edit = Edit::new(self.n());
        for c in self.coloring.cells() {
            if self.coloring.cell_size(c) == 1 {
                edit.remove(self.coloring.cell(c)[0]);
            }
        }
        let k = edit.removed_count();
        self.commit(edit);
        self.counters.singletons += k;
        k
    }

    /// Emits the kernel generator `pairs` (a permutation of current
    /// vertices) lifted through the pending strings of `edit`.
    pub(crate) fn emit_kernel(&mut self, edit: &Edit, pairs: &[(usize, usize)]) {
        let lifted = self
            .repr
            .lift_with_local_strings(pairs, |v| edit.string(v))
            .expect("kernel generator lifts");
        if !lifted.is_identity() {
            self.kernel.push(lifted);
        }
    }

    /// Emits adjacent transpositions over `vs`, which must be interchangeable.
    pub(crate) fn emit_symmetric(&mut self, edit: &Edit, vs: &[usize]) {
        for w in vs.windows(2) {
            self.emit_kernel(edit, &[(w[0], w[1]), (w[1], w[0])]);
        }
    }

    /// Applies an edit: drops removed vertices, adds edges, and extends the
    /// representation map. The coloring is restricted, not refined.
    pub(crate) fn commit(&mut self, edit: Edit) {
        if edit.removed_count() == 0 && edit.extra_edges.is_empty() {
            return;
        }
        let keep: Vec<bool> = edit.removed.iter().map(|&r| !r).collect();
        work::charge(self.graph.n() + 2 * self.graph.m());
        let stage = RepresentationMap::stage(&keep, &edit.strings, edit.flips);
        let (adj, renaming) = induced_with_extra_edges(&self.graph, &keep, &edit.extra_edges);
        let colors: Vec<usize> = renaming
            .backward_slice()
            .iter()
            .map(|&v| self.graph.color(v))
            .collect();
        self.graph = ColoredGraph::from_sorted_lists(adj, compact_colors(&colors).0);
        self.coloring = self.coloring.restrict(&keep);
        if let Some(chain) = &mut self.chain {
            chain.push(stage.clone());
        }
        self.repr.absorb(stage);
    }
}

/// A pending change to the current graph.
#[derive(Debug)]
pub(crate) struct Edit {
    removed: Vec<bool>,
    removed_count: usize,
    strings: HashMap<usize, Vec<usize>>,
    extra_edges: Vec<(usize, usize)>,
    flips: Vec<FlipRecord>,
}

impl Edit {
    pub fn new(n: usize) -> Self {
        Edit {
            removed: vec![false; n],
            removed_count: 0,
            strings: HashMap::new(),
            extra_edges: Vec::new(),
            flips: Vec::new(),
        }
    }

    pub fn remove(&mut self, v: usize) {
        if !std::mem::replace(&mut self.removed[v], true) {
            self.removed_count += 1;
        }
    }

    pub fn is_removed(&self, v: usize) -> bool {
        self.removed[v]
    }

    pub fn removed_count(&self) -> usize {
        self.removed_count
    }

    /// Pending string of `v`, itself first.
    pub fn string(&self, v: usize) -> Cow<'_, [usize]> {
        match self.strings.get(&v) {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(vec![v]),
        }
    }

    /// Removes `u` and moves its whole pending string to the end of `p`'s.
    pub fn absorb_into(&mut self, p: usize, u: usize) {
        let moved = self.strings.remove(&u).unwrap_or_else(|| vec![u]);
        work::charge(moved.len());
        self.strings.entry(p).or_insert_with(|| vec![p]).extend(moved);
        self.remove(u);
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.extra_edges.push((u, v));
    }

    /// Records a deleted path between `x` and `y`, listed from `x`'s side.
    pub fn add_flip(&mut self, x: usize, y: usize, mut path: Vec<usize>) {
        if x > y {
            path.reverse();
        }
        self.flips.push(FlipRecord {
            a: x.min(y),
            b: x.max(y),
            path,
        });
    }
}
