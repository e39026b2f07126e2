//! The preprocessing pipeline and group reconstruction.
//!
//! One iteration runs: refinement, singleton removal, degree-0 and
//! universal removal, exhaustive degree-1 removal, the degree-2 heuristics,
//! edge flips, probing per quotient component, and singleton removal again.
//! Iterations repeat while low-degree vertices remain and the previous
//! iteration shrank the graph by at least the configured fraction.

use thiserror::Error;

use crate::coloring::Coloring;
use crate::graph::{ColoredGraph, VertexRenaming};
use crate::lifting::{LiftError, RepresentationMap};
use crate::perm::SparseAutomorphism;
use crate::probing::{probe_1ir_scoped, probe_size2_scoped, probe_size_bound_scoped, OrbitPartition, ProbeOutcome};
use crate::quotient::{component_cells, flip_all};
use crate::reductions::{
    reduce_obfuscated_edge_flip, reduce_obfuscated_matchings, reduce_unique_endpoint_paths, remove_degree0,
    remove_degree1, remove_universal, Counters, Workspace,
};
use crate::work;

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub deg0: bool,
    pub deg1: bool,
    pub deg2_unique: bool,
    pub deg2_match: bool,
    pub deg2_flip: bool,
    pub edge_flip: bool,
    pub probe_1ir: bool,
    pub probe_size2: bool,
    pub probe_size_b: bool,
    pub components: bool,
    /// Largest cell size for the unbounded probe of one cell.
    pub probe_bound: usize,
    /// Repeat only if an iteration removed at least this fraction.
    pub shrink_threshold: f64,
    /// Longest chain contracted by the unique-endpoint path rule.
    pub t_cap: Option<usize>,
    /// Probing may spend `max(n + 2m, probe_budget_floor)` work units per
    /// iteration.
    pub probe_budget_floor: u64,
    /// Keep every stage map in the report.
    pub record_chain: bool,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            deg0: true,
            deg1: true,
            deg2_unique: true,
            deg2_match: true,
            deg2_flip: true,
            edge_flip: true,
            probe_1ir: true,
            probe_size2: true,
            probe_size_b: true,
            components: true,
            probe_bound: 8,
            shrink_threshold: 0.25,
            t_cap: None,
            probe_budget_floor: 4096,
            record_chain: false,
        }
    }
}

impl ScheduleConfig {
    /// Every technique switched off; only refinement and singleton removal.
    pub fn none() -> Self {
        ScheduleConfig {
            deg0: false,
            deg1: false,
            deg2_unique: false,
            deg2_match: false,
            deg2_flip: false,
            edge_flip: false,
            probe_1ir: false,
            probe_size2: false,
            probe_size_b: false,
            components: false,
            ..Self::default()
        }
    }

    fn any_probe(&self) -> bool {
        self.probe_1ir || self.probe_size2 || self.probe_size_b
    }
}

#[derive(Debug, Clone)]
pub struct PreprocessReport {
    /// The reduced graph, colored by the final coloring's cell ranks.
    pub reduced: ColoredGraph,
    pub coloring: Coloring,
    /// Flattened map from the input graph to `reduced`.
    pub repr: RepresentationMap,
    pub kernel: Vec<SparseAutomorphism>,
    /// Automorphisms certified by probing, over input ids.
    pub probe_gens: Vec<SparseAutomorphism>,
    pub counters: Counters,
    pub iterations: usize,
    pub chain: Option<Vec<RepresentationMap>>,
    pub input_n: usize,
    pub input_m: usize,
}

impl PreprocessReport {
    pub fn renaming(&self) -> &VertexRenaming {
        self.repr.renaming()
    }

    /// Kernel and probing generators.
    pub fn generators(&self) -> impl Iterator<Item = &SparseAutomorphism> {
        self.kernel.iter().chain(&self.probe_gens)
    }
}

fn has_low_degree(g: &ColoredGraph) -> bool {
    work::charge(g.n());
    (0..g.n()).any(|v| g.degree(v) <= 1)
}

pub fn preprocess(g: &ColoredGraph, cfg: &ScheduleConfig) -> PreprocessReport {
    assert!(cfg.shrink_threshold > 0.0 && cfg.shrink_threshold < 1.0);
    let mut ws = Workspace::new(g);
    if cfg.record_chain {
        ws = ws.with_chain();
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let n_start = ws.n();
        ws.refine();
        ws.remove_singletons();
        if cfg.deg0 {
            remove_degree0(&mut ws);
            remove_universal(&mut ws);
        }
        if cfg.deg1 {
            remove_degree1(&mut ws);
        }
        degree2(&mut ws, cfg);
        if cfg.edge_flip {
            if let Some((flipped, saved)) = flip_all(ws.graph(), ws.coloring()) {
                ws.set_graph(flipped);
                ws.counters.edges_flipped += saved;
            }
        }
        if cfg.any_probe() && ws.n() > 0 {
            probe(&mut ws, cfg);
        }
        ws.remove_singletons();
        let shrunk = (n_start - ws.n()) as f64 >= cfg.shrink_threshold * n_start as f64;
        if ws.n() == 0 || !shrunk || !has_low_degree(ws.graph()) {
            break;
        }
    }
    let chain = ws.chain().map(|c| c.to_vec());
    PreprocessReport {
        reduced: ws.colored_graph(),
        coloring: ws.coloring().clone(),
        repr: ws.repr().clone(),
        kernel: ws.kernel().to_vec(),
        probe_gens: ws.probe_gens().to_vec(),
        counters: ws.counters.clone(),
        iterations,
        chain,
        input_n: g.n(),
        input_m: g.m(),
    }
}

fn degree2(ws: &mut Workspace, cfg: &ScheduleConfig) {
    loop {
        let mut changed = 0;
        if cfg.deg2_match {
            changed += reduce_obfuscated_matchings(ws);
        }
        if cfg.deg2_unique {
            changed += reduce_unique_endpoint_paths(ws, cfg.t_cap);
        }
        if cfg.deg2_flip {
            changed += reduce_obfuscated_edge_flip(ws);
        }
        if changed == 0 {
            return;
        }
        ws.refine();
    }
}

fn probe(ws: &mut Workspace, cfg: &ScheduleConfig) {
    let g = ws.graph();
    let budget = ((g.n() + 2 * g.m()) as u64).max(cfg.probe_budget_floor);
    let mut pi = ws.coloring().clone();
    let mut gens = Vec::new();
    let (mut attempted, mut succeeded) = (0, 0);
    work::with_budget(budget, || {
        let scopes: Vec<Option<Vec<bool>>> = if cfg.components {
            component_cells(g, &pi)
                .into_iter()
                .filter(|cells| cells.iter().any(|&c| pi.cell_size(c) > 1))
                .map(|cells| {
                    let mut mask = vec![false; g.n()];
                    for c in cells {
                        for &v in pi.cell(c) {
                            mask[v] = true;
                        }
                    }
                    Some(mask)
                })
                .collect()
        } else {
            vec![None]
        };
        let mut orbits = OrbitPartition::new(g.n());
        for scope in &scopes {
            let scope = scope.as_deref();
            let mut take = |out: ProbeOutcome, orbits: &mut OrbitPartition| {
                attempted += out.attempted;
                succeeded += out.succeeded;
                if out.succeeded > 0 {
                    orbits.reset();
                }
                gens.extend(out.gens);
                out.coloring
            };
            if cfg.probe_1ir {
                let out = probe_1ir_scoped(g, &pi, &mut orbits, scope);
                pi = take(out, &mut orbits);
            }
            if cfg.probe_size2 {
                let out = probe_size2_scoped(g, &pi, scope);
                pi = take(out, &mut orbits);
            }
            if cfg.probe_size_b {
                let out = probe_size_bound_scoped(g, &pi, &mut orbits, cfg.probe_bound, scope);
                pi = take(out, &mut orbits);
            }
        }
    });
    ws.counters.probes_attempted += attempted;
    ws.counters.probes_succeeded += succeeded;
    if succeeded > 0 {
        ws.add_probe_gens(&gens);
        ws.set_coloring(pi);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("generator {0} is not an automorphism of the reduced graph")]
    NotAnAutomorphism(usize),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Generators of the input graph's automorphism group, from generators of
/// the reduced graph's group: kernel and probing generators plus the lifts.
pub fn reconstruct_group(
    report: &PreprocessReport,
    reduced_gens: &[SparseAutomorphism],
) -> Result<Vec<SparseAutomorphism>, ReconstructError> {
    let mut out: Vec<SparseAutomorphism> = report.generators().cloned().collect();
    for (i, phi) in reduced_gens.iter().enumerate() {
        if !phi.is_automorphism_of(&report.reduced) {
            return Err(ReconstructError::NotAnAutomorphism(i));
        }
        let lifted = report.repr.lift(phi)?;
        if !lifted.is_identity() {
            out.push(lifted);
        }
    }
    Ok(out)
}
