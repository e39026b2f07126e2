//! Degree-0, universal-vertex and degree-1 removal.

use std::collections::BTreeSet;

use super::{Edit, Workspace};
use crate::quotient::cell_infos;
use crate::work;

fn sorted_cell(ws: &Workspace, c: usize) -> Vec<usize> {
    let mut vs = ws.coloring().cell(c).to_vec();
    vs.sort_unstable();
    vs
}

/// Removes every cell of isolated vertices, emitting `Sym(cell)` as kernel
/// generators. Needs an equitable coloring.
pub fn remove_degree0(ws: &mut Workspace) -> usize {
    let k = remove_cells_by_degree(ws, 0);
    ws.counters.deg0 += k;
    k
}

/// Removes every cell whose vertices are adjacent to all other vertices.
/// Such a cell is internally complete, so its symmetric group is kernel.
pub fn remove_universal(ws: &mut Workspace) -> usize {
    if ws.n() < 2 {
        return 0;
    }
    let k = remove_cells_by_degree(ws, ws.n() - 1);
    ws.counters.universal += k;
    k
}

fn remove_cells_by_degree(ws: &mut Workspace, target: usize) -> usize {
    let cells: Vec<usize> = cell_infos(ws.graph(), ws.coloring())
        .into_iter()
        .filter(|i| i.degree == target)
        .map(|i| i.id)
        .collect();
    if cells.is_empty() {
        return 0;
    }
    let mut edit = Edit::new(ws.n());
    for c in cells {
        let vs = sorted_cell(ws, c);
        ws.emit_symmetric(&edit, &vs);
        for v in vs {
            edit.remove(v);
        }
    }
    let k = edit.removed_count();
    ws.commit(edit);
    k
}

/// Repeatedly removes cells of degree-1 vertices, appending each bundle of
/// leaves to the string of the vertex they hang off. Leaves on the same
/// vertex are interchangeable and yield kernel transpositions. A degree-1
/// cell matched to itself (isolated edges) keeps one endpoint per edge,
/// which becomes isolated. Cells that only drop to degree 1 during the pass
/// are left for the next pass when matched to themselves.
///
/// The coloring stays equitable since only whole cells disappear.
pub fn remove_degree1(ws: &mut Workspace) -> usize {
    let mut cell_degree = vec![0; ws.n()];
    let mut queue = BTreeSet::new();
    for info in cell_infos(ws.graph(), ws.coloring()) {
        cell_degree[info.id] = info.degree;
        if info.degree == 1 {
            queue.insert(info.id);
        }
    }
    if queue.is_empty() {
        return 0;
    }
    let initial = queue.clone();
    let g = ws.graph().clone();
    let pi = ws.coloring().clone();
    let mut edit = Edit::new(g.n());
    let alive_neighbor = |edit: &Edit, v: usize| {
        work::charge(g.degree(v));
        g.neighbors(v).iter().copied().find(|&u| !edit.is_removed(u))
    };
    while let Some(c) = queue.pop_first() {
        if cell_degree[c] != 1 {
            continue;
        }
        let members = {
            let mut vs = pi.cell(c).to_vec();
            vs.retain(|&v| !edit.is_removed(v));
            vs.sort_unstable();
            vs
        };
        let attach: Vec<(usize, usize)> = members
            .iter()
            .map(|&v| (alive_neighbor(&edit, v).expect("degree-1 vertex has a neighbor"), v))
            .collect();
        let p_cell = pi.cell_of(attach[0].0);
        if p_cell == c && !initial.contains(&c) {
            continue;
        }
        if p_cell == c {
            for &(u, v) in &attach {
                if v < u {
                    ws.emit_kernel(&edit, &[(v, u), (u, v)]);
                    edit.absorb_into(v, u);
                }
            }
            cell_degree[c] = 0;
            continue;
        }
        let mut bundles = attach;
        bundles.sort_unstable();
        for group in bundles.chunk_by(|a, b| a.0 == b.0) {
            let leaves: Vec<usize> = group.iter().map(|&(_, v)| v).collect();
            ws.emit_symmetric(&edit, &leaves);
            for v in leaves {
                edit.absorb_into(group[0].0, v);
            }
        }
        cell_degree[c] = 0;
        let per_parent = members.len() / pi.cell_size(p_cell);
        cell_degree[p_cell] -= per_parent;
        if cell_degree[p_cell] == 1 {
            queue.insert(p_cell);
        }
    }
    let k = edit.removed_count();
    ws.commit(edit);
    ws.counters.deg1 += k;
    k
}
