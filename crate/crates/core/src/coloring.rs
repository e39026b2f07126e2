//! Ordered partitions with position-based cell identifiers.
//!
//! Vertices are kept in one array grouped by cell. A cell is named by the
//! index of its first position, so as long as splits order their fragments
//! by isomorphism-invariant keys, cell ids are invariant too.

use crate::graph::ColoredGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    order: Vec<usize>,
    pos: Vec<usize>,
    cell_of: Vec<usize>,
    // size of the cell starting at a position; meaningless elsewhere
    len_at: Vec<usize>,
    num_cells: usize,
}

impl Coloring {
    /// Single cell holding every vertex.
    pub fn unit(n: usize) -> Self {
        Self::from_colors(&vec![0; n])
    }

    /// Cells ordered by ascending color value.
    pub fn from_colors(colors: &[usize]) -> Self {
        let n = colors.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (colors[v], v));
        let mut c = Coloring {
            order,
            pos: vec![0; n],
            cell_of: vec![0; n],
            len_at: vec![0; n],
            num_cells: 0,
        };
        let mut start = 0;
        for i in 0..=n {
            if i == n || colors[c.order[i]] != colors[c.order[start]] {
                if i > start {
                    c.set_cell(start, i);
                }
                start = i;
            }
        }
        c
    }

    pub fn of_graph(g: &ColoredGraph) -> Self {
        Self::from_colors(g.colors())
    }

    /// Partition given as explicit cells, in the given order.
    pub fn from_cells(n: usize, cells: &[Vec<usize>]) -> Self {
        let mut colors = vec![usize::MAX; n];
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                colors[v] = i;
            }
        }
        assert!(colors.iter().all(|&c| c != usize::MAX), "cells must cover all vertices");
        Self::from_colors(&colors)
    }

    pub(crate) fn set_cell(&mut self, start: usize, end: usize) {
        self.len_at[start] = end - start;
        for i in start..end {
            let v = self.order[i];
            self.pos[v] = i;
            self.cell_of[v] = start;
        }
        self.num_cells += 1;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn cell_of(&self, v: usize) -> usize {
        self.cell_of[v]
    }

    #[inline]
    pub fn cell_size(&self, cell: usize) -> usize {
        self.len_at[cell]
    }

    #[inline]
    pub fn cell(&self, cell: usize) -> &[usize] {
        &self.order[cell..cell + self.len_at[cell]]
    }

    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.pos[v]
    }

    /// Vertex at a position of the ordered partition.
    #[inline]
    pub fn at(&self, position: usize) -> usize {
        self.order[position]
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn is_singleton(&self, v: usize) -> bool {
        self.len_at[self.cell_of[v]] == 1
    }

    pub fn is_discrete(&self) -> bool {
        self.num_cells == self.n()
    }

    /// Cell ids in ascending order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.order.len() {
                return None;
            }
            let c = i;
            i += self.len_at[c];
            Some(c)
        })
    }

    /// `(id, size)` for every cell, ascending id.
    pub fn signature(&self) -> Vec<(usize, usize)> {
        self.cells().map(|c| (c, self.cell_size(c))).collect()
    }

    /// Cells as vertex sets, each sorted, in cell order.
    pub fn cell_sets(&self) -> Vec<Vec<usize>> {
        self.cells()
            .map(|c| {
                let mut s = self.cell(c).to_vec();
                s.sort_unstable();
                s
            })
            .collect()
    }

    /// Dense color per vertex: the rank of its cell.
    pub fn dense_colors(&self) -> Vec<usize> {
        let mut rank = vec![0; self.n()];
        for (i, c) in self.cells().enumerate() {
            rank[c] = i;
        }
        self.cell_of.iter().map(|&c| rank[c]).collect()
    }

    /// True iff every cell of `self` lies inside one cell of `coarser`.
    pub fn refines(&self, coarser: &Coloring) -> bool {
        self.n() == coarser.n()
            && self.cells().all(|c| {
                let cell = self.cell(c);
                let target = coarser.cell_of(cell[0]);
                cell.iter().all(|&v| coarser.cell_of(v) == target)
            })
    }

    /// Equality as unordered partitions.
    pub fn same_partition(&self, other: &Coloring) -> bool {
        self.num_cells == other.num_cells && self.refines(other)
    }

    /// Restriction to the kept vertices, renamed in ascending order. Cell
    /// order is preserved; ids become the new start positions.
    pub fn restrict(&self, keep: &[bool]) -> Coloring {
        let mut new_id = vec![usize::MAX; self.n()];
        let mut next = 0;
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_id[v] = next;
                next += 1;
            }
        }
        let mut colors = vec![0; next];
        for (rank, c) in self.cells().enumerate() {
            for &v in self.cell(c) {
                if keep[v] {
                    colors[new_id[v]] = rank;
                }
            }
        }
        Coloring::from_colors(&colors)
    }

    /// Splits the cell starting at `start` into consecutive fragments of the
    /// given sizes, assuming the caller already arranged `order` within the
    /// cell. Returns the new fragment ids (excluding `start` itself).
    pub(crate) fn split_into(&mut self, start: usize, sizes: &[usize]) -> Vec<usize> {
        debug_assert_eq!(sizes.iter().sum::<usize>(), self.len_at[start]);
        let mut ids = Vec::with_capacity(sizes.len().saturating_sub(1));
        let mut at = start;
        self.len_at[start] = sizes[0];
        at += sizes[0];
        for &s in &sizes[1..] {
            self.len_at[at] = s;
            for i in at..at + s {
                self.cell_of[self.order[i]] = at;
            }
            ids.push(at);
            self.num_cells += 1;
            at += s;
        }
        ids
    }

    #[inline]
    pub(crate) fn swap_positions(&mut self, i: usize, j: usize) {
        if i != j {
            self.order.swap(i, j);
            self.pos[self.order[i]] = i;
            self.pos[self.order[j]] = j;
        }
    }

    pub(crate) fn order_slice_mut(&mut self, start: usize, end: usize) -> &mut [usize] {
        &mut self.order[start..end]
    }

    pub(crate) fn fix_positions(&mut self, start: usize, end: usize) {
        for i in start..end {
            self.pos[self.order[i]] = i;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_colors_orders_cells() {
        let c = Coloring::from_colors(&[2, 0, 2, 1]);
        assert_eq!(c.signature(), vec![(0, 1), (1, 1), (2, 2)]);
        assert_eq!(c.cell(2), &[0, 2]);
        assert_eq!(c.cell_of(3), 1);
        assert_eq!(c.dense_colors(), vec![2, 0, 2, 1]);
    }

    #[test]
    fn refines_relation() {
        let coarse = Coloring::from_colors(&[0, 0, 1, 1]);
        let fine = Coloring::from_colors(&[0, 1, 2, 2]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(coarse.same_partition(&Coloring::from_colors(&[5, 5, 3, 3])));
    }

    #[test]
    fn restrict_keeps_order() {
        let c = Coloring::from_colors(&[1, 0, 1, 0, 2]);
        let r = c.restrict(&[true, false, true, true, true]);
        // kept: 0,2,3,4 -> new 0,1,2,3 with colors 1,1,0,2
        assert_eq!(r.cell_sets(), vec![vec![2], vec![0, 1], vec![3]]);
    }

    #[test]
    fn empty() {
        let c = Coloring::unit(0);
        assert_eq!(c.num_cells(), 0);
        assert!(c.is_discrete());
        assert_eq!(c.cells().count(), 0);
    }
}
