//! Colored simple undirected graphs in compressed adjacency form.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("expected {expected} colors, got {got}")]
    ColorCount { expected: usize, got: usize },
    #[error("map is not a bijection on {0} points")]
    NotBijective(usize),
}

/// Simple undirected graph with a vertex coloring.
///
/// Neighbor lists are sorted and stored contiguously; `colors` are dense
/// ids in `0..num_colors`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    colors: Vec<usize>,
    num_colors: usize,
}

/// Compacts arbitrary color values to dense ids, keeping their ascending
/// order. Returns the dense coloring and the sorted original values.
pub fn compact_colors(colors: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut values: Vec<usize> = colors.to_vec();
    values.sort_unstable();
    values.dedup();
    let dense = colors
        .iter()
        .map(|c| values.binary_search(c).unwrap())
        .collect();
    (dense, values)
}

/// Builds a normalized graph. `colors` may be empty for a uniform coloring.
pub fn build_graph(
    n: usize,
    edges: &[(usize, usize)],
    colors: &[usize],
) -> Result<ColoredGraph, GraphError> {
    if !colors.is_empty() && colors.len() != n {
        return Err(GraphError::ColorCount {
            expected: n,
            got: colors.len(),
        });
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::OutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, list) in adj.iter_mut().enumerate() {
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(v.min(w[0]), v.max(w[0])));
        }
    }
    let colors = if colors.is_empty() {
        vec![0; n]
    } else {
        compact_colors(colors).0
    };
    Ok(ColoredGraph::from_sorted_lists(adj, colors))
}

impl ColoredGraph {
    /// Assembles a graph from sorted, symmetric, loop-free neighbor lists and
    /// dense colors. Invariants are only checked in debug builds.
    pub(crate) fn from_sorted_lists(adj: Vec<Vec<usize>>, colors: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for list in &adj {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let num_colors = colors.iter().copied().max().map_or(0, |c| c + 1);
        let g = ColoredGraph {
            offsets,
            targets,
            colors,
            num_colors,
        };
        debug_assert!(g.check().is_ok());
        g
    }

    /// Uncolored graph from an edge list; panics on invalid input.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        build_graph(n, edges, &[]).expect("invalid edge list")
    }

    pub fn empty() -> Self {
        Self::from_sorted_lists(Vec::new(), Vec::new())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    pub fn decompose(&self) -> (usize, Vec<(usize, usize)>, Vec<usize>) {
        (self.n(), self.edges().collect(), self.colors.clone())
    }

    /// Same edges, new coloring (compacted).
    pub fn recolored(&self, colors: &[usize]) -> Self {
        assert_eq!(colors.len(), self.n());
        let mut g = self.clone();
        g.colors = compact_colors(colors).0;
        g.num_colors = g.colors.iter().copied().max().map_or(0, |c| c + 1);
        g
    }

    /// Verifies the structural invariants.
    pub fn check(&self) -> Result<(), GraphError> {
        let n = self.n();
        if self.colors.len() != n {
            return Err(GraphError::ColorCount {
                expected: n,
                got: self.colors.len(),
            });
        }
        for v in 0..n {
            let list = self.neighbors(v);
            for (i, &u) in list.iter().enumerate() {
                if u >= n {
                    return Err(GraphError::OutOfRange { vertex: u, n });
                }
                if u == v {
                    return Err(GraphError::SelfLoop(v));
                }
                if i > 0 && list[i - 1] >= u {
                    return Err(GraphError::DuplicateEdge(v.min(u), v.max(u)));
                }
                if !self.has_edge(u, v) {
                    return Err(GraphError::DuplicateEdge(v.min(u), v.max(u)));
                }
            }
        }
        let mut seen = vec![false; self.num_colors];
        for &c in &self.colors {
            seen[c] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(GraphError::ColorCount {
                expected: self.num_colors,
                got: seen.iter().filter(|s| **s).count(),
            });
        }
        Ok(())
    }
}

/// Renaming between a graph and one of its induced subgraphs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexRenaming {
    forward: Vec<Option<usize>>,
    backward: Vec<usize>,
}

impl VertexRenaming {
    pub fn identity(n: usize) -> Self {
        VertexRenaming {
            forward: (0..n).map(Some).collect(),
            backward: (0..n).collect(),
        }
    }

    /// Renaming that keeps the marked vertices in ascending order.
    pub fn from_keep(keep: &[bool]) -> Self {
        let mut forward = vec![None; keep.len()];
        let mut backward = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                forward[v] = Some(backward.len());
                backward.push(v);
            }
        }
        VertexRenaming { forward, backward }
    }

    #[inline]
    pub fn forward(&self, old: usize) -> Option<usize> {
        self.forward[old]
    }

    #[inline]
    pub fn backward(&self, new: usize) -> usize {
        self.backward[new]
    }

    pub fn old_len(&self) -> usize {
        self.forward.len()
    }

    pub fn new_len(&self) -> usize {
        self.backward.len()
    }

    pub fn backward_slice(&self) -> &[usize] {
        &self.backward
    }

    /// `self` maps A -> B, `next` maps B -> C; result maps A -> C.
    pub fn then(&self, next: &VertexRenaming) -> VertexRenaming {
        assert_eq!(self.new_len(), next.old_len());
        VertexRenaming {
            forward: self
                .forward
                .iter()
                .map(|f| f.and_then(|b| next.forward(b)))
                .collect(),
            backward: next.backward.iter().map(|&b| self.backward[b]).collect(),
        }
    }
}

/// Subgraph induced by the vertices marked in `keep`, renamed to `0..k` in
/// ascending order.
pub fn induced_subgraph(g: &ColoredGraph, keep: &[bool]) -> (ColoredGraph, VertexRenaming) {
    assert_eq!(keep.len(), g.n());
    let renaming = VertexRenaming::from_keep(keep);
    let adj = renaming
        .backward
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|&u| renaming.forward(u))
                .collect()
        })
        .collect();
    let colors: Vec<usize> = renaming.backward.iter().map(|&v| g.color(v)).collect();
    (
        ColoredGraph::from_sorted_lists(adj, compact_colors(&colors).0),
        renaming,
    )
}

/// Like [`induced_subgraph`] but keeps the color ids of `g` verbatim, so the
/// result may have gaps in its color range. Used internally where colors are
/// replaced right away.
pub(crate) fn induced_with_extra_edges(
    g: &ColoredGraph,
    keep: &[bool],
    extra: &[(usize, usize)],
) -> (Vec<Vec<usize>>, VertexRenaming) {
    let renaming = VertexRenaming::from_keep(keep);
    let mut adj: Vec<Vec<usize>> = renaming
        .backward
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter_map(|&u| renaming.forward(u))
                .collect()
        })
        .collect();
    if !extra.is_empty() {
        for &(u, v) in extra {
            let (a, b) = (renaming.forward(u).unwrap(), renaming.forward(v).unwrap());
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
    }
    (adj, renaming)
}

fn check_bijection(n: usize, perm: &[usize]) -> Result<(), GraphError> {
    if perm.len() != n {
        return Err(GraphError::NotBijective(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(GraphError::NotBijective(n));
        }
    }
    Ok(())
}

/// Relabels every vertex `v` to `perm[v]`; colors travel with the vertices.
pub fn apply_permutation(g: &ColoredGraph, perm: &[usize]) -> Result<ColoredGraph, GraphError> {
    let n = g.n();
    check_bijection(n, perm)?;
    let mut adj = vec![Vec::new(); n];
    let mut colors = vec![0; n];
    for v in 0..n {
        colors[perm[v]] = g.color(v);
        let mut list: Vec<usize> = g.neighbors(v).iter().map(|&u| perm[u]).collect();
        list.sort_unstable();
        adj[perm[v]] = list;
    }
    Ok(ColoredGraph::from_sorted_lists(adj, colors))
}

/// True iff `perm` is a color- and edge-preserving bijection.
pub fn is_automorphism(g: &ColoredGraph, perm: &[usize]) -> bool {
    if check_bijection(g.n(), perm).is_err() {
        return false;
    }
    for v in 0..g.n() {
        let w = perm[v];
        if g.color(v) != g.color(w) || g.degree(v) != g.degree(w) {
            return false;
        }
        if !g.neighbors(v).iter().all(|&u| g.has_edge(w, perm[u])) {
            return false;
        }
    }
    true
}
