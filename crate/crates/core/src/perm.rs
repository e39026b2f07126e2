//! Permutations stored by their support.

use std::collections::HashMap;
use std::fmt;

use crate::graph::ColoredGraph;
use crate::work;

/// A permutation that lists only moved points, as `(point, image)` pairs in
/// ascending point order. Space is proportional to the support.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseAutomorphism {
    pairs: Vec<(usize, usize)>,
}

impl SparseAutomorphism {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds from arbitrary `(point, image)` pairs; fixed pairs are dropped.
    /// Returns `None` unless the pairs describe a bijection of their points.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Option<Self> {
        pairs.retain(|(a, b)| a != b);
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        let mut images: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        images.sort_unstable();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        if !images.iter().zip(&pairs).all(|(i, p)| *i == p.0) {
            return None;
        }
        Some(SparseAutomorphism { pairs })
    }

    pub fn transposition(a: usize, b: usize) -> Self {
        Self::from_pairs(vec![(a, b), (b, a)]).unwrap()
    }

    /// Product of disjoint cycles.
    pub fn from_cycles(cycles: &[&[usize]]) -> Self {
        let mut pairs = Vec::new();
        for c in cycles {
            for i in 0..c.len() {
                pairs.push((c[i], c[(i + 1) % c.len()]));
            }
        }
        Self::from_pairs(pairs).expect("cycles must be disjoint")
    }

    pub fn from_full(perm: &[usize]) -> Self {
        SparseAutomorphism {
            pairs: perm
                .iter()
                .enumerate()
                .filter(|(a, b)| a != *b)
                .map(|(a, &b)| (a, b))
                .collect(),
        }
    }

    pub fn to_full(&self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for &(a, b) in &self.pairs {
            p[a] = b;
        }
        p
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Largest moved point, if any.
    pub fn max_point(&self) -> Option<usize> {
        self.pairs.last().map(|p| p.0)
    }

    pub fn apply(&self, v: usize) -> usize {
        match self.pairs.binary_search_by_key(&v, |p| p.0) {
            Ok(i) => self.pairs[i].1,
            Err(_) => v,
        }
    }

    pub fn inverse(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        SparseAutomorphism { pairs }
    }

    /// Disjoint cycles, each starting at its minimum, ordered by minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let map: HashMap<usize, usize> = self.pairs.iter().copied().collect();
        let mut done = std::collections::HashSet::new();
        let mut out = Vec::new();
        for &(start, _) in &self.pairs {
            if done.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            done.insert(start);
            let mut x = map[&start];
            while x != start {
                done.insert(x);
                cycle.push(x);
                x = map[&x];
            }
            out.push(cycle);
        }
        out
    }

    /// Maps every point through `f` (e.g. a renaming); `f` must be injective
    /// on the support.
    pub fn rename(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_pairs(self.pairs.iter().map(|&(a, b)| (f(a), f(b))).collect())
            .expect("renaming must be injective")
    }

    /// Checks that this map preserves colors and edges of `g`, looking only
    /// at the support and its neighborhood.
    pub fn is_automorphism_of(&self, g: &ColoredGraph) -> bool {
        if self.max_point().is_some_and(|p| p >= g.n()) {
            return false;
        }
        let mut marks = Marks::new(g.n());
        check_sparse(g, &self.pairs, |v| self.apply(v), &mut marks)
    }
}

/// Generation-stamped marker array; clearing is O(1).
pub(crate) struct Marks {
    stamp: Vec<u32>,
    current: u32,
}

impl Marks {
    pub(crate) fn new(n: usize) -> Self {
        Marks {
            stamp: vec![0; n],
            current: 1,
        }
    }

    pub(crate) fn clear(&mut self) {
        self.current += 1;
        if self.current == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
    }

    #[inline]
    pub(crate) fn set(&mut self, v: usize) {
        self.stamp[v] = self.current;
    }

    #[inline]
    pub(crate) fn get(&self, v: usize) -> bool {
        self.stamp[v] == self.current
    }
}

/// Support-local automorphism check. Charges one work unit per adjacency
/// entry touched, i.e. `O(sum over the support of 1 + deg)`.
pub(crate) fn check_sparse(
    g: &ColoredGraph,
    pairs: &[(usize, usize)],
    image: impl Fn(usize) -> usize,
    marks: &mut Marks,
) -> bool {
    for &(v, w) in pairs {
        work::charge(1);
        if g.color(v) != g.color(w) || g.degree(v) != g.degree(w) {
            return false;
        }
        marks.clear();
        work::charge(g.degree(w));
        for &u in g.neighbors(w) {
            marks.set(u);
        }
        work::charge(g.degree(v));
        if !g.neighbors(v).iter().all(|&u| marks.get(image(u))) {
            return false;
        }
    }
    true
}

/// `first ∘ second`, i.e. `x -> first(second(x))`.
///
/// Touches only the supports: building the lookup for `first` costs
/// `|supp first|`, and each candidate point costs two lookups.
pub fn compose(first: &SparseAutomorphism, second: &SparseAutomorphism) -> SparseAutomorphism {
    let lookup: HashMap<usize, usize> = first.pairs.iter().copied().collect();
    work::charge(first.pairs.len());
    let mut pairs = Vec::with_capacity(first.pairs.len() + second.pairs.len());
    let (a, b) = (&first.pairs, &second.pairs);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        // merge the two sorted supports
        let x = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) if p.0 == q.0 => {
                i += 1;
                j += 1;
                p.0
            }
            (Some(p), Some(q)) if p.0 < q.0 => {
                i += 1;
                p.0
            }
            (Some(_), Some(q)) => {
                j += 1;
                q.0
            }
            (Some(p), None) => {
                i += 1;
                p.0
            }
            (None, Some(q)) => {
                j += 1;
                q.0
            }
            (None, None) => unreachable!(),
        };
        let mid = second.apply_hinted(x, j);
        let img = *lookup.get(&mid).unwrap_or(&mid);
        work::charge(2);
        if img != x {
            pairs.push((x, img));
        }
    }
    SparseAutomorphism { pairs }
}

impl SparseAutomorphism {
    // `j` is the merge cursor just past `x` when `x` is in this support.
    #[inline]
    fn apply_hinted(&self, x: usize, j: usize) -> usize {
        match j.checked_sub(1).and_then(|k| self.pairs.get(k)) {
            Some(&(p, img)) if p == x => img,
            _ => x,
        }
    }
}

impl fmt::Debug for SparseAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
