//! Representation strings and lifting of reduced-graph automorphisms.
//!
//! Every remaining vertex carries the string of original vertices it stands
//! for, itself first. A reduced automorphism moving `v` to `w` lifts by
//! mapping the two strings onto each other position by position. Paths
//! removed by the obfuscated edge flip depend on two endpoints, so they live
//! in side records keyed by the endpoint pair and are routed by the images
//! of both endpoints.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::VertexRenaming;
use crate::perm::SparseAutomorphism;
use crate::work;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("representation strings of {0} and {1} differ in length")]
    StringMismatch(usize, usize),
    #[error("no path record for endpoint pair ({0}, {1})")]
    MissingFlipRecord(usize, usize),
    #[error("lifted map is not a permutation")]
    NotBijective,
    #[error("vertex {0} is not in the reduced graph")]
    OutOfRange(usize),
}

/// A removed path between two remaining (at removal time) vertices `a < b`,
/// listed from `a`'s side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipRecord {
    pub a: usize,
    pub b: usize,
    pub path: Vec<usize>,
}

/// Canonical representation mapping from an input graph to a reduced graph.
///
/// Used both for one reduction stage (input ids = that stage's graph) and
/// for the flattened map over original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationMap {
    strings: Vec<Vec<usize>>,
    renaming: VertexRenaming,
    fixed: Vec<usize>,
    flips: Vec<FlipRecord>,
    flip_key: HashMap<(usize, usize), usize>,
    flip_index: HashMap<usize, Vec<usize>>,
}

impl RepresentationMap {
    pub fn identity(n: usize) -> Self {
        RepresentationMap {
            strings: (0..n).map(|v| vec![v]).collect(),
            renaming: VertexRenaming::identity(n),
            fixed: Vec::new(),
            flips: Vec::new(),
            flip_key: HashMap::new(),
            flip_index: HashMap::new(),
        }
    }

    /// One reduction stage over an input graph on `keep.len()` vertices.
    ///
    /// `strings` gives the full string (self first) of kept vertices that
    /// absorbed others; unlisted kept vertices represent only themselves.
    /// Removed vertices that appear neither in a string nor in a flip path
    /// are recorded as fixed.
    pub fn stage(
        keep: &[bool],
        strings: &HashMap<usize, Vec<usize>>,
        flips: Vec<FlipRecord>,
    ) -> Self {
        let renaming = VertexRenaming::from_keep(keep);
        let mut represented = vec![false; keep.len()];
        let out: Vec<Vec<usize>> = renaming
            .backward_slice()
            .iter()
            .map(|&v| {
                let s = strings.get(&v).cloned().unwrap_or_else(|| vec![v]);
                debug_assert_eq!(s[0], v);
                for &u in &s {
                    represented[u] = true;
                }
                s
            })
            .collect();
        for f in &flips {
            for &u in &f.path {
                represented[u] = true;
            }
        }
        let fixed = (0..keep.len()).filter(|&v| !represented[v]).collect();
        let mut map = RepresentationMap {
            strings: out,
            renaming,
            fixed,
            flips: Vec::new(),
            flip_key: HashMap::new(),
            flip_index: HashMap::new(),
        };
        for f in flips {
            map.push_flip(f);
        }
        map
    }

    fn push_flip(&mut self, f: FlipRecord) {
        debug_assert!(f.a < f.b);
        let id = self.flips.len();
        self.flip_key.insert((f.a, f.b), id);
        self.flip_index.entry(f.a).or_default().push(id);
        self.flip_index.entry(f.b).or_default().push(id);
        self.flips.push(f);
    }

    /// Number of vertices of the input graph.
    pub fn input_len(&self) -> usize {
        self.renaming.old_len()
    }

    /// Number of vertices of the reduced graph.
    pub fn reduced_len(&self) -> usize {
        self.strings.len()
    }

    /// String of a reduced vertex, over input ids.
    pub fn string(&self, v: usize) -> &[usize] {
        &self.strings[v]
    }

    pub fn renaming(&self) -> &VertexRenaming {
        &self.renaming
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn flip_records(&self) -> &[FlipRecord] {
        &self.flips
    }

    /// Composes a later stage onto this map: strings of strings become
    /// concatenations, and the stage's flip records and fixed vertices are
    /// rewritten over this map's input ids.
    pub fn absorb(&mut self, stage: RepresentationMap) {
        assert_eq!(stage.input_len(), self.reduced_len());
        let mut old = std::mem::take(&mut self.strings);
        for &u in &stage.fixed {
            self.fixed.append(&mut old[u]);
        }
        let mut strings = Vec::with_capacity(stage.strings.len());
        for s in &stage.strings {
            let mut out = std::mem::take(&mut old[s[0]]);
            for &u in &s[1..] {
                out.append(&mut old[u]);
            }
            strings.push(out);
        }
        let base = |v: usize| self.renaming.backward(v);
        let lifted: Vec<FlipRecord> = stage
            .flips
            .into_iter()
            .map(|f| {
                let mut path = Vec::new();
                for &u in &f.path {
                    path.append(&mut old[u]);
                }
                FlipRecord {
                    a: base(f.a),
                    b: base(f.b),
                    path,
                }
            })
            .collect();
        for f in lifted {
            self.push_flip(f);
        }
        self.strings = strings;
        self.renaming = self.renaming.then(&stage.renaming);
    }

    /// Lifts an automorphism of the reduced graph to the input graph.
    pub fn lift(&self, phi: &SparseAutomorphism) -> Result<SparseAutomorphism, LiftError> {
        let mut seed = Vec::new();
        for &(v, w) in phi.pairs() {
            if v >= self.reduced_len() || w >= self.reduced_len() {
                return Err(LiftError::OutOfRange(v.max(w)));
            }
            let (sv, sw) = (&self.strings[v], &self.strings[w]);
            if sv.len() != sw.len() {
                return Err(LiftError::StringMismatch(v, w));
            }
            work::charge(2 * sv.len());
            seed.extend(sv.iter().copied().zip(sw.iter().copied()));
        }
        self.route_flips(seed)
    }

    /// Lifts a permutation of reduced vertices whose strings are given by
    /// `local` (entries are reduced vertices of this map). Used to emit
    /// kernel generators while a reduction is still pending.
    pub(crate) fn lift_with_local_strings<'a>(
        &self,
        pairs: &[(usize, usize)],
        local: impl Fn(usize) -> std::borrow::Cow<'a, [usize]>,
    ) -> Result<SparseAutomorphism, LiftError> {
        let mut seed = Vec::new();
        for &(v, w) in pairs {
            let (lv, lw) = (local(v), local(w));
            if lv.len() != lw.len() {
                return Err(LiftError::StringMismatch(v, w));
            }
            for (&x, &y) in lv.iter().zip(lw.iter()) {
                let (sx, sy) = (&self.strings[x], &self.strings[y]);
                if sx.len() != sy.len() {
                    return Err(LiftError::StringMismatch(x, y));
                }
                work::charge(2 * sx.len());
                seed.extend(sx.iter().copied().zip(sy.iter().copied()));
            }
        }
        self.route_flips(seed)
    }

    fn route_flips(&self, seed: Vec<(usize, usize)>) -> Result<SparseAutomorphism, LiftError> {
        if self.flips.is_empty() {
            return SparseAutomorphism::from_pairs(seed).ok_or(LiftError::NotBijective);
        }
        let mut image: HashMap<usize, usize> = HashMap::with_capacity(seed.len());
        let mut pending: BTreeSet<usize> = BTreeSet::new();
        for &(x, y) in &seed {
            image.insert(x, y);
            self.queue_records(x, &mut pending);
        }
        let mut pairs = seed;
        // later records may only have endpoints that were present when they
        // were created, so walking records newest-first settles endpoints
        // before the paths hanging off them
        while let Some(r) = pending.pop_last() {
            let rec = &self.flips[r];
            let ia = *image.get(&rec.a).unwrap_or(&rec.a);
            let ib = *image.get(&rec.b).unwrap_or(&rec.b);
            if ia == rec.a && ib == rec.b {
                continue;
            }
            let key = (ia.min(ib), ia.max(ib));
            let t = *self
                .flip_key
                .get(&key)
                .ok_or(LiftError::MissingFlipRecord(ia, ib))?;
            let target = &self.flips[t];
            if target.path.len() != rec.path.len() {
                return Err(LiftError::StringMismatch(rec.a, ia));
            }
            let forward = target.a == ia;
            let len = rec.path.len();
            work::charge(2 * len);
            for i in 0..len {
                let p = rec.path[i];
                let q = if forward {
                    target.path[i]
                } else {
                    target.path[len - 1 - i]
                };
                if p != q && image.insert(p, q).is_none() {
                    pairs.push((p, q));
                    self.queue_records(p, &mut pending);
                }
            }
        }
        SparseAutomorphism::from_pairs(pairs).ok_or(LiftError::NotBijective)
    }

    fn queue_records(&self, x: usize, pending: &mut BTreeSet<usize>) {
        work::charge(1);
        if let Some(ids) = self.flip_index.get(&x) {
            pending.extend(ids.iter().copied());
        }
    }

    /// Checks the three representation-map properties: remaining vertices
    /// come first in their own string, removed vertices own no string, and
    /// every input vertex is represented at most once across strings, flip
    /// paths and the fixed list.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.input_len();
        let mut seen = vec![false; n];
        let mut mark = |v: usize, what: &str| {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                Err(format!("vertex {v} represented twice ({what})"))
            } else {
                Ok(())
            }
        };
        for (v, s) in self.strings.iter().enumerate() {
            if s.first() != Some(&self.renaming.backward(v)) {
                return Err(format!("string of {v} does not start with itself"));
            }
            for &u in s {
                mark(u, "string")?;
            }
        }
        for f in &self.flips {
            for &u in &f.path {
                mark(u, "flip path")?;
            }
        }
        for &u in &self.fixed {
            mark(u, "fixed")?;
        }
        Ok(())
    }
}

/// Flattens per-stage maps into one map over the first stage's input ids.
pub fn flatten_chain(stages: &[RepresentationMap]) -> Option<RepresentationMap> {
    let first = stages.first()?;
    let mut flat = RepresentationMap::identity(first.input_len());
    for s in stages {
        flat.absorb(s.clone());
    }
    Some(flat)
}

/// Lifts through the chain one stage at a time, last stage first.
pub fn lift_through_chain(
    stages: &[RepresentationMap],
    phi: &SparseAutomorphism,
) -> Result<SparseAutomorphism, LiftError> {
    stages
        .iter()
        .rev()
        .try_fold(phi.clone(), |acc, stage| stage.lift(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keep(n: usize, removed: &[usize]) -> Vec<bool> {
        (0..n).map(|v| !removed.contains(&v)).collect()
    }

    #[test]
    fn identity_lift() {
        // P3 with endpoints hung on the middle vertex
        let strings = HashMap::from([(1, vec![1, 0, 2])]);
        let stage = RepresentationMap::stage(&keep(3, &[0, 2]), &strings, vec![]);
        assert_eq!(stage.reduced_len(), 1);
        assert!(stage.lift(&SparseAutomorphism::identity()).unwrap().is_identity());
        stage.validate().unwrap();
    }

    #[test]
    fn positionwise_lift() {
        // P4 with degree-1 removal: R(1) = [1, 0], R(2) = [2, 3]
        let strings = HashMap::from([(1, vec![1, 0]), (2, vec![2, 3])]);
        let stage = RepresentationMap::stage(&keep(4, &[0, 3]), &strings, vec![]);
        let swap = SparseAutomorphism::transposition(0, 1);
        let lifted = stage.lift(&swap).unwrap();
        assert_eq!(lifted, SparseAutomorphism::from_cycles(&[&[0, 3], &[1, 2]]));
    }

    #[test]
    fn mismatched_strings_are_rejected() {
        let strings = HashMap::from([(1, vec![1, 0])]);
        let stage = RepresentationMap::stage(&keep(3, &[0]), &strings, vec![]);
        assert_eq!(
            stage.lift(&SparseAutomorphism::transposition(0, 1)),
            Err(LiftError::StringMismatch(0, 1))
        );
    }

    #[test]
    fn chain_equals_flattened() {
        // P4: degree-1 stage then singleton-style stage keeping only vertex 0
        let s1 = RepresentationMap::stage(
            &keep(4, &[0, 3]),
            &HashMap::from([(1, vec![1, 0]), (2, vec![2, 3])]),
            vec![],
        );
        let flat1 = flatten_chain(std::slice::from_ref(&s1)).unwrap();
        assert_eq!(flat1.string(0), &[1, 0]);
        assert_eq!(flat1.string(1), &[2, 3]);
        let phi = SparseAutomorphism::transposition(0, 1);
        assert_eq!(
            lift_through_chain(std::slice::from_ref(&s1), &phi).unwrap(),
            flat1.lift(&phi).unwrap()
        );
    }

    #[test]
    fn flip_records_route_by_both_endpoints() {
        // K_{2,2} of subdivided paths: X = {0,1}, Y = {2,3}, path (x,y) via one vertex
        // vertices 4:(0,2) 5:(0,3) 6:(1,2) 7:(1,3)
        let flips = vec![
            FlipRecord { a: 0, b: 2, path: vec![4] },
            FlipRecord { a: 0, b: 3, path: vec![5] },
            FlipRecord { a: 1, b: 2, path: vec![6] },
            FlipRecord { a: 1, b: 3, path: vec![7] },
        ];
        let stage = RepresentationMap::stage(&keep(8, &[4, 5, 6, 7]), &HashMap::new(), flips);
        stage.validate().unwrap();
        let swap_x = SparseAutomorphism::transposition(0, 1);
        let lifted = stage.lift(&swap_x).unwrap();
        assert_eq!(
            lifted,
            SparseAutomorphism::from_cycles(&[&[0, 1], &[4, 6], &[5, 7]])
        );
        let swap_y = SparseAutomorphism::transposition(2, 3);
        assert_eq!(
            stage.lift(&swap_y).unwrap(),
            SparseAutomorphism::from_cycles(&[&[2, 3], &[4, 5], &[6, 7]])
        );
    }

    #[test]
    fn absorbed_flip_paths_expand_strings() {
        let s1 = RepresentationMap::stage(
            &keep(5, &[4]),
            &HashMap::from([(3, vec![3, 4])]),
            vec![],
        );
        // stage 2 removes vertex 3 (which carries 4) as the path between 0 and 2
        let s2 = RepresentationMap::stage(
            &keep(4, &[3]),
            &HashMap::new(),
            vec![FlipRecord { a: 0, b: 2, path: vec![3] }],
        );
        let flat = flatten_chain(&[s1, s2]).unwrap();
        assert_eq!(flat.flip_records()[0].path, vec![3, 4]);
        flat.validate().unwrap();
    }
}
