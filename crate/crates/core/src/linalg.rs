//! Sparse exact Gaussian elimination over ℚ.
//!
//! Vectors are `BTreeMap`s from an ordered key type to nonzero rationals, so
//! polynomials can be fed in directly keyed by their monomials. The pivot of
//! a vector is its smallest key.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseVec<K> = BTreeMap<K, Q>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Q, x: &SparseVec<K>) {
    for (k, c) in x {
        let t = a * c;
        match y.get_mut(k) {
            Some(v) => {
                *v += t;
                if v.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    y.insert(k.clone(), t);
                }
            }
        }
    }
}

/// Incrementally built row-echelon basis. Optionally tracks, for every stored
/// row, its expression in terms of the inserted vectors (numbered in
/// insertion order), which yields kernels and particular solutions.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, (SparseVec<K>, SparseVec<usize>)>,
    inserted: usize,
    track: bool,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), inserted: 0, track: false }
    }

    pub fn tracking() -> Self {
        Echelon { rows: BTreeMap::new(), inserted: 0, track: true }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduce `v` against the stored rows: returns the remainder (no key of
    /// which is a pivot) and the combination of inserted vectors that was
    /// subtracted.
    pub fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, SparseVec<usize>) {
        use std::ops::Bound::{Excluded, Unbounded};
        let mut w = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => w.keys().next().cloned(),
                Some(c) => w.range((Excluded(c.clone()), Unbounded)).map(|(k, _)| k.clone()).next(),
            };
            let Some(k) = next else { break };
            match self.rows.get(&k) {
                // a stored row only touches keys at or above its pivot
                Some((row, rc)) => {
                    let c = w[&k].clone();
                    axpy(&mut w, &-c.clone(), row);
                    if self.track {
                        axpy(&mut combo, &c, rc);
                    }
                }
                None => cursor = Some(k),
            }
        }
        (w, combo)
    }

    /// Insert a vector. Returns `None` if it was independent of the stored
    /// rows, otherwise the linear relation it satisfies (coefficients on the
    /// inserted vectors, including `1` on itself) when tracking is on.
    pub fn insert(&mut self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let idx = self.inserted;
        self.inserted += 1;
        let (w, combo) = self.reduce(v);
        let mut own = SparseVec::new();
        if self.track {
            own.insert(idx, Q::one());
            axpy(&mut own, &-Q::one(), &combo);
        }
        match w.iter().next() {
            None => Some(own),
            Some((p, c)) => {
                let inv = c.recip();
                let p = p.clone();
                let row: SparseVec<K> = w.iter().map(|(k, x)| (k.clone(), x * &inv)).collect();
                let rc: SparseVec<usize> = own.iter().map(|(k, x)| (*k, x * &inv)).collect();
                self.rows.insert(p, (row, rc));
                None
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Express `v` as a combination of the inserted vectors, if possible.
    pub fn express(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        assert!(self.track, "express needs a tracking echelon");
        let (w, combo) = self.reduce(v);
        w.is_empty().then_some(combo)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }
}

pub fn rank<K: Ord + Clone>(vecs: &[SparseVec<K>]) -> usize {
    let mut e = Echelon::new();
    for v in vecs {
        e.insert(v);
    }
    e.rank()
}

/// Basis of the relations `Σ x_j cols[j] = 0`.
pub fn kernel<K: Ord + Clone>(cols: &[SparseVec<K>]) -> Vec<SparseVec<usize>> {
    let mut e = Echelon::tracking();
    cols.iter().filter_map(|c| e.insert(c)).collect()
}

/// One solution of `Σ x_j cols[j] = b`, if any.
pub fn solve<K: Ord + Clone>(cols: &[SparseVec<K>], b: &SparseVec<K>) -> Option<SparseVec<usize>> {
    let mut e = Echelon::tracking();
    for c in cols {
        e.insert(c);
    }
    e.express(b)
}

/// Dimension of `span(a) ∩ span(b)`.
pub fn intersection_dim<K: Ord + Clone>(a: &[SparseVec<K>], b: &[SparseVec<K>]) -> usize {
    let ra = rank(a);
    let rb = rank(b);
    let all: Vec<SparseVec<K>> = a.iter().chain(b).cloned().collect();
    ra + rb - rank(&all)
}

/// `Σ x_j cols[j]`.
pub fn combine<K: Ord + Clone>(cols: &[SparseVec<K>], x: &SparseVec<usize>) -> SparseVec<K> {
    let mut out = SparseVec::new();
    for (j, c) in x {
        axpy(&mut out, c, &cols[*j]);
    }
    out
}
