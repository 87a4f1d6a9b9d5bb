//! Čech cohomology on the chart cover, one torus weight at a time.
//!
//! Every chart carries torus weights for its generators and transitions are
//! equivariant, so the alternating Čech complex splits into finite
//! weight slices. A line-bundle twist shifts chart `i` by `t_i`, where
//! `wt(g_ij) = t_i − t_j`; cochains on a simplex are written in the
//! coordinates and frame of its first vertex.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::DimTable;
use crate::atlas::{Atlas, GlobalField};
use crate::error::{Error, Result};
use crate::homological::odd_subsets;
use crate::linalg::{self, SparseVec};
use crate::linebundle::LineCocycle;
use crate::rational::Q;
use crate::superalgebra::{Monomial, OddSet, Parity, Ring, RingHom, SuperPoly};

#[derive(Clone, Copy, Debug)]
pub enum SheafKind<'a> {
    Structure,
    Twisted(&'a LineCocycle),
    /// `ker(v)`: the structure sheaf of the quotient, computed upstairs.
    Invariant(&'a GlobalField),
}

/// Weights `w` with `max_c |w_c| ≤ radius` enter the computation; stability is
/// judged against `radius + 1`. With `top` set, only `H^q` for `q ≤ top` is
/// computed, which needs cochains up to degree `top + 1` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CechWindow {
    pub radius: i64,
    pub top: Option<usize>,
}

impl Default for CechWindow {
    fn default() -> Self {
        CechWindow { radius: 6, top: None }
    }
}

impl CechWindow {
    pub fn radius(radius: i64) -> Self {
        CechWindow { radius, top: None }
    }

    pub fn up_to(self, q: usize) -> Self {
        CechWindow { top: Some(q), ..self }
    }
}

struct WeightSolver {
    even: Vec<Vec<i64>>,
    odd: Vec<Vec<i64>>,
    rows: Vec<usize>,
    inv: Vec<Vec<Q>>,
}

impl WeightSolver {
    fn new(weights: &[Vec<i64>], n_even: usize, dim: usize) -> Result<Self> {
        let even = weights[..n_even].to_vec();
        let odd = weights[n_even..].to_vec();
        // greedy choice of rows of W (dim × n_even) forming an invertible block
        let mut rows = Vec::new();
        let mut basis: Vec<Vec<Q>> = Vec::new();
        for c in 0..dim {
            let row: Vec<Q> = (0..n_even).map(|g| Q::from_integer(even[g][c].into())).collect();
            let mut trial = basis.clone();
            trial.push(row.clone());
            if rank_dense(&trial) == trial.len() {
                basis = trial;
                rows.push(c);
            }
            if rows.len() == n_even {
                break;
            }
        }
        if rows.len() != n_even {
            return Err(Error::Unsupported("chart weights do not determine exponents".into()));
        }
        let inv = invert_dense(&basis).expect("independent rows");
        Ok(WeightSolver { even, odd, rows, inv })
    }

    fn monomials(&self, ring: &Ring, target: &[i64]) -> Vec<Monomial> {
        let n_even = self.even.len();
        let cutoff = ring.nil_cutoff().unwrap_or(usize::MAX);
        let mut out = Vec::new();
        let subsets = odd_subsets(ring.n_odd(), Parity::Even).into_iter().chain(odd_subsets(ring.n_odd(), Parity::Odd));
        'subsets: for s in subsets {
            if s.len() as usize >= cutoff {
                continue;
            }
            let mut b = target.to_vec();
            for k in s.indices() {
                for (bc, w) in b.iter_mut().zip(&self.odd[k]) {
                    *bc -= w;
                }
            }
            let mut e = vec![0i32; n_even];
            for g in 0..n_even {
                let mut acc = Q::zero();
                for (r, &row) in self.rows.iter().enumerate() {
                    acc += &self.inv[g][r] * Q::from_integer(b[row].into());
                }
                if !acc.is_integer() {
                    continue 'subsets;
                }
                let v: i64 = acc.to_integer().try_into().unwrap_or(i64::MAX);
                if v < 0 && !ring.is_invertible(g) {
                    continue 'subsets;
                }
                e[g] = v as i32;
            }
            for (c, &bc) in b.iter().enumerate() {
                if (0..n_even).map(|g| self.even[g][c] * e[g] as i64).sum::<i64>() != bc {
                    continue 'subsets;
                }
            }
            out.push(Monomial { even: e, odd: s });
        }
        out
    }

    /// Every label `W e + wt(S) + shift` inside the box of radius `r`, for
    /// integer exponents `e` of any sign.
    fn labels_in_box(&self, n_odd: usize, cutoff: usize, shift: &[i64], r: i64, out: &mut BTreeSet<Vec<i64>>) {
        let dim = shift.len();
        let reach = r + shift.iter().map(|t| t.abs()).max().unwrap_or(0) + self.odd.iter().flatten().map(|w| w.abs()).sum::<i64>();
        let bounds: Vec<i64> = self
            .inv
            .iter()
            .map(|row| {
                let s: Q = row.iter().map(|c| c.abs()).sum::<Q>() * Q::from_integer(reach.into());
                s.ceil().to_integer().try_into().unwrap_or(i64::MAX)
            })
            .collect();
        let mut base = Vec::new();
        for s in (0..1u64 << n_odd).map(OddSet).filter(|s| (s.len() as usize) < cutoff) {
            let mut w = shift.to_vec();
            for k in s.indices() {
                for (wc, x) in w.iter_mut().zip(&self.odd[k]) {
                    *wc += x;
                }
            }
            base.push(w);
        }
        let mut e: Vec<i64> = bounds.iter().map(|b| -b).collect();
        loop {
            let mut w = vec![0i64; dim];
            for (g, &eg) in e.iter().enumerate() {
                for (wc, x) in w.iter_mut().zip(&self.even[g]) {
                    *wc += x * eg;
                }
            }
            for b in &base {
                let l: Vec<i64> = w.iter().zip(b).map(|(a, c)| a + c).collect();
                if l.iter().all(|c| c.abs() <= r) {
                    out.insert(l);
                }
            }
            let mut g = 0;
            loop {
                if g == e.len() {
                    return;
                }
                if e[g] < bounds[g] {
                    e[g] += 1;
                    break;
                }
                e[g] = -bounds[g];
                g += 1;
            }
        }
    }

    fn weight(&self, m: &Monomial) -> Vec<i64> {
        let d = self.even.first().or(self.odd.first()).map_or(0, |w| w.len());
        let mut w = vec![0; d];
        for (g, &e) in m.even.iter().enumerate() {
            for (wc, x) in w.iter_mut().zip(&self.even[g]) {
                *wc += x * e as i64;
            }
        }
        for k in m.odd.indices() {
            for (wc, x) in w.iter_mut().zip(&self.odd[k]) {
                *wc += x;
            }
        }
        w
    }

    fn homogeneous_weight(&self, p: &SuperPoly) -> Result<Option<Vec<i64>>> {
        let mut ws = p.terms().keys().map(|m| self.weight(m));
        let Some(first) = ws.next() else { return Ok(None) };
        if ws.any(|w| w != first) {
            return Err(Error::Unsupported(format!("{p} is not weight-homogeneous")));
        }
        Ok(Some(first))
    }
}

fn rank_dense(rows: &[Vec<Q>]) -> usize {
    let vecs: Vec<SparseVec<usize>> =
        rows.iter().map(|r| r.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, c.clone())).collect()).collect();
    linalg::rank(&vecs)
}

fn invert_dense(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

struct Cell {
    vertices: Vec<usize>,
    ring: Ring,
}

/// One coface map from cell `from` to cell `to`: sign, and for the face that
/// drops the first vertex the transition and twist into the new chart.
struct Coface {
    from: usize,
    to: usize,
    sign: bool,
    transport: Option<(RingHom, SuperPoly)>,
}

type Key = (usize, Monomial);

struct Complex<'a> {
    sheaf: SheafKind<'a>,
    solvers: Vec<WeightSolver>,
    shifts: Vec<Vec<i64>>,
    cells: Vec<Vec<Cell>>,
    cofaces: Vec<Vec<Coface>>,
}

impl<'a> Complex<'a> {
    fn build(x: &'a Atlas, sheaf: SheafKind<'a>) -> Result<Self> {
        let n = x.n_charts();
        let dim = x
            .chart(0)
            .weights
            .as_ref()
            .and_then(|w| w.first().map(|v| v.len()))
            .ok_or_else(|| Error::Unsupported("Čech slicing needs chart weights".into()))?;
        let solvers = x
            .charts()
            .iter()
            .map(|c| {
                let w = c.weights.as_ref().ok_or_else(|| Error::Unsupported(format!("chart {} has no weights", c.label)))?;
                if w.len() != c.ring.n_gens() || w.iter().any(|v| v.len() != dim) {
                    return Err(Error::Dimension(format!("chart {} has malformed weights", c.label)));
                }
                WeightSolver::new(w, c.ring.n_even(), dim)
            })
            .collect::<Result<Vec<_>>>()?;
        let shifts = match sheaf {
            SheafKind::Twisted(l) => twist_shifts(x, l, &solvers, dim)?,
            _ => vec![vec![0; dim]; n],
        };
        if let SheafKind::Invariant(v) = sheaf {
            for (i, c) in x.charts().iter().enumerate() {
                for (k, g) in c.ring.gens().enumerate() {
                    let img = v.fields[i].image(g);
                    let wg = c.weights.as_ref().expect("weights")[k].clone();
                    if let Some(w) = solvers[i].homogeneous_weight(img)? {
                        if w != wg {
                            return Err(Error::Unsupported("field does not preserve torus weights".into()));
                        }
                    }
                }
            }
        }
        let mut cells: Vec<Vec<Cell>> = Vec::new();
        let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        while !level.is_empty() {
            let row: Vec<Cell> = level
                .iter()
                .filter_map(|vs| x.multi_overlap_ring(vs[0], &vs[1..]).map(|ring| Cell { vertices: vs.clone(), ring }))
                .collect();
            let next: Vec<Vec<usize>> = row
                .iter()
                .flat_map(|c| {
                    let last = *c.vertices.last().expect("nonempty");
                    let vs = c.vertices.clone();
                    ((last + 1)..n)
                        .filter(move |&b| vs.iter().all(|&a| x.overlap(a, b).is_some() && x.overlap(b, a).is_some()))
                        .map({
                            let vs = c.vertices.clone();
                            move |b| {
                                let mut w = vs.clone();
                                w.push(b);
                                w
                            }
                        })
                })
                .collect();
            cells.push(row);
            level = next;
        }
        let mut cofaces = Vec::new();
        for q in 0..cells.len().saturating_sub(1) {
            let index: BTreeMap<&[usize], usize> =
                cells[q].iter().enumerate().map(|(k, c)| (c.vertices.as_slice(), k)).collect();
            let mut row = Vec::new();
            for (to, sigma) in cells[q + 1].iter().enumerate() {
                for k in 0..sigma.vertices.len() {
                    let mut face = sigma.vertices.clone();
                    face.remove(k);
                    let Some(&from) = index.get(face.as_slice()) else { continue };
                    let transport = if k == 0 {
                        let (b, a0) = (sigma.vertices[0], face[0]);
                        let phi = x.transition_into(b, a0, &sigma.ring)?;
                        let factor = match sheaf {
                            SheafKind::Twisted(l) => l
                                .get(b, a0)
                                .ok_or_else(|| Error::Gluing(format!("twist lacks ({b},{a0})")))?
                                .in_ring(&sigma.ring)?
                                .invert_even()?,
                            _ => SuperPoly::one(&sigma.ring),
                        };
                        Some((phi, factor))
                    } else {
                        None
                    };
                    row.push(Coface { from, to, sign: k % 2 == 1, transport });
                }
            }
            cofaces.push(row);
        }
        Ok(Complex { sheaf, solvers, shifts, cells, cofaces })
    }

    fn slice(&self, q: usize, label: &[i64]) -> Vec<Key> {
        let mut out = Vec::new();
        for (k, cell) in self.cells[q].iter().enumerate() {
            let a0 = cell.vertices[0];
            let target: Vec<i64> = label.iter().zip(&self.shifts[a0]).map(|(l, t)| l - t).collect();
            out.extend(self.solvers[a0].monomials(&cell.ring, &target).into_iter().map(|m| (k, m)));
        }
        out
    }

    fn differential(&self, q: usize, key: &Key) -> Result<SparseVec<Key>> {
        let mut out = SparseVec::new();
        if q >= self.cofaces.len() {
            return Ok(out);
        }
        for cf in self.cofaces[q].iter().filter(|cf| cf.from == key.0) {
            let ring = &self.cells[q + 1][cf.to].ring;
            let image = match &cf.transport {
                None => SuperPoly::from_term(ring, key.1.clone(), Q::one()),
                Some((phi, factor)) => {
                    let src = &self.cells[q][cf.from].ring;
                    factor * &phi.apply(&SuperPoly::from_term(src, key.1.clone(), Q::one()))?
                }
            };
            for (m, c) in image.terms() {
                let e = out.entry((cf.to, m.clone())).or_insert_with(Q::zero);
                if cf.sign {
                    *e -= c;
                } else {
                    *e += c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Basis of the cochains of degree `q`, parity `p` and weight `label`,
    /// as vectors over the monomial keys.
    fn cochains(&self, q: usize, label: &[i64], p: Parity) -> Result<Vec<SparseVec<Key>>> {
        let keys: Vec<Key> = self.slice(q, label).into_iter().filter(|(_, m)| Parity::from_count(m.odd.len()) == p).collect();
        let unit = |k: &Key| -> SparseVec<Key> { SparseVec::from([(k.clone(), Q::one())]) };
        match self.sheaf {
            SheafKind::Invariant(v) => {
                let mut out = Vec::new();
                let mut by_cell: BTreeMap<usize, Vec<&Key>> = BTreeMap::new();
                for k in &keys {
                    by_cell.entry(k.0).or_default().push(k);
                }
                for (cell, ks) in by_cell {
                    let ring = &self.cells[q][cell].ring;
                    let field = &v.fields[self.cells[q][cell].vertices[0]];
                    let cols: Vec<SparseVec<Monomial>> = ks
                        .iter()
                        .map(|k| {
                            let img = field.derive(&SuperPoly::from_term(ring, k.1.clone(), Q::one()))?;
                            Ok(img.terms().iter().map(|(m, c)| (m.clone(), c.clone())).collect())
                        })
                        .collect::<Result<_>>()?;
                    for rel in linalg::kernel(&cols) {
                        out.push(rel.into_iter().map(|(idx, c)| (ks[idx].clone(), c)).collect());
                    }
                }
                Ok(out)
            }
            _ => Ok(keys.iter().map(unit).collect()),
        }
    }

    fn apply_d(&self, q: usize, v: &SparseVec<Key>) -> Result<SparseVec<Key>> {
        let mut out: SparseVec<Key> = SparseVec::new();
        for (k, c) in v {
            for (kk, cc) in self.differential(q, k)? {
                *out.entry(kk).or_insert_with(Q::zero) += c * cc;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// `dim H^q` for every degree and parity at one weight.
    fn weight_table(&self, label: &[i64], max_q: Option<usize>) -> Result<DimTable> {
        let top = max_q.map_or(self.cells.len(), |m| (m + 1).min(self.cells.len()));
        let mut table = DimTable::new();
        for p in [Parity::Even, Parity::Odd] {
            let spaces: Vec<Vec<SparseVec<Key>>> = (0..top).map(|q| self.cochains(q, label, p)).collect::<Result<_>>()?;
            if spaces.iter().all(|s| s.is_empty()) {
                continue;
            }
            let ranks: Vec<usize> = (0..top)
                .map(|q| {
                    let imgs = spaces[q].iter().map(|v| self.apply_d(q, v)).collect::<Result<Vec<_>>>()?;
                    Ok(linalg::rank(&imgs))
                })
                .collect::<Result<_>>()?;
            for q in 0..top {
                let below = if q == 0 { 0 } else { ranks[q - 1] };
                let d = spaces[q].len() - ranks[q] - below;
                table.set(q, p, d as u64, true);
            }
        }
        Ok(table)
    }
}

fn twist_shifts(x: &Atlas, l: &LineCocycle, solvers: &[WeightSolver], dim: usize) -> Result<Vec<Vec<i64>>> {
    let n = x.n_charts();
    let mut shifts: Vec<Option<Vec<i64>>> = vec![None; n];
    shifts[0] = Some(vec![0; dim]);
    let mut changed = true;
    while changed {
        changed = false;
        for &(i, j) in x.overlaps().keys() {
            let g = l.get(i, j).ok_or_else(|| Error::Gluing(format!("twist lacks ({i},{j})")))?;
            let w = solvers[i].homogeneous_weight(g)?.unwrap_or_else(|| vec![0; dim]);
            match (&shifts[i], &shifts[j]) {
                (Some(ti), None) => {
                    shifts[j] = Some(ti.iter().zip(&w).map(|(a, b)| a - b).collect());
                    changed = true;
                }
                (Some(ti), Some(tj)) => {
                    if ti.iter().zip(tj).zip(&w).any(|((a, b), c)| a - b != *c) {
                        return Err(Error::Unsupported("twist is not torus-equivariant".into()));
                    }
                }
                _ => {}
            }
        }
    }
    shifts.into_iter().map(|s| s.ok_or_else(|| Error::Gluing("cover is not connected".into()))).collect()
}

/// Dimensions of `H^q` by parity, summed over the weights in the window.
/// Entries that change when the window grows by one are marked unstable.
pub fn cech_cohomology(x: &Atlas, sheaf: SheafKind<'_>, window: CechWindow) -> Result<DimTable> {
    let complex = Complex::build(x, sheaf)?;
    let r = window.radius.max(0);
    let mut labels = BTreeSet::new();
    for (i, c) in x.charts().iter().enumerate() {
        let cutoff = c.ring.nil_cutoff().unwrap_or(usize::MAX);
        complex.solvers[i].labels_in_box(c.ring.n_odd(), cutoff, &complex.shifts[i], r + 1, &mut labels);
    }
    let labels: Vec<Vec<i64>> = labels.into_iter().collect();
    let per_weight: Vec<(Vec<i64>, DimTable)> = labels
        .par_iter()
        .map(|w| complex.weight_table(w, window.top).map(|t| (w.clone(), t)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, t)| !t.entries.is_empty())
        .collect();
    let inner = per_weight
        .iter()
        .filter(|(w, _)| w.iter().all(|c| c.abs() <= r))
        .fold(DimTable::new(), |acc, (_, t)| acc.add(t));
    let outer = per_weight.iter().fold(DimTable::new(), |acc, (_, t)| acc.add(t));
    let mut table = DimTable::new();
    for &(q, p) in inner.entries.keys().chain(outer.entries.keys()) {
        let a = inner.dim(q, p);
        table.set(q, p, a, a == outer.dim(q, p));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_projective_superspace, build_supergrassmannian, pi_action_field, quotient_atlas, standard_pi_symmetry};
    use crate::cohomology::bott_dim;
    use crate::linebundle::standard_cocycles;

    #[test]
    fn p1_structure_sheaf() {
        let p = build_projective_superspace(1, 0).unwrap();
        let t = cech_cohomology(&p, SheafKind::Structure, CechWindow::default()).unwrap();
        assert_eq!(t.dim(0, Parity::Even), 1);
        assert_eq!(t.total(1), 0);
        assert!(t.is_stable());
    }

    #[test]
    fn line_bundles_match_bott() {
        for n in 1..=2 {
            let p = build_projective_superspace(n, 0).unwrap();
            for m in -4..=4 {
                let l = standard_cocycles(&p, m).unwrap();
                let t = cech_cohomology(&p, SheafKind::Twisted(&l), CechWindow::default()).unwrap();
                assert!(t.is_stable());
                for q in 0..=n {
                    assert_eq!(t.dim(q, Parity::Even), bott_dim(n, 0, m, q), "n={n} m={m} q={q}");
                }
            }
        }
    }

    #[test]
    fn p23_has_no_h1() {
        let p = build_projective_superspace(2, 3).unwrap();
        let t = cech_cohomology(&p, SheafKind::Structure, CechWindow::default()).unwrap();
        assert_eq!(t.total(1), 0);
        assert_eq!(t.dim(0, Parity::Even), 1);
        assert!(t.is_stable());
    }

    #[test]
    fn pi_plane_odd_h1_is_one() {
        let p = build_projective_superspace(2, 3).unwrap();
        let v = pi_action_field(&p, &standard_pi_symmetry(3)).unwrap();
        let _ = quotient_atlas(&p, &v, 1).unwrap();
        let t = cech_cohomology(&p, SheafKind::Invariant(&v), CechWindow::default()).unwrap();
        assert_eq!(t.dim(1, Parity::Odd), 1);
        assert_eq!(t.dim(0, Parity::Even), 1);
        assert!(t.is_stable());
    }

    #[test]
    fn g1122_untwisted_h1_vanishes() {
        let g = build_supergrassmannian(1, 1, 2, 2).unwrap();
        let t = cech_cohomology(&g, SheafKind::Structure, CechWindow::radius(3)).unwrap();
        assert_eq!(t.total(1), 0);
    }

    #[test]
    fn g1122_ber_twist_has_two_dimensional_h1() {
        let g = build_supergrassmannian(1, 1, 2, 2).unwrap();
        for k in [-1, 1] {
            let l = standard_cocycles(&g, k).unwrap();
            let t = cech_cohomology(&g, SheafKind::Twisted(&l), CechWindow::radius(3)).unwrap();
            assert_eq!(t.total(1), 2, "k={k}");
            assert!(t.is_stable());
        }
    }

    #[test]
    fn capped_window_agrees_in_low_degrees() {
        let p = build_projective_superspace(2, 1).unwrap();
        let l = standard_cocycles(&p, -3).unwrap();
        let full = cech_cohomology(&p, SheafKind::Twisted(&l), CechWindow::radius(4)).unwrap();
        let low = cech_cohomology(&p, SheafKind::Twisted(&l), CechWindow::radius(4).up_to(1)).unwrap();
        for par in [Parity::Even, Parity::Odd] {
            for q in 0..=1 {
                assert_eq!(full.dim(q, par), low.dim(q, par), "q={q}");
            }
            assert_eq!(low.dim(2, par), 0);
        }
        assert!(full.total(2) > 0);
    }
}
