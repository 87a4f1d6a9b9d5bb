//! Bounded search for isomorphisms between atlases.
//!
//! Chart maps `F_i : Y_i → X_i` are fixed to the identity on reduced
//! coordinates and built one nilpotency level at a time. At every level the
//! compatibility equations `φ^X_ij ∘ F_j = F_i ∘ φ^Y_ij` are affine in the new
//! unknowns, so each level is a linear solve. Level one is homogeneous; its
//! kernel is scanned for invertible candidates `A₀`, and the whole level-one
//! block is then scaled by `a`, which enters level two as the single extra
//! unknown `μ = a²`.

use std::collections::BTreeMap;

use super::Atlas;
use crate::error::Result;
use crate::homological::monomials_of_degree;
use crate::linalg::{self, SparseVec};
use crate::rational::{q, rational_sqrt, Q};
use crate::superalgebra::{det_commutative, GenRef, Monomial, Parity, RingHom, SuperPoly};

#[derive(Clone, Debug)]
pub enum IsoResult {
    /// `maps[c]` sends chart `c` of the second atlas into chart `perm[c]` of
    /// the first.
    Iso { perm: Vec<usize>, maps: Vec<RingHom> },
    NoneUpTo { bound: usize, reason: String },
}

impl IsoResult {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoResult::Iso { .. })
    }
}

type Key = (usize, usize, Monomial);

#[derive(Clone, Debug)]
struct Unknown {
    chart: usize,
    gen: usize,
    mono: Monomial,
}

struct Search<'a> {
    x: &'a Atlas,
    y: &'a Atlas,
    keys: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn identity_state(&self) -> Vec<Vec<SuperPoly>> {
        self.x
            .charts()
            .iter()
            .map(|c| {
                c.ring
                    .gens()
                    .map(|g| match g {
                        GenRef::Even(_) => SuperPoly::gen(&c.ring, g),
                        GenRef::Odd(_) => SuperPoly::zero(&c.ring),
                    })
                    .collect()
            })
            .collect()
    }

    /// Level-`level` part of every compatibility equation touching `only`
    /// (all overlaps when `None`). `None` as a result means some chart map
    /// failed to extend to the overlap ring.
    fn residual(&self, state: &[Vec<SuperPoly>], level: Option<u32>, only: Option<usize>) -> Option<SparseVec<Key>> {
        let mut out = SparseVec::new();
        for (o, &(i, j)) in self.keys.iter().enumerate() {
            if let Some(c) = only {
                if i != c && j != c {
                    continue;
                }
            }
            let ox = self.x.overlap(i, j)?;
            let oy = self.y.overlap(i, j)?;
            let imgs: Vec<SuperPoly> = state[i].iter().map(|p| p.in_ring(&ox.ring)).collect::<Result<_>>().ok()?;
            let fi = RingHom::new(&oy.ring, &ox.ring, imgs).ok()?;
            for (g, img) in state[j].iter().enumerate() {
                let lhs = ox.map.apply(img).ok()?;
                let rhs = fi.apply(&oy.map.images()[g]).ok()?;
                let d = &lhs - &rhs;
                for (m, c) in d.terms() {
                    if level.map_or(true, |l| m.odd_len() == l) {
                        out.insert((o, g, m.clone()), c.clone());
                    }
                }
            }
        }
        Some(out)
    }

    fn unknowns(&self, level: u32, bound: usize) -> Vec<Unknown> {
        let parity = if level % 2 == 0 { Parity::Even } else { Parity::Odd };
        let mut out = Vec::new();
        for (c, chart) in self.x.charts().iter().enumerate() {
            let monos: Vec<Monomial> = (0..=bound)
                .flat_map(|d| monomials_of_degree(&chart.ring, d, parity))
                .filter(|m| m.odd_len() == level)
                .collect();
            let gens: Vec<usize> = chart
                .ring
                .gens()
                .enumerate()
                .filter(|(_, g)| matches!((g, parity), (GenRef::Even(_), Parity::Even) | (GenRef::Odd(_), Parity::Odd)))
                .map(|(k, _)| k)
                .collect();
            for &g in &gens {
                for m in &monos {
                    out.push(Unknown { chart: c, gen: g, mono: m.clone() });
                }
            }
        }
        out
    }

    fn with_value(&self, state: &[Vec<SuperPoly>], u: &Unknown, c: &Q) -> Vec<Vec<SuperPoly>> {
        let mut s = state.to_vec();
        s[u.chart][u.gen].add_term(u.mono.clone(), c.clone());
        s
    }

    fn apply_solution(&self, state: &mut [Vec<SuperPoly>], unknowns: &[Unknown], x: &SparseVec<usize>) {
        for (&k, c) in x {
            if k < unknowns.len() {
                let u = &unknowns[k];
                state[u.chart][u.gen].add_term(u.mono.clone(), c.clone());
            }
        }
    }

    /// Columns `E(e_k) − E(0)` for every unknown at this level.
    fn columns(&self, state: &[Vec<SuperPoly>], unknowns: &[Unknown], level: u32) -> Option<Vec<SparseVec<Key>>> {
        let mut base_by_chart: BTreeMap<usize, SparseVec<Key>> = BTreeMap::new();
        let mut cols = Vec::with_capacity(unknowns.len());
        for u in unknowns {
            if !base_by_chart.contains_key(&u.chart) {
                base_by_chart.insert(u.chart, self.residual(state, Some(level), Some(u.chart))?);
            }
            let base = &base_by_chart[&u.chart];
            let e = self.residual(&self.with_value(state, u, &q(1)), Some(level), Some(u.chart))?;
            cols.push(difference(&e, base));
        }
        Some(cols)
    }

    fn level_one_invertible(&self, state: &[Vec<SuperPoly>]) -> bool {
        self.x.charts().iter().enumerate().all(|(c, chart)| {
            let ring = &chart.ring;
            let ne = ring.n_even();
            let no = ring.n_odd();
            if no == 0 {
                return true;
            }
            let red = ring.truncated(1);
            let m: Vec<Vec<SuperPoly>> = (0..no)
                .map(|k| {
                    (0..no)
                        .map(|l| {
                            let img = &state[c][ne + k];
                            SuperPoly::from_terms(
                                &red,
                                img.terms()
                                    .iter()
                                    .filter(|(mm, _)| mm.odd_len() == 1 && mm.odd.contains(l))
                                    .map(|(mm, cc)| (Monomial { even: mm.even.clone(), odd: Default::default() }, cc.clone())),
                            )
                        })
                        .collect()
                })
                .collect();
            det_commutative(&red, &m).is_unit()
        })
    }

    fn max_level(&self) -> u32 {
        self.x
            .charts()
            .iter()
            .map(|c| {
                let n = c.ring.n_odd();
                c.ring.nil_cutoff().map_or(n, |k| n.min(k.saturating_sub(1))) as u32
            })
            .max()
            .unwrap_or(0)
    }

    /// Solve levels `from..=max` by particular solutions.
    fn solve_upper(&self, mut state: Vec<Vec<SuperPoly>>, from: u32, bound: usize) -> Option<Vec<Vec<SuperPoly>>> {
        for level in from..=self.max_level() {
            let unknowns = self.unknowns(level, bound);
            let rhs = self.residual(&state, Some(level), None)?;
            if rhs.is_empty() {
                continue;
            }
            let cols = self.columns(&state, &unknowns, level)?;
            let neg: SparseVec<Key> = rhs.into_iter().map(|(k, v)| (k, -v)).collect();
            let x = linalg::solve(&cols, &neg)?;
            self.apply_solution(&mut state, &unknowns, &x);
        }
        Some(state)
    }

    /// The literal identity, when both atlases use the same coordinate names.
    fn literal_identity(&self) -> Option<Vec<Vec<SuperPoly>>> {
        let state: Vec<Vec<SuperPoly>> = self
            .x
            .charts()
            .iter()
            .zip(self.y.charts())
            .map(|(cx, cy)| cx.ring.same_gens(&cy.ring).then(|| cx.ring.gens().map(|g| SuperPoly::gen(&cx.ring, g)).collect()))
            .collect::<Option<_>>()?;
        self.residual(&state, None, None).filter(|r| r.is_empty()).map(|_| state)
    }

    fn run(&self, bound: usize) -> std::result::Result<Vec<Vec<SuperPoly>>, String> {
        if let Some(id) = self.literal_identity() {
            return Ok(id);
        }
        let start = self.identity_state();
        match self.residual(&start, Some(0), None) {
            Some(r) if r.is_empty() => {}
            _ => return Err("reduced transitions differ".into()),
        }
        let top = self.max_level();
        if top == 0 {
            return Ok(start);
        }
        let unknowns = self.unknowns(1, bound);
        let cols = self.columns(&start, &unknowns, 1).ok_or("chart maps do not extend to overlaps")?;
        let kernel = linalg::kernel(&cols);
        if kernel.is_empty() {
            return Err("no level-one solutions".into());
        }
        for cand in candidates(&kernel) {
            let mut a0 = start.clone();
            self.apply_solution(&mut a0, &unknowns, &cand);
            if !self.level_one_invertible(&a0) {
                continue;
            }
            if top == 1 {
                if self.residual(&a0, None, None).is_some_and(|r| r.is_empty()) {
                    return Ok(a0);
                }
                continue;
            }
            let Some(scaled) = self.level_two(&start, &a0, bound) else { continue };
            if let Some(done) = self.solve_upper(scaled, 3, bound) {
                if self.residual(&done, None, None).is_some_and(|r| r.is_empty()) {
                    return Ok(done);
                }
            }
        }
        Err(format!("no scanned level-one candidate extends (kernel dimension {})", kernel.len()))
    }

    /// Solve `T₀ + μQ + L(B) = 0` and rescale the level-one block by `√μ`.
    fn level_two(&self, start: &[Vec<SuperPoly>], a0: &[Vec<SuperPoly>], bound: usize) -> Option<Vec<Vec<SuperPoly>>> {
        let t0 = self.residual(start, Some(2), None)?;
        let e1 = self.residual(a0, Some(2), None)?;
        let quad = difference(&e1, &t0);
        let unknowns = self.unknowns(2, bound);
        let mut cols = self.columns(a0, &unknowns, 2)?;
        let mu = cols.len();
        cols.push(quad);
        let neg: SparseVec<Key> = t0.iter().map(|(k, v)| (k.clone(), -v.clone())).collect();
        let particular = linalg::solve(&cols, &neg)?;
        let kernel = linalg::kernel(&cols);
        let mut x = particular;
        let mu_val = x.get(&mu).cloned().unwrap_or_else(|| q(0));
        let free = kernel.iter().find(|k| k.get(&mu).is_some_and(|v| *v != q(0)));
        let a = match (rational_sqrt(&mu_val), free) {
            (Some(a), _) if a != q(0) => a,
            (_, Some(k)) => {
                // shift along the kernel so that μ becomes 1
                let t = (q(1) - &mu_val) / k[&mu].clone();
                for (idx, v) in k {
                    let e = x.entry(*idx).or_insert_with(|| q(0));
                    *e += &t * v;
                }
                x.retain(|_, v| *v != q(0));
                q(1)
            }
            _ => return None,
        };
        let mut state: Vec<Vec<SuperPoly>> = a0
            .iter()
            .map(|imgs| imgs.iter().map(|p| if p.is_odd() && !p.is_zero() { p.scale(&a) } else { p.clone() }).collect())
            .collect();
        x.remove(&mu);
        self.apply_solution(&mut state, &unknowns, &x);
        Some(state)
    }
}

fn difference(a: &SparseVec<Key>, b: &SparseVec<Key>) -> SparseVec<Key> {
    let mut out = a.clone();
    for (k, v) in b {
        let e = out.entry(k.clone()).or_insert_with(|| q(0));
        *e -= v;
        if *e == q(0) {
            out.remove(k);
        }
    }
    out
}

/// Kernel basis vectors, their sum, and a few fixed mixtures.
fn candidates(kernel: &[SparseVec<usize>]) -> Vec<SparseVec<usize>> {
    let mut out: Vec<SparseVec<usize>> = kernel.to_vec();
    if kernel.len() > 1 {
        for weights in [vec![1i64; kernel.len()], (1..=kernel.len() as i64).collect(), (0..kernel.len() as i64).map(|k| 1 << k).collect()] {
            let mut v = SparseVec::new();
            for (w, k) in weights.iter().zip(kernel) {
                for (idx, c) in k {
                    *v.entry(*idx).or_insert_with(|| q(0)) += c * Q::from_integer((*w).into());
                }
            }
            v.retain(|_, c| *c != q(0));
            out.push(v);
        }
    }
    out
}

fn permuted(x: &Atlas, perm: &[usize]) -> Result<Atlas> {
    let charts = perm.iter().map(|&p| x.chart(p).clone()).collect();
    let mut inv = vec![0; perm.len()];
    for (c, &p) in perm.iter().enumerate() {
        inv[p] = c;
    }
    let overlaps = x.overlaps().iter().map(|(&(i, j), ov)| ((inv[i], inv[j]), ov.clone())).collect();
    Atlas::new(x.name.clone(), x.kind.clone(), charts, overlaps)
}

fn compatible_shapes(x: &Atlas, y: &Atlas) -> bool {
    x.n_charts() == y.n_charts()
        && x.charts().iter().zip(y.charts()).all(|(a, b)| {
            a.ring.n_even() == b.ring.n_even()
                && a.ring.n_odd() == b.ring.n_odd()
                && a.ring.invertible_mask() == b.ring.invertible_mask()
                && a.ring.nil_cutoff() == b.ring.nil_cutoff()
        })
        && x.overlaps().keys().eq(y.overlaps().keys())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for k in (0..n).filter(|k| !p.contains(k)) {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Search for an isomorphism `Y ≅ X` whose chart maps have polynomial entries
/// of even degree at most `bound`. Positive answers are verified exactly.
pub fn iso_check(x: &Atlas, y: &Atlas, bound: usize) -> Result<IsoResult> {
    if x.n_charts() != y.n_charts() {
        return Ok(IsoResult::NoneUpTo { bound, reason: "different numbers of charts".into() });
    }
    let n = x.n_charts();
    let perms = if n <= 6 { permutations(n) } else { vec![(0..n).collect()] };
    let mut reason: Option<String> = None;
    for perm in perms {
        let xp = permuted(x, &perm)?;
        if !compatible_shapes(&xp, y) {
            continue;
        }
        let search = Search { x: &xp, y, keys: xp.overlaps().keys().copied().collect() };
        match search.run(bound) {
            Ok(state) => {
                let maps = y
                    .charts()
                    .iter()
                    .zip(xp.charts())
                    .zip(state)
                    .map(|((cy, cx), imgs)| RingHom::new(&cy.ring, &cx.ring, imgs))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(IsoResult::Iso { perm, maps });
            }
            Err(r) => {
                reason.get_or_insert(r);
            }
        }
    }
    let reason = reason.unwrap_or_else(|| "no chart matching has the same chart shapes".into());
    Ok(IsoResult::NoneUpTo { bound, reason })
}
