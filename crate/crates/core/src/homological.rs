//! Odd derivations, homological vector fields and the affine quotient.
//!
//! Conventions: the action comorphism is `σ*(a) = a + ψ·v(a)` with the odd
//! parameter on the left, and `v` obeys
//! `v(ab) = v(a)b + (−1)^{|a|} a v(b)`.
//! With these, the splitting of a homogeneous `f` along a witness `θ`
//! (`v(θ) = 1`) is `f = a + bθ` with `b = (−1)^{|f|+1} v(f)` and `a = f − bθ`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::rational::{q, Q};
use crate::superalgebra::{poly_to_terms, terms_to_poly, GenRef, Monomial, OddSet, Parity, Ring, RingDoc, SuperPoly, TermDoc};

/// Serialized homological field: the ring plus generator images, keyed by
/// generator name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDoc {
    pub images: BTreeMap<String, Vec<TermDoc>>,
    pub ring: RingDoc,
}

impl FieldDoc {
    pub fn from_field(v: &HomologicalField) -> Self {
        let ring = v.ring();
        let images = ring
            .gens()
            .map(|g| (ring.gen_name(g).to_string(), poly_to_terms(v.image(g))))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        FieldDoc { images, ring: RingDoc::from_ring(ring) }
    }

    /// Rebuilds the field and re-checks `v² = 0`.
    pub fn to_field(&self) -> Result<HomologicalField> {
        let ring = self.ring.to_ring()?;
        let mut images = vec![SuperPoly::zero(&ring); ring.n_gens()];
        for (name, terms) in &self.images {
            let g = ring.find(name).ok_or_else(|| Error::Parse(format!("field image for unknown generator {name:?}")))?;
            let idx = ring.gens().position(|h| h == g).expect("generator of its own ring");
            images[idx] = terms_to_poly(&ring, terms)?;
        }
        HomologicalField::new(OddDerivation::new(&ring, images)?)
    }
}

/// An odd derivation given by its values on generators (even generators
/// first, then odd).
#[derive(Clone, Debug, PartialEq)]
pub struct OddDerivation {
    ring: Ring,
    images: Vec<SuperPoly>,
}

impl OddDerivation {
    pub fn new(ring: &Ring, images: Vec<SuperPoly>) -> Result<Self> {
        if images.len() != ring.n_gens() {
            return Err(Error::Dimension(format!("derivation needs {} images, got {}", ring.n_gens(), images.len())));
        }
        let mut out = Vec::with_capacity(images.len());
        for (g, img) in ring.gens().zip(images) {
            let want = match g {
                GenRef::Even(_) => Parity::Odd,
                GenRef::Odd(_) => Parity::Even,
            };
            let img = img.in_ring(ring)?;
            if !img.has_parity(want) {
                return Err(Error::Parity(format!("v({}) must be {want}, got {img}", ring.gen_name(g))));
            }
            out.push(img);
        }
        Ok(OddDerivation { ring: ring.clone(), images: out })
    }

    /// Generators not mentioned are sent to zero.
    pub fn from_named(ring: &Ring, named: &[(&str, SuperPoly)]) -> Result<Self> {
        let mut images = vec![SuperPoly::zero(ring); ring.n_gens()];
        for (name, img) in named {
            let g = ring
                .find(name)
                .ok_or_else(|| Error::InvalidRing(format!("no generator {name:?} in {ring}")))?;
            images[gen_index(ring, g)] = img.clone();
        }
        Self::new(ring, images)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn images(&self) -> &[SuperPoly] {
        &self.images
    }

    pub fn image(&self, g: GenRef) -> &SuperPoly {
        &self.images[gen_index(&self.ring, g)]
    }

    /// Leibniz extension to an arbitrary element of a ring with the same
    /// generators (for instance a localization of `self.ring()`).
    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        let ring = f.ring();
        if !ring.same_gens(&self.ring) {
            return Err(Error::RingMismatch(format!("derivation on {} applied in {}", self.ring, ring)));
        }
        let imgs: Vec<SuperPoly> = self.images.iter().map(|p| p.in_ring(ring)).collect::<Result<_>>()?;
        let ne = ring.n_even();
        let mut out = SuperPoly::zero(ring);
        for (m, c) in f.terms() {
            let odd_part = SuperPoly::from_term(ring, Monomial { even: vec![0; ne], odd: m.odd }, Q::one());
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 || imgs[i].is_zero() {
                    continue;
                }
                let mut lowered = m.even.clone();
                lowered[i] -= 1;
                let pre = SuperPoly::from_term(ring, Monomial { even: lowered, odd: OddSet::EMPTY }, c * q(e as i64));
                let t = &(&pre * &imgs[i]) * &odd_part;
                for (mm, cc) in t.into_terms() {
                    out.add_term(mm, cc);
                }
            }
            let idx: Vec<usize> = m.odd.indices().collect();
            for (pos, &j) in idx.iter().enumerate() {
                let img = &imgs[ne + j];
                if img.is_zero() {
                    continue;
                }
                let prefix = OddSet(idx[..pos].iter().fold(0u64, |acc, &k| acc | 1 << k));
                let suffix = OddSet(idx[pos + 1..].iter().fold(0u64, |acc, &k| acc | 1 << k));
                let sign = if pos % 2 == 0 { c.clone() } else { -c.clone() };
                let left = SuperPoly::from_term(ring, Monomial { even: m.even.clone(), odd: prefix }, sign);
                let right = SuperPoly::from_term(ring, Monomial { even: vec![0; ne], odd: suffix }, Q::one());
                let t = &(&left * img) * &right;
                for (mm, cc) in t.into_terms() {
                    out.add_term(mm, cc);
                }
            }
        }
        Ok(out)
    }

    /// `v(v(g))` for every generator `g`.
    pub fn square_on_generators(&self) -> Result<Vec<SuperPoly>> {
        self.images.iter().map(|p| self.apply(p)).collect()
    }

    /// `v∘w + w∘v` on generators.
    pub fn anticommutator_on_generators(&self, other: &OddDerivation) -> Result<Vec<SuperPoly>> {
        self.images
            .iter()
            .zip(&other.images)
            .map(|(vg, wg)| Ok(&self.apply(wg)? + &other.apply(vg)?))
            .collect()
    }

    pub fn add(&self, other: &OddDerivation) -> Result<OddDerivation> {
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        OddDerivation::new(&self.ring, images)
    }

    /// The same derivation on a ring with the same generators.
    pub fn in_ring(&self, ring: &Ring) -> Result<OddDerivation> {
        OddDerivation::new(ring, self.images.clone())
    }
}

pub(crate) fn gen_index(ring: &Ring, g: GenRef) -> usize {
    match g {
        GenRef::Even(i) => i,
        GenRef::Odd(i) => ring.n_even() + i,
    }
}

/// An odd derivation certified to square to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologicalField {
    v: OddDerivation,
}

/// Failure of `v² = 0`, naming the first generator where it fails.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareWitness {
    pub generator: String,
    pub value: SuperPoly,
}

pub fn is_homological(v: &OddDerivation) -> Result<std::result::Result<(), SquareWitness>> {
    for (g, sq) in v.ring.gens().zip(v.square_on_generators()?) {
        if !sq.is_zero() {
            return Ok(Err(SquareWitness { generator: v.ring.gen_name(g).to_string(), value: sq }));
        }
    }
    Ok(Ok(()))
}

impl HomologicalField {
    pub fn new(v: OddDerivation) -> Result<Self> {
        match is_homological(&v)? {
            Ok(()) => Ok(HomologicalField { v }),
            Err(w) => Err(Error::NotHomological(format!("v²({}) = {} ≠ 0", w.generator, w.value))),
        }
    }

    pub fn from_named(ring: &Ring, named: &[(&str, SuperPoly)]) -> Result<Self> {
        Self::new(OddDerivation::from_named(ring, named)?)
    }

    pub fn derivation(&self) -> &OddDerivation {
        &self.v
    }

    pub fn ring(&self) -> &Ring {
        &self.v.ring
    }

    pub fn derive(&self, f: &SuperPoly) -> Result<SuperPoly> {
        self.v.apply(f)
    }

    pub fn image(&self, g: GenRef) -> &SuperPoly {
        self.v.image(g)
    }

    pub fn in_ring(&self, ring: &Ring) -> Result<HomologicalField> {
        Ok(HomologicalField { v: self.v.in_ring(ring)? })
    }

    /// Largest amount by which `v` lowers total even degree on a generator.
    pub fn degree_drop(&self) -> i64 {
        let ring = &self.v.ring;
        ring.gens()
            .map(|g| {
                let dg = if matches!(g, GenRef::Even(_)) { 1 } else { 0 };
                match self.image(g).min_degree() {
                    Some(m) => (dg - m).max(0),
                    None => 0,
                }
            })
            .max()
            .unwrap_or(0)
    }
}

/// Outcome of a freeness test.
#[derive(Clone, Debug, PartialEq)]
pub enum Freeness {
    /// An odd `θ` with `v(θ) = 1`.
    Free { witness: SuperPoly },
    /// A rational point of the reduced space at which every reduced image
    /// `v(g)` vanishes.
    NotFree { point: Vec<Q> },
    Undecided { bound: usize },
}

impl Freeness {
    pub fn witness(&self) -> Option<&SuperPoly> {
        match self {
            Freeness::Free { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Freeness::Free { .. })
    }
}

/// Nonnegative exponent vectors in `n` variables with total degree exactly `d`.
pub fn exponents_of_degree(n: usize, d: usize) -> Vec<Vec<i32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents_of_degree(n - 1, d - first) {
            rest.insert(0, first as i32);
            out.push(rest);
        }
    }
    out
}

/// Odd subsets of a given parity.
pub fn odd_subsets(n_odd: usize, parity: Parity) -> Vec<OddSet> {
    assert!(n_odd <= 20, "too many odd generators to enumerate subsets");
    let mut v: Vec<OddSet> = (0u64..1 << n_odd)
        .map(OddSet)
        .filter(|s| Parity::from_count(s.len()) == parity)
        .collect();
    v.sort();
    v
}

/// Monomials of parity `parity` and even degree exactly `d` (nonnegative
/// exponents).
pub fn monomials_of_degree(ring: &Ring, d: usize, parity: Parity) -> Vec<Monomial> {
    let subsets = odd_subsets(ring.n_odd(), parity);
    let cutoff = ring.nil_cutoff().unwrap_or(usize::MAX);
    let mut out = Vec::new();
    for e in exponents_of_degree(ring.n_even(), d) {
        for s in &subsets {
            if (s.len() as usize) < cutoff {
                out.push(Monomial { even: e.clone(), odd: *s });
            }
        }
    }
    out
}

fn mono(ring: &Ring, m: &Monomial) -> SuperPoly {
    SuperPoly::from_term(ring, m.clone(), Q::one())
}

/// Solve `v_main(θ) = 1`, `v_k(θ) = 0` (`k` in `kill`) over odd monomials of
/// even degree `≤ bound`. Monomials are added degree by degree so cheap
/// witnesses are found without building the full system.
fn solve_witness(main: &HomologicalField, kill: &[&HomologicalField], bound: usize) -> Result<Option<SuperPoly>> {
    let ring = main.ring().clone();
    let mut target: SparseVec<(usize, Monomial)> = SparseVec::new();
    target.insert((0, Monomial::one(ring.n_even())), Q::one());
    let mut ech: Echelon<(usize, Monomial)> = Echelon::tracking();
    let mut basis: Vec<Monomial> = Vec::new();
    for d in 0..=bound {
        let fresh = monomials_of_degree(&ring, d, Parity::Odd);
        let cols: Vec<SparseVec<(usize, Monomial)>> = fresh
            .par_iter()
            .map(|m| -> Result<SparseVec<(usize, Monomial)>> {
                let p = mono(&ring, m);
                let mut col = SparseVec::new();
                for (k, f) in std::iter::once(main).chain(kill.iter().copied()).enumerate() {
                    for (mm, c) in f.derive(&p)?.into_terms() {
                        col.insert((k, mm), c);
                    }
                }
                Ok(col)
            })
            .collect::<Result<_>>()?;
        for (m, col) in fresh.into_iter().zip(cols) {
            ech.insert(&col);
            basis.push(m);
        }
        if let Some(x) = ech.express(&target) {
            let mut theta = SuperPoly::zero(&ring);
            for (j, c) in x {
                theta.add_term(basis[j].clone(), c);
            }
            return Ok(Some(theta));
        }
        // (3) ⇒ (4): an odd f with v(f) invertible gives θ = v(f)⁻¹ f
        if kill.is_empty() {
            for m in basis.iter().filter(|m| m.degree() == d as i64) {
                let f = mono(&ring, m);
                let vf = main.derive(&f)?;
                if vf.is_unit() {
                    return Ok(Some(&vf.invert_even()? * &f));
                }
            }
        }
    }
    Ok(None)
}

/// Search for a rational point of the reduced space where all reduced parts
/// of `v(θ_k)` vanish.
pub fn fixed_point_certificate(v: &HomologicalField) -> Option<Vec<Q>> {
    let ring = v.ring();
    let ne = ring.n_even();
    let reduced: Vec<SuperPoly> = (0..ring.n_odd()).map(|k| v.image(GenRef::Odd(k)).reduced_part()).collect();
    let grids: [&[i64]; 3] = [&[0], &[0, 1, -1], &[0, 1, -1, 2, -2]];
    for grid in grids {
        let total = grid.len().checked_pow(ne as u32).unwrap_or(usize::MAX);
        if total > 200_000 {
            break;
        }
        for code in 0..total {
            let mut c = code;
            let point: Vec<Q> = (0..ne)
                .map(|_| {
                    let x = grid[c % grid.len()];
                    c /= grid.len();
                    q(x)
                })
                .collect();
            if (0..ne).any(|i| ring.is_invertible(i) && point[i].is_zero()) {
                continue;
            }
            if reduced.iter().all(|r| r.eval_reduced(&point).is_some_and(|x| x.is_zero())) {
                return Some(point);
            }
        }
    }
    None
}

/// Freeness test: a witness `θ` with `v(θ) = 1` among odd polynomials of even
/// degree `≤ bound`, or a fixed-point certificate, or `Undecided`.
pub fn freeness(v: &HomologicalField, bound: usize) -> Result<Freeness> {
    if let Some(theta) = solve_witness(v, &[], bound)? {
        debug_assert!(v.derive(&theta)? == SuperPoly::one(v.ring()));
        return Ok(Freeness::Free { witness: theta });
    }
    Ok(match fixed_point_certificate(v) {
        Some(point) => Freeness::NotFree { point },
        None => Freeness::Undecided { bound },
    })
}

/// Filtered slice of monomials of even degree `≤ degree` and fixed parity.
#[derive(Clone, Debug)]
pub struct GradedSlice {
    pub degree: usize,
    pub parity: Parity,
    pub basis: Vec<Monomial>,
}

impl GradedSlice {
    pub fn new(ring: &Ring, degree: usize, parity: Parity) -> Self {
        let basis = (0..=degree).flat_map(|d| monomials_of_degree(ring, d, parity)).collect();
        GradedSlice { degree, parity, basis }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Images of the basis under `v` as sparse columns.
    pub fn images(&self, v: &HomologicalField) -> Result<Vec<SparseVec<Monomial>>> {
        let ring = v.ring();
        self.basis
            .par_iter()
            .map(|m| Ok(v.derive(&mono(ring, m))?.into_terms()))
            .collect()
    }
}

/// Kernel and image dimensions of `v` on a slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceDims {
    pub degree: usize,
    pub parity: Parity,
    pub ker: usize,
    pub im: usize,
}

impl SliceDims {
    pub fn exact(&self) -> bool {
        self.ker == self.im
    }
}

/// `dim ker(v|F)` and `dim(v(F') ∩ F)` where `F` is the slice of degree `≤ d`
/// and parity `ε`, and `F'` the opposite-parity slice of degree `≤ d + δ`
/// with `δ` the degree drop of `v`.
pub fn ker_im_dims(v: &HomologicalField, d: usize, parity: Parity) -> Result<SliceDims> {
    let ring = v.ring();
    let slice = GradedSlice::new(ring, d, parity);
    let ker = slice.len() - crate::linalg::rank(&slice.images(v)?);
    let src = GradedSlice::new(ring, d + v.degree_drop() as usize, parity.flip());
    let imgs = src.images(v)?;
    let target: Vec<SparseVec<Monomial>> =
        slice.basis.iter().map(|m| std::iter::once((m.clone(), Q::one())).collect()).collect();
    let im = crate::linalg::intersection_dim(&imgs, &target);
    Ok(SliceDims { degree: d, parity, ker, im })
}

/// All slices with degree `≤ max_degree`, both parities, computed in parallel.
pub fn slice_table(v: &HomologicalField, max_degree: usize) -> Result<Vec<SliceDims>> {
    let jobs: Vec<(usize, Parity)> =
        (0..=max_degree).flat_map(|d| [(d, Parity::Even), (d, Parity::Odd)]).collect();
    jobs.par_iter().map(|&(d, p)| ker_im_dims(v, d, p)).collect()
}

/// Split `f = a + bθ` with `v(a) = v(b) = 0`.
pub fn decompose(v: &HomologicalField, theta: &SuperPoly, f: &SuperPoly) -> Result<(SuperPoly, SuperPoly)> {
    let one = SuperPoly::one(f.ring());
    if v.derive(theta)? != one.in_ring(theta.ring())? {
        return Err(Error::Witness(format!("v({theta}) ≠ 1")));
    }
    let theta = theta.in_ring(f.ring())?;
    let mut b = SuperPoly::zero(f.ring());
    for p in [Parity::Even, Parity::Odd] {
        let part = f.parity_part(p);
        if part.is_zero() {
            continue;
        }
        let vf = v.derive(&part)?;
        // b = (−1)^{|f|+1} v(f)
        b = match p {
            Parity::Even => &b - &vf,
            Parity::Odd => &b + &vf,
        };
    }
    let a = f - &(&b * &theta);
    Ok((a, b))
}

/// A named invariant function, stored as an element of the covering ring.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantGenerator {
    pub name: String,
    pub element: SuperPoly,
}

impl InvariantGenerator {
    pub fn parity(&self) -> Parity {
        self.element.parity().unwrap_or(Parity::Even)
    }
}

/// Drop zero, constant and linearly dependent (modulo constants) elements.
fn dedup_span(cands: Vec<InvariantGenerator>) -> Vec<InvariantGenerator> {
    let mut ech: Echelon<Monomial> = Echelon::new();
    if let Some(one) = cands.first().map(|g| SuperPoly::one(g.element.ring())) {
        ech.insert(&one.into_terms());
    }
    let mut out = Vec::new();
    for g in cands {
        if g.element.is_zero() || g.element.is_constant() {
            continue;
        }
        if ech.insert(&g.element.terms().clone()).is_none() {
            out.push(g);
        }
    }
    out
}

/// Generators of the invariant subring `A^v`: the `a`-parts of every ring
/// generator followed by the `b`-parts, deduplicated.
pub fn invariant_generators(v: &HomologicalField, theta: &SuperPoly) -> Result<Vec<InvariantGenerator>> {
    let ring = v.ring();
    let gens: Vec<(String, SuperPoly)> =
        ring.gens().map(|g| (ring.gen_name(g).to_string(), SuperPoly::gen(ring, g))).collect();
    invariant_parts(v, theta, &gens)
}

fn invariant_parts(v: &HomologicalField, theta: &SuperPoly, gens: &[(String, SuperPoly)]) -> Result<Vec<InvariantGenerator>> {
    let mut a_parts = Vec::new();
    let mut b_parts = Vec::new();
    for (name, g) in gens {
        let (a, b) = decompose(v, theta, g)?;
        a_parts.push(InvariantGenerator { name: format!("a({name})"), element: a });
        b_parts.push(InvariantGenerator { name: format!("b({name})"), element: b });
    }
    a_parts.extend(b_parts);
    let out = dedup_span(a_parts);
    for g in &out {
        if !v.derive(&g.element)?.is_zero() {
            return Err(Error::Witness(format!("generator {} is not invariant", g.name)));
        }
    }
    Ok(out)
}

/// Result of an iterated quotient: the witnesses used at each step and the
/// final invariant generators.
#[derive(Clone, Debug)]
pub struct MultiQuotient {
    pub witnesses: Vec<SuperPoly>,
    pub generators: Vec<InvariantGenerator>,
}

/// Iterated quotient by pairwise anticommuting homological fields.
pub fn quotient_multi(fields: &[HomologicalField], bound: usize) -> Result<MultiQuotient> {
    let Some(first) = fields.first() else {
        return Err(Error::Dimension("quotient_multi needs at least one field".into()));
    };
    let ring = first.ring().clone();
    for (i, vi) in fields.iter().enumerate() {
        if !vi.ring().same_gens(&ring) {
            return Err(Error::RingMismatch("fields live on different rings".into()));
        }
        for vj in &fields[i + 1..] {
            if vi.derivation().anticommutator_on_generators(vj.derivation())?.iter().any(|p| !p.is_zero()) {
                return Err(Error::NotHomological("fields do not anticommute".into()));
            }
        }
    }
    let mut current: Vec<(String, SuperPoly)> =
        ring.gens().map(|g| (ring.gen_name(g).to_string(), SuperPoly::gen(&ring, g))).collect();
    let mut witnesses = Vec::new();
    for (k, vk) in fields.iter().enumerate() {
        let earlier: Vec<&HomologicalField> = fields[..k].iter().collect();
        let theta = solve_witness(vk, &earlier, bound)?
            .ok_or_else(|| Error::Undecided { bound, what: format!("witness for field {k} of the iterated quotient") })?;
        let gens = invariant_parts(vk, &theta, &current)?;
        current = gens.into_iter().map(|g| (g.name, g.element)).collect();
        witnesses.push(theta);
    }
    let generators = current.into_iter().map(|(name, element)| InvariantGenerator { name, element }).collect();
    Ok(MultiQuotient { witnesses, generators })
}

/// Dimension of the span of all products of at most `len` generators, cut
/// to even degree `≤ degree`; used to compare invariant subrings.
pub fn product_span_rank(gens: &[SuperPoly], len: usize, degree: i64) -> usize {
    let Some(ring) = gens.first().map(|g| g.ring().clone()) else { return 1 };
    let mut layer = vec![SuperPoly::one(&ring)];
    let mut ech: Echelon<Monomial> = Echelon::new();
    ech.insert(&SuperPoly::one(&ring).into_terms());
    for _ in 0..len {
        let mut next = Vec::new();
        for p in &layer {
            for g in gens {
                let prod = (p * g).filter(|m| m.degree() <= degree);
                if prod.is_zero() {
                    continue;
                }
                if ech.insert(&prod.terms().clone()).is_none() {
                    next.push(prod);
                }
            }
        }
        layer = next;
    }
    ech.rank()
}

/// Check whether `f` is a constant multiple of the unit.
pub fn is_scalar(f: &SuperPoly) -> bool {
    f.constant_value().is_some_and(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::RingDescriptor;

    pub(crate) fn p12_chart() -> (Ring, HomologicalField) {
        let r = RingDescriptor::polynomial(&["u"], &["e0", "e1"]).unwrap();
        let u = SuperPoly::var(&r, "u");
        let e0 = SuperPoly::var(&r, "e0");
        let e1 = SuperPoly::var(&r, "e1");
        let v = HomologicalField::from_named(
            &r,
            &[("u", &e1 - &(&u * &e0)), ("e0", SuperPoly::int(&r, -1)), ("e1", &(-&u) + &(&e1 * &e0))],
        )
        .unwrap();
        (r, v)
    }

    fn theta_dz() -> (Ring, HomologicalField) {
        let r = RingDescriptor::polynomial(&["z"], &["t"]).unwrap();
        let t = SuperPoly::var(&r, "t");
        (r.clone(), HomologicalField::from_named(&r, &[("z", t)]).unwrap())
    }

    #[test]
    fn derive_examples() {
        let (r, v) = theta_dz();
        let z = SuperPoly::var(&r, "z");
        let t = SuperPoly::var(&r, "t");
        assert_eq!(v.derive(&z.pow(2)).unwrap(), (&z * &t).scale_int(2));
        let w = HomologicalField::from_named(&r, &[("t", SuperPoly::one(&r))]).unwrap();
        assert_eq!(w.derive(&(&z * &t)).unwrap(), z);
        let (r, v) = p12_chart();
        let u = SuperPoly::var(&r, "u");
        let e0 = SuperPoly::var(&r, "e0");
        let e1 = SuperPoly::var(&r, "e1");
        assert_eq!(v.derive(&(&u * &e0)).unwrap(), &(&e1 * &e0) - &u);
    }

    #[test]
    fn non_homological_witness() {
        let r = RingDescriptor::polynomial(&["z"], &["t"]).unwrap();
        let d = OddDerivation::from_named(&r, &[("z", SuperPoly::var(&r, "t")), ("t", SuperPoly::var(&r, "z"))]).unwrap();
        let w = is_homological(&d).unwrap().unwrap_err();
        assert_eq!(w.generator, "z");
        assert_eq!(w.value, SuperPoly::var(&r, "z"));
    }

    #[test]
    fn freeness_examples() {
        let r = RingDescriptor::polynomial(&[] as &[&str], &["t"]).unwrap();
        let v = HomologicalField::from_named(&r, &[("t", SuperPoly::one(&r))]).unwrap();
        assert_eq!(freeness(&v, 0).unwrap(), Freeness::Free { witness: SuperPoly::var(&r, "t") });
        let (_, v) = theta_dz();
        assert!(matches!(freeness(&v, 3).unwrap(), Freeness::NotFree { .. }));
        let (r, v) = p12_chart();
        assert_eq!(freeness(&v, 0).unwrap(), Freeness::Free { witness: -SuperPoly::var(&r, "e0") });
    }

    #[test]
    fn slices_of_theta_dz() {
        let (_, v) = theta_dz();
        for d in 0..=8 {
            let e = ker_im_dims(&v, d, Parity::Even).unwrap();
            assert_eq!((e.ker, e.im), (1, 0));
            let o = ker_im_dims(&v, d, Parity::Odd).unwrap();
            assert_eq!((o.ker, o.im), (d + 1, d + 1));
        }
    }

    #[test]
    fn slices_of_p12_chart_are_exact() {
        let (_, v) = p12_chart();
        assert!(slice_table(&v, 3).unwrap().iter().all(|s| s.exact()));
    }

    #[test]
    fn decompose_examples() {
        let (r, v) = p12_chart();
        let u = SuperPoly::var(&r, "u");
        let e0 = SuperPoly::var(&r, "e0");
        let e1 = SuperPoly::var(&r, "e1");
        let theta = -&e0;
        let (a, b) = decompose(&v, &theta, &u).unwrap();
        assert_eq!(a, &u - &(&e1 * &e0));
        assert_eq!(b, &(-&e1) + &(&u * &e0));
        let (a, b) = decompose(&v, &theta, &e1).unwrap();
        assert_eq!(a, &e1 - &(&u * &e0));
        assert_eq!(b, &(-&u) + &(&e1 * &e0));
    }

    #[test]
    fn invariant_generator_examples() {
        let (r, v) = p12_chart();
        let gens = invariant_generators(&v, &-SuperPoly::var(&r, "e0")).unwrap();
        let u = SuperPoly::var(&r, "u");
        let e0 = SuperPoly::var(&r, "e0");
        let e1 = SuperPoly::var(&r, "e1");
        let els: Vec<SuperPoly> = gens.iter().map(|g| g.element.clone()).collect();
        assert_eq!(els, vec![&u - &(&e1 * &e0), &e1 - &(&u * &e0)]);

        let r = RingDescriptor::polynomial(&["z1", "z2"], &["t"]).unwrap();
        let v = HomologicalField::from_named(&r, &[("t", SuperPoly::one(&r))]).unwrap();
        let gens = invariant_generators(&v, &SuperPoly::var(&r, "t")).unwrap();
        let els: Vec<SuperPoly> = gens.iter().map(|g| g.element.clone()).collect();
        assert_eq!(els, vec![SuperPoly::var(&r, "z1"), SuperPoly::var(&r, "z2")]);
    }

    #[test]
    fn multi_quotient_of_odd_plane_is_trivial() {
        let r = RingDescriptor::polynomial(&[] as &[&str], &["t1", "t2"]).unwrap();
        let v1 = HomologicalField::from_named(&r, &[("t1", SuperPoly::one(&r))]).unwrap();
        let v2 = HomologicalField::from_named(&r, &[("t2", SuperPoly::one(&r))]).unwrap();
        let q = quotient_multi(&[v1, v2], 0).unwrap();
        assert!(q.generators.is_empty());
    }
}
