use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, OddSet};
use super::ring::{same_ring, GenRef, Ring};
use super::Parity;
use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// Element of a supercommutative Laurent polynomial ring over ℚ.
///
/// Terms are kept in a `BTreeMap` keyed by canonical monomials, so two equal
/// elements always have identical term maps; zero coefficients are never
/// stored.
#[derive(Clone)]
pub struct SuperPoly {
    ring: Ring,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for SuperPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for SuperPoly {}

impl SuperPoly {
    pub fn zero(ring: &Ring) -> Self {
        SuperPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Q::one())
    }

    pub fn constant(ring: &Ring, c: Q) -> Self {
        Self::from_term(ring, Monomial::one(ring.n_even()), c)
    }

    pub fn int(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, q(c))
    }

    pub fn from_term(ring: &Ring, m: Monomial, c: Q) -> Self {
        let mut p = Self::zero(ring);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn even_gen(ring: &Ring, i: usize) -> Self {
        let mut m = Monomial::one(ring.n_even());
        m.even[i] = 1;
        Self::from_term(ring, m, Q::one())
    }

    pub fn odd_gen(ring: &Ring, i: usize) -> Self {
        let m = Monomial { even: vec![0; ring.n_even()], odd: OddSet::single(i) };
        Self::from_term(ring, m, Q::one())
    }

    pub fn gen(ring: &Ring, g: GenRef) -> Self {
        match g {
            GenRef::Even(i) => Self::even_gen(ring, i),
            GenRef::Odd(i) => Self::odd_gen(ring, i),
        }
    }

    /// Generator by name; panics on unknown names (use [`SuperPoly::try_var`]
    /// for fallible lookup).
    pub fn var(ring: &Ring, name: &str) -> Self {
        Self::try_var(ring, name).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_var(ring: &Ring, name: &str) -> Result<Self> {
        ring.find(name)
            .map(|g| Self::gen(ring, g))
            .ok_or_else(|| Error::InvalidRing(format!("no generator named {name:?} in {ring}")))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn admissible(&self, m: &Monomial) -> bool {
        match self.ring.nil_cutoff() {
            Some(k) => (m.odd_len() as usize) < k,
            None => true,
        }
    }

    /// Accumulate `c·m` into `self`.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() || !self.admissible(&m) {
            return;
        }
        debug_assert!(m
            .even
            .iter()
            .enumerate()
            .all(|(i, &e)| e >= 0 || self.ring.is_invertible(i)));
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Parity of a homogeneous element; zero is reported as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| Parity::from_count(m.odd_len()));
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(p) => p,
        };
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Some(Parity::Even)
    }

    pub fn is_odd(&self) -> bool {
        self.is_zero() || self.parity() == Some(Parity::Odd)
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == Some(p)
    }

    pub fn parity_part(&self, p: Parity) -> SuperPoly {
        self.filter(|m| Parity::from_count(m.odd_len()) == p)
    }

    pub fn filter(&self, pred: impl Fn(&Monomial) -> bool) -> SuperPoly {
        SuperPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| pred(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Terms with no odd factor.
    pub fn reduced_part(&self) -> SuperPoly {
        self.filter(|m| m.is_reduced())
    }

    /// Terms with exactly `l` odd factors.
    pub fn nil_level(&self, l: u32) -> SuperPoly {
        self.filter(|m| m.odd_len() == l)
    }

    pub fn max_nil_level(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.odd_len()).max()
    }

    /// Drop every term lying in `N^k`.
    pub fn truncate_nil(&self, k: usize) -> SuperPoly {
        self.filter(|m| (m.odd_len() as usize) < k)
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|m| m.has_negative())
    }

    fn check_ring(&self, other: &SuperPoly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{} vs {}", self.ring, other.ring)))
        }
    }

    pub fn try_add(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &SuperPoly) -> Result<SuperPoly> {
        self.check_ring(other)?;
        let mut out = SuperPoly::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if sign > 0 { c } else { -c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> SuperPoly {
        if c.is_zero() {
            return SuperPoly::zero(&self.ring);
        }
        SuperPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> SuperPoly {
        self.scale(&q(c))
    }

    pub fn pow(&self, n: u32) -> SuperPoly {
        let mut acc = SuperPoly::one(&self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power of an even element; negative exponents go through
    /// [`SuperPoly::invert_even`].
    pub fn powi(&self, n: i64) -> Result<SuperPoly> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.invert_even()?.pow((-n) as u32))
        }
    }

    /// Inverse of an even element whose reduced part is a unit of the Laurent
    /// ring (a nonzero rational times a monomial in invertible generators).
    ///
    /// With `f = r + n`, `n` nilpotent: `f⁻¹ = r⁻¹ Σ_k (−r⁻¹ n)^k`, a finite sum.
    pub fn invert_even(&self) -> Result<SuperPoly> {
        if !self.is_even() {
            return Err(Error::Parity(format!("invert_even of non-even element {self}")));
        }
        let r = self.reduced_part();
        let r_inv = r.invert_unit_monomial()?;
        let n = self - &r;
        if n.is_zero() {
            return Ok(r_inv);
        }
        let step = -(&r_inv * &n);
        let mut term = SuperPoly::one(&self.ring);
        let mut sum = SuperPoly::one(&self.ring);
        loop {
            term = &term * &step;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(&r_inv * &sum)
    }

    fn invert_unit_monomial(&self) -> Result<SuperPoly> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(format!("reduced part {self} is not a unit monomial")));
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let mut inv = Monomial::one(self.ring.n_even());
        for (i, &e) in m.even.iter().enumerate() {
            if e != 0 && !self.ring.is_invertible(i) {
                return Err(Error::NotInvertible(format!(
                    "reduced part {self} involves non-invertible generator {}",
                    self.ring.even_names()[i]
                )));
            }
            inv.even[i] = -e;
        }
        Ok(SuperPoly::from_term(&self.ring, inv, c.recip()))
    }

    pub fn is_unit(&self) -> bool {
        self.is_even() && self.reduced_part().invert_unit_monomial().is_ok()
    }

    /// Re-home into a ring with the same generators that inverts at least as
    /// much (or truncates harder).
    pub fn in_ring(&self, target: &Ring) -> Result<SuperPoly> {
        if same_ring(&self.ring, target) {
            return Ok(self.clone());
        }
        if !self.ring.same_gens(target) {
            return Err(Error::RingMismatch(format!("cannot move {} into {}", self.ring, target)));
        }
        let mut out = SuperPoly::zero(target);
        for (m, c) in &self.terms {
            for (i, &e) in m.even.iter().enumerate() {
                if e < 0 && !target.is_invertible(i) {
                    return Err(Error::RingMismatch(format!(
                        "{} is not invertible in {}",
                        target.even_names()[i],
                        target
                    )));
                }
            }
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    /// Evaluate the reduced part at a rational point of the even generators.
    pub fn eval_reduced(&self, point: &[Q]) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            if !m.is_reduced() {
                continue;
            }
            let mut t = c.clone();
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if point[i].is_zero() && e < 0 {
                    return None;
                }
                let p = num_traits::pow::pow(point[i].clone(), e.unsigned_abs() as usize);
                t = if e > 0 { t * p } else { t / p };
            }
            acc += t;
        }
        Some(acc)
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Multiply by `θ_i` on the left.
    pub fn odd_gen_mul_left(&self, i: usize) -> SuperPoly {
        let g = SuperPoly::odd_gen(&self.ring, i);
        &g * self
    }
}

impl fmt::Display for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (i, &e) in m.even.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.ring.even_names()[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ring.even_names()[i], e)),
                }
            }
            for i in m.odd.indices() {
                factors.push(self.ring.odd_names()[i].clone());
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SuperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl std::ops::$tr<&SuperPoly> for &SuperPoly {
            type Output = SuperPoly;
            fn $m(self, rhs: &SuperPoly) -> SuperPoly {
                self.$inner(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<SuperPoly> for SuperPoly {
            type Output = SuperPoly;
            fn $m(self, rhs: SuperPoly) -> SuperPoly {
                (&self).$inner(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<&SuperPoly> for SuperPoly {
            type Output = SuperPoly;
            fn $m(self, rhs: &SuperPoly) -> SuperPoly {
                (&self).$inner(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl std::ops::Neg for &SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        self.scale(&-Q::one())
    }
}

impl std::ops::Neg for SuperPoly {
    type Output = SuperPoly;
    fn neg(self) -> SuperPoly {
        (&self).neg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use crate::superalgebra::RingDescriptor;

    fn ring() -> Ring {
        RingDescriptor::new(&["x"], &["t1", "t2"], &["x"]).unwrap()
    }

    #[test]
    fn koszul_products() {
        let r = ring();
        let t1 = SuperPoly::var(&r, "t1");
        let t2 = SuperPoly::var(&r, "t2");
        assert_eq!(&t2 * &t1, -(&t1 * &t2));
        assert!((&t1 * &t1).is_zero());
        let one = SuperPoly::one(&r);
        let n = &t1 * &t2;
        assert_eq!((&one + &n) * (&one - &n), one);
        let x = SuperPoly::var(&r, "x");
        let s = &x + &t1;
        assert_eq!(&s * &s, &(&x * &x) + &(&x * &t1).scale_int(2));
    }

    #[test]
    fn invert_even_examples() {
        let r = ring();
        let one = SuperPoly::one(&r);
        let x = SuperPoly::var(&r, "x");
        let n = SuperPoly::var(&r, "t1") * SuperPoly::var(&r, "t2");
        assert_eq!((&one + &n).invert_even().unwrap(), &one - &n);
        let xinv = x.invert_even().unwrap();
        assert_eq!(&xinv * &x, one);
        // (x + t1 t2)^{-1} = x^{-1} - x^{-2} t1 t2
        let f = &x + &n;
        let expect = &xinv - &(&(&xinv * &xinv) * &n);
        assert_eq!(f.invert_even().unwrap(), expect);
        assert_eq!(&f * &expect, one);
        assert!(SuperPoly::var(&r, "t1").invert_even().is_err());
        let p = RingDescriptor::polynomial(&["y"], &[] as &[&str]).unwrap();
        assert!(SuperPoly::var(&p, "y").invert_even().is_err());
        assert_eq!(SuperPoly::constant(&p, qf(2, 3)).invert_even().unwrap(), SuperPoly::constant(&p, qf(3, 2)));
    }

    #[test]
    fn truncated_ring_drops_high_nil_terms() {
        let r = RingDescriptor::polynomial(&["x"], &["a", "b", "c"]).unwrap().truncated(2);
        let a = SuperPoly::var(&r, "a");
        let b = SuperPoly::var(&r, "b");
        assert!((&a * &b).is_zero());
    }

    #[test]
    fn ring_mismatch_is_error() {
        let r1 = ring();
        let r2 = RingDescriptor::polynomial(&["y"], &["s"]).unwrap();
        assert!(SuperPoly::one(&r1).try_mul(&SuperPoly::one(&r2)).is_err());
    }
}
