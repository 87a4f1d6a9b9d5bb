//! Serializable documents for rings and polynomials.
//!
//! Struct fields are declared in alphabetical order, so `serde_json` emits
//! keys in canonical order and the output is byte-deterministic.

use serde::{Deserialize, Serialize};

use super::monomial::{Monomial, OddSet};
use super::poly::SuperPoly;
use super::ring::{Ring, RingDescriptor};
use crate::error::{Error, Result};
use crate::rational::{from_text, to_text};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDoc {
    pub even: Vec<String>,
    pub invertible: Vec<String>,
    #[serde(default)]
    pub nil_cutoff: Option<usize>,
    pub odd: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub even: Vec<i32>,
    pub odd: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub ring: RingDoc,
    pub terms: Vec<TermDoc>,
}

impl RingDoc {
    pub fn from_ring(r: &RingDescriptor) -> Self {
        RingDoc {
            even: r.even_names().to_vec(),
            invertible: r
                .even_names()
                .iter()
                .zip(r.invertible_mask())
                .filter(|(_, b)| **b)
                .map(|(n, _)| n.clone())
                .collect(),
            nil_cutoff: r.nil_cutoff(),
            odd: r.odd_names().to_vec(),
        }
    }

    pub fn to_ring(&self) -> Result<Ring> {
        let r = RingDescriptor::new(&self.even, &self.odd, &self.invertible)?;
        Ok(match self.nil_cutoff {
            Some(k) if k <= 1 => return Err(Error::InvalidRing("nil_cutoff must be at least 2".into())),
            c => r.with_cutoff(c),
        })
    }
}

impl TermDoc {
    fn from_term(m: &Monomial, c: &crate::Q) -> Self {
        TermDoc { coeff: to_text(c), even: m.even.clone(), odd: m.odd.indices().collect() }
    }
}

impl PolyDoc {
    pub fn from_poly(p: &SuperPoly) -> Self {
        PolyDoc {
            ring: RingDoc::from_ring(p.ring()),
            terms: p.terms().iter().map(|(m, c)| TermDoc::from_term(m, c)).collect(),
        }
    }

    pub fn to_poly(&self) -> Result<SuperPoly> {
        let ring = self.ring.to_ring()?;
        terms_to_poly(&ring, &self.terms)
    }
}

/// Build an element of `ring` from term documents, validating exponents and
/// odd indices.
pub fn terms_to_poly(ring: &Ring, terms: &[TermDoc]) -> Result<SuperPoly> {
    let mut p = SuperPoly::zero(ring);
    for (k, t) in terms.iter().enumerate() {
        if t.even.len() != ring.n_even() {
            return Err(Error::Parse(format!("term {k}: expected {} even exponents", ring.n_even())));
        }
        for (i, &e) in t.even.iter().enumerate() {
            if e < 0 && !ring.is_invertible(i) {
                return Err(Error::Parse(format!(
                    "term {k}: negative exponent on non-invertible {}",
                    ring.even_names()[i]
                )));
            }
        }
        if let Some(&j) = t.odd.iter().find(|&&j| j >= ring.n_odd()) {
            return Err(Error::Parse(format!("term {k}: odd index {j} out of range")));
        }
        let (odd, sign) = OddSet::from_indices(&t.odd)
            .ok_or_else(|| Error::Parse(format!("term {k}: repeated odd index")))?;
        let c = from_text(&t.coeff)?;
        let c = if sign > 0 { c } else { -c };
        p.add_term(Monomial { even: t.even.clone(), odd }, c);
    }
    Ok(p)
}

pub fn poly_to_terms(p: &SuperPoly) -> Vec<TermDoc> {
    p.terms().iter().map(|(m, c)| TermDoc::from_term(m, c)).collect()
}
