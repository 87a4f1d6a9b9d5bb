use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_ODD: usize = 64;

/// Immutable description of a free supercommutative Laurent ring over ℚ,
/// optionally truncated modulo `N^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingDescriptor {
    even: Vec<String>,
    odd: Vec<String>,
    invertible: Vec<bool>,
    nil_cutoff: Option<usize>,
}

pub type Ring = Arc<RingDescriptor>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenRef {
    Even(usize),
    Odd(usize),
}

impl RingDescriptor {
    pub fn new<S: AsRef<str>>(even: &[S], odd: &[S], invertible: &[S]) -> Result<Ring> {
        let even: Vec<String> = even.iter().map(|s| s.as_ref().to_string()).collect();
        let odd: Vec<String> = odd.iter().map(|s| s.as_ref().to_string()).collect();
        let mut inv = vec![false; even.len()];
        for name in invertible {
            let name = name.as_ref();
            match even.iter().position(|e| e == name) {
                Some(i) => inv[i] = true,
                None => {
                    return Err(Error::InvalidRing(format!(
                        "invertible generator {name:?} is not an even generator"
                    )))
                }
            }
        }
        Self::from_parts(even, odd, inv, None)
    }

    pub fn polynomial<S: AsRef<str>>(even: &[S], odd: &[S]) -> Result<Ring> {
        let even: Vec<String> = even.iter().map(|s| s.as_ref().to_string()).collect();
        let odd: Vec<String> = odd.iter().map(|s| s.as_ref().to_string()).collect();
        let inv = vec![false; even.len()];
        Self::from_parts(even, odd, inv, None)
    }

    pub fn from_parts(
        even: Vec<String>,
        odd: Vec<String>,
        invertible: Vec<bool>,
        nil_cutoff: Option<usize>,
    ) -> Result<Ring> {
        if invertible.len() != even.len() {
            return Err(Error::InvalidRing("invertible mask length".into()));
        }
        if odd.len() > MAX_ODD {
            return Err(Error::InvalidRing(format!("at most {MAX_ODD} odd generators")));
        }
        let mut seen = HashSet::new();
        for n in even.iter().chain(odd.iter()) {
            if n.is_empty() {
                return Err(Error::InvalidRing("empty generator name".into()));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidRing(format!("duplicate generator name {n:?}")));
            }
        }
        if nil_cutoff == Some(0) {
            return Err(Error::InvalidRing("truncation order must be at least 1".into()));
        }
        Ok(Arc::new(RingDescriptor { even, odd, invertible, nil_cutoff }))
    }

    pub fn even_names(&self) -> &[String] {
        &self.even
    }

    pub fn odd_names(&self) -> &[String] {
        &self.odd
    }

    pub fn n_even(&self) -> usize {
        self.even.len()
    }

    pub fn n_odd(&self) -> usize {
        self.odd.len()
    }

    pub fn n_gens(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn invertible_mask(&self) -> &[bool] {
        &self.invertible
    }

    pub fn nil_cutoff(&self) -> Option<usize> {
        self.nil_cutoff
    }

    pub fn is_laurent(&self) -> bool {
        self.invertible.iter().any(|b| *b)
    }

    pub fn find(&self, name: &str) -> Option<GenRef> {
        if let Some(i) = self.even.iter().position(|e| e == name) {
            return Some(GenRef::Even(i));
        }
        self.odd.iter().position(|e| e == name).map(GenRef::Odd)
    }

    pub fn gen_name(&self, g: GenRef) -> &str {
        match g {
            GenRef::Even(i) => &self.even[i],
            GenRef::Odd(i) => &self.odd[i],
        }
    }

    /// Generators in the canonical order: even first, then odd.
    pub fn gens(&self) -> impl Iterator<Item = GenRef> + '_ {
        (0..self.even.len()).map(GenRef::Even).chain((0..self.odd.len()).map(GenRef::Odd))
    }

    /// Same generator names in the same order.
    pub fn same_gens(&self, other: &RingDescriptor) -> bool {
        self.even == other.even && self.odd == other.odd
    }

    /// True when every element of `self` is also an element of `other`:
    /// same generators, `other` inverts at least what `self` inverts and
    /// truncates no more strongly.
    pub fn embeds_into(&self, other: &RingDescriptor) -> bool {
        self.same_gens(other)
            && self.invertible.iter().zip(&other.invertible).all(|(a, b)| !*a || *b)
            && match (self.nil_cutoff, other.nil_cutoff) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => b <= a,
            }
    }

    pub fn with_invertible(&self, extra: &[usize]) -> Ring {
        let mut d = self.clone();
        for &i in extra {
            d.invertible[i] = true;
        }
        Arc::new(d)
    }

    pub fn with_invertible_mask(&self, mask: &[bool]) -> Ring {
        let mut d = self.clone();
        for (i, &b) in mask.iter().enumerate() {
            if b {
                d.invertible[i] = true;
            }
        }
        Arc::new(d)
    }

    pub fn without_invertible(&self) -> Ring {
        let mut d = self.clone();
        d.invertible.iter_mut().for_each(|b| *b = false);
        Arc::new(d)
    }

    /// Quotient by `N^k`. For `k = 1` every odd generator vanishes, so the odd
    /// generators are dropped altogether.
    pub fn truncated(&self, k: usize) -> Ring {
        let mut d = self.clone();
        if k <= 1 {
            d.odd.clear();
            d.nil_cutoff = None;
        } else {
            d.nil_cutoff = Some(d.nil_cutoff.map_or(k, |c| c.min(k)));
            if k > d.odd.len() {
                d.nil_cutoff = None;
            }
        }
        Arc::new(d)
    }

    pub fn with_cutoff(&self, cutoff: Option<usize>) -> Ring {
        let mut d = self.clone();
        d.nil_cutoff = cutoff;
        Arc::new(d)
    }

    /// Rename every generator by appending `suffix`.
    pub fn suffixed(&self, suffix: &str) -> Ring {
        let mut d = self.clone();
        d.even.iter_mut().for_each(|n| n.push_str(suffix));
        d.odd.iter_mut().for_each(|n| n.push_str(suffix));
        Arc::new(d)
    }

    /// Ring whose generators are those of `a` followed by those of `b`.
    pub fn tensor(a: &RingDescriptor, b: &RingDescriptor) -> Result<Ring> {
        let even = a.even.iter().chain(&b.even).cloned().collect();
        let odd = a.odd.iter().chain(&b.odd).cloned().collect();
        let inv = a.invertible.iter().chain(&b.invertible).copied().collect();
        let cutoff = match (a.nil_cutoff, b.nil_cutoff) {
            (None, None) => None,
            _ => return Err(Error::Unsupported("tensor product of truncated rings".into())),
        };
        Self::from_parts(even, odd, inv, cutoff)
    }

    /// Ring with one extra odd generator appended.
    pub fn with_extra_odd(&self, name: &str) -> Result<Ring> {
        let mut odd = self.odd.clone();
        odd.push(name.to_string());
        Self::from_parts(self.even.clone(), odd, self.invertible.clone(), self.nil_cutoff)
    }
}

impl std::fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ev: Vec<String> = self
            .even
            .iter()
            .zip(&self.invertible)
            .map(|(n, i)| if *i { format!("{n}^±") } else { n.clone() })
            .collect();
        write!(f, "Q[{} | {}]", ev.join(","), self.odd.join(","))?;
        if let Some(k) = self.nil_cutoff {
            write!(f, "/N^{k}")?;
        }
        Ok(())
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
