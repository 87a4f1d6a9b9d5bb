use std::fmt;

use serde::{Deserialize, Serialize};

use super::{bott_table, kunneth, DimTable};
use crate::error::{Error, Result};

/// `Ω^j(m)` on `Pⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub n: usize,
    pub j: usize,
    pub m: i64,
}

impl Atom {
    pub fn structure(n: usize, m: i64) -> Self {
        Atom { n, j: 0, m }
    }

    pub fn table(&self) -> DimTable {
        bott_table(self.n, self.j, self.m)
    }

    /// Top forms rewritten as `O(d)`.
    pub fn canonical(&self) -> Atom {
        match self.line_degree() {
            Some(d) => Atom::structure(self.n, d),
            None => *self,
        }
    }

    fn is_line(&self) -> bool {
        self.j == 0 || self.j == self.n
    }

    /// As `O(d)` when the atom has rank one.
    fn line_degree(&self) -> Option<i64> {
        match self.j {
            0 => Some(self.m),
            j if j == self.n => Some(self.m - self.n as i64 - 1),
            _ => None,
        }
    }

    fn tensor(&self, other: &Atom) -> Result<Atom> {
        if self.n != other.n {
            return Err(Error::Dimension("tensor of atoms on different spaces".into()));
        }
        let unit = Atom::structure(self.n, 0);
        if *self == unit {
            return Ok(*other);
        }
        match (other.line_degree(), self.line_degree()) {
            (Some(d), _) => Ok(Atom { m: self.m + d, ..*self }),
            (_, Some(d)) => Ok(Atom { m: other.m + d, ..*other }),
            _ => Err(Error::Unsupported(format!("{self} ⊗ {other} has rank above one in both factors"))),
        }
    }

    /// `Λ^i`, or `None` for the zero sheaf.
    fn wedge(&self, i: usize) -> Result<Option<Atom>> {
        if i == 0 {
            return Ok(Some(Atom::structure(self.n, 0)));
        }
        if self.is_line() {
            return Ok((i == 1).then_some(*self));
        }
        if self.j == 1 {
            return Ok((i <= self.n).then(|| Atom { n: self.n, j: i, m: self.m * i as i64 }));
        }
        Err(Error::Unsupported(format!("Λ^{i} of {self}")))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.j {
            0 => write!(f, "O({})", self.m),
            j => write!(f, "Ω{}({})", j, self.m),
        }
        .and_then(|_| write!(f, "[P{}]", self.n))
    }
}

/// An external product of atoms, possibly parity shifted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub factors: Vec<Atom>,
    pub shifted: bool,
}

impl Term {
    pub fn table(&self) -> Result<DimTable> {
        let mut t = DimTable::point();
        for a in &self.factors {
            t = kunneth(&t, &a.table())?;
        }
        Ok(if self.shifted { t.parity_shift() } else { t })
    }

    fn tensor(&self, other: &Term) -> Result<Term> {
        if self.factors.len() != other.factors.len() {
            return Err(Error::Dimension("tensor of terms over different products".into()));
        }
        let factors = self.factors.iter().zip(&other.factors).map(|(a, b)| a.tensor(b)).collect::<Result<_>>()?;
        Ok(Term { factors, shifted: self.shifted ^ other.shifted })
    }

    /// `Λ^i` of an external product with at most one factor of rank above one.
    fn wedge(&self, i: usize) -> Result<Option<Term>> {
        if self.shifted {
            return Err(Error::Unsupported("exterior powers of parity-shifted terms".into()));
        }
        let wide = self.factors.iter().filter(|a| !a.is_line()).count();
        if wide > 1 {
            return Err(Error::Unsupported("Λ of a product with two wide factors".into()));
        }
        if wide == 0 {
            return Ok(match i {
                0 => Some(Term { factors: self.factors.iter().map(|a| Atom::structure(a.n, 0)).collect(), shifted: false }),
                1 => Some(self.clone()),
                _ => None,
            });
        }
        let mut factors = Vec::with_capacity(self.factors.len());
        for a in &self.factors {
            if a.is_line() {
                let d = a.line_degree().expect("line") * i as i64;
                factors.push(Atom::structure(a.n, d));
            } else {
                match a.wedge(i)? {
                    Some(w) => factors.push(w),
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(Term { factors, shifted: false }))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shifted {
            write!(f, "Π")?;
        }
        let parts: Vec<String> = self.factors.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join("⊠"))
    }
}

/// Formal sheaf expressions over `Ω^j(m)` atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheafSymbol {
    Atom(Atom),
    Sum(Vec<SheafSymbol>),
    Boxtimes(Box<SheafSymbol>, Box<SheafSymbol>),
    Wedge(usize, Box<SheafSymbol>),
    Pi(Box<SheafSymbol>),
}

impl SheafSymbol {
    /// Direct sum of external products of atoms.
    pub fn expand(&self) -> Result<Vec<Term>> {
        Ok(match self {
            SheafSymbol::Atom(a) => vec![Term { factors: vec![*a], shifted: false }],
            SheafSymbol::Sum(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.expand()?);
                }
                out
            }
            SheafSymbol::Boxtimes(a, b) => {
                let (xs, ys) = (a.expand()?, b.expand()?);
                let mut out = Vec::new();
                for x in &xs {
                    for y in &ys {
                        let mut factors = x.factors.clone();
                        factors.extend(y.factors.iter().copied());
                        out.push(Term { factors, shifted: x.shifted ^ y.shifted });
                    }
                }
                out
            }
            SheafSymbol::Pi(a) => a.expand()?.into_iter().map(|t| Term { shifted: !t.shifted, ..t }).collect(),
            SheafSymbol::Wedge(k, a) => {
                let terms = a.expand()?;
                let mut out = Vec::new();
                wedge_sum(&terms, *k, None, &mut out)?;
                out
            }
        })
    }

    pub fn table(&self) -> Result<DimTable> {
        let mut t = DimTable::new();
        for term in self.expand()? {
            t = t.add(&term.table()?);
        }
        Ok(t)
    }
}

/// `Λ^k(T₁ ⊕ … ⊕ T_r) = ⊕ Λ^{k₁}T₁ ⊗ … ⊗ Λ^{k_r}T_r`.
fn wedge_sum(terms: &[Term], k: usize, acc: Option<Term>, out: &mut Vec<Term>) -> Result<()> {
    let Some((first, rest)) = terms.split_first() else {
        if k == 0 {
            if let Some(t) = acc {
                out.push(t);
            }
        }
        return Ok(());
    };
    for i in 0..=k {
        let Some(w) = first.wedge(i)? else { continue };
        let next = match &acc {
            None => w,
            Some(a) => a.tensor(&w)?,
        };
        wedge_sum(rest, k - i, Some(next), out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::gr_pieces;

    fn gr_symbol(n: usize, k: usize) -> SheafSymbol {
        let b = n - 1;
        let left = SheafSymbol::Boxtimes(
            Box::new(SheafSymbol::Atom(Atom::structure(b, -1))),
            Box::new(SheafSymbol::Atom(Atom { n: b, j: 1, m: 1 })),
        );
        let right = SheafSymbol::Boxtimes(
            Box::new(SheafSymbol::Atom(Atom { n: b, j: 1, m: 1 })),
            Box::new(SheafSymbol::Atom(Atom::structure(b, -1))),
        );
        SheafSymbol::Wedge(k, Box::new(SheafSymbol::Sum(vec![left, right])))
    }

    #[test]
    fn wedge_of_tangent_pieces_matches_gr() {
        for n in 2..=4 {
            for k in 0..=2 * (n - 1) {
                let canon = |ts: Vec<Term>| -> Vec<Vec<Atom>> {
                    ts.into_iter().map(|t| t.factors.iter().map(Atom::canonical).collect()).collect()
                };
                let mut a = canon(gr_symbol(n, k).expand().unwrap());
                let mut b = canon(gr_pieces(n, k));
                a.sort();
                b.sort();
                assert_eq!(a, b, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn parity_shift_flips_table() {
        let s = SheafSymbol::Pi(Box::new(SheafSymbol::Atom(Atom::structure(1, 0))));
        assert_eq!(s.table().unwrap().dim(0, crate::Parity::Odd), 1);
    }
}
