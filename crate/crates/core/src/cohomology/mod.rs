//! Cohomology dimensions: the Bott formula with Künneth products and
//! associated-graded pieces of supergrassmannians, and an independent Čech
//! engine on atlases.

mod bott;
mod cech;
mod symbol;

pub use bott::{bott_dim, bott_table, gr_pieces, h1_vanishing_report, GrRow, H1Report};
pub use cech::{cech_cohomology, CechWindow, SheafKind};
pub use symbol::{Atom, SheafSymbol, Term};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superalgebra::Parity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimEntry {
    pub dim: u64,
    pub stable: bool,
}

/// `(q, parity) ↦ dim H^q(·)^parity`. Absent entries are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<DimRow>", from = "Vec<DimRow>")]
pub struct DimTable {
    pub entries: BTreeMap<(usize, Parity), DimEntry>,
}

/// Flat serialized form of one [`DimTable`] entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRow {
    pub degree: usize,
    pub dim: u64,
    pub parity: Parity,
    pub stable: bool,
}

impl From<DimTable> for Vec<DimRow> {
    fn from(t: DimTable) -> Self {
        t.entries.into_iter().map(|((degree, parity), e)| DimRow { degree, dim: e.dim, parity, stable: e.stable }).collect()
    }
}

impl From<Vec<DimRow>> for DimTable {
    fn from(rows: Vec<DimRow>) -> Self {
        let mut t = DimTable::new();
        for r in rows {
            t.set(r.degree, r.parity, r.dim, r.stable);
        }
        t
    }
}

impl DimTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The table of a point: `H⁰ = ℚ`, even.
    pub fn point() -> Self {
        let mut t = Self::new();
        t.set(0, Parity::Even, 1, true);
        t
    }

    pub fn set(&mut self, q: usize, p: Parity, dim: u64, stable: bool) {
        if dim == 0 && stable {
            self.entries.remove(&(q, p));
        } else {
            self.entries.insert((q, p), DimEntry { dim, stable });
        }
    }

    pub fn dim(&self, q: usize, p: Parity) -> u64 {
        self.entries.get(&(q, p)).map_or(0, |e| e.dim)
    }

    /// Both parities together.
    pub fn total(&self, q: usize) -> u64 {
        self.dim(q, Parity::Even) + self.dim(q, Parity::Odd)
    }

    pub fn is_stable(&self) -> bool {
        self.entries.values().all(|e| e.stable)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.keys().map(|(q, _)| *q).max()
    }

    /// `Σ (−1)^q dim H^q`, per parity.
    pub fn euler_characteristic(&self, p: Parity) -> i64 {
        self.entries.iter().filter(|((_, pp), _)| *pp == p).map(|((q, _), e)| if q % 2 == 0 { e.dim as i64 } else { -(e.dim as i64) }).sum()
    }

    pub fn add(&self, other: &DimTable) -> DimTable {
        let mut out = self.clone();
        for (&(q, p), e) in &other.entries {
            let cur = out.entries.get(&(q, p)).copied().unwrap_or(DimEntry { dim: 0, stable: true });
            out.set(q, p, cur.dim + e.dim, cur.stable && e.stable);
        }
        out
    }

    pub fn parity_shift(&self) -> DimTable {
        DimTable { entries: self.entries.iter().map(|(&(q, p), e)| ((q, p.flip()), *e)).collect() }
    }
}

impl fmt::Display for DimTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>3}  {:>8}  {:>8}", "q", "even", "odd")?;
        let top = self.max_degree().unwrap_or(0);
        for q in 0..=top {
            let cell = |p: Parity| match self.entries.get(&(q, p)) {
                None => "0".to_string(),
                Some(e) if e.stable => e.dim.to_string(),
                Some(e) => format!("{}?", e.dim),
            };
            writeln!(f, "{q:>3}  {:>8}  {:>8}", cell(Parity::Even), cell(Parity::Odd))?;
        }
        Ok(())
    }
}

/// Cohomology of an external product: `H^q = ⊕_{a+b=q} H^a ⊗ H^b`, parities
/// adding.
pub fn kunneth(a: &DimTable, b: &DimTable) -> Result<DimTable> {
    if !a.is_stable() || !b.is_stable() {
        return Err(Error::Inconsistent("Künneth needs fully stable tables".into()));
    }
    let mut out = DimTable::new();
    for (&(qa, pa), ea) in &a.entries {
        for (&(qb, pb), eb) in &b.entries {
            let (q, p) = (qa + qb, pa.add(pb));
            let cur = out.dim(q, p);
            out.set(q, p, cur + ea.dim * eb.dim, true);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_round_trip_through_json() {
        let mut t = bott_table(2, 1, 0);
        t.set(3, Parity::Odd, 4, false);
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<DimTable>(&text).unwrap(), t);
    }

    #[test]
    fn point_is_kunneth_unit() {
        let t = bott_table(2, 1, 0);
        assert_eq!(kunneth(&t, &DimTable::point()).unwrap(), t);
        assert_eq!(kunneth(&DimTable::point(), &t).unwrap(), t);
    }

    #[test]
    fn p1_times_p1_examples() {
        let h = kunneth(&bott_table(1, 0, -2), &bott_table(1, 0, 0)).unwrap();
        assert_eq!(h.dim(1, Parity::Even), 1);
        let h = kunneth(&bott_table(1, 0, -1), &bott_table(1, 0, -1)).unwrap();
        assert_eq!(h.total(1), 0);
    }

    #[test]
    fn unstable_tables_are_refused() {
        let mut t = DimTable::point();
        t.set(1, Parity::Odd, 1, false);
        assert!(kunneth(&t, &DimTable::point()).is_err());
    }
}
