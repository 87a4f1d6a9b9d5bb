//! JSON documents for atlases. Field order is alphabetical so serialized
//! output is canonical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Atlas, AtlasKind, Chart, Frame, GlobalField, Overlap};
use crate::homological::FieldDoc;
use crate::error::{Error, Result};
use crate::superalgebra::{poly_to_terms, terms_to_poly, Parity, RingDoc, RingHom, SuperMatrix, TermDoc};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub cells: Vec<(usize, usize)>,
    pub col_odd: Vec<bool>,
    pub entries: Vec<Vec<Vec<TermDoc>>>,
    pub pivot_rows: Vec<usize>,
    pub row_odd: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDoc {
    #[serde(default)]
    pub frame: Option<FrameDoc>,
    pub label: String,
    pub ring: RingDoc,
    #[serde(default)]
    pub weights: Option<Vec<Vec<i64>>>,
}

/// Transition `φ_ij`: `images[k]` is the image of generator `k` (even then
/// odd) of chart `j`, written in the overlap ring of chart `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapDoc {
    pub i: usize,
    pub images: Vec<Vec<TermDoc>>,
    pub j: usize,
    pub pivots: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasDoc {
    pub charts: Vec<ChartDoc>,
    pub kind: AtlasKind,
    pub name: String,
    pub overlaps: Vec<OverlapDoc>,
}

fn odd_flags(p: &[Parity]) -> Vec<bool> {
    p.iter().map(|&q| q == Parity::Odd).collect()
}

fn parities(f: &[bool]) -> Vec<Parity> {
    f.iter().map(|&b| if b { Parity::Odd } else { Parity::Even }).collect()
}

impl AtlasDoc {
    pub fn from_atlas(x: &Atlas) -> Self {
        let charts = x
            .charts()
            .iter()
            .map(|c| ChartDoc {
                frame: c.frame.as_ref().map(|f| FrameDoc {
                    cells: f.cells.clone(),
                    col_odd: odd_flags(f.matrix.col_parities()),
                    entries: f.matrix.rows().iter().map(|r| r.iter().map(poly_to_terms).collect()).collect(),
                    pivot_rows: f.pivot_rows.clone(),
                    row_odd: odd_flags(f.matrix.row_parities()),
                }),
                label: c.label.clone(),
                ring: RingDoc::from_ring(&c.ring),
                weights: c.weights.clone(),
            })
            .collect();
        let overlaps = x
            .overlaps()
            .iter()
            .map(|(&(i, j), ov)| OverlapDoc {
                i,
                images: ov.map.images().iter().map(poly_to_terms).collect(),
                j,
                pivots: ov.pivots.clone(),
            })
            .collect();
        AtlasDoc { charts, kind: x.kind.clone(), name: x.name.clone(), overlaps }
    }

    /// Rebuild and re-verify the gluing.
    pub fn to_atlas(&self) -> Result<Atlas> {
        let charts: Vec<Chart> = self
            .charts
            .iter()
            .map(|c| -> Result<Chart> {
                let ring = c.ring.to_ring()?;
                let frame = match &c.frame {
                    None => None,
                    Some(f) => {
                        let rows = f
                            .entries
                            .iter()
                            .map(|r| r.iter().map(|t| terms_to_poly(&ring, t)).collect::<Result<Vec<_>>>())
                            .collect::<Result<Vec<_>>>()?;
                        let matrix = SuperMatrix::new(&ring, rows, parities(&f.row_odd), parities(&f.col_odd))?;
                        Some(Frame { matrix, pivot_rows: f.pivot_rows.clone(), cells: f.cells.clone() })
                    }
                };
                if let Some(w) = &c.weights {
                    if w.len() != ring.n_gens() {
                        return Err(Error::Dimension(format!("chart {} needs one weight per generator", c.label)));
                    }
                }
                Ok(Chart { label: c.label.clone(), ring, frame, weights: c.weights.clone() })
            })
            .collect::<Result<_>>()?;
        let mut overlaps = BTreeMap::new();
        for o in &self.overlaps {
            let (i, j) = (o.i, o.j);
            if i >= charts.len() || j >= charts.len() {
                return Err(Error::Gluing(format!("overlap ({i},{j}) out of range")));
            }
            if o.pivots.iter().any(|&p| p >= charts[i].ring.n_even()) {
                return Err(Error::Gluing(format!("overlap ({i},{j}) has a bad pivot")));
            }
            let ring = charts[i].ring.with_invertible(&o.pivots);
            let images = o.images.iter().map(|t| terms_to_poly(&ring, t)).collect::<Result<Vec<_>>>()?;
            let map = RingHom::new(&charts[j].ring, &ring, images)?;
            overlaps.insert((i, j), Overlap { pivots: o.pivots.clone(), ring, map });
        }
        let x = Atlas::new(self.name.clone(), self.kind.clone(), charts, overlaps)?;
        x.verify()?;
        Ok(x)
    }
}

/// A global field as one serialized field per chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalFieldDoc {
    pub fields: Vec<FieldDoc>,
}

impl GlobalFieldDoc {
    pub fn from_field(v: &GlobalField) -> Self {
        GlobalFieldDoc { fields: v.fields.iter().map(FieldDoc::from_field).collect() }
    }

    /// Rebuilds the chart fields and checks compatibility with `x`.
    pub fn to_field(&self, x: &Atlas) -> Result<GlobalField> {
        let fields = self.fields.iter().map(FieldDoc::to_field).collect::<Result<Vec<_>>>()?;
        for (f, c) in fields.iter().zip(x.charts()) {
            if !f.ring().same_gens(&c.ring) {
                return Err(Error::RingMismatch(format!("field ring differs from chart {}", c.label)));
            }
        }
        GlobalField::new(x, fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_projective_superspace, build_supergrassmannian};

    #[test]
    fn json_round_trip_is_byte_identical() {
        for x in [build_projective_superspace(2, 1).unwrap(), build_supergrassmannian(1, 1, 2, 2).unwrap()] {
            let doc = AtlasDoc::from_atlas(&x);
            let s = serde_json::to_string(&doc).unwrap();
            let back = serde_json::from_str::<AtlasDoc>(&s).unwrap().to_atlas().unwrap();
            assert!(back.same_gluing(&x));
            assert_eq!(back.charts(), x.charts());
            assert_eq!(serde_json::to_string(&AtlasDoc::from_atlas(&back)).unwrap(), s);
        }
    }

    #[test]
    fn pi_field_round_trips() {
        let x = build_projective_superspace(1, 2).unwrap();
        let v = crate::atlas::pi_action_field(&x, &crate::atlas::standard_pi_symmetry(2)).unwrap();
        let doc = GlobalFieldDoc::from_field(&v);
        let s = serde_json::to_string(&doc).unwrap();
        let back = serde_json::from_str::<GlobalFieldDoc>(&s).unwrap().to_field(&x).unwrap();
        assert_eq!(back.fields, v.fields);
    }

    #[test]
    fn broken_cocycle_is_rejected() {
        let x = build_projective_superspace(2, 0).unwrap();
        let mut doc = AtlasDoc::from_atlas(&x);
        doc.overlaps[0].images[0][0].coeff = "2".into();
        assert!(doc.to_atlas().is_err());
    }
}
