//! Superschemes glued from affine charts.
//!
//! Transition `φ_ij` sends the generators of chart `j` into the overlap ring
//! stored with chart `i`: chart `i`'s ring with its pivot generators declared
//! invertible. The cocycle condition reads `φ_ik = φ_ij ∘ φ_jk`.

mod builders;
mod cy;
mod doc;
mod fibration;
mod iso;
mod pifield;
mod quotient;

pub use builders::{build_projective_superspace, build_supergrassmannian, product, product_fields};
pub use cy::{build_cy_truncation, truncate_atlas};
pub use doc::{AtlasDoc, ChartDoc, FrameDoc, GlobalFieldDoc, OverlapDoc};
pub use fibration::{build_fibration, classify_fibration, fibration_base, section_space, splitting_solve, SectionSpace, FibrationData, FIBER};
pub use iso::{iso_check, IsoResult};
pub use pifield::{pi_action_field, standard_pi_symmetry};
pub use quotient::{quotient_atlas, QuotientAtlas, QuotientChart, Rewriter};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homological::{freeness, Freeness, HomologicalField};
use crate::superalgebra::{Ring, RingHom, SuperMatrix, SuperPoly};

/// How an atlas was produced; line-bundle and cohomology code dispatch on it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtlasKind {
    Projective { m: usize, n: usize },
    Grassmannian { a: usize, b: usize, m: usize, n: usize },
    Product(Box<AtlasKind>, Box<AtlasKind>),
    Quotient(Box<AtlasKind>),
    Truncation { base: Box<AtlasKind>, k: usize },
    CyTruncation { n: usize },
    Fibration(Box<AtlasKind>),
    Custom,
}

/// The tautological frame of a graph chart: the matrix `[I; F]` together with
/// the rows holding the identity block and, for every ring generator (even
/// then odd), the cell of `F` it occupies.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub matrix: SuperMatrix,
    pub pivot_rows: Vec<usize>,
    pub cells: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub label: String,
    pub ring: Ring,
    pub frame: Option<Frame>,
    /// Torus weight of every generator (even then odd), when the chart comes
    /// from a homogeneous space.
    pub weights: Option<Vec<Vec<i64>>>,
}

impl Chart {
    pub fn plain(label: impl Into<String>, ring: Ring) -> Self {
        Chart { label: label.into(), ring, frame: None, weights: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Overlap {
    /// Even generators of chart `i` inverted on the overlap.
    pub pivots: Vec<usize>,
    pub ring: Ring,
    /// `φ_ij`: chart `j` → overlap ring.
    pub map: RingHom,
}

#[derive(Clone, Debug)]
pub struct Atlas {
    pub name: String,
    pub kind: AtlasKind,
    charts: Vec<Chart>,
    overlaps: BTreeMap<(usize, usize), Overlap>,
}

/// Counts of the gluing identities that were checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GluingReport {
    pub pairs: usize,
    pub triples: usize,
    pub triples_skipped: usize,
}

impl Atlas {
    pub fn new(
        name: impl Into<String>,
        kind: AtlasKind,
        charts: Vec<Chart>,
        overlaps: BTreeMap<(usize, usize), Overlap>,
    ) -> Result<Self> {
        for (&(i, j), ov) in &overlaps {
            if i >= charts.len() || j >= charts.len() || i == j {
                return Err(Error::Gluing(format!("overlap ({i},{j}) out of range")));
            }
            if !ov.ring.same_gens(&charts[i].ring) || !ov.map.source().same_gens(&charts[j].ring) {
                return Err(Error::Gluing(format!("overlap ({i},{j}) has the wrong rings")));
            }
        }
        Ok(Atlas { name: name.into(), kind, charts, overlaps })
    }

    pub fn n_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> &Chart {
        &self.charts[i]
    }

    pub fn overlap(&self, i: usize, j: usize) -> Option<&Overlap> {
        self.overlaps.get(&(i, j))
    }

    pub fn overlaps(&self) -> &BTreeMap<(usize, usize), Overlap> {
        &self.overlaps
    }

    /// Ring of `U_{i0} ∩ ⋂ U_k` in chart `i0`'s coordinates, if every pair
    /// `(i0, k)` is stored.
    pub fn multi_overlap_ring(&self, i0: usize, others: &[usize]) -> Option<Ring> {
        let mut pivots = Vec::new();
        for &k in others {
            if k == i0 {
                continue;
            }
            pivots.extend(self.overlaps.get(&(i0, k))?.pivots.iter().copied());
        }
        Some(self.charts[i0].ring.with_invertible(&pivots))
    }

    /// `φ_{i0 j}` with its target widened to `ring` (`φ_ii` is the identity).
    pub fn transition_into(&self, i0: usize, j: usize, ring: &Ring) -> Result<RingHom> {
        if i0 == j {
            return RingHom::identity(&self.charts[i0].ring).retarget(ring);
        }
        self.overlaps
            .get(&(i0, j))
            .ok_or_else(|| Error::Gluing(format!("no overlap ({i0},{j})")))?
            .map
            .retarget(ring)
    }

    /// Check `φ_ij ∘ φ_ji = id` and `φ_ik = φ_ij ∘ φ_jk` wherever the data
    /// allow it. Triples where an intermediate pivot does not stay a unit in
    /// chart `i`'s Laurent ring are counted as skipped.
    pub fn verify(&self) -> Result<GluingReport> {
        let mut report = GluingReport::default();
        for (&(i, j), ov) in &self.overlaps {
            let back = self
                .overlaps
                .get(&(j, i))
                .ok_or_else(|| Error::Gluing(format!("overlap ({i},{j}) has no reverse")))?;
            let round = back.map.then(&ov.map)?;
            let id = RingHom::identity(&self.charts[i].ring).retarget(&ov.ring)?;
            if round != id {
                return Err(Error::Gluing(format!("φ_{i}{j} ∘ φ_{j}{i} is not the identity")));
            }
            report.pairs += 1;
        }
        let n = self.charts.len();
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
            .filter(|&(i, j, k)| i != j && j != k && i != k)
            .filter(|&(i, j, k)| {
                self.overlaps.contains_key(&(i, j))
                    && self.overlaps.contains_key(&(j, k))
                    && self.overlaps.contains_key(&(i, k))
            })
            .collect();
        let results: Vec<Result<bool>> = triples
            .par_iter()
            .map(|&(i, j, k)| {
                let ring = self.multi_overlap_ring(i, &[j, k]).expect("stored overlaps");
                let phi_ij = self.transition_into(i, j, &ring)?;
                let phi_ik = self.transition_into(i, k, &ring)?;
                match self.overlaps[&(j, k)].map.then(&phi_ij) {
                    Ok(comp) if comp == phi_ik => Ok(true),
                    Ok(_) => Err(Error::Gluing(format!("cocycle condition fails on ({i},{j},{k})"))),
                    Err(Error::NotInvertible(_)) => Ok(false),
                    Err(e) => Err(e),
                }
            })
            .collect();
        for r in results {
            if r? {
                report.triples += 1;
            } else {
                report.triples_skipped += 1;
            }
        }
        Ok(report)
    }

    /// Reduced dimension `(even, odd)` of the first chart.
    pub fn dimension(&self) -> (usize, usize) {
        self.charts.first().map_or((0, 0), |c| (c.ring.n_even(), c.ring.n_odd()))
    }
}

/// One homological field per chart, compatible with the transitions.
#[derive(Clone, Debug)]
pub struct GlobalField {
    pub fields: Vec<HomologicalField>,
}

impl GlobalField {
    pub fn new(atlas: &Atlas, fields: Vec<HomologicalField>) -> Result<Self> {
        let g = GlobalField { fields };
        g.check_compatible(atlas)?;
        Ok(g)
    }

    /// `φ_ij(v_j(g)) = v_i(φ_ij(g))` for every generator `g` of chart `j`.
    pub fn check_compatible(&self, atlas: &Atlas) -> Result<()> {
        if self.fields.len() != atlas.n_charts() {
            return Err(Error::Dimension("one field per chart required".into()));
        }
        let bad: Vec<String> = atlas
            .overlaps
            .par_iter()
            .map(|(&(i, j), ov)| -> Result<Option<String>> {
                let vi = &self.fields[i];
                let vj = &self.fields[j];
                for (k, g) in atlas.charts[j].ring.gens().enumerate() {
                    let lhs = ov.map.apply(vj.image(g))?;
                    let rhs = vi.derive(&ov.map.images()[k])?;
                    if lhs != rhs {
                        return Ok(Some(format!(
                            "overlap ({i},{j}), generator {}: {lhs} ≠ {rhs}",
                            atlas.charts[j].ring.gen_name(g)
                        )));
                    }
                }
                Ok(None)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        match bad.first() {
            None => Ok(()),
            Some(msg) => Err(Error::Gluing(format!("field not compatible: {msg}"))),
        }
    }

    /// Sum of two fields chart by chart.
    pub fn add(&self, other: &GlobalField) -> Result<GlobalField> {
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| HomologicalField::new(a.derivation().add(b.derivation())?))
            .collect::<Result<Vec<_>>>()?;
        Ok(GlobalField { fields })
    }
}

/// Result of a chart-by-chart freeness run.
#[derive(Clone, Debug, PartialEq)]
pub enum GlobalFreeness {
    Free { witnesses: Vec<SuperPoly> },
    NotFree { chart: usize, point: Vec<crate::Q> },
    Undecided { chart: usize, bound: usize },
}

/// Freeness is local: run the chart test everywhere (in parallel).
pub fn global_freeness(atlas: &Atlas, v: &GlobalField, bound: usize) -> Result<GlobalFreeness> {
    let per_chart: Vec<Freeness> =
        (0..atlas.n_charts()).into_par_iter().map(|i| freeness(&v.fields[i], bound)).collect::<Result<_>>()?;
    let mut witnesses = Vec::new();
    let mut undecided = None;
    for (i, f) in per_chart.into_iter().enumerate() {
        match f {
            Freeness::Free { witness } => witnesses.push(witness),
            Freeness::NotFree { point } => return Ok(GlobalFreeness::NotFree { chart: i, point }),
            Freeness::Undecided { bound } => {
                undecided.get_or_insert(GlobalFreeness::Undecided { chart: i, bound });
            }
        }
    }
    Ok(undecided.unwrap_or(GlobalFreeness::Free { witnesses }))
}
