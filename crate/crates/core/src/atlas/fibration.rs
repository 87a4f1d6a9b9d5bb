//! Affine `A^{0|1}`-fibrations: a fiber coordinate `t` glued by
//! `t_j = a_ij·t_i + ψ_ij`, with `a` a line cocycle and `ψ` an `a`-twisted odd
//! cochain on the base.

use std::collections::BTreeMap;

use super::{Atlas, AtlasKind, Chart, Overlap, QuotientAtlas};
use crate::error::{Error, Result};
use crate::homological::monomials_of_degree;
use crate::linalg::{self, SparseVec};
use crate::rational::q;
use crate::superalgebra::{GenRef, Monomial, Parity, Ring, RingDescriptor, RingHom, SuperPoly};

/// Name of the fiber coordinate in every fibration chart.
pub const FIBER: &str = "t";

/// Transition data over the base overlaps; both maps live in the base
/// overlap rings.
#[derive(Clone, Debug, PartialEq)]
pub struct FibrationData {
    pub line: BTreeMap<(usize, usize), SuperPoly>,
    pub torsor: BTreeMap<(usize, usize), SuperPoly>,
}

impl FibrationData {
    /// The product `X × A^{0|1}`.
    pub fn trivial(x: &Atlas) -> Self {
        let line = x.overlaps().iter().map(|(&k, ov)| (k, SuperPoly::one(&ov.ring))).collect();
        let torsor = x.overlaps().iter().map(|(&k, ov)| (k, SuperPoly::zero(&ov.ring))).collect();
        FibrationData { line, torsor }
    }

    pub fn is_trivial(&self) -> bool {
        self.line.values().all(|a| a.constant_value() == Some(q(1))) && self.torsor.values().all(|p| p.is_zero())
    }
}

fn fiber_index(ring: &Ring) -> Result<usize> {
    match ring.find(FIBER) {
        Some(GenRef::Odd(k)) if k + 1 == ring.n_odd() => Ok(k),
        _ => Err(Error::Gluing(format!("{ring} has no trailing odd fiber coordinate {FIBER}"))),
    }
}

fn base_ring(ring: &Ring) -> Result<Ring> {
    let k = fiber_index(ring)?;
    RingDescriptor::from_parts(
        ring.even_names().to_vec(),
        ring.odd_names()[..k].to_vec(),
        ring.invertible_mask().to_vec(),
        ring.nil_cutoff(),
    )
}

/// Drop the fiber coordinate from a polynomial that does not involve it.
fn push_down(p: &SuperPoly, base: &Ring, t: usize) -> Result<SuperPoly> {
    if p.terms().keys().any(|m| m.odd.contains(t)) {
        return Err(Error::Gluing(format!("{p} involves the fiber coordinate")));
    }
    Ok(SuperPoly::from_terms(base, p.terms().iter().map(|(m, c)| (m.clone(), c.clone()))))
}

/// The base atlas of a fibration (fiber coordinate removed).
pub fn fibration_base(f: &Atlas) -> Result<Atlas> {
    let charts: Vec<Chart> = f
        .charts()
        .iter()
        .map(|c| -> Result<Chart> {
            let ring = base_ring(&c.ring)?;
            let weights = c.weights.as_ref().map(|w| w[..ring.n_gens()].to_vec());
            Ok(Chart { label: c.label.clone(), ring, frame: None, weights })
        })
        .collect::<Result<_>>()?;
    let mut overlaps = BTreeMap::new();
    for (&(i, j), ov) in f.overlaps() {
        let ring = base_ring(&ov.ring)?;
        let t = fiber_index(&ov.ring)?;
        let n = charts[j].ring.n_gens();
        let images = ov.map.images()[..n].iter().map(|p| push_down(p, &ring, t)).collect::<Result<Vec<_>>>()?;
        let map = RingHom::new(&charts[j].ring, &ring, images)?;
        overlaps.insert((i, j), Overlap { pivots: ov.pivots.clone(), ring, map });
    }
    let kind = match &f.kind {
        AtlasKind::Fibration(b) => (**b).clone(),
        _ => AtlasKind::Custom,
    };
    Atlas::new(format!("base({})", f.name), kind, charts, overlaps)
}

/// Read off `(a_ij, ψ_ij)` from `t_j ↦ a_ij·t_i + ψ_ij`.
pub fn classify_fibration(f: &Atlas) -> Result<FibrationData> {
    let mut data = FibrationData { line: BTreeMap::new(), torsor: BTreeMap::new() };
    for (&(i, j), ov) in f.overlaps() {
        let ring = base_ring(&ov.ring)?;
        let t = fiber_index(&ov.ring)?;
        let img = ov.map.images().last().expect("fiber image");
        let mut a = SuperPoly::zero(&ring);
        let mut psi = SuperPoly::zero(&ring);
        for (m, c) in img.terms() {
            if m.odd.contains(t) {
                let rest = m.odd.without(t);
                if rest.len() % 2 == 1 {
                    return Err(Error::Gluing(format!("fiber image {img} on ({i},{j}) is not affine in {FIBER}")));
                }
                // t is the last odd generator, so m = rest·t with no sign
                a.add_term(Monomial { even: m.even.clone(), odd: rest }, c.clone());
            } else {
                psi.add_term(m.clone(), c.clone());
            }
        }
        if !a.is_unit() {
            return Err(Error::Gluing(format!("fiber coefficient {a} on ({i},{j}) is not invertible")));
        }
        for p in &ov.map.images()[..ov.map.images().len() - 1] {
            push_down(p, &ring, t)?;
        }
        data.line.insert((i, j), a);
        data.torsor.insert((i, j), psi);
    }
    Ok(data)
}

/// Glue `X × A^{0|1}` chart-wise along `data`.
pub fn build_fibration(x: &Atlas, data: &FibrationData) -> Result<Atlas> {
    let charts: Vec<Chart> = x
        .charts()
        .iter()
        .map(|c| -> Result<Chart> {
            let ring = c.ring.with_extra_odd(FIBER)?;
            let weights = c.weights.as_ref().map(|w| {
                let mut w = w.clone();
                w.push(vec![0; w.first().map_or(0, |v| v.len())]);
                w
            });
            Ok(Chart { label: c.label.clone(), ring, frame: None, weights })
        })
        .collect::<Result<_>>()?;
    let mut overlaps = BTreeMap::new();
    for (&(i, j), ov) in x.overlaps() {
        let ring = ov.ring.with_extra_odd(FIBER)?;
        let a = data.line.get(&(i, j)).ok_or_else(|| Error::Gluing(format!("no line cocycle on ({i},{j})")))?;
        let psi = data.torsor.get(&(i, j)).ok_or_else(|| Error::Gluing(format!("no torsor cochain on ({i},{j})")))?;
        let embed = |p: &SuperPoly| SuperPoly::from_terms(&ring, p.terms().iter().map(|(m, c)| (m.clone(), c.clone())));
        let t = SuperPoly::odd_gen(&ring, ring.n_odd() - 1);
        let mut images: Vec<SuperPoly> = ov.map.images().iter().map(embed).collect();
        images.push(&(&embed(a) * &t) + &embed(psi));
        let map = RingHom::new(&charts[j].ring, &ring, images)?;
        overlaps.insert((i, j), Overlap { pivots: ov.pivots.clone(), ring, map });
    }
    let f = Atlas::new(format!("{}×A^(0|1)", x.name), AtlasKind::Fibration(Box::new(x.kind.clone())), charts, overlaps)?;
    f.verify()?;
    Ok(f)
}

/// Solutions of `φ_ij(σ_j) = a_ij·σ_i + ψ_ij` with odd polynomial `σ_i` of
/// even degree at most the bound: one particular solution (if any) and a
/// basis of the solutions with `ψ = 0`.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    pub particular: Option<Vec<SuperPoly>>,
    pub homogeneous: Vec<Vec<SuperPoly>>,
}

pub fn section_space(x: &Atlas, data: &FibrationData, bound: usize) -> Result<SectionSpace> {
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    for (c, chart) in x.charts().iter().enumerate() {
        for d in 0..=bound {
            unknowns.extend(monomials_of_degree(&chart.ring, d, Parity::Odd).into_iter().map(|m| (c, m)));
        }
    }
    type Key = (usize, Monomial);
    let mut cols: Vec<SparseVec<Key>> = vec![SparseVec::new(); unknowns.len()];
    let mut rhs: SparseVec<Key> = SparseVec::new();
    for (o, (&(i, j), ov)) in x.overlaps().iter().enumerate() {
        let a = data.line.get(&(i, j)).ok_or_else(|| Error::Gluing(format!("no line cocycle on ({i},{j})")))?;
        let psi = data.torsor.get(&(i, j)).ok_or_else(|| Error::Gluing(format!("no torsor cochain on ({i},{j})")))?;
        for (k, (c, m)) in unknowns.iter().enumerate() {
            let contribution = if *c == j {
                ov.map.apply(&SuperPoly::from_term(&x.chart(j).ring, m.clone(), q(1)))?
            } else if *c == i {
                -(&a.in_ring(&ov.ring)? * &SuperPoly::from_term(&ov.ring, m.clone(), q(1)))
            } else {
                continue;
            };
            for (mm, cc) in contribution.terms() {
                cols[k].insert((o, mm.clone()), cc.clone());
            }
        }
        for (mm, cc) in psi.terms() {
            rhs.insert((o, mm.clone()), cc.clone());
        }
    }
    let to_sections = |sol: &SparseVec<usize>| -> Vec<SuperPoly> {
        let mut sections: Vec<SuperPoly> = x.charts().iter().map(|c| SuperPoly::zero(&c.ring)).collect();
        for (k, c) in sol {
            let (chart, m) = &unknowns[*k];
            sections[*chart].add_term(m.clone(), c.clone());
        }
        sections
    };
    let particular = linalg::solve(&cols, &rhs).map(|s| to_sections(&s));
    let homogeneous = linalg::kernel(&cols).iter().map(to_sections).collect();
    Ok(SectionSpace { particular, homogeneous })
}

/// Search for a global section `t_i = σ_i` with odd polynomial `σ_i` of even
/// degree at most `bound`: `φ_ij(σ_j) = a_ij·σ_i + ψ_ij` on every overlap.
pub fn splitting_solve(x: &Atlas, data: &FibrationData, bound: usize) -> Result<Option<Vec<SuperPoly>>> {
    Ok(section_space(x, data, bound)?.particular)
}

impl QuotientAtlas {
    /// The torsor `X → X/v`: fiber coordinate `θ_i`, so `a_ij = 1` and
    /// `ψ_ij = θ_j − θ_i` written in quotient coordinates.
    pub fn torsor_data(&self) -> Result<FibrationData> {
        let y = self.concrete()?;
        let mut data = FibrationData { line: BTreeMap::new(), torsor: BTreeMap::new() };
        for (&(i, j), ov) in self.base.overlaps() {
            let rw = self.rewriters[i].as_ref().ok_or_else(|| Error::Gluing(format!("chart {i} has no rewriter")))?;
            let diff = &ov.map.apply(&self.charts[j].witness)? - &self.charts[i].witness.in_ring(&ov.ring)?;
            let yring = &y.overlap(i, j).expect("quotient overlap").ring;
            data.line.insert((i, j), SuperPoly::one(yring));
            data.torsor.insert((i, j), rw.rewrite(&diff)?.in_ring(yring)?);
        }
        Ok(data)
    }
}
