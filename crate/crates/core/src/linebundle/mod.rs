//! Even line bundles as Čech cocycles, v-connections and their curvature,
//! descent along free quotients, and the supergroup `GQ(1)`.
//!
//! Conventions: `g_ij` lives in the overlap ring of chart `i` and local
//! expressions of sections transform as `s_j = g_ij·s_i`, so `O(k)` on
//! projective space has `g_ij = u_j^{-k}`. Connection forms transform as
//! `φ_j = φ_i + v(g_ij)·g_ij⁻¹` and the curvature is `c_i = v(φ_i)`.

mod connection;
mod gq1;

pub use connection::{
    connection_solve, curvature, flat_descend, tensor_connections, ConnectionResult, Curvature, Descent, VConnection,
};
pub use gq1::{gq1_cocycle, gq1_mul, gq1_project, Gq1Element};

use std::collections::BTreeMap;

use crate::atlas::{Atlas, AtlasKind};
use crate::error::{Error, Result};
use crate::superalgebra::{poly_to_terms, terms_to_poly, Monomial, OddSet, Ring, SuperPoly, TermDoc};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct LineCocycle {
    pub transitions: BTreeMap<(usize, usize), SuperPoly>,
}

impl LineCocycle {
    /// Validate `g_ij` against the atlas: units of the right overlap ring,
    /// `g_ij·φ_ij(g_ji) = 1` and `g_ik = φ_ij(g_jk)·g_ij` on triples.
    pub fn new(x: &Atlas, transitions: BTreeMap<(usize, usize), SuperPoly>) -> Result<Self> {
        let l = LineCocycle { transitions };
        l.check(x)?;
        Ok(l)
    }

    pub fn trivial(x: &Atlas) -> Self {
        LineCocycle { transitions: x.overlaps().iter().map(|(&k, ov)| (k, SuperPoly::one(&ov.ring))).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&SuperPoly> {
        self.transitions.get(&(i, j))
    }

    pub fn check(&self, x: &Atlas) -> Result<()> {
        for (&(i, j), ov) in x.overlaps() {
            let g = self.transitions.get(&(i, j)).ok_or_else(|| Error::Gluing(format!("no transition on ({i},{j})")))?;
            if !g.ring().same_gens(&ov.ring) || !g.is_unit() {
                return Err(Error::Gluing(format!("g_{i}{j} = {g} is not a unit of the overlap ring")));
            }
            if let Some(back) = self.transitions.get(&(j, i)) {
                let prod = &ov.map.apply(back)? * &g.in_ring(&ov.ring)?;
                if prod.constant_value() != Some(crate::rational::q(1)) {
                    return Err(Error::Gluing(format!("g_{i}{j}·g_{j}{i} = {prod}")));
                }
            }
        }
        let n = x.n_charts();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let (Some(gij), Some(gjk), Some(gik)) =
                        (self.get(i, j), self.get(j, k), self.get(i, k))
                    else {
                        continue;
                    };
                    let Some(ring) = x.multi_overlap_ring(i, &[j, k]) else { continue };
                    let phi = x.transition_into(i, j, &ring)?;
                    let pulled = match phi.apply(gjk) {
                        Ok(p) => p,
                        Err(Error::NotInvertible(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    if &pulled * &gij.in_ring(&ring)? != gik.in_ring(&ring)? {
                        return Err(Error::Gluing(format!("line cocycle fails on ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Chart-wise product (tensor product of line bundles).
    pub fn tensor(&self, other: &LineCocycle) -> Result<LineCocycle> {
        let mut out = BTreeMap::new();
        for (k, g) in &self.transitions {
            let h = other.transitions.get(k).ok_or_else(|| Error::Gluing("cocycles on different atlases".into()))?;
            out.insert(*k, g.try_mul(h)?);
        }
        Ok(LineCocycle { transitions: out })
    }

    pub fn pow(&self, k: i64) -> Result<LineCocycle> {
        let transitions = self.transitions.iter().map(|(key, g)| Ok((*key, g.powi(k)?))).collect::<Result<_>>()?;
        Ok(LineCocycle { transitions })
    }

    /// Reduced parts only (restriction to the underlying even scheme).
    pub fn reduced(&self) -> BTreeMap<(usize, usize), SuperPoly> {
        self.transitions.iter().map(|(k, g)| (*k, g.reduced_part())).collect()
    }
}

/// One transition `g_ij` of a serialized cocycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermDoc>,
}

/// A line cocycle without its atlas; rings are recovered from the overlaps
/// when it is loaded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleDoc {
    pub transitions: Vec<TransitionDoc>,
}

impl CocycleDoc {
    pub fn from_cocycle(l: &LineCocycle) -> Self {
        let transitions = l.transitions.iter().map(|(&(i, j), g)| TransitionDoc { i, j, terms: poly_to_terms(g) }).collect();
        CocycleDoc { transitions }
    }

    pub fn to_cocycle(&self, x: &Atlas) -> Result<LineCocycle> {
        let mut transitions = BTreeMap::new();
        for t in &self.transitions {
            let ov = x.overlap(t.i, t.j).ok_or_else(|| Error::Gluing(format!("no overlap ({},{})", t.i, t.j)))?;
            transitions.insert((t.i, t.j), terms_to_poly(&ov.ring, &t.terms)?);
        }
        LineCocycle::new(x, transitions)
    }
}

/// `O(k)` on projective superspace, `Ber(S)^k` on supergrassmannians.
pub fn standard_cocycles(x: &Atlas, k: i64) -> Result<LineCocycle> {
    let mut transitions = BTreeMap::new();
    match &x.kind {
        AtlasKind::Projective { .. } => {
            for (&(i, j), ov) in x.overlaps() {
                let name = format!("u{j}");
                let u = SuperPoly::try_var(&ov.ring, &name)?;
                let _ = i;
                transitions.insert((i, j), u.powi(-k)?);
            }
        }
        AtlasKind::Grassmannian { .. } => {
            for (&(i, j), ov) in x.overlaps() {
                let fi = x.chart(i).frame.as_ref().ok_or_else(|| Error::Unsupported("chart without frame".into()))?;
                let fj = x.chart(j).frame.as_ref().ok_or_else(|| Error::Unsupported("chart without frame".into()))?;
                let block = fi.matrix.select_rows(&fj.pivot_rows).map(|p| p.in_ring(&ov.ring), &ov.ring)?;
                transitions.insert((i, j), block.berezinian()?.powi(k)?);
            }
        }
        other => return Err(Error::Unsupported(format!("no standard line bundle on {other:?}"))),
    }
    LineCocycle::new(x, transitions)
}

fn shift(p: &SuperPoly, to: &Ring, even_shift: usize, odd_shift: usize) -> SuperPoly {
    let ne = to.n_even();
    SuperPoly::from_terms(
        to,
        p.terms().iter().map(|(m, c)| {
            let mut even = vec![0; ne];
            even[even_shift..even_shift + m.even.len()].copy_from_slice(&m.even);
            (Monomial { even, odd: OddSet(m.odd.0 << odd_shift) }, c.clone())
        }),
    )
}

/// `L₁ ⊠ L₂` on `product(x, y)`.
pub fn exterior_product(x: &Atlas, y: &Atlas, xy: &Atlas, l1: &LineCocycle, l2: &LineCocycle) -> Result<LineCocycle> {
    let ny = y.n_charts();
    let mut transitions = BTreeMap::new();
    for (&(a, b), ov) in xy.overlaps() {
        let (i, j, k, l) = (a / ny, a % ny, b / ny, b % ny);
        let xe = x.chart(i).ring.n_even();
        let xo = x.chart(i).ring.n_odd();
        let left = if i == k { SuperPoly::one(&ov.ring) } else { shift(&l1.transitions[&(i, k)], &ov.ring, 0, 0) };
        let right = if j == l { SuperPoly::one(&ov.ring) } else { shift(&l2.transitions[&(j, l)], &ov.ring, xe, xo) };
        transitions.insert((a, b), &left * &right);
    }
    LineCocycle::new(xy, transitions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_projective_superspace, build_supergrassmannian, product};
    use crate::rational::q;

    #[test]
    fn tautological_on_p1() {
        let p = build_projective_superspace(1, 0).unwrap();
        let l = standard_cocycles(&p, -1).unwrap();
        let ov = p.overlap(0, 1).unwrap();
        assert_eq!(l.get(0, 1).unwrap(), &SuperPoly::var(&ov.ring, "u1"));
    }

    #[test]
    fn ber_on_g1022_is_o_minus_one() {
        let g = build_supergrassmannian(1, 0, 2, 2).unwrap();
        let ber = standard_cocycles(&g, 1).unwrap();
        for (&(i, j), ov) in g.overlaps() {
            let gij = ber.get(i, j).unwrap();
            // the single even coordinate of chart i, which is the pivot towards j
            let z = SuperPoly::even_gen(&ov.ring, ov.pivots[0]);
            assert_eq!(gij, &z, "({i},{j})");
        }
    }

    #[test]
    fn ber_on_g1122_reduces_to_o_minus_one_box_o_one() {
        let g = build_supergrassmannian(1, 1, 2, 2).unwrap();
        let ber = standard_cocycles(&g, 1).unwrap();
        for (&(i, j), ov) in g.overlaps() {
            let r = ber.get(i, j).unwrap().reduced_part();
            assert_eq!(r.len(), 1);
            let (m, c) = r.terms().iter().next().unwrap();
            assert_eq!(c, &q(1));
            // the even-block swap contributes z, the odd-block swap z⁻¹
            let fi = g.chart(i).frame.as_ref().unwrap();
            let fj = g.chart(j).frame.as_ref().unwrap();
            let even_swap = fi.pivot_rows[0] != fj.pivot_rows[0];
            let odd_swap = fi.pivot_rows[1] != fj.pivot_rows[1];
            let pos: i32 = m.even.iter().filter(|&&e| e > 0).sum();
            let neg: i32 = m.even.iter().filter(|&&e| e < 0).sum();
            assert_eq!((pos, neg), (even_swap as i32, -(odd_swap as i32)), "({i},{j}) {r}");
            let _ = ov;
        }
    }

    #[test]
    fn exterior_product_glues() {
        let p = build_projective_superspace(1, 2).unwrap();
        let pp = product(&p, &p).unwrap();
        let l1 = standard_cocycles(&p, 2).unwrap();
        let l2 = standard_cocycles(&p, -3).unwrap();
        let l = exterior_product(&p, &p, &pp, &l1, &l2).unwrap();
        assert_eq!(l.transitions.len(), pp.overlaps().len());
    }

    #[test]
    fn bad_cocycle_is_rejected() {
        let p = build_projective_superspace(2, 0).unwrap();
        let mut l = standard_cocycles(&p, 1).unwrap();
        let g = l.transitions.get_mut(&(0, 1)).unwrap();
        *g = g.scale(&q(2));
        assert!(l.check(&p).is_err());
    }
}
