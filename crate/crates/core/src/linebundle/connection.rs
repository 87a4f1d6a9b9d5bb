use std::collections::BTreeMap;

use super::LineCocycle;
use crate::atlas::{section_space, Atlas, FibrationData, GlobalField, QuotientAtlas};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseVec};
use crate::rational::{q, Q};
use crate::superalgebra::{Monomial, SuperPoly};

/// Connection forms `φ_i`, odd elements of the chart rings.
#[derive(Clone, Debug, PartialEq)]
pub struct VConnection {
    pub forms: Vec<SuperPoly>,
}

#[derive(Clone, Debug)]
pub enum ConnectionResult {
    /// `global_odd` spans the odd global functions found at the bound; any
    /// of them may be added to the connection.
    Found { connection: VConnection, global_odd: Vec<Vec<SuperPoly>> },
    NoneUpTo { bound: usize },
}

/// A global even function given chart by chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    pub local: Vec<SuperPoly>,
}

impl Curvature {
    /// The common value when the curvature is a constant.
    pub fn constant(&self) -> Option<Q> {
        let first = self.local.first()?.constant_value()?;
        self.local.iter().all(|c| c.constant_value().as_ref() == Some(&first)).then_some(first)
    }
}

#[derive(Clone, Debug)]
pub enum Descent {
    Descended { connection: VConnection, cocycle: LineCocycle },
    /// A flat connection exists, so the bundle descends, but the quotient
    /// has no atlas of its own to write the descended cocycle in.
    Flat { connection: VConnection },
    Obstructed { curvature: Q },
    NoneUpTo { bound: usize },
}

fn log_derivative(x: &Atlas, l: &LineCocycle, v: &GlobalField) -> Result<FibrationData> {
    let mut line = BTreeMap::new();
    let mut torsor = BTreeMap::new();
    for (&(i, j), ov) in x.overlaps() {
        let g = l.get(i, j).ok_or_else(|| Error::Gluing(format!("no transition on ({i},{j})")))?;
        let dg = v.fields[i].derive(g)?;
        line.insert((i, j), SuperPoly::one(&ov.ring));
        torsor.insert((i, j), &dg * &g.invert_even()?);
    }
    Ok(FibrationData { line, torsor })
}

/// Solve `φ_ij(φ_j) = φ_i + v(g_ij)·g_ij⁻¹` with `φ_i` of even degree at most
/// `bound`.
pub fn connection_solve(x: &Atlas, l: &LineCocycle, v: &GlobalField, bound: usize) -> Result<ConnectionResult> {
    let space = section_space(x, &log_derivative(x, l, v)?, bound)?;
    Ok(match space.particular {
        Some(forms) => ConnectionResult::Found { connection: VConnection { forms }, global_odd: space.homogeneous },
        None => ConnectionResult::NoneUpTo { bound },
    })
}

/// `c_i = v(φ_i)`, checked to glue and to be `v`-closed.
pub fn curvature(x: &Atlas, v: &GlobalField, conn: &VConnection) -> Result<Curvature> {
    let local: Vec<SuperPoly> =
        conn.forms.iter().zip(&v.fields).map(|(phi, vi)| vi.derive(phi)).collect::<Result<_>>()?;
    for (&(i, j), ov) in x.overlaps() {
        if ov.map.apply(&local[j])? != local[i].in_ring(&ov.ring)? {
            return Err(Error::Inconsistent(format!("curvature disagrees on ({i},{j})")));
        }
    }
    for (i, c) in local.iter().enumerate() {
        if !v.fields[i].derive(c)?.is_zero() {
            return Err(Error::Inconsistent(format!("curvature is not v-closed on chart {i}")));
        }
    }
    Ok(Curvature { local })
}

/// Connection on `L₁ ⊗ L₂`: forms add.
pub fn tensor_connections(a: &VConnection, b: &VConnection) -> Result<VConnection> {
    if a.forms.len() != b.forms.len() {
        return Err(Error::Dimension("connections on different atlases".into()));
    }
    let forms = a.forms.iter().zip(&b.forms).map(|(p, r)| p.try_add(r)).collect::<Result<_>>()?;
    Ok(VConnection { forms })
}

/// Look for a flat connection and, if one exists, re-trivialize `L` by
/// `v`-flat frames `h_i = 1 − θ_i·φ_i` and rewrite the now invariant
/// transitions in quotient coordinates.
pub fn flat_descend(x: &Atlas, l: &LineCocycle, v: &GlobalField, quotient: &QuotientAtlas, bound: usize) -> Result<Descent> {
    let (conn, global_odd) = match connection_solve(x, l, v, bound)? {
        ConnectionResult::Found { connection, global_odd } => (connection, global_odd),
        ConnectionResult::NoneUpTo { bound } => return Ok(Descent::NoneUpTo { bound }),
    };
    let c = curvature(x, v, &conn)?;
    // c + Σ t_k·v(σ_k) = 0
    let key = |chart: usize, m: &Monomial| (chart, m.clone());
    let cols: Vec<SparseVec<(usize, Monomial)>> = global_odd
        .iter()
        .map(|sigma| -> Result<SparseVec<(usize, Monomial)>> {
            let mut col = SparseVec::new();
            for (i, s) in sigma.iter().enumerate() {
                for (m, cc) in v.fields[i].derive(s)?.terms() {
                    col.insert(key(i, m), cc.clone());
                }
            }
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let rhs: SparseVec<(usize, Monomial)> =
        c.local.iter().enumerate().flat_map(|(i, ci)| ci.terms().iter().map(move |(m, cc)| (key(i, m), -cc.clone()))).collect();
    let Some(t) = linalg::solve(&cols, &rhs) else {
        return Ok(match c.constant() {
            Some(val) if val != q(0) && global_odd.is_empty() => Descent::Obstructed { curvature: val },
            _ => Descent::NoneUpTo { bound },
        });
    };
    let mut forms = conn.forms.clone();
    for (k, coef) in t {
        for (i, s) in global_odd[k].iter().enumerate() {
            forms[i] = &forms[i] + &s.scale(&coef);
        }
    }
    let flat = VConnection { forms };
    if curvature(x, v, &flat)?.local.iter().any(|ci| !ci.is_zero()) {
        return Err(Error::Inconsistent("flat connection has curvature".into()));
    }
    let Ok(y) = quotient.concrete() else {
        return Ok(Descent::Flat { connection: flat });
    };
    let frames: Vec<SuperPoly> = flat
        .forms
        .iter()
        .zip(&quotient.charts)
        .map(|(phi, qc)| &SuperPoly::one(phi.ring()) - &(&qc.witness * phi))
        .collect();
    let mut transitions = BTreeMap::new();
    for (&(i, j), ov) in x.overlaps() {
        let g = l.get(i, j).expect("checked transition");
        let hi_inv = frames[i].in_ring(&ov.ring)?.invert_even()?;
        let g_flat = &(&ov.map.apply(&frames[j])? * g) * &hi_inv;
        if !v.fields[i].derive(&g_flat)?.is_zero() {
            return Err(Error::Inconsistent(format!("flat transition on ({i},{j}) is not invariant")));
        }
        let rw = quotient.rewriters[i].as_ref().ok_or_else(|| Error::Unsupported(format!("chart {i} has no rewriter")))?;
        let yring = &y.overlap(i, j).ok_or_else(|| Error::Gluing(format!("quotient lacks overlap ({i},{j})")))?.ring;
        transitions.insert((i, j), rw.rewrite(&g_flat)?.in_ring(yring)?);
    }
    let cocycle = LineCocycle::new(y, transitions)?;
    Ok(Descent::Descended { connection: flat, cocycle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{
        build_projective_superspace, pi_action_field, product, product_fields, quotient_atlas, standard_pi_symmetry,
    };
    use crate::linebundle::{exterior_product, standard_cocycles};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p12() -> (Atlas, GlobalField) {
        let p = build_projective_superspace(1, 2).unwrap();
        let v = pi_action_field(&p, &standard_pi_symmetry(2)).unwrap();
        (p, v)
    }

    fn solve(x: &Atlas, l: &LineCocycle, v: &GlobalField, d: usize) -> (VConnection, Vec<Vec<SuperPoly>>) {
        match connection_solve(x, l, v, d).unwrap() {
            ConnectionResult::Found { connection, global_odd } => (connection, global_odd),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_bundle_has_zero_connection() {
        let (p, v) = p12();
        let (c, _) = solve(&p, &LineCocycle::trivial(&p), &v, 1);
        assert!(c.forms.iter().all(|f| f.is_zero()));
        assert_eq!(curvature(&p, &v, &c).unwrap().constant(), Some(q(0)));
    }

    #[test]
    fn tautological_bundle_has_unit_curvature() {
        let (p, v) = p12();
        let l = standard_cocycles(&p, -1).unwrap();
        let (c, global_odd) = solve(&p, &l, &v, 1);
        assert!(global_odd.is_empty(), "no global odd functions on P^(1|2)");
        let k = curvature(&p, &v, &c).unwrap().constant().unwrap();
        assert_eq!(&k * &k, q(1));
        for n in 2..5 {
            let ln = l.pow(n).unwrap();
            let mut acc = c.clone();
            for _ in 1..n {
                acc = tensor_connections(&acc, &c).unwrap();
            }
            let (cn, _) = solve(&p, &ln, &v, 1);
            assert_eq!(cn, acc);
            let kn = curvature(&p, &v, &acc).unwrap().constant().unwrap();
            assert_eq!(kn, k.clone() * q(n));
        }
    }

    #[test]
    fn gauge_shift_moves_curvature_by_v_phi() {
        // one affine chart of P^(1|2): every odd polynomial is a global odd function
        let (p, v) = p12();
        let chart = p.chart(0).clone();
        let a = Atlas::new("A", crate::atlas::AtlasKind::Custom, vec![chart.clone()], BTreeMap::new()).unwrap();
        let va = GlobalField::new(&a, vec![v.fields[0].clone()]).unwrap();
        let l = LineCocycle::trivial(&a);
        let (c, _) = solve(&a, &l, &va, 0);
        let base = curvature(&a, &va, &c).unwrap();
        let monos: Vec<Monomial> =
            (0..=3).flat_map(|d| crate::homological::monomials_of_degree(&chart.ring, d, crate::Parity::Odd)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let phi = SuperPoly::from_terms(&chart.ring, monos.iter().map(|m| (m.clone(), q(rng.gen_range(-5..=5)))));
            let shifted = tensor_connections(&c, &VConnection { forms: vec![phi.clone()] }).unwrap();
            let after = curvature(&a, &va, &shifted).unwrap();
            assert_eq!(&after.local[0] - &base.local[0], va.fields[0].derive(&phi).unwrap());
        }
    }

    #[test]
    fn descent_on_pi_line() {
        let (p, v) = p12();
        let qa = quotient_atlas(&p, &v, 1).unwrap();
        match flat_descend(&p, &LineCocycle::trivial(&p), &v, &qa, 1).unwrap() {
            Descent::Descended { cocycle, .. } => assert!(cocycle.transitions.values().all(|g| g.constant_value() == Some(q(1)))),
            other => panic!("{other:?}"),
        }
        for n in [-2i64, -1, 1, 3] {
            let l = standard_cocycles(&p, n).unwrap();
            match flat_descend(&p, &l, &v, &qa, 1).unwrap() {
                Descent::Obstructed { curvature } => assert_eq!(curvature.clone() * curvature, q(n * n)),
                other => panic!("{other:?}"),
            }
        }
        let l = standard_cocycles(&p, 1).unwrap().tensor(&standard_cocycles(&p, -1).unwrap()).unwrap();
        assert!(matches!(flat_descend(&p, &l, &v, &qa, 1).unwrap(), Descent::Descended { .. }));
    }

    #[test]
    fn balanced_product_bundle_is_flat_on_the_diagonal_quotient() {
        let (p, v) = p12();
        let pp = product(&p, &p).unwrap();
        let vv = product_fields(&p, &p, &pp, Some(&v), None)
            .unwrap()
            .add(&product_fields(&p, &p, &pp, None, Some(&v)).unwrap())
            .unwrap();
        let l = exterior_product(&p, &p, &pp, &standard_cocycles(&p, 1).unwrap(), &standard_cocycles(&p, -1).unwrap()).unwrap();
        let qa = quotient_atlas(&pp, &vv, 1).unwrap();
        match flat_descend(&pp, &l, &vv, &qa, 1).unwrap() {
            Descent::Flat { connection } => assert!(curvature(&pp, &vv, &connection).unwrap().local.iter().all(|c| c.is_zero())),
            Descent::Descended { .. } => {}
            other => panic!("expected a flat connection, got {other:?}"),
        }
    }

    #[test]
    fn product_curvature_is_additive() {
        let (p, v) = p12();
        let pp = product(&p, &p).unwrap();
        let vv = product_fields(&p, &p, &pp, Some(&v), Some(&v)).unwrap();
        let base = {
            let l = exterior_product(&p, &p, &pp, &standard_cocycles(&p, 1).unwrap(), &LineCocycle::trivial(&p)).unwrap();
            curvature(&pp, &vv, &solve(&pp, &l, &vv, 1).0).unwrap().constant().unwrap()
        };
        for (n1, n2) in [(1i64, 1i64), (2, -1), (1, -1), (-2, 3)] {
            let l = exterior_product(&p, &p, &pp, &standard_cocycles(&p, n1).unwrap(), &standard_cocycles(&p, n2).unwrap()).unwrap();
            let (c, _) = solve(&pp, &l, &vv, 1);
            let k = curvature(&pp, &vv, &c).unwrap().constant().unwrap();
            assert_eq!(k, base.clone() * q(n1 + n2));
        }
    }
}
