use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::atlas::{
    build_cy_truncation, build_projective_superspace, build_supergrassmannian, global_freeness, iso_check, pi_action_field,
    product, product_fields, quotient_atlas, standard_pi_symmetry, truncate_atlas, Atlas, GlobalField, GlobalFreeness,
};
use crate::cohomology::{cech_cohomology, h1_vanishing_report, kunneth, CechWindow, DimTable, SheafKind};
use crate::error::{Error, Result};
use crate::linebundle::{connection_solve, curvature, exterior_product, flat_descend, standard_cocycles, ConnectionResult, Descent, LineCocycle};
use crate::rational::Q;
use crate::superalgebra::Parity;

/// A space the checks can build at desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceSpec {
    Projective { m: usize, n: usize },
    Grassmannian { a: usize, b: usize, m: usize, n: usize },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Atlas> {
        match *self {
            SpaceSpec::Projective { m, n } => build_projective_superspace(m, n),
            SpaceSpec::Grassmannian { a, b, m, n } => build_supergrassmannian(a, b, m, n),
        }
    }

    /// The standard Π-symmetry field; needs an `n|n` or `m|m+1` shape.
    pub fn pi_field(&self, x: &Atlas) -> Result<GlobalField> {
        let size = match *self {
            SpaceSpec::Projective { m, n } if n == m + 1 => n,
            SpaceSpec::Grassmannian { m, n, .. } if m == n => n,
            _ => return Err(Error::Unsupported(format!("{self} carries no standard Π-symmetry"))),
        };
        pi_action_field(x, &standard_pi_symmetry(size))
    }
}

impl std::fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceSpec::Projective { m, n } => write!(f, "P^{{{m}|{n}}}"),
            SpaceSpec::Grassmannian { a, b, m, n } => write!(f, "G({a}|{b},{m}|{n})"),
        }
    }
}

/// A computation that establishes a fact and can be rerun on demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    /// Every associated-graded piece of `G(1|1,n|n)` has `H¹ = 0`.
    GrassmannianH1Vanishes { n: usize },
    /// Čech `H¹(X, O) = 0` in a stable window.
    CechH1Zero { space: SpaceSpec },
    /// `H⁰` of the Π-invariant functions on `P^{m|m+1}` is one even line.
    PiQuotientH0IsK { m: usize },
    /// The same for the diagonal action on `P^{m-1|m} × P^{n-1|n}`.
    DiagonalQuotientH0IsK { m: usize, n: usize },
    /// `H¹(P^{m-1|m} × P^{n-1|n}, O)⁻ = 0` by Künneth on Čech tables.
    ProductH1MinusZero { m: usize, n: usize },
    /// The Π-action is free and its quotient is certified chart by chart.
    PiTorsor { space: SpaceSpec },
    DiagonalTorsor { m: usize, n: usize },
    /// Künneth of the Čech table of `P²_Π` with itself has `H⁰ = k`.
    PiPlaneProductH0IsK,
    /// On `P^{m|m+1}` the trivial bundle descends and `O(k)`, `0 < |k| ≤ range`,
    /// is obstructed by nonzero curvature.
    PiDescentObstructed { m: usize, range: i64 },
    /// On `P^{1|2} × P^{1|2}` with `v₁ + v₂`, `O(n₁) ⊠ O(n₂)` has a flat
    /// connection exactly when `n₁ + n₂ = 0`.
    DiagonalFlatIffBalanced { range: i64 },
    /// `truncate(P²_Π, 3)` is isomorphic to the Calabi–Yau truncation.
    TruncationIso,
}

fn pi_plane(m: usize) -> Result<(Atlas, GlobalField)> {
    let p = build_projective_superspace(m, m + 1)?;
    let v = pi_action_field(&p, &standard_pi_symmetry(m + 1))?;
    Ok((p, v))
}

fn diagonal(m: usize, n: usize) -> Result<(Atlas, GlobalField)> {
    let (x, vx) = pi_plane(m - 1)?;
    let (y, vy) = pi_plane(n - 1)?;
    let xy = product(&x, &y)?;
    let v = product_fields(&x, &y, &xy, Some(&vx), Some(&vy))?;
    Ok((xy, v))
}

fn h0_is_k(t: &DimTable) -> bool {
    t.is_stable() && t.dim(0, Parity::Even) == 1 && t.dim(0, Parity::Odd) == 0
}

fn window() -> CechWindow {
    CechWindow::radius(4)
}

impl Check {
    pub fn module(&self) -> &'static str {
        match self {
            Check::GrassmannianH1Vanishes { .. } => "cohomology::h1_vanishing_report",
            Check::CechH1Zero { .. }
            | Check::PiQuotientH0IsK { .. }
            | Check::DiagonalQuotientH0IsK { .. }
            | Check::ProductH1MinusZero { .. }
            | Check::PiPlaneProductH0IsK => "cohomology::cech_cohomology",
            Check::PiTorsor { .. } | Check::DiagonalTorsor { .. } => "atlas::quotient_atlas",
            Check::PiDescentObstructed { .. } => "linebundle::flat_descend",
            Check::DiagonalFlatIffBalanced { .. } => "linebundle::curvature",
            Check::TruncationIso => "atlas::iso_check",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Check::GrassmannianH1Vanishes { n } => format!("H¹ of every gr piece of G(1|1,{n}|{n}) vanishes"),
            Check::CechH1Zero { space } => format!("Čech H¹({space}, O) = 0"),
            Check::PiQuotientH0IsK { m } => format!("H⁰(P^{{{m}|{}}}, O)^v = k", m + 1),
            Check::DiagonalQuotientH0IsK { m, n } => {
                format!("H⁰(P^{{{}|{m}}}×P^{{{}|{n}}}, O)^(v₁+v₂) = k", m - 1, n - 1)
            }
            Check::ProductH1MinusZero { m, n } => format!("H¹(P^{{{}|{m}}}×P^{{{}|{n}}}, O)⁻ = 0", m - 1, n - 1),
            Check::PiTorsor { space } => format!("Π-action on {space} is free with certified quotient"),
            Check::DiagonalTorsor { m, n } => {
                format!("v₁+v₂ on P^{{{}|{m}}}×P^{{{}|{n}}} is free with certified quotient", m - 1, n - 1)
            }
            Check::PiPlaneProductH0IsK => "H⁰(P²_Π×P²_Π, O) = k by Künneth".into(),
            Check::PiDescentObstructed { m, range } => {
                format!("O(k) on P^{{{m}|{}}} does not descend for 0<|k|≤{range}", m + 1)
            }
            Check::DiagonalFlatIffBalanced { range } => {
                format!("O(n₁)⊠O(n₂) on P^{{1|2}}×P^{{1|2}} is flat iff n₁+n₂=0, |nᵢ|≤{range}")
            }
            Check::TruncationIso => "truncate(P²_Π, 3) ≅ CY truncation".into(),
        }
    }

    /// Reruns the computation; `Ok(false)` means it no longer supports the fact.
    pub fn run(&self) -> Result<bool> {
        match self {
            Check::GrassmannianH1Vanishes { n } => Ok(h1_vanishing_report(*n, (0, 0)).h1_o_vanishes),
            Check::CechH1Zero { space } => {
                let t = cech_cohomology(&space.build()?, SheafKind::Structure, window())?;
                Ok(t.is_stable() && t.total(1) == 0)
            }
            Check::PiQuotientH0IsK { m } => {
                let (p, v) = pi_plane(*m)?;
                Ok(h0_is_k(&cech_cohomology(&p, SheafKind::Invariant(&v), window())?))
            }
            Check::DiagonalQuotientH0IsK { m, n } => {
                let (xy, v) = diagonal(*m, *n)?;
                Ok(h0_is_k(&cech_cohomology(&xy, SheafKind::Invariant(&v), CechWindow::radius(2).up_to(0))?))
            }
            Check::ProductH1MinusZero { m, n } => {
                let a = cech_cohomology(&build_projective_superspace(m - 1, *m)?, SheafKind::Structure, window())?;
                let b = cech_cohomology(&build_projective_superspace(n - 1, *n)?, SheafKind::Structure, window())?;
                let t = kunneth(&a, &b)?;
                Ok(t.is_stable() && t.dim(1, Parity::Odd) == 0)
            }
            Check::PiTorsor { space } => {
                let x = space.build()?;
                let v = space.pi_field(&x)?;
                if !matches!(global_freeness(&x, &v, 3)?, GlobalFreeness::Free { .. }) {
                    return Ok(false);
                }
                Ok(quotient_atlas(&x, &v, 3).is_ok())
            }
            Check::DiagonalTorsor { m, n } => {
                let (xy, v) = diagonal(*m, *n)?;
                Ok(quotient_atlas(&xy, &v, 1).is_ok())
            }
            Check::PiPlaneProductH0IsK => {
                let (p, v) = pi_plane(2)?;
                let t = cech_cohomology(&p, SheafKind::Invariant(&v), window())?;
                Ok(h0_is_k(&kunneth(&t, &t)?))
            }
            Check::PiDescentObstructed { m, range } => {
                let (p, v) = pi_plane(*m)?;
                let qa = quotient_atlas(&p, &v, 1)?;
                if !matches!(flat_descend(&p, &LineCocycle::trivial(&p), &v, &qa, 1)?, Descent::Descended { .. }) {
                    return Ok(false);
                }
                for k in (-range..=*range).filter(|k| *k != 0) {
                    let l = standard_cocycles(&p, k)?;
                    match flat_descend(&p, &l, &v, &qa, 1)? {
                        Descent::Obstructed { curvature } if !curvature.is_zero() => {}
                        _ => return Ok(false),
                    }
                }
                Ok(true)
            }
            Check::DiagonalFlatIffBalanced { range } => {
                let (p, v1) = pi_plane(1)?;
                let pp = product(&p, &p)?;
                let v = product_fields(&p, &p, &pp, Some(&v1), Some(&v1))?;
                for n1 in -range..=*range {
                    for n2 in -range..=*range {
                        let l = exterior_product(&p, &p, &pp, &standard_cocycles(&p, n1)?, &standard_cocycles(&p, n2)?)?;
                        let ConnectionResult::Found { connection, global_odd } = connection_solve(&pp, &l, &v, 1)? else {
                            return Ok(false);
                        };
                        if !global_odd.is_empty() {
                            return Ok(false);
                        }
                        let Some(c) = curvature(&pp, &v, &connection)?.constant() else { return Ok(false) };
                        if c.is_zero() != (n1 + n2 == 0) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Check::TruncationIso => {
                let (p, v) = pi_plane(2)?;
                let qa = quotient_atlas(&p, &v, 1)?;
                let t = truncate_atlas(qa.concrete()?, 3)?;
                let cy = build_cy_truncation(2, &Q::one())?;
                Ok(iso_check(&t, &cy, 3)?.is_iso())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_checks_hold() {
        for c in [
            Check::GrassmannianH1Vanishes { n: 3 },
            Check::CechH1Zero { space: SpaceSpec::Grassmannian { a: 1, b: 1, m: 2, n: 2 } },
            Check::PiQuotientH0IsK { m: 1 },
            Check::ProductH1MinusZero { m: 2, n: 2 },
            Check::PiTorsor { space: SpaceSpec::Grassmannian { a: 1, b: 0, m: 2, n: 2 } },
            Check::PiDescentObstructed { m: 1, range: 2 },
        ] {
            assert!(c.run().unwrap(), "{}", c.describe());
        }
    }

    #[test]
    fn non_free_action_fails_the_torsor_check() {
        let c = Check::PiTorsor { space: SpaceSpec::Grassmannian { a: 1, b: 1, m: 2, n: 2 } };
        assert!(!c.run().unwrap());
    }
}
