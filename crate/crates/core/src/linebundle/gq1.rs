//! `GQ(1)`: points `a₀ + a₁ε` with `ε` odd and `ε² = −1`, so that
//! `(1 + aε)(1 + bε) = (1 + ab) + (a + b)ε`.

use crate::error::{Error, Result};
use crate::superalgebra::SuperPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct Gq1Element {
    pub a0: SuperPoly,
    pub a1: SuperPoly,
}

impl Gq1Element {
    pub fn new(a0: SuperPoly, a1: SuperPoly) -> Result<Self> {
        if !a0.ring().same_gens(a1.ring()) {
            return Err(Error::RingMismatch("GQ(1) components in different rings".into()));
        }
        if !a0.is_unit() {
            return Err(Error::NotInvertible(format!("{a0} is not an even unit")));
        }
        if !a1.has_parity(crate::Parity::Odd) {
            return Err(Error::Parity(format!("{a1} is not odd")));
        }
        Ok(Gq1Element { a0, a1 })
    }

    pub fn one(ring: &crate::Ring) -> Self {
        Gq1Element { a0: SuperPoly::one(ring), a1: SuperPoly::zero(ring) }
    }
}

pub fn gq1_mul(x: &Gq1Element, y: &Gq1Element) -> Result<Gq1Element> {
    let a0 = x.a0.try_mul(&y.a0)?.try_add(&x.a1.try_mul(&y.a1)?)?;
    let a1 = x.a0.try_mul(&y.a1)?.try_add(&x.a1.try_mul(&y.a0)?)?;
    Gq1Element::new(a0, a1)
}

/// `a₀ + a₁ε ↦ a₀⁻¹a₁`, a homomorphism onto the additive odd line.
pub fn gq1_project(x: &Gq1Element) -> Result<SuperPoly> {
    x.a0.invert_even()?.try_mul(&x.a1)
}

/// The extension cocycle `c(a, b) = 1 + ab`.
pub fn gq1_cocycle(a: &SuperPoly, b: &SuperPoly) -> Result<SuperPoly> {
    SuperPoly::one(a.ring()).try_add(&a.try_mul(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::superalgebra::RingDescriptor;
    use proptest::prelude::*;

    fn ring() -> crate::Ring {
        RingDescriptor::polynomial(&["x"], &["t1", "t2", "t3", "t4"]).unwrap()
    }

    fn odd(cs: &[i64]) -> SuperPoly {
        let r = ring();
        let mut p = SuperPoly::zero(&r);
        for (k, c) in cs.iter().enumerate() {
            p = &p + &SuperPoly::odd_gen(&r, k).scale(&q(*c));
        }
        p
    }

    #[test]
    fn product_of_unipotents() {
        let r = ring();
        let t1 = SuperPoly::var(&r, "t1");
        let t2 = SuperPoly::var(&r, "t2");
        let one = SuperPoly::one(&r);
        let lhs = gq1_mul(&Gq1Element::new(one.clone(), t1.clone()).unwrap(), &Gq1Element::new(one.clone(), t2.clone()).unwrap()).unwrap();
        let rhs = gq1_mul(
            &Gq1Element::new(&one + &(&t1 * &t2), SuperPoly::zero(&r)).unwrap(),
            &Gq1Element::new(one.clone(), &t1 + &t2).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(gq1_mul(&lhs, &Gq1Element::one(&r)).unwrap(), lhs);
    }

    proptest! {
        #[test]
        fn projection_is_additive(a in proptest::collection::vec(-3i64..4, 4), b in proptest::collection::vec(-3i64..4, 4), c0 in 1i64..5, d0 in 1i64..5) {
            let r = ring();
            let x = Gq1Element::new(SuperPoly::int(&r, c0), odd(&a)).unwrap();
            let y = Gq1Element::new(SuperPoly::int(&r, d0), odd(&b)).unwrap();
            let xy = gq1_mul(&x, &y).unwrap();
            prop_assert_eq!(gq1_project(&xy).unwrap(), &gq1_project(&x).unwrap() + &gq1_project(&y).unwrap());
        }

        #[test]
        fn scalars_are_central(a in proptest::collection::vec(-3i64..4, 4), l in 1i64..7) {
            let r = ring();
            let x = Gq1Element::new(&SuperPoly::one(&r) + &(&SuperPoly::var(&r, "t1") * &SuperPoly::var(&r, "t2")), odd(&a)).unwrap();
            let lam = Gq1Element::new(SuperPoly::int(&r, l), SuperPoly::zero(&r)).unwrap();
            prop_assert_eq!(gq1_mul(&lam, &x).unwrap(), gq1_mul(&x, &lam).unwrap());
        }

        #[test]
        fn cocycle_identity(a in proptest::collection::vec(-3i64..4, 4), b in proptest::collection::vec(-3i64..4, 4), c in proptest::collection::vec(-3i64..4, 4)) {
            let (a, b, c) = (odd(&a), odd(&b), odd(&c));
            let lhs = &gq1_cocycle(&b, &c).unwrap() * &gq1_cocycle(&a, &(&b + &c)).unwrap();
            let rhs = &gq1_cocycle(&a, &b).unwrap() * &gq1_cocycle(&(&a + &b), &c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
