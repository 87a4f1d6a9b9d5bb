use std::collections::HashMap;

use super::poly::SuperPoly;
use super::ring::{GenRef, Ring};
use super::Parity;
use crate::error::{Error, Result};

/// Ring homomorphism given by generator images (even generators first, then
/// odd ones, in the source's order).
#[derive(Clone, Debug)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<SuperPoly>,
    inverses: Vec<Option<SuperPoly>>,
}

impl RingHom {
    pub fn new(source: &Ring, target: &Ring, images: Vec<SuperPoly>) -> Result<Self> {
        if images.len() != source.n_gens() {
            return Err(Error::Dimension(format!(
                "homomorphism needs {} images, got {}",
                source.n_gens(),
                images.len()
            )));
        }
        let mut inverses = Vec::with_capacity(source.n_even());
        for (k, g) in source.gens().enumerate() {
            let img = images[k].in_ring(target)?;
            let want = match g {
                GenRef::Even(_) => Parity::Even,
                GenRef::Odd(_) => Parity::Odd,
            };
            if !img.has_parity(want) {
                return Err(Error::Parity(format!(
                    "image of {} must be {want}, got {img}",
                    source.gen_name(g)
                )));
            }
            if let GenRef::Even(i) = g {
                let inv = img.invert_even().ok();
                if source.is_invertible(i) && inv.is_none() {
                    return Err(Error::NotInvertible(format!(
                        "image {img} of invertible generator {} is not invertible in {target}",
                        source.gen_name(g)
                    )));
                }
                inverses.push(inv);
            }
        }
        let images = images.into_iter().map(|p| p.in_ring(target)).collect::<Result<Vec<_>>>()?;
        Ok(RingHom { source: source.clone(), target: target.clone(), images, inverses })
    }

    /// Build from `(name, image)` pairs; unnamed generators map to themselves
    /// (which requires matching names in the target).
    pub fn from_named(source: &Ring, target: &Ring, named: &[(&str, SuperPoly)]) -> Result<Self> {
        let mut images = Vec::with_capacity(source.n_gens());
        for g in source.gens() {
            let name = source.gen_name(g);
            match named.iter().find(|(n, _)| *n == name) {
                Some((_, p)) => images.push(p.clone()),
                None => images.push(SuperPoly::try_var(target, name)?),
            }
        }
        Self::new(source, target, images)
    }

    pub fn identity(ring: &Ring) -> Self {
        let images = ring.gens().map(|g| SuperPoly::gen(ring, g)).collect();
        Self::new(ring, ring, images).expect("identity homomorphism")
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[SuperPoly] {
        &self.images
    }

    pub fn image(&self, g: GenRef) -> &SuperPoly {
        match g {
            GenRef::Even(i) => &self.images[i],
            GenRef::Odd(i) => &self.images[self.source.n_even() + i],
        }
    }

    pub fn even_image(&self, i: usize) -> &SuperPoly {
        &self.images[i]
    }

    pub fn odd_image(&self, i: usize) -> &SuperPoly {
        &self.images[self.source.n_even() + i]
    }

    /// Same map with a different (compatible) target ring.
    pub fn retarget(&self, target: &Ring) -> Result<Self> {
        let images = self.images.iter().map(|p| p.in_ring(target)).collect::<Result<Vec<_>>>()?;
        Self::new(&self.source, target, images)
    }

    /// Apply to an element of any ring with the source's generators.
    pub fn apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        if !f.ring().same_gens(&self.source) {
            return Err(Error::RingMismatch(format!(
                "homomorphism from {} applied to element of {}",
                self.source,
                f.ring()
            )));
        }
        let n_even = self.source.n_even();
        let mut powers: HashMap<(usize, i32), SuperPoly> = HashMap::new();
        let mut out = SuperPoly::zero(&self.target);
        for (m, c) in f.terms() {
            let mut acc = SuperPoly::constant(&self.target, c.clone());
            for (i, &e) in m.even.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !powers.contains_key(&(i, e)) {
                    let base = if e > 0 {
                        self.images[i].clone()
                    } else {
                        self.inverses[i].clone().ok_or_else(|| {
                            Error::NotInvertible(format!(
                                "image {} of {} is not invertible",
                                self.images[i],
                                self.source.even_names()[i]
                            ))
                        })?
                    };
                    powers.insert((i, e), base.pow(e.unsigned_abs()));
                }
                acc = &acc * &powers[&(i, e)];
                if acc.is_zero() {
                    break;
                }
            }
            for j in m.odd.indices() {
                if acc.is_zero() {
                    break;
                }
                acc = &acc * &self.images[n_even + j];
            }
            for (mm, cc) in acc.into_terms() {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &RingHom) -> Result<RingHom> {
        let images = self.images.iter().map(|p| other.apply(p)).collect::<Result<Vec<_>>>()?;
        RingHom::new(&self.source, &other.target, images)
    }

    pub fn map_images(&self, target: &Ring, f: impl Fn(&SuperPoly) -> Result<SuperPoly>) -> Result<RingHom> {
        let images = self.images.iter().map(f).collect::<Result<Vec<_>>>()?;
        RingHom::new(&self.source, target, images)
    }
}

impl PartialEq for RingHom {
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.images == other.images
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::RingDescriptor;

    #[test]
    fn p1_transition_inverts() {
        let r = RingDescriptor::new(&["u"], &[] as &[&str], &["u"]).unwrap();
        let u = SuperPoly::var(&r, "u");
        let h = RingHom::new(&r, &r, vec![u.invert_even().unwrap()]).unwrap();
        let f = &(&u * &u) + &SuperPoly::one(&r);
        let img = h.apply(&f).unwrap();
        let uinv = u.invert_even().unwrap();
        assert_eq!(img, &(&uinv * &uinv) + &SuperPoly::one(&r));
        // applying twice gives back f (cocycle on the two-chart P^1)
        assert_eq!(h.apply(&img).unwrap(), f);
    }

    #[test]
    fn killing_odd_gives_reduced_part() {
        let r = RingDescriptor::polynomial(&["x"], &["a", "b"]).unwrap();
        let x = SuperPoly::var(&r, "x");
        let a = SuperPoly::var(&r, "a");
        let b = SuperPoly::var(&r, "b");
        let z = SuperPoly::zero(&r);
        let h = RingHom::new(&r, &r, vec![x.clone(), z.clone(), z]).unwrap();
        let f = &(&x + &a) * &(&x + &(&a * &b));
        assert_eq!(h.apply(&f).unwrap(), f.reduced_part());
        assert_eq!(RingHom::identity(&r).apply(&f).unwrap(), f);
    }

    #[test]
    fn parity_mismatch_rejected() {
        let r = RingDescriptor::polynomial(&["x"], &["a"]).unwrap();
        let x = SuperPoly::var(&r, "x");
        assert!(RingHom::new(&r, &r, vec![x.clone(), x]).is_err());
    }
}
