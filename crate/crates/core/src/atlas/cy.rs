use std::collections::BTreeMap;

use super::{Atlas, AtlasKind, Chart, Overlap};
use crate::error::Result;
use crate::rational::Q;
use crate::superalgebra::{GenRef, Ring, RingDescriptor, RingHom, SuperPoly};

fn truncate_poly(p: &SuperPoly, ring: &Ring, k: usize) -> SuperPoly {
    SuperPoly::from_terms(ring, p.terms().iter().filter(|(m, _)| (m.odd_len() as usize) < k).map(|(m, c)| (m.clone(), c.clone())))
}

/// Reduce every chart and transition modulo `N^k`. For `k = 1` the odd
/// coordinates disappear and the result is the reduced scheme.
pub fn truncate_atlas(x: &Atlas, k: usize) -> Result<Atlas> {
    let k = k.max(1);
    let charts: Vec<Chart> = x
        .charts()
        .iter()
        .map(|c| {
            let ring = c.ring.truncated(k);
            let weights = c.weights.as_ref().map(|w| w[..ring.n_gens()].to_vec());
            Chart { label: c.label.clone(), ring, frame: None, weights }
        })
        .collect();
    let mut overlaps = BTreeMap::new();
    for (&(i, j), ov) in x.overlaps() {
        let ring = ov.ring.truncated(k);
        let src = &charts[j].ring;
        let images: Vec<SuperPoly> = src
            .gens()
            .map(|g| {
                let img = match g {
                    GenRef::Even(e) => ov.map.even_image(e),
                    GenRef::Odd(o) => ov.map.odd_image(o),
                };
                truncate_poly(img, &ring, k)
            })
            .collect();
        let map = RingHom::new(src, &ring, images)?;
        overlaps.insert((i, j), Overlap { pivots: ov.pivots.clone(), ring, map });
    }
    let kind = match &x.kind {
        AtlasKind::Truncation { base, k: k0 } => AtlasKind::Truncation { base: base.clone(), k: k.min(*k0) },
        other => AtlasKind::Truncation { base: Box::new(other.clone()), k },
    };
    let y = Atlas::new(format!("{}/N^{k}", x.name), kind, charts, overlaps)?;
    y.verify()?;
    Ok(y)
}

/// The square-zero-type truncation `X(Pⁿ, λ·c₁(O(1)))` modulo `N³`.
///
/// Chart `i` is `ℚ[u_j | η_j]_{j≠i}/N³`. Odd coordinates transform as the
/// differentials of the even ones, and the even transition picks up the
/// twist `λ·η_jη_k/u_j²` (with `u_i = 1`, `η_i = 0` in chart `i`).
pub fn build_cy_truncation(n: usize, lambda: &Q) -> Result<Atlas> {
    let mut charts = Vec::with_capacity(n + 1);
    let dim = n + 1;
    for i in 0..=n {
        let idx: Vec<usize> = (0..=n).filter(|&j| j != i).collect();
        let even: Vec<String> = idx.iter().map(|j| format!("u{j}")).collect();
        let odd: Vec<String> = idx.iter().map(|j| format!("eta{j}")).collect();
        let ring = RingDescriptor::polynomial(&even, &odd)?.truncated(3);
        let w = |j: usize| -> Vec<i64> { (0..dim).map(|t| (t == j) as i64 - (t == i) as i64).collect() };
        let weights = idx.iter().map(|&j| w(j)).chain(idx.iter().map(|&j| w(j))).collect();
        charts.push(Chart { label: format!("x{i}≠0"), ring, frame: None, weights: Some(weights) });
    }
    let mut overlaps = BTreeMap::new();
    for i in 0..=n {
        for j in 0..=n {
            if i == j {
                continue;
            }
            let base = &charts[i].ring;
            let pivot = match base.find(&format!("u{j}")) {
                Some(GenRef::Even(p)) => p,
                _ => unreachable!("pivot coordinate"),
            };
            let ring = base.with_invertible(&[pivot]);
            let big_u = |l: usize| if l == i { SuperPoly::one(&ring) } else { SuperPoly::var(&ring, &format!("u{l}")) };
            let eta = |l: usize| if l == i { SuperPoly::zero(&ring) } else { SuperPoly::var(&ring, &format!("eta{l}")) };
            let uj_inv = big_u(j).invert_even()?;
            let uj_inv2 = &uj_inv * &uj_inv;
            let others: Vec<usize> = (0..=n).filter(|&k| k != j).collect();
            let mut images = Vec::new();
            for &k in &others {
                let twist = (&(&eta(j) * &eta(k)) * &uj_inv2).scale(lambda);
                images.push(&(&big_u(k) * &uj_inv) + &twist);
            }
            for &k in &others {
                images.push(&(&eta(k) * &uj_inv) - &(&(&big_u(k) * &eta(j)) * &uj_inv2));
            }
            let map = RingHom::new(&charts[j].ring, &ring, images)?;
            overlaps.insert((i, j), Overlap { pivots: vec![pivot], ring, map });
        }
    }
    let x = Atlas::new(format!("X(P^{n},c1)/N^3"), AtlasKind::CyTruncation { n }, charts, overlaps)?;
    x.verify()?;
    Ok(x)
}

impl Atlas {
    /// Same chart rings and the same transitions (names and kinds ignored).
    pub fn same_gluing(&self, other: &Atlas) -> bool {
        self.n_charts() == other.n_charts()
            && self.charts().iter().zip(other.charts()).all(|(a, b)| a.ring == b.ring)
            && self.overlaps().len() == other.overlaps().len()
            && self.overlaps().iter().zip(other.overlaps()).all(|((ka, a), (kb, b))| ka == kb && a.ring == b.ring && a.map == b.map)
    }
}
