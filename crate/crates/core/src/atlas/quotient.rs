use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{global_freeness, Atlas, AtlasKind, Chart, GlobalField, GlobalFreeness, Overlap};
use crate::error::{Error, Result};
use crate::homological::{decompose, invariant_generators, HomologicalField, InvariantGenerator};
use crate::superalgebra::{invert_commutative, Monomial, OddSet, Parity, Ring, RingDescriptor, RingHom, SuperPoly};

const T_NAME: &str = "_t";

/// Per-chart quotient data: the witness `θ_i` and the invariant generators,
/// stored as elements of the covering chart ring.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    pub witness: SuperPoly,
    pub generators: Vec<InvariantGenerator>,
}

/// Quotient of an atlas by a free `A^{0|1}`-action.
#[derive(Clone, Debug)]
pub struct QuotientAtlas {
    pub base: Atlas,
    pub field: GlobalField,
    pub charts: Vec<QuotientChart>,
    /// The quotient written in its own coordinates, when every chart admits a
    /// coordinate rewriter.
    pub concrete: Option<Atlas>,
    pub rewriters: Vec<Option<Rewriter>>,
}

impl QuotientAtlas {
    pub fn concrete(&self) -> Result<&Atlas> {
        self.concrete
            .as_ref()
            .ok_or_else(|| Error::Unsupported("quotient could not be written in its own coordinates".into()))
    }
}

/// Writes `v`-invariant functions on a chart `A ≅ A^v[θ]` as polynomials in
/// the invariant generators.
///
/// `B = ℚ[q | ζ, t]` maps onto `A` by `Ψ(q) = ã`, `Ψ(ζ) = b̃`, `Ψ(t) = θ`.
/// The first-order inverse `σ` sends each even coordinate to the generator
/// reducing to it and the odd coordinates through the inverse of the linear
/// part; the nil levels are peeled off one at a time.
#[derive(Clone, Debug)]
pub struct Rewriter {
    upstairs: Ring,
    b_ring: Ring,
    quotient_ring: Ring,
    /// Even quotient generator `k` reduces to even upstairs generator `perm[k]`.
    perm: Vec<usize>,
    even_elems: Vec<SuperPoly>,
    odd_elems: Vec<SuperPoly>,
}

impl Rewriter {
    pub fn new(upstairs: &Ring, gens: &[InvariantGenerator], theta: &SuperPoly, names: &[String]) -> Result<Self> {
        let mut even_elems = Vec::new();
        let mut odd_elems = Vec::new();
        let mut even_names = Vec::new();
        let mut odd_names = Vec::new();
        for (g, name) in gens.iter().zip(names) {
            match g.parity() {
                Parity::Even => {
                    even_elems.push(g.element.clone());
                    even_names.push(name.clone());
                }
                Parity::Odd => {
                    odd_elems.push(g.element.clone());
                    odd_names.push(name.clone());
                }
            }
        }
        odd_elems.push(theta.clone());
        if even_elems.len() != upstairs.n_even() || odd_elems.len() != upstairs.n_odd() {
            return Err(Error::Unsupported("invariant generators are not a coordinate system".into()));
        }
        let mut perm = Vec::new();
        for e in &even_elems {
            let red = e.reduced_part();
            let hit = (0..upstairs.n_even()).find(|&i| red == SuperPoly::even_gen(upstairs, i));
            match hit {
                Some(i) if !perm.contains(&i) => perm.push(i),
                _ => return Err(Error::Unsupported(format!("reduced part of {e} is not a coordinate"))),
            }
        }
        let inv: Vec<String> = (0..even_names.len())
            .filter(|&k| upstairs.is_invertible(perm[k]))
            .map(|k| even_names[k].clone())
            .collect();
        let mut b_odd = odd_names.clone();
        b_odd.push(T_NAME.to_string());
        let b_ring = RingDescriptor::new(&even_names, &b_odd, &inv)?;
        let quotient_ring = RingDescriptor::new(&even_names, &odd_names, &inv)?;
        Ok(Rewriter { upstairs: upstairs.clone(), b_ring, quotient_ring, perm, even_elems, odd_elems })
    }

    pub fn quotient_ring(&self) -> &Ring {
        &self.quotient_ring
    }

    /// Quotient-ring even index whose generator reduces to upstairs even
    /// generator `i`.
    pub fn even_index_of(&self, i: usize) -> usize {
        self.perm.iter().position(|&p| p == i).expect("permutation")
    }

    fn b_localized(&self, a_ring: &Ring) -> Ring {
        let mask: Vec<bool> = (0..self.perm.len()).map(|k| a_ring.is_invertible(self.perm[k])).collect();
        self.b_ring.with_invertible_mask(&mask)
    }

    /// Express `h` (in a localization of the chart ring) in `B`.
    pub fn rewrite_b(&self, h: &SuperPoly) -> Result<SuperPoly> {
        let a_ring = h.ring().clone();
        if !a_ring.same_gens(&self.upstairs) {
            return Err(Error::RingMismatch("rewriter applied to a foreign ring".into()));
        }
        let b = self.b_localized(&a_ring);
        let ne = a_ring.n_even();
        let no = a_ring.n_odd();
        // Ψ : B → A
        let mut psi_images: Vec<SuperPoly> = self.even_elems.iter().map(|p| p.in_ring(&a_ring)).collect::<Result<_>>()?;
        psi_images.extend(self.odd_elems.iter().map(|p| p.in_ring(&a_ring)).collect::<Result<Vec<_>>>()?);
        let psi = RingHom::new(&b, &a_ring, psi_images)?;
        // reduced substitution u_{perm k} ↦ q_k, odd ↦ 0
        let mut red_images = vec![SuperPoly::zero(&b); ne + no];
        for (k, &i) in self.perm.iter().enumerate() {
            red_images[i] = SuperPoly::even_gen(&b, k);
        }
        let red = RingHom::new(&a_ring, &b, red_images)?;
        // linear part C_{kl}: coefficient of η_l in the odd element k
        let mut c = vec![vec![SuperPoly::zero(&a_ring); no]; no];
        for (k, z) in self.odd_elems.iter().enumerate() {
            for (m, coef) in z.in_ring(&a_ring)?.nil_level(1).terms() {
                let l = m.odd.indices().next().unwrap();
                let mono = Monomial { even: m.even.clone(), odd: OddSet::EMPTY };
                c[k][l] = &c[k][l] + &SuperPoly::from_term(&a_ring, mono, coef.clone());
            }
        }
        let d = invert_commutative(&a_ring, &c)
            .map_err(|e| Error::Unsupported(format!("linear part of the odd generators is singular: {e}")))?;
        let mut sigma_images = Vec::with_capacity(ne + no);
        for i in 0..ne {
            sigma_images.push(SuperPoly::even_gen(&b, self.even_index_of(i)));
        }
        for row in d.iter().take(no) {
            let mut acc = SuperPoly::zero(&b);
            for (k, dlk) in row.iter().enumerate() {
                if dlk.is_zero() {
                    continue;
                }
                acc = &acc + &(&red.apply(dlk)? * &SuperPoly::odd_gen(&b, k));
            }
            sigma_images.push(acc);
        }
        let sigma = RingHom::new(&a_ring, &b, sigma_images)?;
        let mut r = h.clone();
        let mut out = SuperPoly::zero(&b);
        for level in 0..=no as u32 {
            let rl = r.nil_level(level);
            if rl.is_zero() {
                continue;
            }
            let pl = sigma.apply(&rl)?;
            r = &r - &psi.apply(&pl)?;
            out = &out + &pl;
        }
        if !r.is_zero() {
            return Err(Error::Witness(format!("rewriting left a remainder {r}")));
        }
        Ok(out)
    }

    /// Express an invariant `h` in the quotient chart ring (localized like
    /// `h`'s ring); fails if the result involves `θ`.
    pub fn rewrite(&self, h: &SuperPoly) -> Result<SuperPoly> {
        let pb = self.rewrite_b(h)?;
        let t_bit = self.b_ring.n_odd() - 1;
        let mask: Vec<bool> = (0..self.perm.len()).map(|k| h.ring().is_invertible(self.perm[k])).collect();
        let target = self.quotient_ring.with_invertible_mask(&mask);
        let mut out = SuperPoly::zero(&target);
        for (m, c) in pb.terms() {
            if m.odd.contains(t_bit) {
                return Err(Error::Witness(format!("{h} is not invariant: its rewrite involves θ")));
            }
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }
}

fn quotient_name(g: &InvariantGenerator) -> String {
    if let Some(rest) = g.name.strip_prefix("a(").and_then(|s| s.strip_suffix(')')) {
        rest.to_string()
    } else if let Some(rest) = g.name.strip_prefix("b(").and_then(|s| s.strip_suffix(')')) {
        format!("b_{rest}")
    } else {
        g.name.clone()
    }
}

/// Chart-wise quotient by a free global field.
pub fn quotient_atlas(x: &Atlas, v: &GlobalField, bound: usize) -> Result<QuotientAtlas> {
    let witnesses = match global_freeness(x, v, bound)? {
        GlobalFreeness::Free { witnesses } => witnesses,
        GlobalFreeness::NotFree { chart, .. } => {
            return Err(Error::Witness(format!("action is not free on chart {chart}")))
        }
        GlobalFreeness::Undecided { chart, bound } => {
            return Err(Error::Undecided { bound, what: format!("freeness on chart {chart}") })
        }
    };
    let charts: Vec<QuotientChart> = witnesses
        .into_par_iter()
        .enumerate()
        .map(|(i, theta)| {
            let generators = invariant_generators(&v.fields[i], &theta)?;
            torsor_check(&v.fields[i], &theta)?;
            Ok(QuotientChart { witness: theta, generators })
        })
        .collect::<Result<_>>()?;
    // transitions carry invariants to invariants
    for (&(i, j), ov) in x.overlaps() {
        for g in &charts[j].generators {
            let img = ov.map.apply(&g.element)?;
            if !v.fields[i].derive(&img)?.is_zero() {
                return Err(Error::Witness(format!("transition ({i},{j}) does not preserve invariance of {}", g.name)));
            }
        }
    }
    let rewriters: Vec<Option<Rewriter>> = charts
        .iter()
        .zip(x.charts())
        .map(|(qc, c)| {
            let names: Vec<String> = qc.generators.iter().map(quotient_name).collect();
            Rewriter::new(&c.ring, &qc.generators, &qc.witness, &names).ok()
        })
        .collect();
    let concrete = if rewriters.iter().all(|r| r.is_some()) {
        let rw: Vec<&Rewriter> = rewriters.iter().map(|r| r.as_ref().unwrap()).collect();
        Some(concretize(x, v, &charts, &rw)?)
    } else {
        None
    };
    Ok(QuotientAtlas { base: x.clone(), field: v.clone(), charts, concrete, rewriters })
}

/// `A ≅ A^v[θ]`: every generator splits as `a + bθ` with invariant parts.
fn torsor_check(v: &HomologicalField, theta: &SuperPoly) -> Result<()> {
    let ring = v.ring();
    for g in ring.gens() {
        let f = SuperPoly::gen(ring, g);
        let (a, b) = decompose(v, theta, &f)?;
        if &a + &(&b * theta) != f || !v.derive(&a)?.is_zero() || !v.derive(&b)?.is_zero() {
            return Err(Error::Witness(format!("torsor splitting fails on {}", ring.gen_name(g))));
        }
    }
    Ok(())
}

fn concretize(x: &Atlas, v: &GlobalField, charts: &[QuotientChart], rw: &[&Rewriter]) -> Result<Atlas> {
    let ycharts: Vec<Chart> = (0..x.n_charts())
        .map(|i| {
            let weights = x.chart(i).weights.as_ref().map(|w| {
                let ring = &x.chart(i).ring;
                charts[i]
                    .generators
                    .iter()
                    .filter(|g| g.parity() == Parity::Even)
                    .chain(charts[i].generators.iter().filter(|g| g.parity() == Parity::Odd))
                    .map(|g| source_weight(ring, g, w))
                    .collect()
            });
            Chart { label: x.chart(i).label.clone(), ring: rw[i].quotient_ring().clone(), frame: None, weights }
        })
        .collect();
    let entries: Vec<((usize, usize), Overlap)> = x
        .overlaps()
        .par_iter()
        .map(|(&(i, j), ov)| -> Result<((usize, usize), Overlap)> {
            let pivots: Vec<usize> = ov.pivots.iter().map(|&p| rw[i].even_index_of(p)).collect();
            // the quotient localizes at f̃ = v(fθ), which is the invariant lift of f
            for &p in &ov.pivots {
                let f = SuperPoly::even_gen(&x.chart(i).ring, p);
                let ft = v.fields[i].derive(&(&f * &charts[i].witness))?;
                let q = &rw[i].even_elems[rw[i].even_index_of(p)];
                if &ft != q {
                    return Err(Error::Witness(format!("f̃ differs from the invariant lift on ({i},{j})")));
                }
            }
            let ring = rw[i].quotient_ring().with_invertible(&pivots);
            let gj = &charts[j].generators;
            let ordered = gj
                .iter()
                .filter(|g| g.parity() == Parity::Even)
                .chain(gj.iter().filter(|g| g.parity() == Parity::Odd));
            let images = ordered
                .map(|g| rw[i].rewrite(&ov.map.apply(&g.element)?)?.in_ring(&ring))
                .collect::<Result<Vec<_>>>()?;
            let map = RingHom::new(&ycharts[j].ring, &ring, images)?;
            Ok(((i, j), Overlap { pivots, ring, map }))
        })
        .collect::<Result<_>>()?;
    let overlaps: BTreeMap<(usize, usize), Overlap> = entries.into_iter().collect();
    let y = Atlas::new(format!("{}/v", x.name), AtlasKind::Quotient(Box::new(x.kind.clone())), ycharts, overlaps)?;
    y.verify()?;
    Ok(y)
}

/// Torus weight of an invariant generator: that of the leading reduced or
/// linear monomial (the field and witness have weight zero).
fn source_weight(ring: &Ring, g: &InvariantGenerator, w: &[Vec<i64>]) -> Vec<i64> {
    let (m, _) = g.element.terms().iter().next().expect("nonzero generator");
    let mut acc = vec![0; w[0].len()];
    for (i, &e) in m.even.iter().enumerate() {
        for (a, x) in acc.iter_mut().zip(&w[i]) {
            *a += e as i64 * x;
        }
    }
    for j in m.odd.indices() {
        for (a, x) in acc.iter_mut().zip(&w[ring.n_even() + j]) {
            *a += x;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_projective_superspace, pi_action_field, standard_pi_symmetry};

    #[test]
    fn p12_quotient_is_p1_pi() {
        let x = build_projective_superspace(1, 2).unwrap();
        let v = pi_action_field(&x, &standard_pi_symmetry(2)).unwrap();
        let q = quotient_atlas(&x, &v, 1).unwrap();
        let r = &x.chart(0).ring;
        let u = SuperPoly::var(r, "u1");
        let e0 = SuperPoly::var(r, "eta0");
        let e1 = SuperPoly::var(r, "eta1");
        let els: Vec<SuperPoly> = q.charts[0].generators.iter().map(|g| g.element.clone()).collect();
        assert_eq!(els, vec![&u - &(&e1 * &e0), &e1 - &(&u * &e0)]);
        assert!((&els[1] * &els[1]).is_zero());
        let y = q.concrete().unwrap();
        assert_eq!(y.n_charts(), 2);
        assert_eq!(y.dimension(), (1, 1));
    }

    #[test]
    fn p23_quotient_is_p2_pi() {
        let x = build_projective_superspace(2, 3).unwrap();
        let v = pi_action_field(&x, &standard_pi_symmetry(3)).unwrap();
        let q = quotient_atlas(&x, &v, 1).unwrap();
        assert_eq!(q.charts.len(), 3);
        for c in &q.charts {
            let ev = c.generators.iter().filter(|g| g.parity() == Parity::Even).count();
            assert_eq!((ev, c.generators.len() - ev), (2, 2));
        }
        let y = q.concrete().unwrap();
        let rep = y.verify().unwrap();
        assert_eq!(rep.triples, 6);
    }
}
