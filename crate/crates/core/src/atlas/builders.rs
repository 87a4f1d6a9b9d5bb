use std::collections::BTreeMap;


use super::{Atlas, AtlasKind, Chart, Frame, GlobalField, Overlap};
use crate::error::{Error, Result};
use crate::homological::{HomologicalField, OddDerivation};
use crate::superalgebra::{GenRef, Monomial, OddSet, Parity, Ring, RingDescriptor, RingHom, SuperMatrix, SuperPoly};

fn unit_vec(dim: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `P^{m|n}` covered by the `m + 1` standard charts `x_i ≠ 0`, with even
/// coordinates `u{j} = x_j/x_i` and odd coordinates `eta{k} = θ_k/x_i`.
pub fn build_projective_superspace(m: usize, n: usize) -> Result<Atlas> {
    let odd: Vec<String> = (0..n).map(|k| format!("eta{k}")).collect();
    let mut charts = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let even: Vec<String> = (0..=m).filter(|&j| j != i).map(|j| format!("u{j}")).collect();
        let ring = RingDescriptor::polynomial(&even, &odd)?;
        let rows: Vec<Parity> = (0..=m).map(|_| Parity::Even).chain((0..n).map(|_| Parity::Odd)).collect();
        let mut entries = Vec::with_capacity(m + 1 + n);
        let mut cells = Vec::new();
        for j in 0..=m {
            if j == i {
                entries.push(vec![SuperPoly::one(&ring)]);
            } else {
                entries.push(vec![SuperPoly::var(&ring, &format!("u{j}"))]);
                cells.push((j, 0));
            }
        }
        for k in 0..n {
            entries.push(vec![SuperPoly::var(&ring, &format!("eta{k}"))]);
            cells.push((m + 1 + k, 0));
        }
        let matrix = SuperMatrix::new(&ring, entries, rows, vec![Parity::Even])?;
        let dim = m + 1;
        let mut weights: Vec<Vec<i64>> =
            (0..=m).filter(|&j| j != i).map(|j| sub(&unit_vec(dim, j), &unit_vec(dim, i))).collect();
        weights.extend((0..n).map(|k| sub(&unit_vec(dim, k % dim), &unit_vec(dim, i))));
        charts.push(Chart {
            label: format!("x{i}≠0"),
            ring,
            frame: Some(Frame { matrix, pivot_rows: vec![i], cells }),
            weights: Some(weights),
        });
    }
    let mut overlaps = BTreeMap::new();
    for i in 0..=m {
        for j in 0..=m {
            if i == j {
                continue;
            }
            let ci = &charts[i].ring;
            let pivot = ci.find(&format!("u{j}")).map(|g| match g {
                GenRef::Even(p) => p,
                GenRef::Odd(_) => unreachable!(),
            });
            let pivot = pivot.expect("pivot coordinate");
            let ring = ci.with_invertible(&[pivot]);
            let uj_inv = SuperPoly::var(&ring, &format!("u{j}")).invert_even()?;
            let coord = |l: usize| -> SuperPoly {
                if l == i {
                    SuperPoly::one(&ring)
                } else {
                    SuperPoly::var(&ring, &format!("u{l}"))
                }
            };
            let cj = &charts[j].ring;
            let mut images = Vec::with_capacity(cj.n_gens());
            for l in (0..=m).filter(|&l| l != j) {
                images.push(&coord(l) * &uj_inv);
            }
            for k in 0..n {
                images.push(&SuperPoly::var(&ring, &format!("eta{k}")) * &uj_inv);
            }
            let map = RingHom::new(cj, &ring, images)?;
            overlaps.insert((i, j), Overlap { pivots: vec![pivot], ring, map });
        }
    }
    Atlas::new(format!("P^{{{m}|{n}}}"), AtlasKind::Projective { m, n }, charts, overlaps)
}

fn subsets(range: std::ops::Range<usize>, k: usize) -> Vec<Vec<usize>> {
    let items: Vec<usize> = range.collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for idx in start..items.len() {
            cur.push(items[idx]);
            rec(items, k, idx + 1, cur, out);
            cur.pop();
        }
    }
    rec(&items, k, 0, &mut cur, &mut out);
    out
}

/// `G(a|b, m|n)` covered by graph charts. Basis vectors `0..m` are even and
/// `m..m+n` odd; a chart is a set `S` of `a` even and `b` odd basis vectors,
/// with coordinate `z{r}_{s}` the entry of `F` in row `r ∉ S`, column `s ∈ S`.
///
/// Overlaps are stored between charts differing in at most one even and one
/// odd basis vector, where the inverted pivots are coordinates.
pub fn build_supergrassmannian(a: usize, b: usize, m: usize, n: usize) -> Result<Atlas> {
    if a > m || b > n {
        return Err(Error::Dimension(format!("G({a}|{b},{m}|{n}) needs a≤m, b≤n")));
    }
    let par = |r: usize| if r < m { Parity::Even } else { Parity::Odd };
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for ev in subsets(0..m, a) {
        for od in subsets(m..m + n, b) {
            sets.push(ev.iter().chain(&od).copied().collect());
        }
    }
    let wt = |r: usize| unit_vec(m + n, r);
    let name = |r: usize, s: usize| format!("z{r}_{s}");
    let mut charts = Vec::with_capacity(sets.len());
    for s_set in &sets {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut even_cells = Vec::new();
        let mut odd_cells = Vec::new();
        let mut even_w = Vec::new();
        let mut odd_w = Vec::new();
        for r in (0..m + n).filter(|r| !s_set.contains(r)) {
            for (c, &s) in s_set.iter().enumerate() {
                let w = sub(&wt(r), &wt(s));
                if par(r) == par(s) {
                    even.push(name(r, s));
                    even_cells.push((r, c));
                    even_w.push(w);
                } else {
                    odd.push(name(r, s));
                    odd_cells.push((r, c));
                    odd_w.push(w);
                }
            }
        }
        let ring = RingDescriptor::polynomial(&even, &odd)?;
        let rows: Vec<Parity> = (0..m + n).map(par).collect();
        let cols: Vec<Parity> = s_set.iter().map(|&s| par(s)).collect();
        let mut entries = vec![vec![SuperPoly::zero(&ring); s_set.len()]; m + n];
        for (c, &s) in s_set.iter().enumerate() {
            entries[s][c] = SuperPoly::one(&ring);
        }
        for r in (0..m + n).filter(|r| !s_set.contains(r)) {
            for (c, &s) in s_set.iter().enumerate() {
                entries[r][c] = SuperPoly::var(&ring, &name(r, s));
            }
        }
        let matrix = SuperMatrix::new(&ring, entries, rows, cols)?;
        let cells = even_cells.into_iter().chain(odd_cells).collect();
        let weights = even_w.into_iter().chain(odd_w).collect();
        let label = format!("S={s_set:?}");
        charts.push(Chart { label, ring, frame: Some(Frame { matrix, pivot_rows: s_set.clone(), cells }), weights: Some(weights) });
    }
    let mut overlaps = BTreeMap::new();
    for (i, si) in sets.iter().enumerate() {
        for (j, sj) in sets.iter().enumerate() {
            if i == j {
                continue;
            }
            let outs: Vec<usize> = si.iter().filter(|s| !sj.contains(s)).copied().collect();
            let ins: Vec<usize> = sj.iter().filter(|s| !si.contains(s)).copied().collect();
            let n_even_swaps = outs.iter().filter(|&&s| s < m).count();
            if n_even_swaps > 1 || outs.len() - n_even_swaps > 1 {
                continue;
            }
            let ci = &charts[i];
            let mut pivots = Vec::new();
            for &s in &outs {
                let t = *ins.iter().find(|&&t| par(t) == par(s)).expect("matching swap");
                match ci.ring.find(&name(t, s)) {
                    Some(GenRef::Even(p)) => pivots.push(p),
                    _ => return Err(Error::Gluing("pivot coordinate is not even".into())),
                }
            }
            let ring = ci.ring.with_invertible(&pivots);
            let frame = ci.frame.as_ref().unwrap();
            let w = frame.matrix.map(|p| p.in_ring(&ring), &ring)?;
            let top = w.select_rows(sj);
            let w_new = w.try_mul(&top.inverse()?)?;
            let cj = &charts[j];
            let cells_j = &cj.frame.as_ref().unwrap().cells;
            let images: Vec<SuperPoly> = cells_j.iter().map(|&(r, c)| w_new.get(r, c).clone()).collect();
            let map = RingHom::new(&cj.ring, &ring, images)?;
            overlaps.insert((i, j), Overlap { pivots, ring, map });
        }
    }
    Atlas::new(format!("G({a}|{b},{m}|{n})"), AtlasKind::Grassmannian { a, b, m, n }, charts, overlaps)
}

/// Embed an element of `from` into `to`, shifting even exponents by
/// `even_shift` slots and odd indices by `odd_shift`.
pub(crate) fn embed(p: &SuperPoly, to: &Ring, even_shift: usize, odd_shift: usize) -> SuperPoly {
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

fn tensor_ring(x: &Ring, y: &Ring) -> Result<Ring> {
    RingDescriptor::tensor(&x.suffixed("_1"), &y.suffixed("_2"))
}

/// Product atlas with charts `(i, j)` numbered `i·|Y| + j` and generators
/// suffixed `_1` (left factor) and `_2` (right factor).
pub fn product(x: &Atlas, y: &Atlas) -> Result<Atlas> {
    let ny = y.n_charts();
    let mut charts = Vec::new();
    for cx in x.charts() {
        for cy in y.charts() {
            let ring = tensor_ring(&cx.ring, &cy.ring)?;
            let weights = match (&cx.weights, &cy.weights) {
                (Some(wx), Some(wy)) => {
                    let dx = wx.first().map_or(0, |w| w.len());
                    let dy = wy.first().map_or(0, |w| w.len());
                    let left = |w: &Vec<i64>| w.iter().copied().chain(std::iter::repeat(0).take(dy)).collect::<Vec<_>>();
                    let right = |w: &Vec<i64>| std::iter::repeat(0).take(dx).chain(w.iter().copied()).collect::<Vec<_>>();
                    let (nxe, nye) = (cx.ring.n_even(), cy.ring.n_even());
                    let mut out: Vec<Vec<i64>> = wx[..nxe].iter().map(left).collect();
                    out.extend(wy[..nye].iter().map(right));
                    out.extend(wx[nxe..].iter().map(left));
                    out.extend(wy[nye..].iter().map(right));
                    Some(out)
                }
                _ => None,
            };
            charts.push(Chart { label: format!("{}×{}", cx.label, cy.label), ring, frame: None, weights });
        }
    }
    let mut overlaps = BTreeMap::new();
    for i in 0..x.n_charts() {
        for j in 0..ny {
            for k in 0..x.n_charts() {
                for l in 0..ny {
                    if (i, j) == (k, l) {
                        continue;
                    }
                    if (i != k && x.overlap(i, k).is_none()) || (j != l && y.overlap(j, l).is_none()) {
                        continue;
                    }
                    let src = &charts[k * ny + l].ring;
                    let base = &charts[i * ny + j].ring;
                    let xe = x.chart(i).ring.n_even();
                    let mut pivots: Vec<usize> = x.overlap(i, k).map_or(vec![], |o| o.pivots.clone());
                    pivots.extend(y.overlap(j, l).map_or(vec![], |o| o.pivots.iter().map(|p| p + xe).collect()));
                    let ring = base.with_invertible(&pivots);
                    let phix = x.transition_into(i, k, &x.chart(i).ring.with_invertible(x.overlap(i, k).map_or(&[][..], |o| &o.pivots)))?;
                    let phiy = y.transition_into(j, l, &y.chart(j).ring.with_invertible(y.overlap(j, l).map_or(&[][..], |o| &o.pivots)))?;
                    let (xo, _) = (x.chart(i).ring.n_odd(), ());
                    let (kx, ly) = (x.chart(k).ring.clone(), y.chart(l).ring.clone());
                    let mut images = Vec::new();
                    for e in 0..kx.n_even() {
                        images.push(embed(phix.even_image(e), &ring, 0, 0));
                    }
                    for e in 0..ly.n_even() {
                        images.push(embed(phiy.even_image(e), &ring, xe, xo));
                    }
                    for o in 0..kx.n_odd() {
                        images.push(embed(phix.odd_image(o), &ring, 0, 0));
                    }
                    for o in 0..ly.n_odd() {
                        images.push(embed(phiy.odd_image(o), &ring, xe, xo));
                    }
                    let map = RingHom::new(src, &ring, images)?;
                    overlaps.insert((i * ny + j, k * ny + l), Overlap { pivots, ring, map });
                }
            }
        }
    }
    Atlas::new(
        format!("{}×{}", x.name, y.name),
        AtlasKind::Product(Box::new(x.kind.clone()), Box::new(y.kind.clone())),
        charts,
        overlaps,
    )
}

/// The fields `v_X ⊗ 1` and `1 ⊗ v_Y` on a product atlas built by [`product`].
pub fn product_fields(
    x: &Atlas,
    y: &Atlas,
    xy: &Atlas,
    vx: Option<&GlobalField>,
    vy: Option<&GlobalField>,
) -> Result<GlobalField> {
    let ny = y.n_charts();
    let mut fields = Vec::new();
    for i in 0..x.n_charts() {
        for j in 0..ny {
            let ring = &xy.chart(i * ny + j).ring;
            let (rx, ry) = (&x.chart(i).ring, &y.chart(j).ring);
            let zero = |n: usize| vec![SuperPoly::zero(ring); n];
            let xe = rx.n_even();
            let xo = rx.n_odd();
            let (ex, ox) = match vx {
                Some(v) => {
                    let f = &v.fields[i];
                    (
                        (0..xe).map(|e| embed(f.image(GenRef::Even(e)), ring, 0, 0)).collect(),
                        (0..xo).map(|o| embed(f.image(GenRef::Odd(o)), ring, 0, 0)).collect(),
                    )
                }
                None => (zero(xe), zero(xo)),
            };
            let (ey, oy) = match vy {
                Some(v) => {
                    let f = &v.fields[j];
                    (
                        (0..ry.n_even()).map(|e| embed(f.image(GenRef::Even(e)), ring, xe, xo)).collect(),
                        (0..ry.n_odd()).map(|o| embed(f.image(GenRef::Odd(o)), ring, xe, xo)).collect(),
                    )
                }
                None => (zero(ry.n_even()), zero(ry.n_odd())),
            };
            let images: Vec<SuperPoly> = [ex, ey, ox, oy].into_iter().flatten().collect();
            fields.push(HomologicalField::new(OddDerivation::new(ring, images)?)?);
        }
    }
    GlobalField::new(xy, fields)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_transition() {
        let x = build_projective_superspace(1, 0).unwrap();
        assert_eq!(x.n_charts(), 2);
        let ov = x.overlap(0, 1).unwrap();
        let u = SuperPoly::var(&ov.ring, "u1");
        assert_eq!(ov.map.even_image(0), &u.invert_even().unwrap());
        x.verify().unwrap();
    }

    #[test]
    fn p12_transition() {
        let x = build_projective_superspace(1, 2).unwrap();
        let ov = x.overlap(1, 0).unwrap();
        let u = SuperPoly::var(&ov.ring, "u0");
        let ui = u.invert_even().unwrap();
        assert_eq!(ov.map.even_image(0), &ui);
        assert_eq!(ov.map.odd_image(1), &(&SuperPoly::var(&ov.ring, "eta1") * &ui));
        x.verify().unwrap();
    }

    #[test]
    fn p2_triples() {
        let r = build_projective_superspace(2, 0).unwrap().verify().unwrap();
        assert_eq!(r.triples, 6);
        assert_eq!(r.triples_skipped, 0);
    }

    #[test]
    fn grassmannian_shapes() {
        let g = build_supergrassmannian(1, 1, 2, 2).unwrap();
        assert_eq!(g.n_charts(), 4);
        for c in g.charts() {
            assert_eq!((c.ring.n_even(), c.ring.n_odd()), (2, 2));
        }
        g.verify().unwrap();
        let g = build_supergrassmannian(1, 0, 2, 0).unwrap();
        assert_eq!(g.n_charts(), 2);
        g.verify().unwrap();
        build_supergrassmannian(1, 0, 2, 2).unwrap().verify().unwrap();
    }

    #[test]
    fn product_glues() {
        let p = build_projective_superspace(1, 2).unwrap();
        let pp = product(&p, &p).unwrap();
        assert_eq!(pp.n_charts(), 4);
        pp.verify().unwrap();
    }
}
