//! Deliberately naive cross-checks.
//!
//! Everything here enumerates monomials and runs its own dense Gaussian
//! elimination; the only shared code is the polynomial arithmetic of
//! [`crate::superalgebra`]. Sizes are capped so that full enumeration stays
//! cheap.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::criteria::SpaceSpec;
use crate::error::{Error, Result};
use crate::homological::HomologicalField;
use crate::rational::Q;
use crate::superalgebra::{GenRef, Parity, SuperPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMethod {
    MonomialCount,
    ExhaustiveLinearSolve,
    ExhaustiveExpansion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub query: String,
    pub method: OracleMethod,
    pub value: serde_json::Value,
    /// Enumeration is fixed, so the seed only labels the run.
    pub seed: u64,
}

/// Row-reduces in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<Q>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(row, p);
        let inv = Q::one() / &m[row][c];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pr = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

/// Rank of a dense matrix given by rows.
pub fn dense_rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Solves `A x = b` (`A` by columns). Returns a particular solution, if any,
/// and a kernel basis.
fn dense_solve(columns: &[Vec<Q>], b: &[Q]) -> (Option<Vec<Q>>, Vec<Vec<Q>>) {
    let n = columns.len();
    let rows = b.len();
    let mut m: Vec<Vec<Q>> = (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).chain(std::iter::once(b[r].clone())).collect())
        .collect();
    let pivots = row_reduce(&mut m);
    let particular = if pivots.contains(&n) {
        None
    } else {
        let mut x = vec![Q::zero(); n];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = m[r][n].clone();
        }
        Some(x)
    };
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); n];
            x[f] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                if c < n {
                    x[c] = -m[r][f].clone();
                }
            }
            x
        })
        .collect();
    (particular, kernel)
}

/// Exponent vectors of length `n` with entries in `lo..=hi` summing to `total`.
fn exponent_vectors(n: usize, lo: i64, hi: i64, total: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in exponent_vectors(n - 1, lo, hi, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Degree-`m` monomials in `n + 1` variables, counted one by one.
pub fn monomial_h0(n: usize, m: i64) -> u64 {
    if m < 0 {
        return 0;
    }
    exponent_vectors(n + 1, 0, m, m).len() as u64
}

/// `(h⁰, h¹)` of `O(m)` on `P¹` from the two-chart Laurent complex
/// `k[u] ⊕ k[u⁻¹] → k[u, u⁻¹]`, `(f, g) ↦ u^m g(u⁻¹) − f(u)`.
pub fn cech_p1(m: i64) -> Result<(u64, u64)> {
    if m.abs() > 12 {
        return Err(Error::Unsupported("cech_p1 is capped at |m| ≤ 12".into()));
    }
    let w = m.abs() + 2;
    let span = 2 * w;
    // source: f = u^a (a = 0..=span), g = w^b (b = 0..=span)
    // target: Laurent degrees -3w..=3w
    let lo = -3 * w;
    let width = (6 * w + 1) as usize;
    let mut columns = Vec::new();
    for a in 0..=span {
        let mut c = vec![Q::zero(); width];
        c[(a - lo) as usize] = -Q::one();
        columns.push(c);
    }
    for b in 0..=span {
        let mut c = vec![Q::zero(); width];
        c[(m - b - lo) as usize] = Q::one();
        columns.push(c);
    }
    let rows: Vec<Vec<Q>> = (0..width).map(|r| columns.iter().map(|c| c[r].clone()).collect()).collect();
    let h0 = columns.len() - dense_rank(&rows);
    // cokernel restricted to degrees the window covers completely
    let window: Vec<usize> = (-w..=w).map(|k| (k - lo) as usize).collect();
    let projected: Vec<Vec<Q>> = window.iter().map(|&r| rows[r].clone()).collect();
    let h1 = window.len() - dense_rank(&projected);
    Ok((h0 as u64, h1 as u64))
}

/// `h^q(Pⁿ, O(d))` for all `q` by brute force on the Laurent Čech complex
/// of the standard cover. The complex splits by exponent vector: a monomial
/// `x^a` with negative entries on `S` lives exactly on the simplices
/// containing `S`.
pub fn cech_pn_line(n: usize, d: i64) -> Result<Vec<u64>> {
    if n > 3 || d.abs() > 10 {
        return Err(Error::Unsupported("cech_pn_line is capped at n ≤ 3, |d| ≤ 10".into()));
    }
    let b = d.abs() + n as i64 + 2;
    let vertices = n + 1;
    let simplices: Vec<Vec<Vec<usize>>> = (1..=vertices)
        .map(|k| (0u32..1 << vertices).filter(|s| s.count_ones() as usize == k).map(|s| bits(s, vertices)).collect())
        .collect();
    let mut h = vec![0u64; vertices];
    for a in exponent_vectors(vertices, -b, b, d) {
        let neg: Vec<usize> = (0..vertices).filter(|&i| a[i] < 0).collect();
        let cells: Vec<Vec<&Vec<usize>>> =
            simplices.iter().map(|level| level.iter().filter(|s| neg.iter().all(|i| s.contains(i))).collect()).collect();
        let mut ranks = vec![0usize; vertices];
        for p in 0..vertices.saturating_sub(1) {
            let rows: Vec<Vec<Q>> = cells[p + 1]
                .iter()
                .map(|tau| {
                    cells[p]
                        .iter()
                        .map(|sigma| match tau.iter().position(|v| !sigma.contains(v)) {
                            Some(k) if sigma.iter().all(|v| tau.contains(v)) => {
                                if k % 2 == 0 {
                                    Q::one()
                                } else {
                                    -Q::one()
                                }
                            }
                            _ => Q::zero(),
                        })
                        .collect()
                })
                .collect();
            ranks[p] = dense_rank(&rows);
        }
        for q in 0..vertices {
            let below = if q == 0 { 0 } else { ranks[q - 1] };
            h[q] += (cells[q].len() - ranks[q] - below) as u64;
        }
    }
    Ok(h)
}

fn bits(s: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| s >> i & 1 == 1).collect()
}

/// `h^q(P², Ω^j(m))` for `j ≤ 2`. `Ω¹(m)` comes from the Euler sequence
/// `0 → Ω¹(m) → O(m−1)³ → O(m) → 0`, whose maps on `H⁰` and `H²` are
/// multiplication by the coordinates on explicit monomial bases.
pub fn cech_p2_forms(j: usize, m: i64) -> Result<Vec<u64>> {
    match j {
        0 => cech_pn_line(2, m),
        2 => cech_pn_line(2, m - 3),
        1 => {
            let h0_src: Vec<Vec<i64>> = exponent_vectors(3, 0, (m - 1).max(0), m - 1);
            let h0_dst: Vec<Vec<i64>> = exponent_vectors(3, 0, m.max(0), m);
            let bound = m.abs() + 4;
            let h2_src: Vec<Vec<i64>> = exponent_vectors(3, -bound, -1, m - 1);
            let h2_dst: Vec<Vec<i64>> = exponent_vectors(3, -bound, -1, m);
            let euler = |src: &[Vec<i64>], dst: &[Vec<i64>]| -> Vec<Vec<Q>> {
                dst.iter()
                    .map(|t| {
                        (0..3)
                            .flat_map(|i| src.iter().map(move |s| (i, s)))
                            .map(|(i, s)| {
                                let mut r = s.clone();
                                r[i] += 1;
                                if &r == t {
                                    Q::one()
                                } else {
                                    Q::zero()
                                }
                            })
                            .collect()
                    })
                    .collect()
            };
            let r0 = dense_rank(&euler(&h0_src, &h0_dst));
            let r2 = dense_rank(&euler(&h2_src, &h2_dst));
            let h0 = 3 * h0_src.len() - r0;
            let h1 = h0_dst.len() - r0;
            let h2 = 3 * h2_src.len() - r2;
            if h2_dst.len() != r2 {
                return Err(Error::Inconsistent("Euler sequence is not surjective on H²".into()));
            }
            Ok(vec![h0 as u64, h1 as u64, h2 as u64])
        }
        _ => Err(Error::Unsupported(format!("Ω^{j} on P²"))),
    }
}

/// The affine solution set of `v(θ) = 1` over odd polynomials of degree at
/// most `bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSolutions {
    pub particular: Option<SuperPoly>,
    pub kernel: Vec<SuperPoly>,
}

impl WitnessSolutions {
    /// Whether `theta` lies in the solution set.
    pub fn contains(&self, theta: &SuperPoly) -> bool {
        let Some(p) = &self.particular else { return false };
        let diff = theta - p;
        if diff.is_zero() {
            return true;
        }
        let keys: Vec<_> = diff.terms().keys().chain(self.kernel.iter().flat_map(|k| k.terms().keys())).cloned().collect();
        let mut keys = keys;
        keys.sort();
        keys.dedup();
        let column = |f: &SuperPoly| -> Vec<Q> { keys.iter().map(|k| f.terms().get(k).cloned().unwrap_or_else(Q::zero)).collect() };
        let cols: Vec<Vec<Q>> = self.kernel.iter().map(column).collect();
        dense_solve(&cols, &column(&diff)).0.is_some()
    }
}

/// `v` applied to a product of generators by the odd Leibniz rule.
fn leibniz(v: &HomologicalField, factors: &[GenRef]) -> SuperPoly {
    let ring = v.ring();
    let mut total = SuperPoly::zero(ring);
    for i in 0..factors.len() {
        let mut term = SuperPoly::one(ring);
        let mut sign_odd = false;
        for (k, &g) in factors.iter().enumerate() {
            if k < i {
                sign_odd ^= matches!(g, GenRef::Odd(_));
                term = &term * &SuperPoly::gen(ring, g);
            } else if k == i {
                term = &term * v.image(g);
            } else {
                term = &term * &SuperPoly::gen(ring, g);
            }
        }
        total = if sign_odd { &total - &term } else { &total + &term };
    }
    total
}

/// Every solution of `v(θ) = 1` with `θ` odd of degree at most `bound`.
pub fn exhaustive_witness(v: &HomologicalField, bound: usize) -> Result<WitnessSolutions> {
    let ring = v.ring();
    if ring.n_even() > 4 || ring.n_odd() > 4 {
        return Err(Error::Unsupported("exhaustive_witness is capped at 4|4 generators".into()));
    }
    let mut basis: Vec<(SuperPoly, SuperPoly)> = Vec::new();
    for s in 0u32..1 << ring.n_odd() {
        let odd = bits(s, ring.n_odd());
        if odd.len() % 2 == 0 || odd.len() > bound {
            continue;
        }
        for e in (0..=bound - odd.len()).flat_map(|t| exponent_vectors(ring.n_even(), 0, t as i64, t as i64)) {
            let factors: Vec<GenRef> = e
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat(GenRef::Even(i)).take(k as usize))
                .chain(odd.iter().map(|&k| GenRef::Odd(k)))
                .collect();
            let elem = factors.iter().fold(SuperPoly::one(ring), |acc, &g| &acc * &SuperPoly::gen(ring, g));
            basis.push((elem, leibniz(v, &factors)));
        }
    }
    let mut keys: Vec<_> = basis.iter().flat_map(|(_, img)| img.terms().keys().cloned()).collect();
    let one = SuperPoly::one(ring);
    keys.extend(one.terms().keys().cloned());
    keys.sort();
    keys.dedup();
    let column = |f: &SuperPoly| -> Vec<Q> { keys.iter().map(|k| f.terms().get(k).cloned().unwrap_or_else(Q::zero)).collect() };
    let cols: Vec<Vec<Q>> = basis.iter().map(|(_, img)| column(img)).collect();
    let (particular, kernel) = dense_solve(&cols, &column(&one));
    let combine = |x: &[Q]| -> SuperPoly {
        basis.iter().zip(x).fold(SuperPoly::zero(ring), |acc, ((e, _), c)| &acc + &e.scale(c))
    };
    Ok(WitnessSolutions { particular: particular.as_deref().map(combine), kernel: kernel.iter().map(|k| combine(k)).collect() })
}

/// `(dim ker, dim im)` of `v` on the span of monomials of total degree `d`
/// and the given parity, for fields that preserve total degree.
pub fn derivation_slice(v: &HomologicalField, d: usize, parity: Parity) -> (usize, usize) {
    let ring = v.ring();
    let mut images = Vec::new();
    for s in 0u32..1 << ring.n_odd() {
        let odd = bits(s, ring.n_odd());
        if Parity::from_count(odd.len() as u32) != parity || odd.len() > d {
            continue;
        }
        for e in exponent_vectors(ring.n_even(), 0, (d - odd.len()) as i64, (d - odd.len()) as i64) {
            let factors: Vec<GenRef> = e
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat(GenRef::Even(i)).take(k as usize))
                .chain(odd.iter().map(|&k| GenRef::Odd(k)))
                .collect();
            images.push(leibniz(v, &factors));
        }
    }
    let mut keys: Vec<_> = images.iter().flat_map(|f| f.terms().keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let rows: Vec<Vec<Q>> =
        keys.iter().map(|k| images.iter().map(|f| f.terms().get(k).cloned().unwrap_or_else(Q::zero)).collect()).collect();
    let rank = dense_rank(&rows);
    (images.len() - rank, rank)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleQuery {
    MonomialH0 { n: usize, m: i64 },
    CechP1 { m: i64 },
    CechPnLine { n: usize, d: i64 },
    CechP2Forms { j: usize, m: i64 },
    /// The Π-field on one chart of a space.
    Witness { space: SpaceSpec, chart: usize, bound: usize },
}

pub fn run_query(q: &OracleQuery) -> Result<OracleReport> {
    let (query, method, value) = match q {
        OracleQuery::MonomialH0 { n, m } => {
            (format!("monomial_h0(n={n}, m={m})"), OracleMethod::MonomialCount, serde_json::json!(monomial_h0(*n, *m)))
        }
        OracleQuery::CechP1 { m } => {
            let (h0, h1) = cech_p1(*m)?;
            (format!("cech_p1(m={m})"), OracleMethod::ExhaustiveExpansion, serde_json::json!([h0, h1]))
        }
        OracleQuery::CechPnLine { n, d } => {
            (format!("cech_pn_line(n={n}, d={d})"), OracleMethod::ExhaustiveExpansion, serde_json::json!(cech_pn_line(*n, *d)?))
        }
        OracleQuery::CechP2Forms { j, m } => {
            (format!("cech_p2_forms(j={j}, m={m})"), OracleMethod::ExhaustiveLinearSolve, serde_json::json!(cech_p2_forms(*j, *m)?))
        }
        OracleQuery::Witness { space, chart, bound } => {
            let x = space.build()?;
            let v = space.pi_field(&x)?;
            let field = v.fields.get(*chart).ok_or_else(|| Error::Dimension(format!("{space} has no chart {chart}")))?;
            let sol = exhaustive_witness(field, *bound)?;
            let value = serde_json::json!({
                "particular": sol.particular.as_ref().map(|p| p.to_string()),
                "kernel": sol.kernel.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            });
            (format!("exhaustive_witness({space}, chart {chart}, D={bound})"), OracleMethod::ExhaustiveLinearSolve, value)
        }
    };
    Ok(OracleReport { query, method, value, seed: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::bott_dim;
    use crate::rational::q;
    use crate::RingDescriptor;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomial_h0(1, 2), 3);
        for n in 0..4 {
            assert_eq!(monomial_h0(n, 0), 1);
        }
        assert_eq!(monomial_h0(2, -1), 0);
        assert_eq!(monomial_h0(2, 3), 10);
    }

    #[test]
    fn p1_laurent_examples() {
        assert_eq!(cech_p1(-2).unwrap(), (0, 1));
        assert_eq!(cech_p1(0).unwrap(), (1, 0));
        assert_eq!(cech_p1(-1).unwrap(), (0, 0));
        for m in -12..=12 {
            let (h0, h1) = cech_p1(m).unwrap();
            assert_eq!(h0 as i64 - h1 as i64, m + 1);
        }
        assert!(cech_p1(13).is_err());
    }

    #[test]
    fn pn_lines_agree_with_p1_and_serre_duality() {
        for d in -6..=6 {
            let h = cech_pn_line(1, d).unwrap();
            let (h0, h1) = cech_p1(d).unwrap();
            assert_eq!(h, vec![h0, h1]);
            let h2 = cech_pn_line(2, d).unwrap();
            let dual = cech_pn_line(2, -d - 3).unwrap();
            assert_eq!(h2[0], dual[2]);
            assert_eq!(h2[1], 0);
        }
    }

    #[test]
    fn p2_forms_match_bott() {
        for j in 0..=2 {
            for m in -4..=4 {
                let h = cech_p2_forms(j, m).unwrap();
                for (qd, &v) in h.iter().enumerate() {
                    assert_eq!(v, bott_dim(2, j, m, qd), "j={j} m={m} q={qd}");
                }
            }
        }
    }

    #[test]
    fn witness_on_odd_line() {
        let r = RingDescriptor::polynomial(&[], &["th"]).unwrap();
        let v = HomologicalField::from_named(&r, &[("th", SuperPoly::one(&r))]).unwrap();
        let sol = exhaustive_witness(&v, 1).unwrap();
        assert_eq!(sol.particular, Some(SuperPoly::var(&r, "th")));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn witness_on_p12_chart_contains_minus_eta0() {
        let query = OracleQuery::Witness { space: SpaceSpec::Projective { m: 1, n: 2 }, chart: 0, bound: 1 };
        let x = SpaceSpec::Projective { m: 1, n: 2 }.build().unwrap();
        let v = SpaceSpec::Projective { m: 1, n: 2 }.pi_field(&x).unwrap();
        let sol = exhaustive_witness(&v.fields[0], 1).unwrap();
        let ring = v.fields[0].ring();
        let minus_eta0 = SuperPoly::var(ring, "eta0").scale(&q(-1));
        assert!(sol.contains(&minus_eta0), "{:?}", sol);
        assert!(sol.kernel.iter().all(|k| v.fields[0].derive(k).unwrap().is_zero()));
        assert_eq!(run_query(&query).unwrap(), run_query(&query).unwrap());
    }

    #[test]
    fn theta_dz_has_no_witness_and_known_slices() {
        let r = RingDescriptor::polynomial(&["z"], &["th"]).unwrap();
        let v = HomologicalField::from_named(&r, &[("z", SuperPoly::var(&r, "th"))]).unwrap();
        for d in 0..4 {
            assert!(exhaustive_witness(&v, d).unwrap().particular.is_none());
        }
        // ker = ℚ ⊕ θ·ℚ[z], im = θ·ℚ[z]
        for d in 0..=8 {
            let (ker_even, _) = derivation_slice(&v, d, Parity::Even);
            let (ker_odd, im_from_even) = derivation_slice(&v, d, Parity::Odd);
            assert_eq!(ker_even, usize::from(d == 0));
            assert_eq!(ker_odd, usize::from(d >= 1));
            let (_, im_to_odd) = derivation_slice(&v, d, Parity::Even);
            assert_eq!(im_to_odd, usize::from(d >= 1));
            assert_eq!(im_from_even, 0);
        }
    }
}
