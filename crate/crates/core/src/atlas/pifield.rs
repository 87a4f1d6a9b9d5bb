use num_traits::{One, Zero};

use super::{Atlas, GlobalField};
use crate::error::{Error, Result};
use crate::homological::{HomologicalField, OddDerivation};
use crate::rational::Q;
use crate::superalgebra::SuperPoly;

/// The Π-symmetry of `k^{n|n}` with `p(θ_i) = x_i` and `p(x_i) = −θ_i`, as a
/// matrix acting on coordinate columns (even basis vectors first).
pub fn standard_pi_symmetry(n: usize) -> Vec<Vec<Q>> {
    let mut p = vec![vec![Q::zero(); 2 * n]; 2 * n];
    for i in 0..n {
        p[i][n + i] = Q::one();
        p[n + i][i] = -Q::one();
    }
    p
}

/// The homological field of the action `W ↦ W + ψ·pW` on every graph chart.
///
/// On a chart with frame `[I; F]`, `X = p₁₁ + p₁₂F` and `Y = p₂₁ + p₂₂F`, and
/// `v(F)_{rc} = Y_{rc} − Σ_s (−1)^{|r|+|s|} F_{rs} X_{sc}`.
pub fn pi_action_field(atlas: &Atlas, p: &[Vec<Q>]) -> Result<GlobalField> {
    let mut fields = Vec::with_capacity(atlas.n_charts());
    for chart in atlas.charts() {
        let frame = chart
            .frame
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("chart {} carries no frame", chart.label)))?;
        let w = &frame.matrix;
        let rows = w.row_parities();
        let cols = w.col_parities();
        let n = rows.len();
        if p.len() != n || p.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("Π-symmetry must be {n}×{n}")));
        }
        check_pi_symmetry(p, rows)?;
        let ring = &chart.ring;
        let pw: Vec<Vec<SuperPoly>> = (0..n)
            .map(|r| {
                (0..cols.len())
                    .map(|c| {
                        let mut acc = SuperPoly::zero(ring);
                        for (k, pk) in p[r].iter().enumerate() {
                            if !pk.is_zero() {
                                acc = &acc + &w.get(k, c).scale(pk);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let x: Vec<&Vec<SuperPoly>> = frame.pivot_rows.iter().map(|&s| &pw[s]).collect();
        let mut images = Vec::with_capacity(frame.cells.len());
        for &(r, c) in &frame.cells {
            let mut val = pw[r][c].clone();
            for (s, xs) in x.iter().enumerate() {
                let f = w.get(r, s);
                if f.is_zero() || xs[c].is_zero() {
                    continue;
                }
                let t = f * &xs[c];
                val = if rows[r].add(cols[s]) == crate::Parity::Even { &val - &t } else { &val + &t };
            }
            images.push(val);
        }
        fields.push(HomologicalField::new(OddDerivation::new(ring, images)?)?);
    }
    GlobalField::new(atlas, fields)
}

fn check_pi_symmetry(p: &[Vec<Q>], par: &[crate::Parity]) -> Result<()> {
    let n = p.len();
    for r in 0..n {
        for c in 0..n {
            if !p[r][c].is_zero() && par[r] == par[c] {
                return Err(Error::Parity("Π-symmetry must be odd".into()));
            }
            let sq: Q = (0..n).map(|k| &p[r][k] * &p[k][c]).sum();
            let want = if r == c { -Q::one() } else { Q::zero() };
            if sq != want {
                return Err(Error::Witness("p² ≠ −id".into()));
            }
        }
    }
    Ok(())
}
