use super::poly::SuperPoly;
use super::ring::Ring;
use super::Parity;
use crate::error::{Error, Result};

/// Matrix with homogeneous entries: entry `(r, c)` has parity
/// `row_parity(r) + col_parity(c)`. Products are the ordinary row-by-column
/// products (right-module convention `T(e_j) = Σ e_i a_ij`).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    ring: Ring,
    rows: Vec<Vec<SuperPoly>>,
    row_par: Vec<Parity>,
    col_par: Vec<Parity>,
}

impl SuperMatrix {
    pub fn new(ring: &Ring, rows: Vec<Vec<SuperPoly>>, row_par: Vec<Parity>, col_par: Vec<Parity>) -> Result<Self> {
        if rows.len() != row_par.len() {
            return Err(Error::Dimension("row count vs row parities".into()));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != col_par.len() {
                return Err(Error::Dimension(format!("row {r} has {} entries", row.len())));
            }
            for (c, e) in row.iter().enumerate() {
                let want = row_par[r].add(col_par[c]);
                if !e.has_parity(want) {
                    return Err(Error::Parity(format!("entry ({r},{c}) = {e} should be {want}")));
                }
            }
        }
        let rows = rows
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.in_ring(ring)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SuperMatrix { ring: ring.clone(), rows, row_par, col_par })
    }

    pub fn identity(ring: &Ring, par: &[Parity]) -> Self {
        let n = par.len();
        let rows = (0..n)
            .map(|r| (0..n).map(|c| if r == c { SuperPoly::one(ring) } else { SuperPoly::zero(ring) }).collect())
            .collect();
        SuperMatrix { ring: ring.clone(), rows, row_par: par.to_vec(), col_par: par.to_vec() }
    }

    pub fn zeros(ring: &Ring, row_par: &[Parity], col_par: &[Parity]) -> Self {
        let rows = row_par.iter().map(|_| col_par.iter().map(|_| SuperPoly::zero(ring)).collect()).collect();
        SuperMatrix { ring: ring.clone(), rows, row_par: row_par.to_vec(), col_par: col_par.to_vec() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_par.len()
    }

    pub fn row_parities(&self) -> &[Parity] {
        &self.row_par
    }

    pub fn col_parities(&self) -> &[Parity] {
        &self.col_par
    }

    pub fn get(&self, r: usize, c: usize) -> &SuperPoly {
        &self.rows[r][c]
    }

    pub fn rows(&self) -> &[Vec<SuperPoly>] {
        &self.rows
    }

    pub fn set(&mut self, r: usize, c: usize, v: SuperPoly) {
        self.rows[r][c] = v;
    }

    pub fn try_mul(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if self.col_par != other.row_par {
            return Err(Error::Dimension("inner parities of matrix product differ".into()));
        }
        let mut out = SuperMatrix::zeros(&self.ring, &self.row_par, &other.col_par);
        for r in 0..self.n_rows() {
            for c in 0..other.n_cols() {
                let mut acc = SuperPoly::zero(&self.ring);
                for k in 0..self.n_cols() {
                    let a = &self.rows[r][k];
                    let b = &other.rows[k][c];
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.rows[r][c] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &SuperMatrix) -> Result<SuperMatrix> {
        if self.row_par != other.row_par || self.col_par != other.col_par {
            return Err(Error::Dimension("matrix sum shapes differ".into()));
        }
        let mut out = self.clone();
        for r in 0..self.n_rows() {
            for c in 0..self.n_cols() {
                out.rows[r][c] = &self.rows[r][c] + &other.rows[r][c];
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&SuperPoly) -> Result<SuperPoly>, ring: &Ring) -> Result<SuperMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SuperMatrix::new(ring, rows, self.row_par.clone(), self.col_par.clone())
    }

    /// Select rows by index (in the given order).
    pub fn select_rows(&self, idx: &[usize]) -> SuperMatrix {
        SuperMatrix {
            ring: self.ring.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            row_par: idx.iter().map(|&i| self.row_par[i]).collect(),
            col_par: self.col_par.clone(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> SuperMatrix {
        SuperMatrix {
            ring: self.ring.clone(),
            rows: self.rows.iter().map(|row| idx.iter().map(|&i| row[i].clone()).collect()).collect(),
            row_par: self.row_par.clone(),
            col_par: idx.iter().map(|&i| self.col_par[i]).collect(),
        }
    }

    fn is_square_super(&self) -> bool {
        self.row_par == self.col_par
    }

    fn indices_of(par: &[Parity], p: Parity) -> Vec<usize> {
        par.iter().enumerate().filter(|(_, q)| **q == p).map(|(i, _)| i).collect()
    }

    fn block(&self, rp: Parity, cp: Parity) -> Vec<Vec<SuperPoly>> {
        let ri = Self::indices_of(&self.row_par, rp);
        let ci = Self::indices_of(&self.col_par, cp);
        ri.iter().map(|&r| ci.iter().map(|&c| self.rows[r][c].clone()).collect()).collect()
    }

    /// Inverse, provided the reduced even-even and odd-odd blocks have unit
    /// determinants.
    pub fn inverse(&self) -> Result<SuperMatrix> {
        if !self.is_square_super() {
            return Err(Error::Dimension("inverse of a non-square super matrix".into()));
        }
        let n = self.n_rows();
        // M0 = reduced parts of the diagonal-parity blocks; M = M0 + nilpotent.
        let mut m0 = SuperMatrix::zeros(&self.ring, &self.row_par, &self.col_par);
        for r in 0..n {
            for c in 0..n {
                if self.row_par[r] == self.col_par[c] {
                    m0.rows[r][c] = self.rows[r][c].reduced_part();
                }
            }
        }
        let m0_inv = {
            let mut inv = SuperMatrix::zeros(&self.ring, &self.row_par, &self.col_par);
            for p in [Parity::Even, Parity::Odd] {
                let idx = Self::indices_of(&self.row_par, p);
                if idx.is_empty() {
                    continue;
                }
                let blk: Vec<Vec<SuperPoly>> =
                    idx.iter().map(|&r| idx.iter().map(|&c| m0.rows[r][c].clone()).collect()).collect();
                let binv = invert_commutative(&self.ring, &blk)?;
                for (a, &r) in idx.iter().enumerate() {
                    for (b, &c) in idx.iter().enumerate() {
                        inv.rows[r][c] = binv[a][b].clone();
                    }
                }
            }
            inv
        };
        let mut nil = self.clone();
        for r in 0..n {
            for c in 0..n {
                nil.rows[r][c] = &self.rows[r][c] - &m0.rows[r][c];
            }
        }
        // (I + N M0^{-1})^{-1} = Σ (−N M0^{-1})^k
        let mut step = nil.try_mul(&m0_inv)?;
        for row in step.rows.iter_mut() {
            for e in row.iter_mut() {
                *e = -&*e;
            }
        }
        let id = SuperMatrix::identity(&self.ring, &self.row_par);
        let mut sum = id.clone();
        let mut term = id;
        loop {
            term = term.try_mul(&step)?;
            if term.rows.iter().all(|r| r.iter().all(|e| e.is_zero())) {
                break;
            }
            sum = sum.add(&term)?;
        }
        m0_inv.try_mul(&sum)
    }

    /// `Ber [[A,B],[C,D]] = det(A − B D⁻¹ C) · det(D)⁻¹`.
    pub fn berezinian(&self) -> Result<SuperPoly> {
        if !self.is_square_super() {
            return Err(Error::Dimension("berezinian of a non-square super matrix".into()));
        }
        let a = self.block(Parity::Even, Parity::Even);
        let b = self.block(Parity::Even, Parity::Odd);
        let c = self.block(Parity::Odd, Parity::Even);
        let d = self.block(Parity::Odd, Parity::Odd);
        let ne = a.len();
        let no = d.len();
        let det_d = det_commutative(&self.ring, &d);
        let det_d_inv = det_d
            .invert_even()
            .map_err(|e| Error::NotInvertible(format!("odd-odd block: {e}")))?;
        let schur = if no == 0 || ne == 0 {
            a
        } else {
            let d_inv = invert_commutative(&self.ring, &d)?;
            let mut s = a.clone();
            for i in 0..ne {
                for j in 0..ne {
                    let mut acc = SuperPoly::zero(&self.ring);
                    for k in 0..no {
                        for l in 0..no {
                            let t = &(&b[i][k] * &d_inv[k][l]) * &c[l][j];
                            acc = &acc + &t;
                        }
                    }
                    s[i][j] = &s[i][j] - &acc;
                }
            }
            s
        };
        let det_a = det_commutative(&self.ring, &schur);
        if ne > 0 {
            det_a
                .invert_even()
                .map_err(|e| Error::NotInvertible(format!("even-even block: {e}")))?;
        }
        Ok(&det_a * &det_d_inv)
    }
}

/// Determinant of a square matrix with pairwise commuting (even) entries.
pub fn det_commutative(ring: &Ring, m: &[Vec<SuperPoly>]) -> SuperPoly {
    let n = m.len();
    match n {
        0 => SuperPoly::one(ring),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        _ => {
            let mut acc = SuperPoly::zero(ring);
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<SuperPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
                    .collect();
                let t = &m[0][c] * &det_commutative(ring, &minor);
                acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Inverse by adjugate over the commutative even subring; the determinant must
/// be a unit.
pub fn invert_commutative(ring: &Ring, m: &[Vec<SuperPoly>]) -> Result<Vec<Vec<SuperPoly>>> {
    let n = m.len();
    let det = det_commutative(ring, m);
    let det_inv = det
        .invert_even()
        .map_err(|e| Error::NotInvertible(format!("block determinant {det}: {e}")))?;
    let mut out = vec![vec![SuperPoly::zero(ring); n]; n];
    if n == 1 {
        out[0][0] = det_inv;
        return Ok(out);
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<SuperPoly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, e)| e.clone()).collect())
                .collect();
            let cof = det_commutative(ring, &minor);
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            out[i][j] = &cof * &det_inv;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::RingDescriptor;
    use Parity::*;

    #[test]
    fn identity_and_diagonal_berezinian() {
        let r = RingDescriptor::new(&["a", "d"], &["b", "c"], &["a", "d"]).unwrap();
        let id = SuperMatrix::identity(&r, &[Even, Even, Odd]);
        assert_eq!(id.berezinian().unwrap(), SuperPoly::one(&r));
        let a = SuperPoly::var(&r, "a");
        let d = SuperPoly::var(&r, "d");
        let z = SuperPoly::zero(&r);
        let m = SuperMatrix::new(&r, vec![vec![a.clone(), z.clone()], vec![z, d.clone()]], vec![Even, Odd], vec![Even, Odd])
            .unwrap();
        assert_eq!(m.berezinian().unwrap(), &a * &d.invert_even().unwrap());
    }

    #[test]
    fn inverse_roundtrip() {
        let r = RingDescriptor::new(&["a", "d"], &["b", "c"], &["a", "d"]).unwrap();
        let a = SuperPoly::var(&r, "a");
        let d = SuperPoly::var(&r, "d");
        let b = SuperPoly::var(&r, "b");
        let c = SuperPoly::var(&r, "c");
        let m = SuperMatrix::new(&r, vec![vec![a, b], vec![c, d]], vec![Even, Odd], vec![Even, Odd]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.try_mul(&inv).unwrap(), SuperMatrix::identity(&r, &[Even, Odd]));
        assert_eq!(inv.try_mul(&m).unwrap(), SuperMatrix::identity(&r, &[Even, Odd]));
    }
}
