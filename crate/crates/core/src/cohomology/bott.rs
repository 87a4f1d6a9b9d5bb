use num_integer::binomial;
use serde::{Deserialize, Serialize};

use super::symbol::{Atom, Term};
use super::{kunneth, DimTable};
use crate::superalgebra::Parity;

fn choose(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        binomial(a as u64, b as u64)
    }
}

/// `dim H^q(Pⁿ, Ω^j(m))`.
pub fn bott_dim(n: usize, j: usize, m: i64, q: usize) -> u64 {
    if j > n || q > n {
        return 0;
    }
    let (n, j) = (n as i64, j as i64);
    if n == 0 {
        return (q == 0) as u64;
    }
    let mut d = 0;
    if q == j as usize && m == 0 {
        d += 1;
    }
    if q == 0 && m > j {
        d += choose(m + n - j, m) * choose(m - 1, j);
    }
    if q == n as usize && m < j - n {
        d += choose(-m + j, -m) * choose(-m - 1, n - j);
    }
    d
}

/// All `H^q(Pⁿ, Ω^j(m))` as an even table.
pub fn bott_table(n: usize, j: usize, m: i64) -> DimTable {
    let mut t = DimTable::new();
    for q in 0..=n {
        t.set(q, Parity::Even, bott_dim(n, j, m, q), true);
    }
    t
}

/// The pieces `Ω^a(a−b) ⊠ Ω^b(b−a)`, `a + b = k`, of `N^k/N^{k+1}` for
/// `G(1|1,n|n)` over `P^{n−1} × P^{n−1}`. Atoms with a form degree above
/// `n − 1` vanish and are dropped.
pub fn gr_pieces(n: usize, k: usize) -> Vec<Term> {
    let base = n.saturating_sub(1);
    (0..=k)
        .filter_map(|a| {
            let b = k - a;
            (a <= base && b <= base).then(|| Term {
                factors: vec![
                    Atom { n: base, j: a, m: a as i64 - b as i64 },
                    Atom { n: base, j: b, m: b as i64 - a as i64 },
                ],
                shifted: false,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrRow {
    pub k: usize,
    pub parity: Parity,
    pub piece: Term,
    pub table: DimTable,
}

/// `H¹` of `G(1|1,n|n)` through its associated graded, optionally twisted by
/// `O(a) ⊠ O(b)` on the reduced space. Vanishing of every piece implies
/// vanishing for the filtered sheaf; nothing is concluded from nonzero
/// pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Report {
    pub n: usize,
    pub twist: (i64, i64),
    pub rows: Vec<GrRow>,
    /// Sum of `H¹` over all pieces.
    pub h1_gr_total: u64,
    /// Sum of `H¹` over the pieces with `k ≥ 1` (the ideal `N`).
    pub h1_gr_nilpotent: u64,
    pub h1_o_vanishes: bool,
    pub h1_n_vanishes: bool,
}

pub fn h1_vanishing_report(n: usize, twist: (i64, i64)) -> H1Report {
    let mut rows = Vec::new();
    let max_k = 2 * n.saturating_sub(1);
    for k in 0..=max_k {
        for piece in gr_pieces(n, k) {
            let twisted = Term {
                factors: vec![
                    Atom { m: piece.factors[0].m + twist.0, ..piece.factors[0] },
                    Atom { m: piece.factors[1].m + twist.1, ..piece.factors[1] },
                ],
                shifted: false,
            };
            let t = kunneth(&twisted.factors[0].table(), &twisted.factors[1].table()).expect("Bott tables are stable");
            let parity = Parity::from_count(k as u32);
            let table = if parity == Parity::Odd { t.parity_shift() } else { t };
            rows.push(GrRow { k, parity, piece: twisted, table });
        }
    }
    let h1_gr_total: u64 = rows.iter().map(|r| r.table.total(1)).sum();
    let h1_gr_nilpotent: u64 = rows.iter().filter(|r| r.k >= 1).map(|r| r.table.total(1)).sum();
    H1Report {
        n,
        twist,
        rows,
        h1_gr_total,
        h1_gr_nilpotent,
        h1_o_vanishes: h1_gr_total == 0,
        h1_n_vanishes: h1_gr_nilpotent == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bott_examples() {
        assert_eq!(bott_dim(1, 0, -2, 1), 1);
        assert_eq!(bott_dim(2, 1, 0, 1), 1);
        assert_eq!((0..=2).filter(|&q| q != 1).map(|q| bott_dim(2, 1, 0, q)).sum::<u64>(), 0);
        assert!((0..=2).all(|q| bott_dim(2, 1, 1, q) == 0));
        assert_eq!(bott_dim(2, 0, 2, 0), 6);
        assert_eq!(bott_dim(2, 0, -3, 2), 1);
        assert_eq!(bott_dim(2, 1, 2, 0), 3);
    }

    #[test]
    fn serre_duality_on_p2() {
        for j in 0..=2 {
            for m in -5..=5 {
                for q in 0..=2 {
                    assert_eq!(bott_dim(2, j, m, q), bott_dim(2, 2 - j, -m, 2 - q), "j={j} m={m} q={q}");
                }
            }
        }
    }

    #[test]
    fn gr_piece_lists() {
        let k0 = gr_pieces(2, 0);
        assert_eq!(k0.len(), 1);
        assert_eq!(k0[0].factors, vec![Atom { n: 1, j: 0, m: 0 }, Atom { n: 1, j: 0, m: 0 }]);
        let k1 = gr_pieces(3, 1);
        assert_eq!(k1[0].factors, vec![Atom { n: 2, j: 0, m: -1 }, Atom { n: 2, j: 1, m: 1 }]);
        assert_eq!(k1[1].factors, vec![Atom { n: 2, j: 1, m: 1 }, Atom { n: 2, j: 0, m: -1 }]);
        let k2 = gr_pieces(2, 2);
        assert_eq!(k2.len(), 1);
        assert_eq!(k2[0].factors, vec![Atom { n: 1, j: 1, m: 0 }, Atom { n: 1, j: 1, m: 0 }]);
    }

    #[test]
    fn grassmannian_h1_vanishes() {
        for n in 2..=4 {
            let r = h1_vanishing_report(n, (0, 0));
            assert!(r.h1_o_vanishes && r.h1_n_vanishes, "n={n}");
            assert!(r.rows.iter().all(|row| row.table.total(1) == 0));
        }
    }

    #[test]
    fn ber_twist_gives_two() {
        let r = h1_vanishing_report(2, (-1, 1));
        assert_eq!(r.h1_gr_total, 2);
        assert!(!r.h1_o_vanishes);
    }
}
