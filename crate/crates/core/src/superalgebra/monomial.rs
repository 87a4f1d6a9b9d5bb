use std::cmp::Ordering;

/// A set of odd generator indices, stored as a bitmask. As a product it is
/// always read in increasing index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OddSet(pub u64);

impl OddSet {
    pub const EMPTY: OddSet = OddSet(0);

    pub fn single(i: usize) -> Self {
        OddSet(1u64 << i)
    }

    pub fn from_indices(idx: &[usize]) -> Option<(Self, i64)> {
        // returns the set and the sign of reordering the given product
        let mut set = OddSet::EMPTY;
        let mut sign = 1;
        for &i in idx {
            let (s, sg) = set.mul(OddSet::single(i))?;
            set = s;
            sign *= sg;
        }
        Some((set, sign))
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Product `θ_A · θ_B` normalised to increasing order: the resulting set
    /// and the Koszul sign, or `None` if the sets meet.
    pub fn mul(self, other: OddSet) -> Option<(OddSet, i64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for b in other.indices() {
            inversions += (self.0 >> b >> 1).count_ones();
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((OddSet(self.0 | other.0), sign))
    }

    /// Sign of removing generator `i` from the front: `θ_S = ± θ_i θ_{S∖i}`.
    pub fn position_sign(self, i: usize) -> i64 {
        let before = (self.0 & ((1u64 << i) - 1)).count_ones();
        if before % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn without(self, i: usize) -> OddSet {
        OddSet(self.0 & !(1u64 << i))
    }
}

impl Ord for OddSet {
    /// Lexicographic order on the increasing index lists.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.indices();
        let mut b = other.indices();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Equal => continue,
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for OddSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Laurent monomial in the even generators times an ordered odd product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub even: Vec<i32>,
    pub odd: OddSet,
}

impl Monomial {
    pub fn one(n_even: usize) -> Self {
        Monomial { even: vec![0; n_even], odd: OddSet::EMPTY }
    }

    pub fn degree(&self) -> i64 {
        self.even.iter().map(|&e| e as i64).sum()
    }

    pub fn odd_len(&self) -> u32 {
        self.odd.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.odd.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.odd.is_empty() && self.even.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i64)> {
        let (odd, sign) = self.odd.mul(other.odd)?;
        let even = self.even.iter().zip(&other.even).map(|(a, b)| a + b).collect();
        Some((Monomial { even, odd }, sign))
    }

    pub fn has_negative(&self) -> bool {
        self.even.iter().any(|&e| e < 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_sign() {
        let a = OddSet::single(1);
        let b = OddSet::single(0);
        assert_eq!(a.mul(b), Some((OddSet(0b11), -1)));
        assert_eq!(b.mul(a), Some((OddSet(0b11), 1)));
        assert_eq!(a.mul(a), None);
        let (s, sg) = OddSet::from_indices(&[2, 0, 1]).unwrap();
        assert_eq!(s, OddSet(0b111));
        // θ2θ0θ1 = θ0θ1θ2 (two transpositions)
        assert_eq!(sg, 1);
    }

    #[test]
    fn list_order() {
        // [0,2] < [1]
        assert!(OddSet(0b101) < OddSet(0b010));
        // [] < [0]
        assert!(OddSet(0) < OddSet(1));
        // [0] < [0,1]
        assert!(OddSet(1) < OddSet(0b11));
    }
}
