//! Text syntax for polynomials, matching the [`Display`](std::fmt::Display)
//! output of [`SuperPoly`]: sums of `*`-separated factors, where a factor is
//! a rational, a generator name with optional `^exponent`, or a
//! parenthesized expression (also with optional exponent).

use super::poly::SuperPoly;
use super::ring::Ring;
use crate::error::{Error, Result};
use crate::rational::from_text;

struct Parser<'a> {
    ring: &'a Ring,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, what: &str) -> Result<T> {
        Err(Error::Parse(format!("{what} at byte {} of {:?}", self.pos, self.src)))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next().filter(|&c| pred(c)) {
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn sum(&mut self) -> Result<SuperPoly> {
        let mut acc = SuperPoly::zero(self.ring);
        let mut negate = self.eat('-');
        if !negate {
            self.eat('+');
        }
        loop {
            let t = self.product()?;
            acc = if negate { acc.try_sub(&t)? } else { acc.try_add(&t)? };
            negate = match self.peek() {
                Some('+') => false,
                Some('-') => true,
                _ => return Ok(acc),
            };
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<SuperPoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.try_mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<Option<i64>> {
        if !self.eat('^') {
            return Ok(None);
        }
        let neg = self.eat('-');
        let digits = self.take_while(|c| c.is_ascii_digit());
        match digits.parse::<i64>() {
            Ok(e) => Ok(Some(if neg { -e } else { e })),
            Err(_) => self.err("expected an integer exponent"),
        }
    }

    fn factor(&mut self) -> Result<SuperPoly> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                inner
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.take_while(|c| c.is_ascii_digit());
                let text = if self.src[self.pos..].starts_with('/') {
                    self.pos += 1;
                    let den = self.take_while(|c| c.is_ascii_digit());
                    format!("{num}/{den}")
                } else {
                    num.to_string()
                };
                SuperPoly::constant(self.ring, from_text(&text)?)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                SuperPoly::try_var(self.ring, name)?
            }
            Some(c) => return self.err(&format!("unexpected {c:?}")),
            None => return self.err("unexpected end of input"),
        };
        match self.exponent()? {
            None => Ok(base),
            Some(e) => base.powi(e),
        }
    }
}

impl SuperPoly {
    /// Parses `text` as an element of `ring`.
    pub fn parse(ring: &Ring, text: &str) -> Result<SuperPoly> {
        let mut p = Parser { ring, src: text, pos: 0 };
        let out = p.sum()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::RingDescriptor;
    use proptest::prelude::*;

    fn ring() -> Ring {
        RingDescriptor::new(&["x", "y"], &["th1", "th2"], &["x"]).unwrap()
    }

    #[test]
    fn parses_basic_forms() {
        let r = ring();
        let x = SuperPoly::var(&r, "x");
        let t1 = SuperPoly::var(&r, "th1");
        let t2 = SuperPoly::var(&r, "th2");
        assert_eq!(SuperPoly::parse(&r, "th2*th1").unwrap(), -(&t1 * &t2));
        assert_eq!(SuperPoly::parse(&r, "x^-2").unwrap(), x.powi(-2).unwrap());
        assert_eq!(SuperPoly::parse(&r, "-3/2 + (x + th1)^2").unwrap(), SuperPoly::constant(&r, q(-3) / q(2)) + &x * &x + (&x * &t1).scale_int(2));
        assert_eq!(SuperPoly::parse(&r, "0").unwrap(), SuperPoly::zero(&r));
    }

    #[test]
    fn rejects_bad_input() {
        let r = ring();
        for bad in ["", "z", "x +", "(x", "y^-1", "x^", "x y", "1/0"] {
            assert!(SuperPoly::parse(&r, bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn display_round_trips(coeffs in proptest::collection::vec((-5i64..5, 1i64..4, -2i32..3, 0i32..3, 0u64..4), 0..6)) {
            let r = ring();
            let mut p = SuperPoly::zero(&r);
            for (n, d, ex, ey, odd) in coeffs {
                let m = crate::Monomial { even: vec![ex, ey], odd: crate::OddSet(odd) };
                p.add_term(m, q(n) / q(d));
            }
            prop_assert_eq!(SuperPoly::parse(&r, &p.to_string()).unwrap(), p);
        }
    }
}
