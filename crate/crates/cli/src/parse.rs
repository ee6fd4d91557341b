//! Text forms accepted on the command line.
//!
//! Polynomials: `rpoly := '(' ipoly ')' '/' natural | ipoly` with
//! `ipoly := term (('+'|'-') term)*` and
//! `term := integer | integer? '*'? 'x' ('^' natural)?`; whitespace is
//! insignificant and a sign may lead the first term. Examples:
//! `x^2+x+2`, `(x^3 - 2)/2`, `-3x^4 + 7`.
//!
//! Difference tuples: semicolon-separated lists of comma-separated
//! positive integers, each strictly increasing, e.g. `2;6,12`.

use std::fmt;

use num_bigint::BigInt;
use rtau_core::{DiffTuple, IntPoly, RTauElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == b => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected '{}'", b as char))),
        }
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError { pos: self.pos, msg }
    }

    fn digits(&mut self) -> Option<&'a [u8]> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        let digits = self
            .digits()
            .ok_or_else(|| self.error("expected a number".into()))?;
        Ok(BigInt::parse_bytes(digits, 10).expect("digits parse"))
    }

    /// One term: coefficient (default 1), optional x with exponent.
    /// Returns (exponent, coefficient); `sign` multiplies in.
    fn term(&mut self, sign: i8) -> Result<(usize, BigInt), ParseError> {
        let coeff = self.digits().map(|d| BigInt::parse_bytes(d, 10).unwrap());
        let starred = self.peek() == Some(b'*');
        if starred {
            if coeff.is_none() {
                return Err(self.error("'*' needs a coefficient before it".into()));
            }
            self.pos += 1;
        }
        if starred && self.peek() != Some(b'x') {
            return Err(self.error("expected 'x' after '*'".into()));
        }
        let (exp, coeff) = if self.peek() == Some(b'x') {
            self.pos += 1;
            let exp = if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.natural()?;
                usize::try_from(e).map_err(|_| self.error("exponent too large".into()))?
            } else {
                1
            };
            (exp, coeff.unwrap_or_else(|| BigInt::from(1)))
        } else {
            match coeff {
                Some(c) => (0, c),
                None => return Err(self.error("expected a term".into())),
            }
        };
        Ok((exp, if sign < 0 { -coeff } else { coeff }))
    }

    fn ipoly(&mut self) -> Result<IntPoly, ParseError> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut sign: i8 = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let (exp, coeff) = self.term(sign)?;
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::from(0));
            }
            coeffs[exp] += coeff;
            sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                _ => break,
            };
        }
        Ok(IntPoly::new(coeffs))
    }
}

pub fn parse_poly(text: &str) -> Result<RTauElem, ParseError> {
    let mut s = Scanner::new(text);
    let (num, den) = if s.peek() == Some(b'(') {
        s.pos += 1;
        let num = s.ipoly()?;
        s.expect(b')')?;
        s.expect(b'/')?;
        let den = s.natural()?;
        if den == BigInt::from(0) {
            return Err(s.error("denominator must be positive".into()));
        }
        (num, den)
    } else {
        (s.ipoly()?, BigInt::from(1))
    };
    if s.peek().is_some() {
        return Err(s.error("unexpected trailing input".into()));
    }
    RTauElem::new(num, den).map_err(|e| ParseError {
        pos: text.len(),
        msg: e.to_string(),
    })
}

pub fn parse_diffs(text: &str) -> Result<Vec<DiffTuple>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0usize;
    for part in text.split(';') {
        let mut entries = Vec::new();
        for piece in part.split(',') {
            let trimmed = piece.trim();
            let value: u64 = trimmed.parse().map_err(|_| ParseError {
                pos: offset,
                msg: format!("invalid difference entry {trimmed:?}"),
            })?;
            entries.push(value);
        }
        let tuple = DiffTuple::new(entries).map_err(|e| ParseError {
            pos: offset,
            msg: e.to_string(),
        })?;
        out.push(tuple);
        offset += part.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64], den: i64) -> RTauElem {
        RTauElem::new(IntPoly::from_i64(coeffs), BigInt::from(den)).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse_poly("(x^3 - 2)/2").unwrap(), poly(&[-2, 0, 0, 1], 2));
        assert_eq!(parse_poly("x^2+x+2").unwrap(), poly(&[2, 1, 1], 1));
        // canonicalized on the way in
        assert_eq!(parse_poly("(2x+2)/4").unwrap(), poly(&[1, 1], 2));
        assert_eq!(parse_poly("(2*x + 2)/4").unwrap(), poly(&[1, 1], 2));
        assert_eq!(parse_poly("-x^2 + 2").unwrap(), poly(&[2, 0, -1], 1));
        assert_eq!(parse_poly("17").unwrap(), poly(&[17], 1));
        assert_eq!(parse_poly("x").unwrap(), poly(&[0, 1], 1));
        assert_eq!(parse_poly("  ( x ^ 2 - 2 ) / 2 ").unwrap(), poly(&[-2, 0, 1], 2));
        assert_eq!(parse_poly("x + x").unwrap(), poly(&[0, 2], 1));
    }

    #[test]
    fn grammar_rejections() {
        for bad in ["", "x^", "()/2", "(x)/0", "x/2", "2 +", "x^^2", "y", "3*"] {
            assert!(parse_poly(bad).is_err(), "{bad:?} should fail");
        }
        let err = parse_poly("x^2 $ 3").unwrap_err();
        assert!(err.pos > 0);
    }

    #[test]
    fn diff_lists() {
        let got = parse_diffs("2").unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].entries(), &[2]);
        let got = parse_diffs("2;6,12").unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[1].entries(), &[6, 12]);
        assert!(parse_diffs("4,2").is_err());
        assert!(parse_diffs("0").is_err());
        assert!(parse_diffs("2;;3").is_err());
        assert!(parse_diffs("a").is_err());
    }

    #[test]
    fn display_round_trip() {
        for f in [
            poly(&[-2, 0, 1], 2),
            poly(&[0, 1], 1),
            poly(&[5], 1),
            poly(&[-7], 3),
            poly(&[2, 0, -1], 1),
            poly(&[1, 77, 1], 1),
        ] {
            let text = f.to_string();
            assert_eq!(parse_poly(&text).unwrap(), f, "{text}");
        }
    }

    mod round_trip {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn parse_inverts_display(
                coeffs in prop::collection::vec(-99i64..=99, 1..=6),
                den in 1i64..=40,
            ) {
                let f = RTauElem::new(IntPoly::from_i64(&coeffs), BigInt::from(den)).unwrap();
                let text = f.to_string();
                let back = parse_poly(&text).unwrap();
                prop_assert_eq!(back, f, "{}", text);
            }
        }
    }
}
