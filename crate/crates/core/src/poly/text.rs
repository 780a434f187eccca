//! Text form of integer polynomials: `c*x^k` terms joined by `+`/`-`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{IntPolynomial, PolyError};

pub fn parse_polynomial(text: &str) -> Result<IntPolynomial, PolyError> {
    let mut parser = PolyParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    parser.polynomial()
}

impl FromStr for IntPolynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_polynomial(s)
    }
}

struct PolyParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn err(&self, message: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            message: message.into(),
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

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).ok()?;
        BigInt::from_str(digits).ok()
    }

    fn polynomial(&mut self) -> Result<IntPolynomial, PolyError> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                None if first => return Err(self.err("empty polynomial")),
                None => break,
                Some(_) if first => false,
                Some(c) => return Err(self.err(format!("expected '+' or '-', found '{}'", c as char))),
            };
            first = false;
            let (mut c, k) = self.term()?;
            if negative {
                c = -c;
            }
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] += c;
        }
        Ok(IntPolynomial::new(coeffs))
    }

    fn term(&mut self) -> Result<(BigInt, usize), PolyError> {
        let coeff = self.integer();
        let has_coeff = coeff.is_some();
        if has_coeff && self.peek() == Some(b'*') {
            self.pos += 1;
            if self.peek() != Some(b'x') {
                return Err(self.err("expected 'x' after '*'"));
            }
        }
        if self.peek() == Some(b'x') {
            self.pos += 1;
            let mut k = 1usize;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.integer().ok_or_else(|| self.err("expected exponent"))?;
                k = usize::try_from(e).map_err(|_| self.err("exponent too large"))?;
                if k > 4096 {
                    return Err(self.err("exponent too large"));
                }
            }
            Ok((coeff.unwrap_or_else(BigInt::one), k))
        } else if let Some(c) = coeff {
            Ok((c, 0))
        } else {
            Err(self.err("expected coefficient or 'x'"))
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{mag}*x^{k}")?,
            }
        }
        Ok(())
    }
}
