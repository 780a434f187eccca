//! Arithmetic expressions over rationals and algebraic numbers.
//!
//! Grammar: `+ - * /`, parentheses, unary minus, decimal or integer literals,
//! `sqrt(r)` for a rational `r >= 0` and `root(P, lo, hi)` for the unique root
//! of the integer polynomial `P` in `(lo, hi]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{
    compile_algebraic, compile_rational_value, multiply, negate, reciprocal, signed_add, CompileError,
    SignedProgram,
};
use crate::exact::{format_rational, int, parse_rational_or_decimal};
use crate::poly::{parse_polynomial, IntPolynomial, Interval};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rational(BigRational),
    PolyRoot { poly: IntPolynomial, interval: Interval },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Reciprocal(Box<Expr>),
}

impl Expr {
    /// `sqrt(r)` as the positive root of `den·x^2 - num`.
    pub fn sqrt(r: &BigRational) -> Result<Expr, CompileError> {
        if r.is_negative() {
            return Err(CompileError::Syntax {
                pos: 0,
                message: "square root of a negative number".into(),
            });
        }
        if r.is_zero() {
            return Ok(Expr::Rational(BigRational::zero()));
        }
        let poly = IntPolynomial::new(vec![-r.numer().clone(), BigInt::zero(), r.denom().clone()]);
        let hi = r + int(1);
        Ok(Expr::PolyRoot {
            poly,
            interval: Interval::new(BigRational::zero(), hi)?,
        })
    }

    fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Rational(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Rational(r) if r.is_integer() && !r.is_negative() => write!(f, "{}", format_rational(r)),
            Expr::Rational(r) => write!(f, "({})", format_rational(r)),
            Expr::PolyRoot { poly, interval } => {
                write!(f, "root({poly}, {}, {})", format_rational(interval.lo()), format_rational(interval.hi()))
            }
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Reciprocal(a) => write!(f, "(1/{a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> CompileError {
        CompileError::Syntax {
            pos: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
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

    fn expect(&mut self, c: char) -> Result<(), CompileError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, CompileError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, CompileError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat('/') {
                let at = self.pos;
                let rhs = self.unary()?;
                if rhs.as_rational().is_some_and(Zero::is_zero) {
                    return Err(CompileError::Syntax {
                        pos: at,
                        message: "division by zero".into(),
                    });
                }
                let recip = fold(Expr::Reciprocal(Box::new(rhs)));
                acc = if acc.as_rational().is_some_and(|r| *r == int(1)) {
                    recip
                } else {
                    Expr::Mul(Box::new(acc), Box::new(recip))
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, CompileError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(fold(Expr::Sub(Box::new(Expr::Rational(BigRational::zero())), Box::new(inner))));
        }
        self.primary()
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number(&mut self) -> Result<BigRational, CompileError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(rest.len());
        let text = &rest[..len];
        let value = parse_rational_or_decimal(text).ok_or_else(|| self.err(format!("bad number '{text}'")))?;
        self.pos += len;
        Ok(value)
    }

    fn signed_number(&mut self) -> Result<BigRational, CompileError> {
        let at = self.pos;
        let e = self.expr()?;
        constant_value(&e).ok_or(CompileError::Syntax {
            pos: at,
            message: "expected a rational constant".into(),
        })
    }

    fn primary(&mut self) -> Result<Expr, CompileError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let n = self.number()?;
                let save = self.pos;
                if self.eat('/') && self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let at = self.pos;
                    let d = self.number()?;
                    if d.is_zero() {
                        return Err(CompileError::Syntax {
                            pos: at,
                            message: "division by zero".into(),
                        });
                    }
                    return Ok(Expr::Rational(n / d));
                }
                self.pos = save;
                Ok(Expr::Rational(n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                match self.ident() {
                    "sqrt" => {
                        self.expect('(')?;
                        let r = self.signed_number()?;
                        self.expect(')')?;
                        Expr::sqrt(&r).map_err(|_| CompileError::Syntax {
                            pos: at,
                            message: "square root of a negative number".into(),
                        })
                    }
                    "root" => {
                        self.expect('(')?;
                        self.skip_ws();
                        let rest = &self.src[self.pos..];
                        let end = rest.find(',').ok_or_else(|| self.err("expected ',' after polynomial"))?;
                        let poly = parse_polynomial(&rest[..end]).map_err(|e| CompileError::Syntax {
                            pos: self.pos,
                            message: e.to_string(),
                        })?;
                        self.pos += end + 1;
                        let lo = self.signed_number()?;
                        self.expect(',')?;
                        let hi = self.signed_number()?;
                        self.expect(')')?;
                        let interval = Interval::new(lo, hi).map_err(|e| CompileError::Syntax {
                            pos: at,
                            message: e.to_string(),
                        })?;
                        Ok(Expr::PolyRoot { poly, interval })
                    }
                    other => Err(CompileError::Syntax {
                        pos: at,
                        message: format!("unknown function '{other}'"),
                    }),
                }
            }
            Some(c) => Err(self.err(format!("unexpected '{c}'"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Negation and reciprocal of a literal stay literal; other operations keep their structure.
fn fold(e: Expr) -> Expr {
    let folded = match &e {
        Expr::Sub(a, b) if a.as_rational().is_some_and(Zero::is_zero) => b.as_rational().map(|v| -v),
        Expr::Reciprocal(a) => a.as_rational().filter(|v| !v.is_zero()).map(|v| v.recip()),
        _ => None,
    };
    folded.map_or(e, Expr::Rational)
}

/// Exact value of a tree built only from rationals.
fn constant_value(e: &Expr) -> Option<BigRational> {
    match e {
        Expr::Rational(r) => Some(r.clone()),
        Expr::Add(a, b) => Some(constant_value(a)? + constant_value(b)?),
        Expr::Sub(a, b) => Some(constant_value(a)? - constant_value(b)?),
        Expr::Mul(a, b) => Some(constant_value(a)? * constant_value(b)?),
        Expr::Reciprocal(a) => constant_value(a).filter(|v| !v.is_zero()).map(|v| v.recip()),
        Expr::PolyRoot { .. } => None,
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, CompileError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = CompileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

/// Compiles an expression tree bottom-up with the field combinators.
pub fn compile_expression(e: &Expr) -> Result<SignedProgram, CompileError> {
    match e {
        Expr::Rational(r) => compile_rational_value(r),
        Expr::PolyRoot { poly, interval } => compile_algebraic(poly, interval),
        Expr::Add(a, b) => signed_add(&compile_expression(a)?, &compile_expression(b)?),
        Expr::Sub(a, b) => {
            let rhs = negate(&compile_expression(b)?);
            if a.as_rational().is_some_and(Zero::is_zero) {
                return Ok(rhs);
            }
            signed_add(&compile_expression(a)?, &rhs)
        }
        Expr::Mul(a, b) => multiply(&compile_expression(a)?, &compile_expression(b)?),
        Expr::Reciprocal(a) => reciprocal(&compile_expression(a)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{CompositionKind, Sign};
    use crate::exact::ratio;

    fn value(s: &str) -> f64 {
        compile_expression(&parse_expression(s).unwrap()).unwrap().value_f64()
    }

    #[test]
    fn literals_stay_exact() {
        assert_eq!(parse_expression("1/2").unwrap(), Expr::Rational(ratio(1, 2)));
        assert_eq!(parse_expression("-(3/4)").unwrap(), Expr::Rational(ratio(-3, 4)));
        assert_eq!(parse_expression("sqrt(2)/4").unwrap(), parse_expression("sqrt(2) * (1/4)").unwrap());
        assert_eq!(parse_expression("sqrt(1/2 + 3/2)").unwrap(), parse_expression("sqrt(2)").unwrap());
        let sum = parse_expression("(1/2) + (1/3)").unwrap();
        assert_eq!(sum, Expr::Add(Box::new(Expr::Rational(ratio(1, 2))), Box::new(Expr::Rational(ratio(1, 3)))));
        let p = compile_expression(&sum).unwrap();
        assert_eq!(p.composition().unwrap().kind, CompositionKind::Add);
        assert_eq!(p.limit().exact_value(), Some(ratio(5, 6)));
        assert!((value(" -3 + 0.25 * 4") + 2.0).abs() < 1e-14);
        let p = compile_expression(&parse_expression("3/2").unwrap()).unwrap();
        assert_eq!(p.crn().reactions().len(), 2);
    }

    #[test]
    fn compound_values() {
        let s2 = 2f64.sqrt();
        assert!((value("(1 + 1/sqrt(2)) * sqrt(2)") - (1.0 + s2)).abs() < 1e-14);
        assert!((value("sqrt(2) - 1") - (s2 - 1.0)).abs() < 1e-14);
        assert!((value("1 - sqrt(2)") - (1.0 - s2)).abs() < 1e-14);
        assert!((value("-sqrt(1/2)") + 0.5f64.sqrt()).abs() < 1e-14);
        assert!((value("root(x^2 - 3*x + 2, 3/2, 5/2)") - 2.0).abs() < 1e-14);
        assert!((value("root(x^3 - 2, 1, 2) * 2") - 2.0 * 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn structure_of_subtraction() {
        let p = compile_expression(&parse_expression("sqrt(2) - 1").unwrap()).unwrap();
        assert_eq!(p.sign(), Sign::Positive);
        let c = p.composition().unwrap();
        assert_eq!(c.kind, CompositionKind::Reciprocal);
        assert_eq!(c.operands[0].composition().unwrap().kind, CompositionKind::SubtractStage);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expression("1/0"), Err(CompileError::Syntax { .. })));
        assert!(matches!(parse_expression("sqrt(-2)"), Err(CompileError::Syntax { .. })));
        assert!(matches!(parse_expression("cos(1)"), Err(CompileError::Syntax { .. })));
        assert!(matches!(parse_expression("(1 + 2"), Err(CompileError::Syntax { .. })));
        assert!(matches!(parse_expression("1 2"), Err(CompileError::Syntax { .. })));
        let e = parse_expression("1/(sqrt(2) - sqrt(2))").unwrap();
        assert_eq!(compile_expression(&e).unwrap_err(), CompileError::DivisionByZero);
    }

    #[test]
    fn display_reparses() {
        for s in ["(1 + 1/sqrt(2)) * sqrt(2)", "root(x^2 - 2, -2, -1) - 1/3", "sqrt(5)/7"] {
            let e = parse_expression(s).unwrap();
            assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
        }
    }
}
