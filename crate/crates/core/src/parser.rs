//! Line-oriented text format for reaction networks (`.crn` files).
//!
//! ```text
//! # comment
//! species X, Y          (optional; fixes the species order)
//! X + Z ->{3} 2Y + Z
//! 0 ->{1/2} X
//! designated Y
//! ```
//!
//! Without a `species` line the order is the order of first appearance:
//! reactants then products, line by line, then the designated species.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::format_rational;
use crate::model::{Crn, CrnBuilder, ModelError, Reaction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    InvalidCharacter(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("rate constant must be positive")]
    NonPositiveRate,
    #[error("zero denominator in rate constant")]
    ZeroDenominator,
    #[error("stoichiometric coefficient must be at least 1")]
    ZeroCoefficient,
    #[error("reaction has no net effect")]
    NoOpReaction,
    #[error("designated species {0:?} is not declared")]
    UnknownDesignated(String),
    #[error("designated species given more than once")]
    DuplicateDesignated,
    #[error("species declared more than once: {0:?}")]
    DuplicateDeclaration(String),
    #[error("species {0:?} is used but not declared")]
    UndeclaredSpecies(String),
    #[error("invalid network: {0}")]
    Model(ModelError),
}

/// One reaction as written: species with accumulated multiplicities, in order of first mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionLine {
    pub reactants: Vec<(String, u32)>,
    pub products: Vec<(String, u32)>,
    pub rate: BigRational,
}

/// Structural view of a `.crn` file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrnDocument {
    pub species: Option<Vec<String>>,
    pub reactions: Vec<ReactionLine>,
    pub designated: Option<String>,
}

/// A network together with its optional output species.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCrn {
    pub crn: Crn,
    pub designated: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Arrow,
    LBrace,
    RBrace,
    Slash,
    Comma,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier {s:?}"),
            Token::Int(n) => write!(f, "integer {n}"),
            Token::Plus => f.write_str("'+'"),
            Token::Minus => f.write_str("'-'"),
            Token::Arrow => f.write_str("'->'"),
            Token::LBrace => f.write_str("'{'"),
            Token::RBrace => f.write_str("'}'"),
            Token::Slash => f.write_str("'/'"),
            Token::Comma => f.write_str("','"),
            Token::End => f.write_str("end of line"),
        }
    }
}

fn lex(line_no: usize, text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |column: usize, kind| ParseError {
        line: line_no,
        column,
        kind,
    };
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), column));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = BigInt::from_str(&digits).expect("ascii digits");
            out.push((Token::Int(n), column));
            continue;
        }
        let tok = match c {
            '+' => Token::Plus,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Token::Arrow
            }
            '-' => Token::Minus,
            '{' => Token::LBrace,
            '}' => Token::RBrace,
            '/' => Token::Slash,
            ',' => Token::Comma,
            other => return Err(err(column, ParseErrorKind::InvalidCharacter(other))),
        };
        i += 1;
        out.push((tok, column));
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

struct LineParser {
    line: usize,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl LineParser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.error_here(ParseErrorKind::Unexpected {
            expected,
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Token, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn ident(&mut self, expected: &'static str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn side(&mut self) -> Result<Vec<(String, u32)>, ParseError> {
        if let Token::Int(n) = self.peek() {
            if n.is_zero() && !matches!(self.peek_at(1), Token::Ident(_)) {
                self.bump();
                return Ok(Vec::new());
            }
        }
        let mut side: Vec<(String, u32)> = Vec::new();
        loop {
            let (name, count) = self.term()?;
            match side.iter_mut().find(|(n, _)| *n == name) {
                Some(entry) => entry.1 += count,
                None => side.push((name, count)),
            }
            if *self.peek() == Token::Plus {
                self.bump();
            } else {
                return Ok(side);
            }
        }
    }

    fn term(&mut self) -> Result<(String, u32), ParseError> {
        let mut count = 1u32;
        if let Token::Int(n) = self.peek().clone() {
            if n.is_zero() {
                return Err(self.error_here(ParseErrorKind::ZeroCoefficient));
            }
            count = u32::try_from(n).map_err(|_| self.unexpected("a small stoichiometric coefficient"))?;
            self.bump();
        }
        let name = self.ident("species name")?;
        Ok((name, count))
    }

    fn rate(&mut self) -> Result<BigRational, ParseError> {
        let start = self.column();
        let negative = if *self.peek() == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        let numer = match self.bump() {
            Token::Int(n) => n,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("rate constant"));
            }
        };
        let denom = if *self.peek() == Token::Slash {
            self.bump();
            match self.peek().clone() {
                Token::Int(d) => {
                    if d.is_zero() {
                        return Err(self.error_here(ParseErrorKind::ZeroDenominator));
                    }
                    self.bump();
                    d
                }
                _ => return Err(self.unexpected("denominator")),
            }
        } else {
            BigInt::from(1)
        };
        let rate = BigRational::new(if negative { -numer } else { numer }, denom);
        if !rate.is_positive() {
            return Err(ParseError {
                line: self.line,
                column: start,
                kind: ParseErrorKind::NonPositiveRate,
            });
        }
        Ok(rate)
    }

    fn reaction(&mut self) -> Result<ReactionLine, ParseError> {
        let start = self.column();
        let reactants = self.side()?;
        self.expect(Token::Arrow, "'->'")?;
        self.expect(Token::LBrace, "'{'")?;
        let rate = self.rate()?;
        self.expect(Token::RBrace, "'}'")?;
        let products = self.side()?;
        self.expect(Token::End, "'+' or end of line")?;
        if same_multiset(&reactants, &products) {
            return Err(ParseError {
                line: self.line,
                column: start,
                kind: ParseErrorKind::NoOpReaction,
            });
        }
        Ok(ReactionLine {
            reactants,
            products,
            rate,
        })
    }
}

fn same_multiset(a: &[(String, u32)], b: &[(String, u32)]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

/// Parses a `.crn` text into its structural document form.
pub fn parse_document(text: &str) -> Result<CrnDocument, ParseError> {
    let mut doc = CrnDocument::default();
    let mut designated_at = (0, 0);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut p = LineParser {
            line: line_no,
            tokens: lex(line_no, raw)?,
            pos: 0,
        };
        match (p.peek_at(0).clone(), p.peek_at(1).clone(), p.peek_at(2).clone()) {
            (Token::Ident(kw), Token::Ident(_), Token::End) if kw == "designated" => {
                if doc.designated.is_some() {
                    return Err(p.error_here(ParseErrorKind::DuplicateDesignated));
                }
                p.bump();
                designated_at = (line_no, p.column());
                doc.designated = Some(p.ident("species name")?);
            }
            (Token::Ident(kw), Token::Ident(_), Token::Comma | Token::End) if kw == "species" => {
                if doc.species.is_some() {
                    return Err(p.error_here(ParseErrorKind::DuplicateDeclaration("species".into())));
                }
                p.bump();
                let mut names: Vec<String> = Vec::new();
                loop {
                    let column = p.column();
                    let name = p.ident("species name")?;
                    if names.contains(&name) {
                        return Err(ParseError {
                            line: line_no,
                            column,
                            kind: ParseErrorKind::DuplicateDeclaration(name),
                        });
                    }
                    names.push(name);
                    match p.peek() {
                        Token::Comma => {
                            p.bump();
                        }
                        Token::End => break,
                        _ => return Err(p.unexpected("',' or end of line")),
                    }
                }
                doc.species = Some(names);
            }
            _ => doc.reactions.push(p.reaction()?),
        }
    }
    if let (Some(declared), Some(d)) = (&doc.species, &doc.designated) {
        if !declared.contains(d) {
            return Err(ParseError {
                line: designated_at.0,
                column: designated_at.1,
                kind: ParseErrorKind::UnknownDesignated(d.clone()),
            });
        }
    }
    if let Some(declared) = &doc.species {
        for r in &doc.reactions {
            for (name, _) in r.reactants.iter().chain(&r.products) {
                if !declared.contains(name) {
                    return Err(ParseError {
                        line: 0,
                        column: 0,
                        kind: ParseErrorKind::UndeclaredSpecies(name.clone()),
                    });
                }
            }
        }
    }
    Ok(doc)
}

impl CrnDocument {
    /// Species order this document induces.
    pub fn species_order(&self) -> Vec<String> {
        if let Some(declared) = &self.species {
            return declared.clone();
        }
        implicit_order(&self.reactions, self.designated.as_deref())
    }

    pub fn to_crn(&self) -> Result<ParsedCrn, ParseError> {
        let model_err = |e: ModelError| ParseError {
            line: 0,
            column: 0,
            kind: ParseErrorKind::Model(e),
        };
        let mut builder = CrnBuilder::new();
        for name in self.species_order() {
            builder = builder.species(&name).map_err(model_err)?;
        }
        fn side(s: &[(String, u32)]) -> Vec<(&str, u32)> {
            s.iter().map(|(n, c)| (n.as_str(), *c)).collect()
        }
        for r in &self.reactions {
            builder = builder
                .reaction(&side(&r.reactants), &side(&r.products), r.rate.clone())
                .map_err(model_err)?;
        }
        let crn = builder.build().map_err(model_err)?;
        let designated = self.designated.as_deref().and_then(|d| crn.index_of(d));
        Ok(ParsedCrn { crn, designated })
    }

    /// Canonical document for a network: sides in species-index order, and a
    /// `species` line only when the implicit order would differ.
    pub fn from_crn(crn: &Crn, designated: Option<usize>) -> Self {
        let names = crn.species_names();
        let side = |counts: &[u32]| -> Vec<(String, u32)> {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (names[i].to_string(), c))
                .collect()
        };
        let reactions: Vec<ReactionLine> = crn
            .reactions()
            .iter()
            .map(|r| ReactionLine {
                reactants: side(r.reactants()),
                products: side(r.products()),
                rate: r.rate().clone(),
            })
            .collect();
        let designated = designated.map(|i| names[i].to_string());
        let order: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let species = if implicit_order(&reactions, designated.as_deref()) == order {
            None
        } else {
            Some(order)
        };
        Self {
            species,
            reactions,
            designated,
        }
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        if let Some(species) = &self.species {
            out.push_str("species ");
            out.push_str(&species.join(", "));
            out.push('\n');
        }
        for r in &self.reactions {
            out.push_str(&format_line(r));
            out.push('\n');
        }
        if let Some(d) = &self.designated {
            out.push_str("designated ");
            out.push_str(d);
            out.push('\n');
        }
        out
    }
}

fn implicit_order(reactions: &[ReactionLine], designated: Option<&str>) -> Vec<String> {
    let mut order: Vec<String> = Vec::new();
    let names = reactions
        .iter()
        .flat_map(|r| r.reactants.iter().chain(&r.products).map(|(n, _)| n.as_str()))
        .chain(designated);
    for name in names {
        if !order.iter().any(|n| n == name) {
            order.push(name.to_string());
        }
    }
    order
}

fn format_side(side: &[(String, u32)]) -> String {
    if side.is_empty() {
        return "0".to_string();
    }
    side.iter()
        .map(|(n, c)| if *c == 1 { n.clone() } else { format!("{c}{n}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn format_line(r: &ReactionLine) -> String {
    format!(
        "{} ->{{{}}} {}",
        format_side(&r.reactants),
        format_rational(&r.rate),
        format_side(&r.products)
    )
}

pub fn parse_crn(text: &str) -> Result<ParsedCrn, ParseError> {
    parse_document(text)?.to_crn()
}

/// Canonical `.crn` text for a network and its designated species.
pub fn format_crn(crn: &Crn, designated: Option<usize>) -> String {
    CrnDocument::from_crn(crn, designated).format()
}

/// One reaction in `.crn` syntax.
pub fn format_reaction(crn: &Crn, reaction: &Reaction) -> String {
    let names = crn.species_names();
    let side = |counts: &[u32]| -> Vec<(String, u32)> {
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (names[i].to_string(), c))
            .collect()
    };
    format_line(&ReactionLine {
        reactants: side(reaction.reactants()),
        products: side(reaction.products()),
        rate: reaction.rate().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn parses_catalytic_reaction() {
        let parsed = parse_crn("X + Z ->{3} 2Y + Z").unwrap();
        let crn = &parsed.crn;
        assert_eq!(crn.species_names(), vec!["X", "Z", "Y"]);
        let r = &crn.reactions()[0];
        assert_eq!(r.reactants(), &[1, 1, 0]);
        assert_eq!(r.products(), &[0, 1, 2]);
        assert_eq!(r.rate(), &int(3));
        assert_eq!(parsed.designated, None);
    }

    #[test]
    fn parses_rational_network() {
        let parsed = parse_crn("0 ->{1} X\nX ->{2} 0\n").unwrap();
        assert_eq!(parsed.crn.num_species(), 1);
        assert_eq!(parsed.crn.vector_field(&[0.25f64]).unwrap(), vec![0.5]);
    }

    #[test]
    fn accumulates_duplicates_and_comments() {
        let parsed = parse_crn("# dimerisation\nX + X ->{1/2} Y\n\ndesignated Y").unwrap();
        assert_eq!(parsed.crn.reactions()[0].reactants(), &[2, 0]);
        assert_eq!(parsed.designated, Some(1));
    }

    #[test]
    fn rejects_bad_rates() {
        let e = parse_crn("X ->{0} X").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonPositiveRate);
        assert_eq!((e.line, e.column), (1, 6));
        assert_eq!(parse_crn("X ->{-1} 0").unwrap_err().kind, ParseErrorKind::NonPositiveRate);
        assert_eq!(parse_crn("X ->{1/0} 0").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(parse_crn("X ->{1} X").unwrap_err().kind, ParseErrorKind::NoOpReaction);
    }

    #[test]
    fn error_positions() {
        let e = parse_crn("0 ->{1} X\nX -> {2} 0 +").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 12);
        let e = parse_crn("X ->{1} 0 ; Y").unwrap_err();
        assert_eq!((e.column, e.kind), (11, ParseErrorKind::InvalidCharacter(';')));
        let e = parse_crn("X + ->{1} 0").unwrap_err();
        assert_eq!(e.column, 5);
        let e = parse_crn("0X ->{1} 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ZeroCoefficient);
    }

    #[test]
    fn designated_checks() {
        let e = parse_crn("species X\n0 ->{1} X\ndesignated Y").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownDesignated("Y".into()));
        assert_eq!((e.line, e.column), (3, 12));
        let e = parse_crn("designated X\ndesignated X").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateDesignated);
    }

    #[test]
    fn formatting() {
        let parsed = parse_crn("0 ->{5} X\n2X ->{3/2} X").unwrap();
        assert_eq!(format_crn(&parsed.crn, Some(0)), "0 ->{5} X\n2X ->{3/2} X\ndesignated X\n");
        let lonely = Crn::builder().species("X").unwrap().build().unwrap();
        assert_eq!(format_crn(&lonely, Some(0)), "designated X\n");
        // declared order differs from first appearance
        let parsed = parse_crn("species Y, X\nX ->{1} Y").unwrap();
        let text = format_crn(&parsed.crn, Some(0));
        assert!(text.starts_with("species Y, X\n"));
        assert_eq!(parse_crn(&text).unwrap().crn, parsed.crn);
    }
}
