//! Operator expressions over `f`, `theta`, `delta` and rational scalars.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := 'f' | 'theta' | 'delta' | nat ('/' nat)? | '(' expr ')'
//! ```
//!
//! Binary operators associate to the left; whitespace is ignored between
//! tokens.

use std::fmt;
use std::sync::Arc;

use capelli_core::{AElement, APresentation, Rational};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Nonnegative rational literal.
    Num(Rational),
    F,
    Theta,
    Delta,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at position {pos}: {kind}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unknown identifier {0:?}")]
    UnknownIdent(String),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: &'static str },
    #[error("exponent does not fit in 32 bits")]
    ExponentOverflow,
    #[error("zero denominator")]
    ZeroDenominator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Nat(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Nat(s) => write!(f, "number {s}"),
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = if c.is_ascii_digit() || c.is_ascii_alphabetic() {
            let mut word = String::new();
            let digits = c.is_ascii_digit();
            while let Some(&(_, c)) = chars.peek() {
                if (digits && c.is_ascii_digit()) || (!digits && c.is_ascii_alphanumeric()) {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            if digits {
                Tok::Nat(word)
            } else {
                Tok::Ident(word)
            }
        } else {
            chars.next();
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError {
                        pos,
                        kind: ParseErrorKind::UnexpectedChar(c),
                    })
                }
            }
        };
        out.push((pos, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Unexpected {
                found: self.peek().to_string(),
                expected,
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let negate = *self.peek() == Tok::Minus;
        if negate {
            self.bump();
        }
        let mut lhs = self.term()?;
        if negate {
            lhs = Expr::Neg(Box::new(lhs));
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Nat(digits) => {
                let exp = digits.parse::<u32>().map_err(|_| ParseError {
                    pos,
                    kind: ParseErrorKind::ExponentOverflow,
                })?;
                Ok(Expr::Pow(Box::new(base), exp))
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected("a nonnegative integer exponent"))
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "f" => Ok(Expr::F),
                    "theta" => Ok(Expr::Theta),
                    "delta" => Ok(Expr::Delta),
                    _ => Err(ParseError {
                        pos,
                        kind: ParseErrorKind::UnknownIdent(name),
                    }),
                }
            }
            Tok::Nat(digits) => {
                self.bump();
                let numer: BigInt = digits.parse().expect("digit string");
                if *self.peek() != Tok::Slash {
                    return Ok(Expr::Num(Rational::from(numer)));
                }
                self.bump();
                let dpos = self.pos();
                let Tok::Nat(den) = self.peek().clone() else {
                    return Err(self.unexpected("a denominator"));
                };
                self.bump();
                let denom: BigInt = den.parse().expect("digit string");
                if denom == BigInt::from(0) {
                    return Err(ParseError {
                        pos: dpos,
                        kind: ParseErrorKind::ZeroDenominator,
                    });
                }
                Ok(Expr::Num(Rational::from(numer) / Rational::from(denom)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected("f, theta, delta, a number or '('")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

// Binding strength of each node's printed form.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => SUM,
        Expr::Mul(..) => PRODUCT,
        Expr::Pow(..) => POWER,
        _ => ATOM,
    }
}

/// Writes `e` in a context requiring at least `min` binding strength.
/// A leading minus is only legal at the start of a sum, which `lead` marks.
fn write_expr(out: &mut String, e: &Expr, min: u8, lead: bool) {
    let paren = strength(e) < min || (matches!(e, Expr::Neg(_)) && !lead);
    if paren {
        out.push('(');
    }
    let lead = lead || paren;
    match e {
        Expr::Num(r) => out.push_str(&r.to_string()),
        Expr::F => out.push('f'),
        Expr::Theta => out.push_str("theta"),
        Expr::Delta => out.push_str("delta"),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(out, a, SUM, lead);
            out.push_str(if matches!(e, Expr::Add(..)) { " + " } else { " - " });
            write_expr(out, b, PRODUCT, false);
        }
        Expr::Mul(a, b) => {
            write_expr(out, a, PRODUCT, false);
            out.push('*');
            write_expr(out, b, POWER, false);
        }
        Expr::Pow(a, n) => {
            write_expr(out, a, ATOM, false);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Expr::Neg(a) => {
            out.push('-');
            write_expr(out, a, PRODUCT, false);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Prints with the fewest parentheses that parse back to the same tree.
pub fn fmt_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, SUM, true);
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_expr(self))
    }
}

/// Normal form of the expression in the algebra.
pub fn eval_expr(e: &Expr, pres: &Arc<APresentation>) -> AElement {
    let go = |x: &Expr| eval_expr(x, pres);
    let same = "operands share the presentation";
    match e {
        Expr::Num(r) => AElement::scalar(pres, r.clone()),
        Expr::F => AElement::f(pres),
        Expr::Theta => AElement::theta(pres),
        Expr::Delta => AElement::delta(pres),
        Expr::Add(a, b) => go(a).add(&go(b)).expect(same),
        Expr::Sub(a, b) => go(a).sub(&go(b)).expect(same),
        Expr::Mul(a, b) => go(a).mul(&go(b)).expect(same),
        Expr::Pow(a, n) => go(a).pow(*n),
        Expr::Neg(a) => go(a).neg(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_commutator() {
        let e = parse_expr("theta*f - f*theta").unwrap();
        assert_eq!(
            e,
            Expr::Sub(
                b(Expr::Mul(b(Expr::Theta), b(Expr::F))),
                b(Expr::Mul(b(Expr::F), b(Expr::Theta)))
            )
        );
        assert_eq!(fmt_expr(&e), "theta*f - f*theta");
    }

    #[test]
    fn parses_powers_and_scalars() {
        let e = parse_expr("delta*f^2").unwrap();
        assert_eq!(e, Expr::Mul(b(Expr::Delta), b(Expr::Pow(b(Expr::F), 2))));
        let e = parse_expr("(f*delta)^2 + 3/2").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                b(Expr::Pow(b(Expr::Mul(b(Expr::F), b(Expr::Delta))), 2)),
                b(Expr::Num(Rational::new(3, 2)))
            )
        );
        assert_eq!(fmt_expr(&e), "(f*delta)^2 + 3/2");
        assert_eq!(parse_expr(" theta ^ 3 ").unwrap(), Expr::Pow(b(Expr::Theta), 3));
    }

    #[test]
    fn left_associative() {
        let e = parse_expr("f - theta - delta").unwrap();
        assert_eq!(
            e,
            Expr::Sub(b(Expr::Sub(b(Expr::F), b(Expr::Theta))), b(Expr::Delta))
        );
        let right = Expr::Sub(b(Expr::F), b(Expr::Sub(b(Expr::Theta), b(Expr::Delta))));
        assert_eq!(fmt_expr(&right), "f - (theta - delta)");
    }

    #[test]
    fn leading_minus() {
        let e = parse_expr("-f*theta + 1").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                b(Expr::Neg(b(Expr::Mul(b(Expr::F), b(Expr::Theta))))),
                b(Expr::Num(Rational::one()))
            )
        );
        assert_eq!(fmt_expr(&Expr::Mul(b(Expr::F), b(Expr::Neg(b(Expr::F))))), "f*(-f)");
        assert!(parse_expr("f*-f").is_err());
        assert!(parse_expr("--f").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_expr("f +").unwrap_err().pos, 3);
        let err = parse_expr("f * gamma").unwrap_err();
        assert_eq!(err.pos, 4);
        assert!(matches!(err.kind, ParseErrorKind::UnknownIdent(_)));
        assert_eq!(parse_expr("f # 2").unwrap_err().kind, ParseErrorKind::UnexpectedChar('#'));
        assert_eq!(
            parse_expr("f^99999999999").unwrap_err().kind,
            ParseErrorKind::ExponentOverflow
        );
        assert_eq!(parse_expr("1/0").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(parse_expr("(f").unwrap_err().pos, 2);
        assert!(parse_expr("f^theta").is_err());
        assert!(parse_expr("f f").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn literals_are_reduced() {
        assert_eq!(parse_expr("6/4").unwrap(), Expr::Num(Rational::new(3, 2)));
        assert_eq!(fmt_expr(&parse_expr("4/2").unwrap()), "2");
    }
}
