//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := rational | var | '(' expr ')' | '-' factor
//! ```
//!
//! Rationals are `p/q` or integers. Variables are `L`, `M`, `N` (λ-parameters),
//! `L1`, `L2`, … (further parameters), `D`, and slot variables `x1`, `x2`, ….

use num_bigint::BigInt;
use thiserror::Error;

use super::{Poly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the source expression.
    pub position: usize,
    pub message: String,
}

pub(super) fn parse(src: &str) -> Result<Poly, ParseError> {
    let mut parser = Parser { src: src.as_bytes(), pos: 0 };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error(format!(
            "unexpected character '{}'",
            parser.src[parser.pos] as char
        )));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected an unsigned integer exponent"));
            }
            let e: u32 = digits.parse().map_err(|_| ParseError {
                position: start,
                message: format!("exponent '{digits}' is too large"),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() => self.variable(),
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
        }
    }

    fn rational(&mut self) -> Result<Poly, ParseError> {
        let num: BigInt = self.digits().parse().expect("digit run");
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let den_start = self.pos;
            let den = self.digits();
            if den.is_empty() {
                return Err(self.error("expected a denominator after '/'"));
            }
            let den: BigInt = den.parse().expect("digit run");
            if den == BigInt::from(0) {
                return Err(ParseError {
                    position: den_start,
                    message: "zero denominator".into(),
                });
            }
            return Ok(Poly::constant(Rational::new(num, den)));
        }
        Ok(Poly::constant(Rational::from_integer(num)))
    }

    fn variable(&mut self) -> Result<Poly, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let var = lookup(name).ok_or_else(|| ParseError {
            position: start,
            message: format!("unknown variable '{name}'"),
        })?;
        Ok(Poly::var(var))
    }
}

fn positive_index(s: &str) -> Option<usize> {
    if s.is_empty() || s.starts_with('0') || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().filter(|&i: &usize| i >= 1 && i < u16::MAX as usize - 2)
}

fn lookup(name: &str) -> Option<Var> {
    match name {
        "L" => Some(Var::L),
        "M" => Some(Var::M),
        "N" => Some(Var::N),
        "D" => Some(Var::D),
        _ => {
            if let Some(rest) = name.strip_prefix('x') {
                positive_index(rest).map(Var::slot)
            } else if let Some(rest) = name.strip_prefix('L') {
                positive_index(rest).map(|k| Var::param(k + 2))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::rational;
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        let l = Poly::var(Var::L);
        assert_eq!(parse("-L^2").unwrap(), -(l.pow(2)));
        assert_eq!(parse("(-L)^2").unwrap(), l.pow(2));
        assert_eq!(parse("2*L + 3*L").unwrap(), l.scale(&rational(5, 1)));
        assert_eq!(parse("1/2 - 3/4").unwrap(), Poly::constant(rational(-1, 4)));
        assert_eq!(parse("L - -L").unwrap(), l.scale(&rational(2, 1)));
    }

    #[test]
    fn recognises_all_variable_families() {
        assert_eq!(parse("x12").unwrap(), Poly::var(Var::slot(12)));
        assert_eq!(parse("L1").unwrap(), Poly::var(Var::param(3)));
        assert_eq!(parse("N*M*D").unwrap().variables().iter().count(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("L + y").unwrap_err();
        assert_eq!(err.position, 4);
        let err = parse("2x").unwrap_err();
        assert_eq!(err.position, 1);
        assert!(parse("(L + D").is_err());
        assert!(parse("L^").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("").is_err());
        assert!(parse("x0").is_err());
    }
}
