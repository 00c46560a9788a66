//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' ['-'] integer)?
//! base   := identifier | integer | '(' expr ')'
//! ```
//!
//! Implicit multiplication is not accepted. Rational literals are written as
//! quotients of integers (`3/2`), which the grammar covers via `/`.

use std::sync::Arc;

use num::{BigInt, BigRational};

use crate::chart::Chart;
use crate::error::ExprError;

use super::Expr;

/// Parses `text` over `chart`; every identifier must be a chart variable or
/// opaque constant of that chart.
pub fn parse(text: &str, chart: &Arc<Chart>) -> Result<Expr, ExprError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, chart };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    chart: &'a Arc<Chart>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let negate = self.eat(b'-');
        self.skip_ws();
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.div(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let neg = self.eat(b'-');
            let n = self.integer()?;
            let exp: i32 = n
                .to_string()
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            return base.pow(if neg { -exp } else { exp });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::constant(self.chart, BigRational::from(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|c| c.is_ascii_alphanumeric() || c == b'_')
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                Expr::symbol(self.chart, name)
            }
            _ => Err(self.err("expected identifier, number, or `(`")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|_| self.err("bad integer literal"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Chart::new(["x1", "x2"], ["k"]).unwrap()
    }

    #[test]
    fn positions_in_errors() {
        match parse("x1 + ", &chart()) {
            Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_symbols() {
        assert_eq!(parse("y", &chart()), Err(ExprError::UnknownSymbol("y".into())));
    }

    #[test]
    fn no_implicit_multiplication() {
        assert!(parse("2 x1", &chart()).is_err());
        assert!(parse("x1 x2", &chart()).is_err());
    }

    #[test]
    fn rational_literals_via_division() {
        let e = parse("3/2 * x1", &chart()).unwrap();
        assert_eq!(e, parse("(3*x1)/2", &chart()).unwrap());
    }

    #[test]
    fn division_by_literal_zero() {
        assert_eq!(parse("1/0", &chart()), Err(ExprError::ZeroDenominator));
        assert_eq!(parse("1/(x1 - x1)", &chart()), Err(ExprError::ZeroDenominator));
    }
}
