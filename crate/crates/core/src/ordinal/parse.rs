//! Text syntax: `expr := term ("+" term)*`, `term := nat | "w" pow? mult?`,
//! `pow := "^" (nat | "w" | "(" expr ")")`, `mult := "*" nat`.
//!
//! Whitespace is ignored. Summands are combined with ordinary addition from
//! left to right, so `1+w` parses to `w`.

use super::{Ordinal, OrdinalError, DEFAULT_MAX_DEPTH};

pub fn parse_ordinal(src: &str) -> Result<Ordinal, OrdinalError> {
    parse_ordinal_with_limit(src, DEFAULT_MAX_DEPTH)
}

pub fn parse_ordinal_with_limit(src: &str, max_depth: usize) -> Result<Ordinal, OrdinalError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    let depth = value.exponent_depth();
    if depth > max_depth {
        return Err(OrdinalError::TooDeep {
            depth,
            limit: max_depth,
        });
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> OrdinalError {
        OrdinalError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'0'..=b'9') => Ok(Ordinal::nat(self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') {
                    self.power()?
                } else {
                    Ordinal::one()
                };
                let coeff = if self.eat(b'*') {
                    let at = self.pos;
                    let c = self.nat()?;
                    if c == 0 {
                        return Err(OrdinalError::ZeroCoefficient { pos: at });
                    }
                    c
                } else {
                    1
                };
                Ok(Ordinal::monomial(exp, coeff))
            }
            Some(_) => Err(self.error("expected a natural number or 'w'")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn power(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'0'..=b'9') => Ok(Ordinal::nat(self.nat()?)),
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.error("expected an exponent")),
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| OrdinalError::Overflow)
    }
}
