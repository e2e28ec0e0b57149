//! Recursive-descent reader for field elements written as arithmetic
//! expressions in integers and the symbol `z`.
//!
//! ```text
//! expr    := ['+' | '-'] term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ['^' ['+' | '-'] INT]
//! primary := INT | 'z' | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::{FieldElement, FieldError, FieldSpec};

struct Parser<'a> {
    field: &'a FieldSpec,
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

pub(super) fn parse(field: &FieldSpec, text: &str) -> Result<FieldElement, FieldError> {
    let mut parser = Parser { field, text, bytes: text.as_bytes(), pos: 0 };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(value)
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> FieldError {
        FieldError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn not_in_field(&self) -> FieldError {
        FieldError::NotInField { text: self.text.to_string(), field: self.field.to_string() }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FieldElement, FieldError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = self.field.add(&acc, &rhs);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = self.field.sub(&acc, &rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement, FieldError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = self.field.mul(&acc, &rhs);
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = self.field.div(&acc, &rhs).map_err(|_| self.not_in_field())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement, FieldError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            Ok(self.field.neg(&inner))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<FieldElement, FieldError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let exp = self.integer()?;
        let exp: i64 = i64::try_from(exp).map_err(|_| self.error("exponent too large"))?;
        let exp = if negative { -exp } else { exp };
        self.field.pow(&base, exp).map_err(|_| self.not_in_field())
    }

    fn primary(&mut self) -> Result<FieldElement, FieldError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(b'z') => {
                self.pos += 1;
                self.field.zeta().map_err(|_| self.not_in_field())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(self.field.from_bigint(&n))
            }
            Some(_) => Err(self.error("expected a number, `z` or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, FieldError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        Ok(self.text[start..self.pos].parse().expect("ascii digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let q = FieldSpec::rational();
        assert_eq!(q.parse_element("-1").unwrap(), q.from_i64(-1));
        assert_eq!(q.format(&q.parse_element(" 4 / 6 ").unwrap()), "2/3");
        let k = FieldSpec::cyclotomic(6).unwrap();
        assert!(k.is_zero(&k.parse_element("z^2 - z + 1").unwrap()));
        assert_eq!(k.parse_element("z^2").unwrap(), k.parse_element("z - 1").unwrap());
        assert_eq!(k.format(&k.parse_element("2*z - 1").unwrap()), "2*z - 1");
        assert_eq!(k.parse_element("z^-1").unwrap(), k.parse_element("1 - z").unwrap());
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.parse_element("2/3").unwrap(), FieldElement::Residue(4));
    }

    #[test]
    fn rejects() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert!(matches!(f2.parse_element("1/2"), Err(FieldError::NotInField { .. })));
        let q = FieldSpec::rational();
        assert!(matches!(q.parse_element("z"), Err(FieldError::NotInField { .. })));
        assert!(matches!(q.parse_element("1 +"), Err(FieldError::Parse { pos: 3, .. })));
        assert!(matches!(q.parse_element("2 3"), Err(FieldError::Parse { pos: 2, .. })));
        assert!(matches!(q.parse_element("(1"), Err(FieldError::Parse { .. })));
        assert!(matches!(q.parse_element(""), Err(FieldError::Parse { pos: 0, .. })));
    }
}
