//! Numeric literals on the command line: decimals, `pi`, `sqrt(..)`, with an
//! optional sign and `*` or `/` chains, e.g. `-sqrt(2)`, `pi/2`, `2*sqrt(3)`.
//! Complex literals are sums of such terms, imaginary ones suffixed by `i`:
//! `2`, `0.3-0.2i`, `-1.5i`, `sqrt(2)+i`.

use scarf_core::Complex64;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let sign = if self.eat("-") {
            -1.0
        } else {
            self.eat("+");
            1.0
        };
        let mut v = self.factor()?;
        loop {
            if self.eat("*") {
                v *= self.factor()?;
            } else if self.eat("/") {
                v /= self.factor()?;
            } else {
                break;
            }
        }
        Ok(sign * v)
    }

    fn factor(&mut self) -> Result<f64, String> {
        self.skip_ws();
        if self.eat("pi") {
            return Ok(std::f64::consts::PI);
        }
        if self.eat("sqrt") {
            if !self.eat("(") {
                return Err(format!("expected '(' after sqrt in {:?}", self.src));
            }
            let inner = self.expr()?;
            if !self.eat(")") {
                return Err(format!("unbalanced parenthesis in {:?}", self.src));
            }
            if inner < 0.0 {
                return Err(format!("sqrt of negative value in {:?}", self.src));
            }
            return Ok(inner.sqrt());
        }
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            let b = bytes[self.pos];
            let exp_sign = (b == b'-' || b == b'+') && self.pos > start && matches!(bytes[self.pos - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let tok = &self.src[start..self.pos];
        if tok.is_empty() || !(tok.as_bytes()[0].is_ascii_digit() || tok.as_bytes()[0] == b'.') {
            return Err(format!("expected a number, 'pi' or 'sqrt(..)' in {:?}", self.src));
        }
        tok.parse::<f64>().map_err(|_| format!("bad number {tok:?}"))
    }
}

/// Parses a real expression.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let mut p = Parser { src: s.trim(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("unexpected trailing input in {s:?}"));
    }
    if !v.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(v)
}

/// Splits at top-level `+`/`-` that start a new term.
fn terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > start => {
                let prev = bytes[..i].iter().rev().find(|c| !c.is_ascii_whitespace());
                let is_exponent = matches!(prev, Some(b'e' | b'E'))
                    && i >= 2
                    && bytes[..i - 1].last().is_some_and(|c| c.is_ascii_digit() || *c == b'.');
                let after_operator = matches!(prev, Some(b'*' | b'/' | b'+' | b'-'));
                if !is_exponent && !after_operator {
                    out.push(&s[start..i]);
                    start = i;
                }
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses a complex literal such as `0.3-0.2i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let mut z = Complex64::new(0.0, 0.0);
    for term in terms(s) {
        let term = term.trim();
        match term.strip_suffix('i') {
            Some(rest) if !rest.ends_with('p') => {
                let rest = rest.trim_end().trim_end_matches('*').trim_end();
                let coeff = match rest {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    _ => parse_real(rest)?,
                };
                z.im += coeff;
            }
            _ => z.re += parse_real(term)?,
        }
    }
    Ok(z)
}
