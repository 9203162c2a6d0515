//! Plain-text polynomial format.
//!
//! Printed form: terms in descending graded-lex order joined by ` + `, each
//! `(re+imi) * z0^a0 * z1^a1 ...` with exponent-one factors written `zj` and
//! zero exponents omitted. Coefficients use Rust's shortest round-trip float
//! formatting, so printing then parsing is exact.
//!
//! The parser also accepts the looser hand-written form used in configs:
//! `z2 - z1^2`, `3*z0*z1 + 2i`, `-(0.5+1e-3i)*z0^4`.

use num_complex::Complex64;

use super::Polynomial;
use crate::error::{LabError, Result};

pub(super) fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, m) in p.monomials().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        out.push_str(&format_complex(m.coefficient));
        for (j, &k) in m.exponents.iter().enumerate() {
            match k {
                0 => {}
                1 => out.push_str(&format!(" * z{j}")),
                _ => out.push_str(&format!(" * z{j}^{k}")),
            }
        }
    }
    out
}

pub(crate) fn format_complex(c: Complex64) -> String {
    if c.im.is_sign_negative() {
        format!("({:?}{:?}i)", c.re, c.im)
    } else {
        format!("({:?}+{:?}i)", c.re, c.im)
    }
}

pub(super) fn parse_polynomial(s: &str, nvars: Option<usize>) -> Result<Polynomial> {
    let mut parser = Parser {
        chars: s.chars().collect(),
        pos: 0,
    };
    let terms = parser.polynomial()?;
    let max_var = terms
        .iter()
        .flat_map(|(e, _)| e.iter().map(|(v, _)| *v))
        .max();
    let needed = max_var.map(|v| v + 1).unwrap_or(1);
    let n = match nvars {
        Some(n) if n < needed => {
            return Err(LabError::input(format!(
                "polynomial uses z{} but only {n} variables were declared",
                needed - 1
            )))
        }
        Some(n) => n,
        None => needed,
    };
    let mut p = Polynomial::zero(n);
    for (factors, c) in terms {
        let mut e = vec![0u32; n];
        for (v, k) in factors {
            e[v] += k;
        }
        p.add_term(e, c);
    }
    Ok(p)
}

type Term = (Vec<(usize, u32)>, Complex64);

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> LabError {
        LabError::input(format!(
            "polynomial parse error at column {}: {msg}",
            self.pos + 1
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn polynomial(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        match self.peek() {
            Some('-') => {
                sign = -1.0;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            None => return Err(self.err("empty polynomial")),
            _ => {}
        }
        loop {
            let (f, c) = self.term()?;
            terms.push((f, c * sign));
            match self.peek() {
                Some('+') => {
                    sign = 1.0;
                    self.pos += 1;
                }
                Some('-') => {
                    sign = -1.0;
                    self.pos += 1;
                }
                None => break,
                Some(_) => return Err(self.err("expected '+', '-' or end of input")),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let mut factors = Vec::new();
        let mut coeff = Complex64::new(1.0, 0.0);
        loop {
            match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos] != ')' {
                        self.pos += 1;
                    }
                    if self.pos >= self.chars.len() {
                        return Err(self.err("unclosed '('"));
                    }
                    let inner: String = self.chars[start..self.pos].iter().collect();
                    self.pos += 1;
                    coeff *= parse_complex(inner.trim()).map_err(|m| self.err(&m))?;
                }
                Some('z') => {
                    self.pos += 1;
                    let v = self.integer()? as usize;
                    let mut k = 1;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        k = self.integer()?;
                    }
                    factors.push((v, k));
                }
                Some('i') => {
                    self.pos += 1;
                    coeff *= Complex64::new(0.0, 1.0);
                }
                Some(ch) if ch.is_ascii_digit() || ch == '.' => {
                    let x = self.real()?;
                    if self.chars.get(self.pos) == Some(&'i') {
                        self.pos += 1;
                        coeff *= Complex64::new(0.0, x);
                    } else {
                        coeff *= x;
                    }
                }
                _ => return Err(self.err("expected coefficient or variable")),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((factors, coeff))
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected integer"))
    }

    fn real(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let ch = self.chars[self.pos];
            let exp_sign = (ch == '-' || ch == '+')
                && self.pos > start
                && matches!(self.chars[self.pos - 1], 'e' | 'E');
            if ch.is_ascii_digit() || ch == '.' || ch == 'e' || ch == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| self.err(&format!("bad number '{s}'")))
    }
}

/// Parse `re+imi`, `re-imi`, a bare real, or a bare imaginary `imi`.
pub(crate) fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = s.as_bytes();
    if let Some(body) = s.strip_suffix('i') {
        let split = (1..body.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        return match split {
            Some(k) => {
                let re: f64 = body[..k]
                    .parse()
                    .map_err(|_| format!("bad real part in '{s}'"))?;
                let im_txt = &body[k..];
                let im: f64 = match im_txt {
                    "+" => 1.0,
                    "-" => -1.0,
                    t => t
                        .parse()
                        .map_err(|_| format!("bad imaginary part in '{s}'"))?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    t => t
                        .parse()
                        .map_err(|_| format!("bad imaginary literal '{s}'"))?,
                };
                Ok(Complex64::new(0.0, im))
            }
        };
    }
    s.parse::<f64>()
        .map(|x| Complex64::new(x, 0.0))
        .map_err(|_| format!("bad complex literal '{s}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_canonical_form() {
        let p = parse_polynomial("z2 - z1^2", None).unwrap();
        assert_eq!(p.to_string(), "(-1.0+0.0i) * z1^2 + (1.0+0.0i) * z2");
        let p = parse_polynomial("(0.5-2e-7i)*z0*z1 + 3", None).unwrap();
        assert_eq!(p.to_string(), "(0.5-2e-7i) * z0 * z1 + (3.0+0.0i)");
    }

    #[test]
    fn parses_loose_forms() {
        let p = parse_polynomial("-z0^3 + 2i*z1 - (1+1i)", Some(2)).unwrap();
        assert_eq!(p.coefficient(&[3, 0]), Complex64::new(-1.0, 0.0));
        assert_eq!(p.coefficient(&[0, 1]), Complex64::new(0.0, 2.0));
        assert_eq!(p.coefficient(&[0, 0]), Complex64::new(-1.0, -1.0));
        assert_eq!(
            parse_complex("1e-3-2.5E+2i").unwrap(),
            Complex64::new(1e-3, -250.0)
        );
    }

    #[test]
    fn reports_errors_with_column() {
        let e = parse_polynomial("z0 + * z1", None).unwrap_err();
        assert!(e.to_string().contains("column"));
        assert!(parse_polynomial("", None).is_err());
        assert!(parse_polynomial("z3", Some(2)).is_err());
        assert!(parse_polynomial("(1+2i", None).is_err());
    }
}
