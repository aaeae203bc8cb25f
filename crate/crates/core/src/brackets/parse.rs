//! Text form of polynomials: `+ - * / ^`, parentheses, integer or decimal
//! literals and variable names. Division is only allowed by nonzero
//! constants and exponents must be nonnegative integer literals.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{PhasePoly, PhaseSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Tok::Num(parse_decimal(&lit)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("malformed number `{lit}`"));
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(n, d))
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    space: &'a Arc<PhaseSpace>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PhasePoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PhasePoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(BigRational::one() / c)),
                    Some(_) => return Err(Error::Parse("division by zero".into())),
                    None => return Err(Error::NonPolynomial(format!("division by `{d}`"))),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PhasePoly> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<PhasePoly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        if self.eat('-') {
            return Err(Error::NonPolynomial("negative exponent".into()));
        }
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if !n.is_integer() {
                    return Err(Error::NonPolynomial(format!("fractional exponent {n}")));
                }
                let e: u32 = n
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::Parse(format!("exponent {n} too large")))?;
                Ok(base.pow(e))
            }
            _ => Err(Error::NonPolynomial(
                "exponent must be an integer literal".into(),
            )),
        }
    }

    fn atom(&mut self) -> Result<PhasePoly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(PhasePoly::constant(self.space, n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                PhasePoly::var(self.space, &name)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

/// Parse `src` as a polynomial over `space`.
pub fn parse_poly(space: &Arc<PhaseSpace>, src: &str) -> Result<PhasePoly> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        space,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Arc<PhaseSpace> {
        PhaseSpace::new(&["w", "x", "xd", "xddd", "p"], &[("x", "p")], Some("I")).unwrap()
    }

    #[test]
    fn round_trip_display() {
        let s = space();
        let p = parse_poly(&s, "xddd + 3/2 * w^2 * xd").unwrap();
        assert_eq!(p.to_string(), "3/2*w^2*xd + xddd");
        assert_eq!(parse_poly(&s, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn arithmetic() {
        let s = space();
        assert_eq!(
            parse_poly(&s, "(x + 1)^2 - x^2 - 2*x").unwrap().to_string(),
            "1"
        );
        assert_eq!(parse_poly(&s, "-x^2").unwrap().to_string(), "-x^2");
        assert_eq!(parse_poly(&s, "0.25*x").unwrap().to_string(), "1/4*x");
        assert_eq!(parse_poly(&s, "I*I").unwrap().to_string(), "-1");
        assert_eq!(parse_poly(&s, "x/2").unwrap().to_string(), "1/2*x");
    }

    #[test]
    fn rejects_non_polynomials() {
        let s = space();
        assert!(matches!(
            parse_poly(&s, "1/x"),
            Err(Error::NonPolynomial(_))
        ));
        assert!(matches!(
            parse_poly(&s, "x^-1"),
            Err(Error::NonPolynomial(_))
        ));
        assert!(matches!(
            parse_poly(&s, "x^0.5"),
            Err(Error::NonPolynomial(_))
        ));
        assert!(matches!(
            parse_poly(&s, "y"),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(parse_poly(&s, "x +"), Err(Error::Parse(_))));
        assert!(matches!(parse_poly(&s, "(x"), Err(Error::Parse(_))));
        assert!(matches!(parse_poly(&s, "x $ 2"), Err(Error::Parse(_))));
    }
}
