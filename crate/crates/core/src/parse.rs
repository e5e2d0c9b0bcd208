//! Text form of expo-polynomial functions of `t`.
//!
//! Accepted: real literals, `t`, `pi`, `+ - * /`, `^` with a non-negative
//! integer exponent, parentheses, and `exp`, `cos`, `sin` applied to a real
//! linear function of `t`. Division is only by nonzero constants.
//! Whitespace is ignored.
//!
//! ```text
//! 2 - 48*t*(1+t)
//! 3 - 2*cos(14*t)
//! 1 + 3/2*(t+2)*(0.5+t)
//! 0.5*t^2*exp(-t)*sin(3*t)
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expo_poly::ExpPoly;

pub fn parse_function(text: &str) -> Result<ExpPoly> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let value = parser.expr()?;
    match parser.peek() {
        None => Ok(value),
        Some(tok) => Err(parse_error(tok.pos, format!("unexpected {}", tok.kind.describe()))),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number(x) => format!("number {x}"),
            Kind::Ident(name) => format!("identifier '{name}'"),
            Kind::Plus => "'+'".into(),
            Kind::Minus => "'-'".into(),
            Kind::Star => "'*'".into(),
            Kind::Slash => "'/'".into(),
            Kind::Caret => "'^'".into(),
            Kind::LParen => "'('".into(),
            Kind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    pos: usize,
}

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let single = match ch {
            '+' => Some(Kind::Plus),
            '-' => Some(Kind::Minus),
            '*' => Some(Kind::Star),
            '/' => Some(Kind::Slash),
            '^' => Some(Kind::Caret),
            '(' => Some(Kind::LParen),
            ')' => Some(Kind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token { kind, pos: i });
            i += 1;
        } else if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let literal = &text[start..i];
            let value = literal
                .parse::<f64>()
                .map_err(|_| parse_error(start, format!("malformed number '{literal}'")))?;
            tokens.push(Token {
                kind: Kind::Number(value),
                pos: start,
            });
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Token {
                kind: Kind::Ident(text[start..i].to_ascii_lowercase()),
                pos: start,
            });
        } else {
            return Err(parse_error(i, format!("unexpected character '{ch}'")));
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn position(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, kind: &Kind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: Kind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |t| t.kind.describe());
            Err(parse_error(
                self.position(),
                format!("expected {}, found {found}", kind.describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<ExpPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Kind::Plus) {
                acc = acc + self.term()?;
            } else if self.eat(&Kind::Minus) {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Kind::Star) {
                acc = &acc * &self.unary()?;
            } else if self.peek().is_some_and(|t| t.kind == Kind::Slash) {
                let at = self.position() + 1;
                self.pos += 1;
                let divisor = self.unary()?;
                let d = constant_value(&divisor)
                    .ok_or_else(|| parse_error(at, "division is only allowed by a constant"))?;
                if d == 0.0 {
                    return Err(parse_error(at, "division by zero"));
                }
                acc = acc.scale_real(1.0 / d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExpPoly> {
        if self.eat(&Kind::Minus) {
            return Ok(-self.unary()?);
        }
        if self.eat(&Kind::Plus) {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExpPoly> {
        let base = self.atom()?;
        if !self.eat(&Kind::Caret) {
            return Ok(base);
        }
        let at = self.position();
        let exponent = self.unary()?;
        let n = constant_value(&exponent)
            .filter(|n| *n >= 0.0 && n.fract() == 0.0 && *n <= 64.0)
            .ok_or_else(|| parse_error(at, "exponent must be a non-negative integer constant"))?;
        Ok((0..n as usize).fold(ExpPoly::constant(1.0), |acc, _| &acc * &base))
    }

    fn atom(&mut self) -> Result<ExpPoly> {
        let at = self.position();
        let Some(token) = self.peek().cloned() else {
            return Err(parse_error(at, "unexpected end of input"));
        };
        self.pos += 1;
        match token.kind {
            Kind::Number(x) => Ok(ExpPoly::constant(x)),
            Kind::LParen => {
                let inner = self.expr()?;
                self.expect(Kind::RParen)?;
                Ok(inner)
            }
            Kind::Ident(name) => match name.as_str() {
                "t" => Ok(ExpPoly::polynomial(&[0.0, 1.0])),
                "pi" => Ok(ExpPoly::constant(std::f64::consts::PI)),
                "exp" | "cos" | "sin" => {
                    self.expect(Kind::LParen)?;
                    let arg_at = self.position();
                    let arg = self.expr()?;
                    self.expect(Kind::RParen)?;
                    let (slope, offset) = linear_coefficients(&arg).ok_or_else(|| {
                        parse_error(
                            arg_at,
                            format!("argument of {name} must be a real linear function of t"),
                        )
                    })?;
                    Ok(apply_function(&name, slope, offset))
                }
                other => Err(parse_error(token.pos, format!("unknown identifier '{other}'"))),
            },
            other => Err(parse_error(token.pos, format!("unexpected {}", other.describe()))),
        }
    }
}

fn apply_function(name: &str, slope: f64, offset: f64) -> ExpPoly {
    match name {
        "exp" => ExpPoly::exponential(Complex64::new(offset.exp(), 0.0), Complex64::new(slope, 0.0)),
        // cos(ωt + φ) = cos φ·cos ωt − sin φ·sin ωt
        "cos" => &ExpPoly::cos(slope).scale_real(offset.cos()) - &ExpPoly::sin(slope).scale_real(offset.sin()),
        "sin" => &ExpPoly::sin(slope).scale_real(offset.cos()) + &ExpPoly::cos(slope).scale_real(offset.sin()),
        _ => unreachable!("function names are filtered by the caller"),
    }
}

/// Real value of a constant expression.
fn constant_value(f: &ExpPoly) -> Option<f64> {
    match f.terms() {
        [] => Some(0.0),
        [term] if term.lambda == Complex64::new(0.0, 0.0) && term.poly.len() == 1 && term.poly[0].im == 0.0 => {
            Some(term.poly[0].re)
        }
        _ => None,
    }
}

/// `(slope, offset)` of a real linear polynomial `slope·t + offset`.
fn linear_coefficients(f: &ExpPoly) -> Option<(f64, f64)> {
    match f.terms() {
        [] => Some((0.0, 0.0)),
        [term] if term.lambda == Complex64::new(0.0, 0.0) && term.poly.len() <= 2 => {
            if term.poly.iter().any(|c| c.im != 0.0) {
                return None;
            }
            let offset = term.poly[0].re;
            let slope = term.poly.get(1).map_or(0.0, |c| c.re);
            Some((slope, offset))
        }
        _ => None,
    }
}
