//! Operand parsing: expressions in `t` and `x` evaluated inside a scalar
//! field context, so `x*t` means the skew product and renders back through
//! the same grammar the printers use.
//!
//! Grammar: sums of products of powers of atoms, where an atom is an
//! integer, `t`, `x` or a parenthesized expression. `/` is scalar field
//! division and requires both sides free of `x`.

use orekit_core::ore::{
    skew_add, skew_mul, skew_neg, skew_pow, skew_sub, FieldOreContext, SkewContext, SkewPoly,
};
use orekit_core::scalars::Scalar;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    ctx: &'a FieldOreContext,
    chars: Vec<char>,
    pos: usize,
}

type PResult = Result<SkewPoly<Scalar>, ParseError>;

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expr(&mut self) -> PResult {
        let mut acc = if self.peek() == Some('-') {
            self.bump();
            skew_neg(self.ctx, &self.term()?)
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = skew_add(self.ctx, &acc, &self.term()?);
                }
                Some('-') => {
                    self.bump();
                    acc = skew_sub(self.ctx, &acc, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    let rhs = self.power()?;
                    acc = skew_mul(self.ctx, &acc, &rhs)
                        .map_err(|e| ParseError(e.to_string()))?;
                }
                Some('/') => {
                    self.bump();
                    let rhs = self.power()?;
                    let (Some(0) | None, Some(0)) = (acc.degree(), rhs.degree()) else {
                        return Err(ParseError(
                            "division needs both operands free of x".into(),
                        ));
                    };
                    let c = rhs.coeff_or_zero(self.ctx, 0);
                    let inv = self
                        .ctx
                        .invert(&c)
                        .ok_or_else(|| ParseError("division by zero".into()))?;
                    acc = skew_mul(self.ctx, &acc, &SkewPoly::constant(self.ctx, inv))
                        .map_err(|e| ParseError(e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> PResult {
        let negate = if self.peek() == Some('-') {
            self.bump();
            true
        } else {
            false
        };
        let base = self.atom()?;
        let out = if self.peek() == Some('^') {
            self.bump();
            let k = self.integer()? as usize;
            skew_pow(self.ctx, &base, k).map_err(|e| ParseError(e.to_string()))?
        } else {
            base
        };
        Ok(if negate { skew_neg(self.ctx, &out) } else { out })
    }

    fn atom(&mut self) -> PResult {
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(ParseError("expected )".into()));
                }
                Ok(inner)
            }
            Some('x') => {
                self.bump();
                Ok(SkewPoly::x(self.ctx))
            }
            Some('t') => {
                self.bump();
                if !self.ctx.field.is_rational() {
                    return Err(ParseError(
                        "t is only available over a rational function field".into(),
                    ));
                }
                let t = Scalar::Rational(self.ctx.field.prime().rf_t());
                Ok(SkewPoly::constant(self.ctx, t))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(SkewPoly::constant(self.ctx, self.ctx.field.constant(n)))
            }
            Some(c) => Err(ParseError(format!("unexpected character '{c}'"))),
            None => Err(ParseError("unexpected end of input".into())),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError("expected an integer".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| ParseError("integer overflow".into()))
    }
}

pub fn parse_poly(ctx: &FieldOreContext, input: &str) -> PResult {
    let mut p = Parser {
        ctx,
        chars: input.chars().collect(),
        pos: 0,
    };
    let out = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(ParseError(format!("trailing input at '{c}'")));
    }
    Ok(out)
}

/// A degree-zero expression, as a scalar.
pub fn parse_scalar(ctx: &FieldOreContext, input: &str) -> Result<Scalar, ParseError> {
    let p = parse_poly(ctx, input)?;
    match p.degree() {
        Some(0) | None => Ok(p.coeff_or_zero(ctx, 0)),
        Some(d) => Err(ParseError(format!(
            "expected a scalar but found degree {d} in x"
        ))),
    }
}

/// Splits a tower element literal `(level, body)` into its parts; the body
/// text is parsed later against the scenario's field.
pub fn split_tower(input: &str) -> Result<(u32, &str), ParseError> {
    let s = input.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError("tower elements look like (level, body)".into()))?;
    let (level, body) = inner
        .split_once(',')
        .ok_or_else(|| ParseError("tower elements look like (level, body)".into()))?;
    let level: u32 = level
        .trim()
        .parse()
        .map_err(|_| ParseError("tower level must be a small nonnegative integer".into()))?;
    Ok((level, body.trim()))
}
