//! Generalised-polynomial expressions: constants from one quadratic field, the
//! variable `n`, ring operations, integer powers, `floor` and `frac`.
//!
//! Grammar (ASCII, standard precedence `^` over `* /` over `+ -`, left
//! associative):
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" INT)*
//! atom  := INT | "n" | "sqrt(" INT ")" | "floor(" expr ")" | "frac(" expr ")" | "(" expr ")"
//! ```
//!
//! The parser folds every subtree that does not mention `n` into a single
//! constant, so `1/2`, `(sqrt(5) - 1)/2` and `-3` are all `Const` leaves. A
//! divisor must be such a constant. Printing emits text that parses back to the
//! identical tree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::quadfield::{join_fields, split_square, FieldError, QuadExt, Radicand};
use crate::words::{Symbol, SymbolSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GpError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("mixed radicals sqrt({0}) and sqrt({1}) in one expression")]
    MixedRadicals(u32, u32),
    #[error("sqrt({0}) is not irrational; radicands must be >= 2 and not perfect squares")]
    RationalRadical(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("divisor must not depend on n")]
    NonConstantDivisor,
    #[error("expected a constant but the expression depends on n")]
    NotConstant,
    #[error("sturmian slope must be irrational, got {0}")]
    RationalSlope(String),
    #[error("value {value} at n = {n} is not a symbol (small non-negative integer)")]
    NotASymbol { n: u64, value: String },
}

impl From<FieldError> for GpError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::MismatchedRadicand(a, b) => GpError::MixedRadicals(a, b),
            FieldError::DivisionByZero => GpError::DivisionByZero,
            FieldError::InvalidRadicand(d) => GpError::RationalRadical(d.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GpExpr {
    Const(QuadExt),
    Var,
    Add(Box<GpExpr>, Box<GpExpr>),
    Sub(Box<GpExpr>, Box<GpExpr>),
    Mul(Box<GpExpr>, Box<GpExpr>),
    Pow(Box<GpExpr>, u32),
    Floor(Box<GpExpr>),
    Frac(Box<GpExpr>),
}

impl GpExpr {
    pub fn parse(text: &str) -> Result<GpExpr, GpError> {
        let mut p = Parser {
            src: text,
            bytes: text.as_bytes(),
            pos: 0,
            field: None,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// The field tag shared by all constants, `None` if every constant is rational.
    pub fn field(&self) -> Option<Radicand> {
        match self {
            GpExpr::Const(c) if !c.is_rational() => c.field(),
            GpExpr::Const(_) | GpExpr::Var => None,
            GpExpr::Add(l, r) | GpExpr::Sub(l, r) | GpExpr::Mul(l, r) => {
                l.field().or_else(|| r.field())
            }
            GpExpr::Pow(b, _) => b.field(),
            GpExpr::Floor(x) | GpExpr::Frac(x) => x.field(),
        }
    }

    pub fn depends_on_n(&self) -> bool {
        match self {
            GpExpr::Const(_) => false,
            GpExpr::Var => true,
            GpExpr::Add(l, r) | GpExpr::Sub(l, r) | GpExpr::Mul(l, r) => {
                l.depends_on_n() || r.depends_on_n()
            }
            GpExpr::Pow(b, _) => b.depends_on_n(),
            GpExpr::Floor(x) | GpExpr::Frac(x) => x.depends_on_n(),
        }
    }

    /// Exact value at `n`.
    pub fn eval(&self, n: u64) -> QuadExt {
        self.eval_at(&QuadExt::integer(n))
    }

    fn eval_at(&self, n: &QuadExt) -> QuadExt {
        match self {
            GpExpr::Const(c) => c.clone(),
            GpExpr::Var => n.clone(),
            GpExpr::Add(l, r) => l.eval_at(n) + r.eval_at(n),
            GpExpr::Sub(l, r) => l.eval_at(n) - r.eval_at(n),
            GpExpr::Mul(l, r) => l.eval_at(n) * r.eval_at(n),
            GpExpr::Pow(b, k) => b.eval_at(n).pow(*k),
            GpExpr::Floor(x) => QuadExt::integer(x.eval_at(n).floor()),
            GpExpr::Frac(x) => x.eval_at(n).frac(),
        }
    }

    /// The Sturmian word `floor(alpha*(n + 1) + rho) - floor(alpha*n + rho) - floor(alpha)`.
    pub fn sturmian(alpha: &QuadExt, rho: &QuadExt) -> Result<GpExpr, GpError> {
        if alpha.is_rational() {
            return Err(GpError::RationalSlope(alpha.to_string()));
        }
        join_fields(alpha.field(), rho.field())?;
        let konst = |c: &QuadExt| Box::new(GpExpr::Const(c.clone()));
        let shifted = GpExpr::Add(
            Box::new(GpExpr::Mul(
                konst(alpha),
                Box::new(GpExpr::Add(
                    Box::new(GpExpr::Var),
                    Box::new(GpExpr::Const(QuadExt::one())),
                )),
            )),
            konst(rho),
        );
        let plain = GpExpr::Add(
            Box::new(GpExpr::Mul(konst(alpha), Box::new(GpExpr::Var))),
            konst(rho),
        );
        Ok(GpExpr::Sub(
            Box::new(GpExpr::Sub(
                Box::new(GpExpr::Floor(Box::new(shifted))),
                Box::new(GpExpr::Floor(Box::new(plain))),
            )),
            Box::new(GpExpr::Const(QuadExt::integer(alpha.floor()))),
        ))
    }

    fn precedence(&self) -> u8 {
        match self {
            GpExpr::Add(..) | GpExpr::Sub(..) => 1,
            GpExpr::Mul(..) => 2,
            GpExpr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            GpExpr::Const(c) => {
                let bare = c.to_integer().is_some_and(|i| !i.is_negative())
                    || (c.rational_part().is_zero() && c.surd_part().is_one());
                if bare {
                    write!(f, "{c}")
                } else {
                    write!(f, "({c})")
                }
            }
            GpExpr::Var => write!(f, "n"),
            GpExpr::Add(l, r) | GpExpr::Sub(l, r) => {
                l.write_at(f, 1)?;
                write!(
                    f,
                    " {} ",
                    if matches!(self, GpExpr::Add(..)) {
                        "+"
                    } else {
                        "-"
                    }
                )?;
                r.write_at(f, 2)
            }
            GpExpr::Mul(l, r) => {
                l.write_at(f, 2)?;
                write!(f, "*")?;
                r.write_at(f, 3)
            }
            GpExpr::Pow(b, k) => {
                b.write_at(f, 4)?;
                write!(f, "^{k}")
            }
            GpExpr::Floor(x) => {
                write!(f, "floor(")?;
                x.write_at(f, 0)?;
                write!(f, ")")
            }
            GpExpr::Frac(x) => {
                write!(f, "frac(")?;
                x.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for GpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Parses a constant (an expression without `n`) and returns its exact value.
pub fn parse_constant(text: &str) -> Result<QuadExt, GpError> {
    match GpExpr::parse(text)? {
        GpExpr::Const(c) => Ok(c),
        _ => Err(GpError::NotConstant),
    }
}

/// A generalised polynomial whose values are read as symbols.
pub struct GpSequence(pub GpExpr);

impl SymbolSequence for GpSequence {
    fn symbol_at(&self, n: u64) -> Result<Symbol, crate::Error> {
        let v = self.0.eval(n);
        v.to_integer().and_then(|i| i.to_u8()).ok_or_else(|| {
            GpError::NotASymbol {
                n,
                value: v.to_string(),
            }
            .into()
        })
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    field: Option<Radicand>,
}

fn fold2(
    l: GpExpr,
    r: GpExpr,
    op: fn(&QuadExt, &QuadExt) -> Result<QuadExt, FieldError>,
    node: fn(Box<GpExpr>, Box<GpExpr>) -> GpExpr,
) -> Result<GpExpr, GpError> {
    Ok(match (l, r) {
        (GpExpr::Const(a), GpExpr::Const(b)) => GpExpr::Const(op(&a, &b)?),
        (l, r) => node(Box::new(l), Box::new(r)),
    })
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> GpError {
        GpError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
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

    fn expect(&mut self, c: u8) -> Result<(), GpError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<GpExpr, GpError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = fold2(lhs, rhs, QuadExt::checked_add, GpExpr::Add)?;
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = fold2(lhs, rhs, QuadExt::checked_sub, GpExpr::Sub)?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<GpExpr, GpError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                lhs = fold2(lhs, rhs, QuadExt::checked_mul, GpExpr::Mul)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = match self.unary()? {
                    GpExpr::Const(c) => c,
                    _ => {
                        self.pos = at;
                        return Err(GpError::NonConstantDivisor);
                    }
                };
                let inv = GpExpr::Const(rhs.inv()?);
                lhs = fold2(lhs, inv, QuadExt::checked_mul, GpExpr::Mul)?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<GpExpr, GpError> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return fold2(
                GpExpr::Const(QuadExt::integer(-1)),
                inner,
                QuadExt::checked_mul,
                GpExpr::Mul,
            );
        }
        self.power()
    }

    fn power(&mut self) -> Result<GpExpr, GpError> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            self.skip_ws();
            let k = self
                .integer()?
                .to_u32()
                .ok_or_else(|| self.error("exponent too large"))?;
            base = match base {
                GpExpr::Const(c) => GpExpr::Const(c.pow(k)),
                b => GpExpr::Pow(Box::new(b), k),
            };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, GpError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a non-negative integer"));
        }
        Ok(self.src[start..self.pos]
            .parse()
            .expect("digit run parses as an integer"))
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let rest = &self.bytes[self.pos..];
        if rest.starts_with(word.as_bytes()) {
            let next = rest.get(word.len()).copied();
            if !next.is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                self.pos += word.len();
                return true;
            }
        }
        false
    }

    fn atom(&mut self) -> Result<GpExpr, GpError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let i = self.integer()?;
                Ok(GpExpr::Const(QuadExt::integer(i)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            _ if self.keyword("n") => Ok(GpExpr::Var),
            _ if self.keyword("sqrt") => {
                self.expect(b'(')?;
                let d = self.integer()?;
                self.expect(b')')?;
                self.radical(&d)
            }
            _ if self.keyword("floor") => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(match e {
                    GpExpr::Const(c) => GpExpr::Const(QuadExt::integer(c.floor())),
                    e => GpExpr::Floor(Box::new(e)),
                })
            }
            _ if self.keyword("frac") => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(match e {
                    GpExpr::Const(c) => GpExpr::Const(c.frac()),
                    e => GpExpr::Frac(Box::new(e)),
                })
            }
            Some(_) => Err(self.error("expected a number, 'n', '(' or a function")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    /// `sqrt(d)` as `s*sqrt(r)` with `r` square-free.
    fn radical(&mut self, d: &BigInt) -> Result<GpExpr, GpError> {
        let raw = d.to_u64().filter(|&v| v >= 2 && v <= u32::MAX as u64);
        let (outer, core) = match raw {
            Some(v) => split_square(v),
            None => return Err(GpError::RationalRadical(d.to_string())),
        };
        if core == 1 {
            return Err(GpError::RationalRadical(d.to_string()));
        }
        let r = Radicand::new(core as i64)?;
        self.field = join_fields(self.field, Some(r))?;
        let s = BigRational::from_integer(BigInt::from(outer));
        Ok(GpExpr::Const(QuadExt::new(BigRational::zero(), s, r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: QuadExt) -> Box<GpExpr> {
        Box::new(GpExpr::Const(x))
    }

    fn sqrt2() -> QuadExt {
        QuadExt::sqrt(Radicand::new(2).unwrap())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            GpExpr::parse("floor(sqrt(2)*n^2)").unwrap(),
            GpExpr::Floor(Box::new(GpExpr::Mul(
                c(sqrt2()),
                Box::new(GpExpr::Pow(Box::new(GpExpr::Var), 2))
            )))
        );
        assert_eq!(
            GpExpr::parse("frac(1/2 + n)").unwrap(),
            GpExpr::Frac(Box::new(GpExpr::Add(
                c(QuadExt::rational(crate::quadfield::ratio(1, 2))),
                Box::new(GpExpr::Var)
            )))
        );
        assert_eq!(
            GpExpr::parse("sqrt(2) + sqrt(3)"),
            Err(GpError::MixedRadicals(2, 3))
        );
        assert_eq!(
            GpExpr::parse("n*sqrt(2) + n*sqrt(3)"),
            Err(GpError::MixedRadicals(2, 3))
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            GpExpr::parse("sqrt(4)"),
            Err(GpError::RationalRadical(_))
        ));
        assert!(matches!(
            GpExpr::parse("sqrt(1)"),
            Err(GpError::RationalRadical(_))
        ));
        assert!(matches!(
            GpExpr::parse("sqrt(0)"),
            Err(GpError::RationalRadical(_))
        ));
        assert_eq!(GpExpr::parse("1/(n+1)"), Err(GpError::NonConstantDivisor));
        assert_eq!(GpExpr::parse("n/0"), Err(GpError::DivisionByZero));
        assert!(matches!(
            GpExpr::parse("n + * 2"),
            Err(GpError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            GpExpr::parse("floor(n"),
            Err(GpError::Syntax { .. })
        ));
        assert!(matches!(
            GpExpr::parse("n ^ x"),
            Err(GpError::Syntax { .. })
        ));
        assert!(matches!(
            GpExpr::parse("m"),
            Err(GpError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(GpExpr::parse("n 2"), Err(GpError::Syntax { .. })));
    }

    #[test]
    fn non_square_free_radicands_normalise() {
        let e = parse_constant("sqrt(8)").unwrap();
        assert_eq!(
            e,
            QuadExt::from_parts(0, 1, 2, 1, Radicand::new(2).unwrap())
        );
    }

    #[test]
    fn constants_fold() {
        let golden = parse_constant("(sqrt(5) - 1)/2").unwrap();
        let five = Radicand::new(5).unwrap();
        assert_eq!(golden, QuadExt::from_parts(-1, 2, 1, 2, five));
        assert_eq!(parse_constant("-3").unwrap(), QuadExt::integer(-3));
        assert_eq!(
            parse_constant("floor(sqrt(2)*100)").unwrap(),
            QuadExt::integer(141)
        );
        assert_eq!(parse_constant("n"), Err(GpError::NotConstant));
    }

    #[test]
    fn evaluation() {
        let e = GpExpr::parse("frac(sqrt(2)*n^2)").unwrap();
        assert_eq!(e.eval(0), QuadExt::zero());
        let two = Radicand::new(2).unwrap();
        assert_eq!(e.eval(2), QuadExt::from_parts(-5, 1, 4, 1, two));
    }

    #[test]
    fn sturmian_golden() {
        let alpha = parse_constant("(sqrt(5) - 1)/2").unwrap();
        let s = GpExpr::sturmian(&alpha, &QuadExt::zero()).unwrap();
        let vals: Vec<_> = (0..8).map(|n| s.eval(n).to_integer().unwrap()).collect();
        let expected: Vec<BigInt> = [0, 1, 0, 1, 1, 0, 1, 0].iter().map(|&v| v.into()).collect();
        assert_eq!(vals, expected);
        assert!(matches!(
            GpExpr::sturmian(
                &QuadExt::rational(crate::quadfield::ratio(1, 2)),
                &QuadExt::zero()
            ),
            Err(GpError::RationalSlope(_))
        ));
        let printed = s.to_string();
        assert_eq!(GpExpr::parse(&printed).unwrap(), s);
    }

    #[test]
    fn printing() {
        for src in [
            "floor(sqrt(2)*n^2)",
            "frac((1/2) + n)",
            "n - (n - n)",
            "n*(n*n)",
            "(n^2)^3",
            "(-1)*n + (1/2 - sqrt(3))*floor(n^2)",
        ] {
            let e = GpExpr::parse(src).unwrap();
            assert_eq!(e.to_string(), src);
        }
    }
}
