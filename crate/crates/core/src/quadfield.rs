//! Exact arithmetic in real quadratic fields `Q(sqrt(d))`.
//!
//! An element is `a + b*sqrt(d)` with arbitrary-precision rational `a`, `b`.
//! Elements carry their field tag; purely rational values may carry no tag and
//! combine with any field. Every predicate (sign, comparison, floor) is decided
//! exactly, there is no floating point on any decision path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("radicand {0} must be a square-free integer >= 2")]
    InvalidRadicand(i64),
    #[error("mixed radicals sqrt({0}) and sqrt({1})")]
    MismatchedRadicand(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
}

/// Square-free integer `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radicand(u32);

impl Radicand {
    pub fn new(d: i64) -> Result<Self, FieldError> {
        if d < 2 || d > u32::MAX as i64 || !is_square_free(d as u64) {
            return Err(FieldError::InvalidRadicand(d));
        }
        Ok(Radicand(d as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Splits `n >= 1` as `s^2 * r` with `r` square-free.
pub fn split_square(n: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, rest)
}

/// Combined field tag of two operands, `None` meaning "rational".
pub fn join_fields(
    x: Option<Radicand>,
    y: Option<Radicand>,
) -> Result<Option<Radicand>, FieldError> {
    match (x, y) {
        (Some(a), Some(b)) if a != b => Err(FieldError::MismatchedRadicand(a.0, b.0)),
        (Some(a), _) | (_, Some(a)) => Ok(Some(a)),
        (None, None) => Ok(None),
    }
}

/// An exact element `a + b*sqrt(d)` of a real quadratic field.
///
/// Rational elements have `b = 0`; they may or may not carry a field tag and
/// compare equal across tags. Operator impls (`+`, `*`, ...) panic on mixed
/// radicands; the `checked_*` methods report it as an error instead.
#[derive(Clone, Debug)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    field: Option<Radicand>,
}

impl QuadExt {
    /// `a + b*sqrt(d)`.
    pub fn new(a: BigRational, b: BigRational, d: Radicand) -> Self {
        QuadExt {
            a,
            b,
            field: Some(d),
        }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExt {
            a,
            b: BigRational::zero(),
            field: None,
        }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt(d: Radicand) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), d)
    }

    /// Builds `p/q + (r/s)*sqrt(d)` from small integers; test and CLI convenience.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64, d: Radicand) -> Self {
        Self::new(ratio(p, q), ratio(r, s), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    /// The field tag, if the element is tagged.
    pub fn field(&self) -> Option<Radicand> {
        self.field
    }

    pub fn with_field(mut self, d: Option<Radicand>) -> Self {
        if d.is_some() {
            self.field = d;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.a.is_integer()
    }

    /// The integer value, if the element is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.a.to_integer())
    }

    fn radicand_value(&self) -> BigInt {
        BigInt::from(self.field.map_or(0, |d| d.0))
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(QuadExt {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            field: join_fields(self.field, rhs.field)?,
        })
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(QuadExt {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            field: join_fields(self.field, rhs.field)?,
        })
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        let field = join_fields(self.field, rhs.field)?;
        let a = if self.b.is_zero() || rhs.b.is_zero() {
            &self.a * &rhs.a
        } else {
            let d = BigRational::from_integer(BigInt::from(field.map_or(0, |d| d.0)));
            &self.a * &rhs.a + &self.b * &rhs.b * d
        };
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(QuadExt { a, b, field })
    }

    /// Multiplicative inverse: `(a - b*sqrt(d)) / (a^2 - d*b^2)`.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(QuadExt {
                a: self.a.recip(),
                b: BigRational::zero(),
                field: self.field,
            });
        }
        let d = BigRational::from_integer(self.radicand_value());
        let norm = &self.a * &self.a - &self.b * &self.b * d;
        Ok(QuadExt {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
            field: self.field,
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.checked_mul(&rhs.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = QuadExt::one().with_field(self.field);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Exact sign of `a + b*sqrt(d)`.
    pub fn sign(&self) -> i32 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with d*b^2
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * BigRational::from_integer(self.radicand_value());
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_cmp(&self, rhs: &Self) -> Result<Ordering, FieldError> {
        Ok(self.checked_sub(rhs)?.sign().cmp(&0))
    }

    /// The unique integer `m` with `m <= value < m + 1`.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // write the value as (p + q*sqrt(d)) / den with integer p, q and den > 0
        let den = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&den / self.a.denom());
        let q = self.b.numer() * (&den / self.b.denom());
        let d = self.radicand_value();
        // floor(|q|*sqrt(d)) = isqrt(q^2 d) since the product is irrational
        let root = (&q * &q * d).sqrt();
        let whole = if q.is_negative() {
            p - root - 1
        } else {
            p + root
        };
        let m = whole.div_floor(&den);
        debug_assert!(self.floor_certified(&m));
        m
    }

    /// Exact check of `m <= value < m + 1`.
    pub fn floor_certified(&self, m: &BigInt) -> bool {
        let lower = self - &QuadExt::integer(m.clone());
        let upper = &lower - &QuadExt::one();
        lower.sign() >= 0 && upper.sign() < 0
    }

    /// `value - floor(value)`, lies in `[0, 1)`.
    pub fn frac(&self) -> Self {
        self - &QuadExt::integer(self.floor())
    }

    /// Floating point approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.radicand_value().to_f64().unwrap_or(f64::NAN)).sqrt()
    }
}

fn rat_sign(x: &BigRational) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// `p/q` as a big rational. Panics when `q == 0`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.field == other.field)
    }
}

impl Eq for QuadExt {}

impl fmt::Display for QuadExt {
    /// Canonical text, e.g. `1/2 - 3/4*sqrt(2)`, re-parseable by the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.field {
            Some(d) if !self.b.is_zero() => d,
            _ => return write!(f, "{}", self.a),
        };
        let surd = |f: &mut fmt::Formatter<'_>, b: &BigRational| {
            if b.is_one() {
                write!(f, "sqrt({d})")
            } else {
                write!(f, "{b}*sqrt({d})")
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-")?;
            }
            return surd(f, &self.b.abs());
        }
        write!(
            f,
            "{} {} ",
            self.a,
            if self.b.is_negative() { "-" } else { "+" }
        )?;
        surd(f, &self.b.abs())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }

        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -&self.a,
            b: -&self.b,
            field: self.field,
        }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}
