//! Quadratic-phase sequences `a(n) = [frac(alpha n^2 + beta0 n + gamma0) in (lo, hi) mod 1]`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::gpexpr::{parse_constant, GpError};
use crate::quadfield::{join_fields, FieldError, QuadExt, Radicand};
use crate::words::{Symbol, SymbolSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("invalid phase definition: {0}")]
    Syntax(String),
    #[error("in {key}: {source}")]
    Constant {
        key: String,
        #[source]
        source: GpError,
    },
    #[error("alpha must be irrational, got {0}")]
    RationalAlpha(String),
    #[error("arc endpoints must be rational, got {0}")]
    IrrationalArc(String),
    #[error("arc ({lo},{hi}) must satisfy lo < hi and hi - lo < 1")]
    DegenerateArc { lo: String, hi: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticPhase {
    alpha: QuadExt,
    beta0: QuadExt,
    gamma0: QuadExt,
    lo: BigRational,
    hi: BigRational,
}

impl QuadraticPhase {
    pub fn new(
        alpha: QuadExt,
        beta0: QuadExt,
        gamma0: QuadExt,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Self, PhaseError> {
        if alpha.is_rational() {
            return Err(PhaseError::RationalAlpha(alpha.to_string()));
        }
        let field = join_fields(alpha.field(), beta0.field())?;
        join_fields(field, gamma0.field())?;
        let width = &hi - &lo;
        if !width.is_positive() || width >= BigRational::from_integer(1.into()) {
            return Err(PhaseError::DegenerateArc {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(QuadraticPhase {
            alpha,
            beta0,
            gamma0,
            lo,
            hi,
        })
    }

    /// `alpha = sqrt(2)`, arc `(-1/4, 1/4)`.
    pub fn sqrt2_quarter_arc() -> Self {
        "alpha=sqrt(2); arc=(-1/4,1/4)"
            .parse()
            .expect("built-in phase parses")
    }

    pub fn alpha(&self) -> &QuadExt {
        &self.alpha
    }

    pub fn arc(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn field(&self) -> Radicand {
        self.alpha
            .field()
            .expect("irrational alpha carries its field")
    }

    /// `alpha n^2 + beta0 n + gamma0`, exact.
    pub fn phase_value(&self, n: u64) -> QuadExt {
        let n = QuadExt::integer(n);
        &(&(&self.alpha * &(&n * &n)) + &(&self.beta0 * &n)) + &self.gamma0
    }

    /// Exact membership of the phase value in the open arc mod 1.
    pub fn eval(&self, n: u64) -> Symbol {
        in_arc(&self.phase_value(n), &self.lo, &self.hi) as Symbol
    }

    /// Values at `0..len` through a machine-integer route, falling back to
    /// [`Self::eval`] whenever an intermediate would overflow.
    pub fn prefix_values(&self, len: usize) -> Vec<Symbol> {
        let fast = IntPhase::new(self);
        (0..len as u64)
            .into_par_iter()
            .map(|n| {
                fast.as_ref()
                    .and_then(|f| f.eval(n))
                    .unwrap_or_else(|| self.eval(n))
            })
            .collect()
    }
}

/// `frac(v) in (lo, hi) mod 1`, decided by exact sign tests.
pub fn in_arc(v: &QuadExt, lo: &BigRational, hi: &BigRational) -> bool {
    let shifted = v - &QuadExt::rational(lo.clone());
    let k = shifted.floor();
    let rel = &shifted - &QuadExt::integer(k);
    let width = QuadExt::rational(hi - lo);
    rel.sign() > 0 && (&rel - &width).sign() < 0
}

impl SymbolSequence for QuadraticPhase {
    fn symbol_at(&self, n: u64) -> Result<Symbol, crate::Error> {
        Ok(self.eval(n))
    }

    fn prefix(&self, len: usize) -> Result<Vec<Symbol>, crate::Error> {
        Ok(self.prefix_values(len))
    }
}

impl fmt::Display for QuadraticPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={}; beta0={}; gamma0={}; arc=({},{})",
            self.alpha, self.beta0, self.gamma0, self.lo, self.hi
        )
    }
}

impl FromStr for QuadraticPhase {
    type Err = PhaseError;

    /// `alpha=<quadext>; beta0=<quadext>; gamma0=<quadext>; arc=(lo,hi)`;
    /// `beta0` and `gamma0` default to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut alpha = None;
        let mut beta0 = None;
        let mut gamma0 = None;
        let mut arc = None;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| PhaseError::Syntax(format!("expected key=value, got {part:?}")))?;
            let key = key.trim();
            let constant = |v: &str| {
                parse_constant(v).map_err(|source| PhaseError::Constant {
                    key: key.to_string(),
                    source,
                })
            };
            let slot = match key {
                "alpha" => &mut alpha,
                "beta0" => &mut beta0,
                "gamma0" => &mut gamma0,
                "arc" => {
                    if arc.is_some() {
                        return Err(PhaseError::Syntax("arc given twice".into()));
                    }
                    let inner = value
                        .trim()
                        .strip_prefix('(')
                        .and_then(|v| v.strip_suffix(')'))
                        .ok_or_else(|| PhaseError::Syntax("arc must look like (lo,hi)".into()))?;
                    let (lo, hi) = inner
                        .split_once(',')
                        .ok_or_else(|| PhaseError::Syntax("arc must look like (lo,hi)".into()))?;
                    arc = Some((
                        rational_endpoint(&constant(lo)?)?,
                        rational_endpoint(&constant(hi)?)?,
                    ));
                    continue;
                }
                other => return Err(PhaseError::Syntax(format!("unknown key {other:?}"))),
            };
            if slot.is_some() {
                return Err(PhaseError::Syntax(format!("{key} given twice")));
            }
            *slot = Some(constant(value)?);
        }
        let alpha = alpha.ok_or_else(|| PhaseError::Syntax("missing alpha".into()))?;
        let (lo, hi) = arc.ok_or_else(|| PhaseError::Syntax("missing arc".into()))?;
        QuadraticPhase::new(
            alpha,
            beta0.unwrap_or_else(QuadExt::zero),
            gamma0.unwrap_or_else(QuadExt::zero),
            lo,
            hi,
        )
    }
}

fn rational_endpoint(c: &QuadExt) -> Result<BigRational, PhaseError> {
    if c.is_rational() {
        Ok(c.rational_part().clone())
    } else {
        Err(PhaseError::IrrationalArc(c.to_string()))
    }
}

/// The phase over one common denominator with `i128` numerators:
/// value `(A(n) + B(n) sqrt(d)) / den`, arc `(lo/den, hi/den)`.
struct IntPhase {
    d: i128,
    den: i128,
    rational: [i128; 3],
    surd: [i128; 3],
    lo: i128,
    width: i128,
}

impl IntPhase {
    fn new(p: &QuadraticPhase) -> Option<IntPhase> {
        let coeffs = [&p.alpha, &p.beta0, &p.gamma0];
        let mut den = BigInt::from(1);
        for c in coeffs {
            den = den
                .lcm(c.rational_part().denom())
                .lcm(c.surd_part().denom());
        }
        den = den.lcm(p.lo.denom()).lcm(p.hi.denom());
        let scale = |x: &BigRational| (x.numer() * (&den / x.denom())).to_i128();
        let mut rational = [0i128; 3];
        let mut surd = [0i128; 3];
        for (i, c) in coeffs.iter().enumerate() {
            rational[i] = scale(c.rational_part())?;
            surd[i] = scale(c.surd_part())?;
        }
        let lo = scale(&p.lo)?;
        let width = scale(&p.hi)? - lo;
        Some(IntPhase {
            d: p.field().get() as i128,
            den: den.to_i128()?,
            rational,
            surd,
            lo,
            width,
        })
    }

    fn eval(&self, n: u64) -> Option<Symbol> {
        let n = n as i128;
        let nn = n.checked_mul(n)?;
        let quad = |c: &[i128; 3]| -> Option<i128> {
            c[0].checked_mul(nn)?
                .checked_add(c[1].checked_mul(n)?)?
                .checked_add(c[2])
        };
        // shifted value (x + y sqrt(d)) / den with x = A - lo
        let x = quad(&self.rational)?.checked_sub(self.lo)?;
        let y = quad(&self.surd)?;
        let floor = Integer::div_floor(&floor_surd(x, y, self.d)?, &self.den);
        let rel = x.checked_sub(floor.checked_mul(self.den)?)?;
        let above_lo = sign_surd(rel, y, self.d)? > 0;
        let below_hi = sign_surd(rel.checked_sub(self.width)?, y, self.d)? < 0;
        Some((above_lo && below_hi) as Symbol)
    }
}

/// `floor(x + y sqrt(d))` for a non-square `d`.
fn floor_surd(x: i128, y: i128, d: i128) -> Option<i128> {
    if y == 0 {
        return Some(x);
    }
    let root = isqrt(
        y.unsigned_abs()
            .checked_mul(y.unsigned_abs())?
            .checked_mul(d as u128)?,
    )?;
    let root = i128::try_from(root).ok()?;
    if y > 0 {
        x.checked_add(root)
    } else {
        x.checked_sub(root)?.checked_sub(1)
    }
}

fn sign_surd(x: i128, y: i128, d: i128) -> Option<i32> {
    let (sx, sy) = (x.signum() as i32, y.signum() as i32);
    if sy == 0 {
        return Some(sx);
    }
    if sx == 0 || sx == sy {
        return Some(sy);
    }
    let xx = x.unsigned_abs().checked_mul(x.unsigned_abs())?;
    let yy = y
        .unsigned_abs()
        .checked_mul(y.unsigned_abs())?
        .checked_mul(d as u128)?;
    Some(match xx.cmp(&yy) {
        std::cmp::Ordering::Greater => sx,
        std::cmp::Ordering::Less => sy,
        std::cmp::Ordering::Equal => 0,
    })
}

fn isqrt(v: u128) -> Option<u128> {
    let mut r = (v as f64).sqrt() as u128;
    while r.checked_mul(r).is_none_or(|sq| sq > v) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= v) {
        r += 1;
    }
    Some(r)
}
