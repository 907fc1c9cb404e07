//! Shared test helpers: random generators, a 100-digit decimal oracle for
//! quadratic-field values, and a small JSON-schema validator.

#![allow(dead_code)]

use std::cmp::Ordering;

use gpfactors::gpexpr::GpExpr;
use gpfactors::quadfield::ratio;
use gpfactors::{Dfao, QuadExt, Radicand};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use serde_json::Value;

pub const DIGITS: u32 = 100;

pub fn radicand(d: i64) -> Radicand {
    Radicand::new(d).unwrap()
}

/// Random element of `Q(sqrt(d))` with small numerators and denominators.
pub fn quad_in(d: i64) -> impl Strategy<Value = QuadExt> + Clone {
    (-60i64..=60, 1i64..=12, -40i64..=40, 1i64..=12)
        .prop_map(move |(p, q, r, s)| QuadExt::from_parts(p, q, r, s, radicand(d)))
}

pub fn any_quad() -> impl Strategy<Value = (i64, QuadExt)> {
    prop_oneof![Just(2i64), Just(3), Just(5), Just(7), Just(10)]
        .prop_flat_map(|d| quad_in(d).prop_map(move |x| (d, x)))
}

/// Certified enclosure `[lo, hi]` of a real value, scaled by `10^DIGITS`.
#[derive(Debug, Clone)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn scale() -> BigInt {
    BigInt::from(10).pow(DIGITS)
}

/// `sqrt(d)` enclosed between `s / 10^DIGITS` and `(s + 1) / 10^DIGITS`.
pub fn sqrt_enclosure(d: u32) -> Enclosure {
    let sc = scale();
    let s = (BigInt::from(d) * &sc * &sc).sqrt();
    Enclosure {
        lo: BigRational::new(s.clone(), sc.clone()),
        hi: BigRational::new(s + 1, sc),
    }
}

impl Enclosure {
    pub fn point(x: BigRational) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    /// Decimal enclosure of `a + b sqrt(d)` computed without any `QuadExt` predicate.
    pub fn of(x: &QuadExt) -> Self {
        let a = x.rational_part().clone();
        let b = x.surd_part();
        if b.is_zero() {
            return Enclosure::point(a);
        }
        let root = sqrt_enclosure(x.field().unwrap().get());
        let (p, q) = (b * &root.lo, b * &root.hi);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        Enclosure {
            lo: &a + lo,
            hi: a + hi,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Enclosure {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Enclosure {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        Enclosure {
            lo: c.iter().min().unwrap().clone(),
            hi: c.iter().max().unwrap().clone(),
        }
    }

    /// Sign if the enclosure excludes zero (or is exactly zero).
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    /// Floor if both ends share it.
    pub fn floor(&self) -> Option<BigInt> {
        let (a, b) = (self.lo.floor().to_integer(), self.hi.floor().to_integer());
        (a == b).then_some(a)
    }

    pub fn cmp(&self, o: &Self) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Interval evaluation of an expression; `None` when a floor is ambiguous.
pub fn enclose_expr(e: &GpExpr, n: u64) -> Option<Enclosure> {
    Some(match e {
        GpExpr::Const(c) => Enclosure::of(c),
        GpExpr::Var => Enclosure::point(BigRational::from_integer(n.into())),
        GpExpr::Add(l, r) => enclose_expr(l, n)?.add(&enclose_expr(r, n)?),
        GpExpr::Sub(l, r) => enclose_expr(l, n)?.sub(&enclose_expr(r, n)?),
        GpExpr::Mul(l, r) => enclose_expr(l, n)?.mul(&enclose_expr(r, n)?),
        GpExpr::Pow(b, k) => {
            let base = enclose_expr(b, n)?;
            let mut acc = Enclosure::point(BigRational::one());
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
        GpExpr::Floor(x) => {
            Enclosure::point(BigRational::from_integer(enclose_expr(x, n)?.floor()?))
        }
        GpExpr::Frac(x) => {
            let inner = enclose_expr(x, n)?;
            let f = BigRational::from_integer(inner.floor()?);
            inner.sub(&Enclosure::point(f))
        }
    })
}

/// Random expression tree in the parser's folded normal form: every
/// non-constant node mentions `n`.
pub fn gp_tree(d: i64) -> impl Strategy<Value = GpExpr> {
    let leaf = Just(GpExpr::Var);
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let konst = quad_in(d).prop_map(GpExpr::Const);
        let operand = prop_oneof![konst, inner.clone()];
        prop_oneof![
            (inner.clone(), operand, any::<bool>(), 0u8..3).prop_map(|(v, o, swap, op)| {
                let (l, r) = if swap {
                    (Box::new(o), Box::new(v))
                } else {
                    (Box::new(v), Box::new(o))
                };
                match op {
                    0 => GpExpr::Add(l, r),
                    1 => GpExpr::Sub(l, r),
                    _ => GpExpr::Mul(l, r),
                }
            }),
            (inner.clone(), 0u32..4).prop_map(|(b, k)| GpExpr::Pow(Box::new(b), k)),
            inner.clone().prop_map(|x| GpExpr::Floor(Box::new(x))),
            inner.prop_map(|x| GpExpr::Frac(Box::new(x))),
        ]
    })
}

/// Random DFAO with `transition(0, 0) = 0`.
pub fn random_dfao() -> impl Strategy<Value = Dfao> {
    (2u32..=3, 1usize..=5).prop_flat_map(|(k, n)| {
        let rows = proptest::collection::vec(proptest::collection::vec(0..n, k as usize), n);
        let outs = proptest::collection::vec(0u8..2, n);
        (Just(k), Just(n), rows, outs).prop_map(|(k, n, mut rows, outs)| {
            rows[0][0] = 0;
            let names = (0..n).map(|i| format!("q{i}")).collect();
            Dfao::new(k, names, 0, rows, outs).unwrap()
        })
    })
}

/// Independent k-kernel oracle: `x(k^r n + s)` is `output . tau_w` on the
/// reachable states, `w` the `r`-digit expansion of `s`.
pub fn kernel_signature(x: &Dfao, r: u32, s: u64) -> Vec<u8> {
    let file = x.to_file();
    let idx = |name: &str| file.states.iter().position(|s| s == name).unwrap();
    let k = file.k as u64;
    let delta: Vec<Vec<usize>> = file
        .states
        .iter()
        .map(|st| file.transitions[st].iter().map(|t| idx(t)).collect())
        .collect();
    let outputs: Vec<u8> = file.states.iter().map(|st| file.outputs[st]).collect();
    let mut reach = vec![idx(&file.initial)];
    let mut i = 0;
    while i < reach.len() {
        for &t in &delta[reach[i]] {
            if !reach.contains(&t) {
                reach.push(t);
            }
        }
        i += 1;
    }
    reach.sort();
    let mut digits = Vec::new();
    let mut v = s;
    for _ in 0..r {
        digits.push((v % k) as usize);
        v /= k;
    }
    digits.reverse();
    reach
        .iter()
        .map(|&q| outputs[digits.iter().fold(q, |q, &d| delta[q][d])])
        .collect()
}

pub fn rational(p: i64, q: i64) -> QuadExt {
    QuadExt::rational(ratio(p, q))
}

pub fn integer_floor_oracle(x: &QuadExt) -> Option<BigInt> {
    Enclosure::of(x).floor()
}

pub fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Validates `value` against the subset of JSON Schema used by the shipped
/// schemas: `type`, `properties`, `required`, `additionalProperties: false`,
/// `items`, `minItems`, `maxItems`, `minimum`, `enum`, `const`, `$ref` to
/// `#/definitions/...`.
pub fn validate(schema: &Value, value: &Value) -> Result<(), String> {
    validate_at(schema, schema, value, "$")
}

fn validate_at(root: &Value, schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r
            .strip_prefix("#/definitions/")
            .ok_or_else(|| format!("{path}: unsupported $ref {r}"))?;
        let target = root
            .get("definitions")
            .and_then(|d| d.get(name))
            .ok_or_else(|| format!("{path}: missing definition {name}"))?;
        return validate_at(root, target, value, path);
    }
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: bad type keyword")),
        };
        let ok = allowed.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {allowed:?}, got {value}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != value {
            return Err(format!("{path}: expected constant {c}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(value) {
            return Err(format!("{path}: {value} not in enum"));
        }
    }
    if let (Some(min), Some(v)) = (
        schema.get("minimum").and_then(Value::as_f64),
        value.as_f64(),
    ) {
        if v < min {
            return Err(format!("{path}: {v} below minimum {min}"));
        }
    }
    if let Some(obj) = value.as_object() {
        if let Some(Value::Array(req)) = schema.get("required") {
            for key in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate_at(root, sub, v, &format!("{path}.{key}"))?,
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("{path}: unexpected property {key}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = value.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > max {
                return Err(format!("{path}: more than {max} items"));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, v) in arr.iter().enumerate() {
                validate_at(root, items, v, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}

pub fn load_schema(name: &str) -> Value {
    let path = format!("{}/schema/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Number of distinct kernel sequences: closes the set of maps `tau_w` under
/// appending digits and counts the distinct `output . tau_w` on reachable states.
#[allow(clippy::needless_range_loop)]
pub fn kernel_size_oracle(x: &Dfao) -> usize {
    use std::collections::{BTreeSet, VecDeque};
    let k = x.base() as u64;
    let n = x.num_states();
    // recover delta from single-digit signatures of every state
    let file = x.to_file();
    let idx = |name: &str| file.states.iter().position(|s| s == name).unwrap();
    let delta: Vec<Vec<usize>> = file
        .states
        .iter()
        .map(|st| file.transitions[st].iter().map(|t| idx(t)).collect())
        .collect();
    let outputs: Vec<u8> = file.states.iter().map(|st| file.outputs[st]).collect();
    let reach: Vec<usize> = (0..n)
        .filter(|&q| {
            // q reachable iff some tau_w maps the initial state to it
            let mut seen = vec![false; n];
            let mut stack = vec![idx(&file.initial)];
            while let Some(p) = stack.pop() {
                if !seen[p] {
                    seen[p] = true;
                    stack.extend(&delta[p]);
                }
            }
            seen[q]
        })
        .collect();
    let identity: Vec<usize> = (0..n).collect();
    let mut maps = BTreeSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(m) = queue.pop_front() {
        for d in 0..k as usize {
            let next: Vec<usize> = m.iter().map(|&q| delta[q][d]).collect();
            if maps.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    maps.iter()
        .map(|m| reach.iter().map(|&q| outputs[m[q]]).collect::<Vec<u8>>())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Maximal common factors of Thue-Morse and the `sqrt(2) n^2` quarter-arc sequence.
pub const PAPER_MAXIMAL: [&str; 12] = [
    "001011010",
    "010110100",
    "110100101",
    "101001011",
    "10100110010",
    "01001100101",
    "01100101101",
    "01001011001",
    "01011001101",
    "10110011010",
    "10011010010",
    "10110100110",
];

pub fn contiguous_subwords(w: &str) -> std::collections::BTreeSet<String> {
    (0..=w.len())
        .flat_map(|i| (i..=w.len()).map(move |j| w[i..j].to_string()))
        .collect()
}

/// Random half-plane `a beta + b gamma + c >= 0` over `Q(sqrt(2))`.
pub fn half_plane() -> impl Strategy<Value = gpfactors::factordecide::HalfPlane> + Clone {
    (quad_in(2), quad_in(2), quad_in(2)).prop_map(|(a, b, c)| {
        // scale the offset so the line usually crosses the unit square
        let c = &c * &QuadExt::rational(ratio(1, 60));
        gpfactors::factordecide::HalfPlane::new(a, b, c)
    })
}
