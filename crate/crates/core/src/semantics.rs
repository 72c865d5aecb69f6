//! The algebra on `[0, +∞]` whose tautologies are exactly the theorems of
//! BL, valuations into it, and satisfaction of relational hypersequents.
//!
//! Values are kept as an integer part plus an exact rational fractional part
//! in `[0, 1)`; nothing here touches floating point.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::hypersequent::{Hypersequent, RelKind, RelationalSequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("variable p{0} is not assigned")]
    Unbound(u32),
    #[error("sequent `{0}` has no satisfaction clause")]
    Degenerate(String),
    #[error("malformed value {0:?}")]
    BadValue(String),
    #[error("malformed valuation: {0}")]
    BadValuation(String),
}

/// An element of `[0, +∞]`. The derived order is the natural one: finite
/// values compare by integer part, then fractional part, and `Infinite` is
/// the top element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OmegaValue {
    Finite { int: u64, frac: BigRational },
    Infinite,
}

impl OmegaValue {
    pub fn zero() -> OmegaValue {
        OmegaValue::Finite { int: 0, frac: BigRational::zero() }
    }

    /// Panics unless `0 <= frac < 1`.
    pub fn finite(int: u64, frac: BigRational) -> OmegaValue {
        assert!(
            !frac.is_negative() && frac < BigRational::one(),
            "fractional part {frac} outside [0,1)"
        );
        OmegaValue::Finite { int, frac }
    }

    /// `int + num/den` with `0 <= num < den`.
    pub fn from_parts(int: u64, num: i64, den: i64) -> OmegaValue {
        OmegaValue::finite(int, BigRational::new(num.into(), den.into()))
    }

    /// Splits a non-negative rational into integer and fractional parts.
    pub fn from_rational(q: &BigRational) -> OmegaValue {
        assert!(!q.is_negative(), "negative value {q}");
        let int = q.floor();
        let frac = q - &int;
        let int = int.to_integer().to_u64().expect("integer part fits in u64");
        OmegaValue::Finite { int, frac }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, OmegaValue::Infinite)
    }

    /// `⌊x⌋`, with `None` standing for `+∞`.
    pub fn floor(&self) -> Option<u64> {
        match self {
            OmegaValue::Finite { int, .. } => Some(*int),
            OmegaValue::Infinite => None,
        }
    }

    /// `x − ⌊x⌋`; `None` for `+∞`.
    pub fn frac(&self) -> Option<&BigRational> {
        match self {
            OmegaValue::Finite { frac, .. } => Some(frac),
            OmegaValue::Infinite => None,
        }
    }

    fn as_rational(&self) -> Option<BigRational> {
        match self {
            OmegaValue::Finite { int, frac } => Some(BigRational::from_integer((*int).into()) + frac),
            OmegaValue::Infinite => None,
        }
    }
}

/// Order on integer parts, `+∞` greatest.
pub fn floor_cmp(x: &OmegaValue, y: &OmegaValue) -> Ordering {
    match (x.floor(), y.floor()) {
        (Some(a), Some(b)) => a.cmp(&b),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// The t-norm `*`.
pub fn omega_mul(x: &OmegaValue, y: &OmegaValue) -> OmegaValue {
    match (x, y) {
        (OmegaValue::Finite { int: a, frac: fa }, OmegaValue::Finite { int: b, frac: fb })
            if a == b =>
        {
            let s = fa + fb - BigRational::one();
            let frac = if s.is_positive() { s } else { BigRational::zero() };
            OmegaValue::Finite { int: *a, frac }
        }
        (OmegaValue::Infinite, OmegaValue::Infinite) => OmegaValue::Infinite,
        _ => x.min(y).clone(),
    }
}

/// The residuum `⇒_*`.
pub fn omega_imp(x: &OmegaValue, y: &OmegaValue) -> OmegaValue {
    match floor_cmp(y, x) {
        Ordering::Less => y.clone(),
        Ordering::Equal if y < x => {
            // Equal floors with y < x forces both finite.
            let (OmegaValue::Finite { int, frac: fx }, OmegaValue::Finite { frac: fy, .. }) = (x, y)
            else {
                unreachable!("y < x with equal floors implies finite values")
            };
            OmegaValue::Finite { int: *int, frac: BigRational::one() - fx + fy }
        }
        _ => OmegaValue::Infinite,
    }
}

impl fmt::Display for OmegaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaValue::Infinite => f.write_str("inf"),
            OmegaValue::Finite { int, frac } => {
                write!(f, "{}+{}/{}", int, frac.numer(), frac.denom())
            }
        }
    }
}

/// Parses `inf` or `<int>+<num>/<den>`.
impl FromStr for OmegaValue {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SemanticsError::BadValue(s.to_string());
        let s = s.trim();
        if s == "inf" {
            return Ok(OmegaValue::Infinite);
        }
        let (int, frac) = s.split_once('+').ok_or_else(bad)?;
        let int: u64 = int.trim().parse().map_err(|_| bad())?;
        let frac = parse_rational(frac).ok_or_else(bad)?;
        if frac.is_negative() || frac >= BigRational::one() {
            return Err(bad());
        }
        Ok(OmegaValue::Finite { int, frac })
    }
}

/// Parses `num/den` (or a bare integer) into a reduced rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// `num/den` rendering used in JSON artifacts.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A finite assignment of values to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    values: BTreeMap<u32, OmegaValue>,
}

#[derive(Serialize, Deserialize)]
struct ValuationJson {
    assignment: BTreeMap<String, String>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn set(&mut self, var: u32, value: OmegaValue) {
        self.values.insert(var, value);
    }

    pub fn with(mut self, var: u32, value: OmegaValue) -> Valuation {
        self.set(var, value);
        self
    }

    pub fn get(&self, var: u32) -> Option<&OmegaValue> {
        self.values.get(&var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &OmegaValue)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `{"assignment": {"p1": "0+1/2", ...}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let assignment = self
            .values
            .iter()
            .map(|(k, v)| (format!("p{k}"), v.to_string()))
            .collect();
        serde_json::to_value(ValuationJson { assignment }).expect("valuation serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Valuation, SemanticsError> {
        let parsed: ValuationJson = serde_json::from_value(value.clone())
            .map_err(|e| SemanticsError::BadValuation(e.to_string()))?;
        let mut v = Valuation::new();
        for (name, val) in parsed.assignment {
            let index = name
                .strip_prefix('p')
                .and_then(|d| d.parse::<u32>().ok())
                .filter(|i| *i > 0)
                .ok_or_else(|| SemanticsError::BadValuation(format!("bad variable name {name:?}")))?;
            v.set(index, val.parse()?);
        }
        Ok(v)
    }
}

impl FromIterator<(u32, OmegaValue)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (u32, OmegaValue)>>(iter: T) -> Self {
        Valuation { values: iter.into_iter().collect() }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.values {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "p{k}={v}")?;
        }
        Ok(())
    }
}

pub fn eval(v: &Valuation, a: &Formula) -> Result<OmegaValue, SemanticsError> {
    match a {
        Formula::Bottom => Ok(OmegaValue::zero()),
        Formula::Var(i) => v.get(*i).cloned().ok_or(SemanticsError::Unbound(*i)),
        Formula::Conj(l, r) => Ok(omega_mul(&eval(v, l)?, &eval(v, r)?)),
        Formula::Impl(l, r) => Ok(omega_imp(&eval(v, l)?, &eval(v, r)?)),
    }
}

/// The `⊙`-type (1..=5) of `v` with respect to `(a, b)`.
pub fn odot_type(v: &Valuation, a: &Formula, b: &Formula) -> Result<u8, SemanticsError> {
    let (x, y) = (eval(v, a)?, eval(v, b)?);
    Ok(odot_type_of(&x, &y))
}

pub fn odot_type_of(x: &OmegaValue, y: &OmegaValue) -> u8 {
    match floor_cmp(x, y) {
        Ordering::Less => 1,
        Ordering::Greater => 2,
        Ordering::Equal => match (x.frac(), y.frac()) {
            (Some(fx), Some(fy)) if fx + fy >= BigRational::one() => 3,
            (Some(_), Some(_)) => 4,
            _ => 5,
        },
    }
}

/// The `→`-type (1..=3) of `v` with respect to `(a, b)`.
pub fn imp_type(v: &Valuation, a: &Formula, b: &Formula) -> Result<u8, SemanticsError> {
    let (x, y) = (eval(v, a)?, eval(v, b)?);
    Ok(imp_type_of(&x, &y))
}

pub fn imp_type_of(x: &OmegaValue, y: &OmegaValue) -> u8 {
    if floor_cmp(y, x) == Ordering::Less {
        1
    } else if y < x {
        2
    } else {
        3
    }
}

pub fn sequent_satisfied(v: &Valuation, s: &RelationalSequent) -> Result<bool, SemanticsError> {
    let values = |fs: &[Formula]| fs.iter().map(|f| eval(v, f)).collect::<Result<Vec<_>, _>>();
    let left = values(s.left())?;
    let right = values(s.right())?;
    let degenerate = || SemanticsError::Degenerate(s.to_string());
    match s.kind() {
        RelKind::Ll => match (left.as_slice(), right.as_slice()) {
            ([a], [b]) => Ok(floor_cmp(a, b) == Ordering::Less),
            _ => Err(degenerate()),
        },
        RelKind::PrecEq(z) | RelKind::Prec(z) => {
            let strict = matches!(s.kind(), RelKind::Prec(_));
            let total = left.len() + right.len();
            if total == 2 && z == 0 {
                let ([a], [b]) = (left.as_slice(), right.as_slice()) else {
                    return Err(degenerate());
                };
                let same_floor = floor_cmp(a, b) == Ordering::Equal;
                return Ok(same_floor && if strict { a < b } else { a <= b });
            }
            if total < 2 {
                return Err(degenerate());
            }
            // All integer parts equal and finite.
            let first = left.iter().chain(&right).next().expect("non-empty");
            let Some(level) = first.floor() else { return Ok(false) };
            if left.iter().chain(&right).any(|x| x.floor() != Some(level)) {
                return Ok(false);
            }
            // Σ v̄(A) − n  ◁  Σ v̄(B) − m + z
            let sum = |xs: &[OmegaValue]| {
                xs.iter().fold(BigRational::zero(), |acc, x| acc + x.frac().expect("finite"))
            };
            let lhs = sum(&left) - BigRational::from_integer(BigInt::from(left.len()));
            let rhs = sum(&right) - BigRational::from_integer(BigInt::from(right.len()))
                + BigRational::from_integer(BigInt::from(z));
            Ok(if strict { lhs < rhs } else { lhs <= rhs })
        }
    }
}

/// `v ⊨ G`: some sequent of `G` holds. The empty hypersequent is never
/// satisfied.
pub fn satisfies(v: &Valuation, g: &Hypersequent) -> Result<bool, SemanticsError> {
    for s in g.iter() {
        if sequent_satisfied(v, s)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `x` as an exact rational; `None` for `+∞`. Handy for test oracles.
pub fn to_rational(x: &OmegaValue) -> Option<BigRational> {
    x.as_rational()
}

/// Lowest-terms helper for building fractional parts in tests and oracles.
pub fn ratio(num: i64, den: i64) -> BigRational {
    let g = num.gcd(&den);
    BigRational::new((num / g).into(), (den / g).into())
}
