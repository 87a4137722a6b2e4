//! Exact rational helpers shared by every model type.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalError {
    #[error("malformed rational `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("non-finite float {0}")]
    NonFinite(f64),
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p/q`, `p`, or a finite decimal like `-0.125`.
pub fn parse_q(s: &str) -> Result<Q, RationalError> {
    let t = s.trim();
    let bad = || RationalError::Malformed(s.to_string());
    if t.is_empty() || t.len() > 4096 {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n).ok_or_else(bad)?;
        let d = parse_int(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(RationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = if ip == "-" || ip.is_empty() || ip == "+" { "0" } else { ip };
        let whole = parse_int(ip).ok_or_else(bad)?;
        let frac = BigInt::from_str(fp).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let mag = Q::from_integer(whole.abs()) + Q::new(frac, scale);
        return Ok(if neg { -mag } else { mag });
    }
    parse_int(t).map(Q::from_integer).ok_or_else(bad)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Result<Q, RationalError> {
    Q::from_float(x).ok_or(RationalError::NonFinite(x))
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("integer part fits in i64")
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("integer part fits in i64")
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rationalize(x: f64, max_den: u64) -> Result<Q, RationalError> {
    if !x.is_finite() {
        return Err(RationalError::NonFinite(x));
    }
    let max_den = BigInt::from(max_den.max(1));
    let target = from_f64(x)?;
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut r = target.clone();
    loop {
        let a = r.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            // semiconvergent check
            let k = (&max_den - &q0).div_floor(&q1);
            let cand = Q::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let conv = Q::new(p1.clone(), q1.clone());
            return Ok(if (&cand - &target).abs() < (&conv - &target).abs() {
                cand
            } else {
                conv
            });
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - Q::from_integer(a);
        if frac.is_zero() {
            return Ok(Q::new(p1, q1));
        }
        r = frac.recip();
    }
}

/// Serde adapter: rationals as `"p/q"` strings, integers accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QStr(pub Q);

impl fmt::Display for QStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}

impl From<Q> for QStr {
    fn from(x: Q) -> Self {
        QStr(x)
    }
}

impl Serialize for QStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = QStr;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<QStr, E> {
                parse_q(v).map(QStr).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<QStr, E> {
                Ok(QStr(qi(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<QStr, E> {
                Ok(QStr(Q::from_integer(BigInt::from(v))))
            }
        }
        d.deserialize_any(V)
    }
}
