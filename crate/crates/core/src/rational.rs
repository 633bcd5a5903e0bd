//! Exact rational helpers: JSON encoding and fixed-point rendering.

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::Rational;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"2.75"`.
pub fn parse_rational_str(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = digits.parse().ok()?;
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

pub fn parse_rational(v: &Value) -> Option<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(Rational::from_integer(i))
            } else {
                parse_rational_str(&n.to_string())
            }
        }
        Value::String(s) => parse_rational_str(s),
        _ => None,
    }
}

/// Integers become JSON numbers, everything else a `"p/q"` string.
pub fn to_json(r: &Rational) -> Value {
    if r.is_integer() {
        Value::from(*r.numer())
    } else {
        Value::from(format!("{}/{}", r.numer(), r.denom()))
    }
}

/// Rounds half away from zero to `places` decimals.
pub fn format_decimal(r: &Rational, places: usize) -> String {
    let big = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    format_big_decimal(&big, places)
}

pub fn format_big_decimal(r: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let neg = r.is_negative();
    let abs = r.abs();
    let scaled = abs * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(BigInt::from(1), BigInt::from(2))).floor();
    let units = rounded.to_integer();
    let int_part = &units / &scale;
    let frac_part = &units % &scale;
    let mut s = String::new();
    if neg && !units.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if places > 0 {
        let frac = frac_part.to_string();
        s.push('.');
        for _ in frac.len()..places {
            s.push('0');
        }
        s.push_str(&frac);
    }
    s
}

/// Like [`format_big_decimal`] with trailing zeros (and a bare point) removed.
pub fn format_big_trimmed(r: &BigRational, places: usize) -> String {
    let s = format_big_decimal(r, places);
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
