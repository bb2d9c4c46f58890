//! Scalars as they appear in problem and sequence files.

use minksum_core::scalar::{Frac, Scalar};
use serde_json::Value;

use crate::error::CliError;

/// Parses `text` as an exact rational `num / den` with `den > 0`. Accepts
/// integers, decimals (`-1.25`, `3e2`) and `a/b`.
pub fn parse_rational(text: &str) -> Option<(i128, i128)> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let (num, den) = (parse_rational(a)?, parse_rational(b)?);
        let (n, d) = (num.0.checked_mul(den.1)?, num.1.checked_mul(den.0)?);
        if d == 0 {
            return None;
        }
        return Some(reduce(n, d));
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut num: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        num = num.checked_mul(10)?.checked_add(c.to_digit(10)? as i128)?;
    }
    let scale = exp - frac_part.len() as i32;
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let (n, d) = if scale >= 0 { (num.checked_mul(pow)?, 1) } else { (num, pow) };
    Some(reduce(if neg { -n } else { n }, d))
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Lowest terms with a positive denominator.
pub fn reduce(num: i128, den: i128) -> (i128, i128) {
    let g = gcd(num, den).max(1);
    let s = if den < 0 { -1 } else { 1 };
    (s * num / g, s * den / g)
}

fn text_of(v: &Value) -> Option<String> {
    match v {
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Whether `v` holds an integral number.
pub fn is_integral(v: &Value) -> bool {
    text_of(v).and_then(|t| parse_rational(&t)).is_some_and(|(_, d)| d == 1)
}

/// Scalar types the command line can run in.
pub trait CliNum: Scalar {
    const MODE: &'static str;

    fn parse_text(text: &str) -> Option<Self>;

    /// A target value `num / den`, `den > 0`.
    fn parse_target(text: &str) -> Option<(Self, Self)>;

    fn to_json(self) -> Value;

    fn frac_json(f: Frac<Self>) -> Value;

    fn epsilon(requested: Option<f64>) -> Result<Self, CliError>;

    /// Tolerant equality for self-checks.
    fn agrees(a: Self, b: Self) -> bool;

    fn frac_agrees(a: Frac<Self>, b: Frac<Self>) -> bool;

    fn from_json(v: &Value, what: &str) -> Result<Self, CliError> {
        text_of(v)
            .and_then(|t| Self::parse_text(&t))
            .ok_or_else(|| CliError::Schema(format!("{what}: expected a {} number, got {v}", Self::MODE)))
    }

    fn target_from_json(v: &Value, what: &str) -> Result<(Self, Self), CliError> {
        text_of(v)
            .and_then(|t| Self::parse_target(&t))
            .ok_or_else(|| CliError::Schema(format!("{what}: expected a number or \"a/b\", got {v}")))
    }
}

impl CliNum for i128 {
    const MODE: &'static str = "int";

    fn parse_text(text: &str) -> Option<Self> {
        match parse_rational(text)? {
            (n, 1) => Some(n),
            _ => None,
        }
    }

    fn parse_target(text: &str) -> Option<(Self, Self)> {
        parse_rational(text)
    }

    fn to_json(self) -> Value {
        i64::try_from(self).map(Value::from).unwrap_or_else(|_| Value::String(self.to_string()))
    }

    fn frac_json(f: Frac<Self>) -> Value {
        match reduce(f.num, f.den) {
            (n, 1) => n.to_json(),
            (n, d) => Value::String(format!("{n}/{d}")),
        }
    }

    fn epsilon(requested: Option<f64>) -> Result<Self, CliError> {
        match requested {
            None => Ok(0),
            Some(e) if e == 0.0 => Ok(0),
            Some(_) => Err(CliError::Schema("--epsilon only applies in float mode".into())),
        }
    }

    fn agrees(a: Self, b: Self) -> bool {
        a == b
    }

    fn frac_agrees(a: Frac<Self>, b: Frac<Self>) -> bool {
        a == b
    }
}

impl CliNum for f64 {
    const MODE: &'static str = "float";

    fn parse_text(text: &str) -> Option<Self> {
        text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn parse_target(text: &str) -> Option<(Self, Self)> {
        match text.split_once('/') {
            Some((a, b)) => {
                let v = Self::parse_text(a)? / Self::parse_text(b)?;
                v.is_finite().then_some((v, 1.0))
            }
            None => Some((Self::parse_text(text)?, 1.0)),
        }
    }

    fn to_json(self) -> Value {
        Value::from(self)
    }

    fn frac_json(f: Frac<Self>) -> Value {
        Value::from(f.to_f64())
    }

    fn epsilon(requested: Option<f64>) -> Result<Self, CliError> {
        match requested {
            Some(e) if !(e >= 0.0 && e.is_finite()) => {
                Err(CliError::Schema(format!("--epsilon must be a finite nonnegative number, got {e}")))
            }
            Some(e) => Ok(e),
            None => Ok(1e-9),
        }
    }

    fn agrees(a: Self, b: Self) -> bool {
        (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
    }

    fn frac_agrees(a: Frac<Self>, b: Frac<Self>) -> bool {
        Self::agrees(a.to_f64(), b.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1.6"), Some((8, 5)));
        assert_eq!(parse_rational("-0.25"), Some((-1, 4)));
        assert_eq!(parse_rational("3e2"), Some((300, 1)));
        assert_eq!(parse_rational("15E-1"), Some((3, 2)));
        assert_eq!(parse_rational("6/-4"), Some((-3, 2)));
        assert_eq!(parse_rational("2.0"), Some((2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn int_values() {
        assert_eq!(i128::parse_text("-7"), Some(-7));
        assert_eq!(i128::parse_text("1.5"), None);
        assert_eq!(i128::frac_json(Frac::new(6, 4)), Value::String("3/2".into()));
        assert_eq!(i128::frac_json(Frac::new(-4, -2)), Value::from(2));
        assert!(i128::epsilon(Some(0.1)).is_err());
    }
}
