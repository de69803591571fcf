//! Exact rational helpers on top of `num`'s arbitrary precision types.

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Floor of a non-negative rational as `u64`; `None` when negative or too large.
pub fn floor_u64(q: &Rational) -> Option<u64> {
    if q.is_negative() {
        return None;
    }
    q.numer().div_floor(q.denom()).to_u64()
}

pub fn ceil_u64(q: &Rational) -> Option<u64> {
    if q.is_negative() {
        return None;
    }
    q.numer().div_ceil(q.denom()).to_u64()
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Renders in lowest terms, `"p"` when integral and `"p/q"` otherwise.
pub fn render(q: &Rational) -> String {
    q.to_string()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Approximate decimal rendering, only for human display.
pub fn approx(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        assert_eq!(parse("3/2"), Some(ratio(3, 2)));
        assert_eq!(parse("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(render(&ratio(10, 4)), "5/2");
        assert_eq!(render(&int(1)), "1");
    }

    #[test]
    fn floors_and_ceils() {
        assert_eq!(floor_u64(&ratio(7, 2)), Some(3));
        assert_eq!(ceil_u64(&ratio(7, 2)), Some(4));
        assert_eq!(ceil_u64(&int(2)), Some(2));
        assert_eq!(floor_u64(&ratio(-1, 2)), None);
    }
}
