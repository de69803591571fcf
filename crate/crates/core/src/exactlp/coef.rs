//! Tableau coefficients: a reduced `i64` fraction while the value fits, an
//! arbitrary-precision rational otherwise. Results are exact either way.

use num::integer::gcd;
use num::{BigInt, One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Coef {
    /// Numerator and positive denominator, coprime.
    Small(i64, i64),
    Big(Rational),
}

impl Coef {
    pub(crate) fn from_i64(v: i64) -> Self {
        Coef::Small(v, 1)
    }

    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        let g = gcd(n, d).max(1);
        let (n, d) = (n / g, d / g);
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Coef::Small(n, d),
            _ => Coef::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub(crate) fn from_rational(q: &Rational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Coef::Small(n, d),
            _ => Coef::Big(q.clone()),
        }
    }

    fn normalized(q: Rational) -> Self {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Coef::Small(n, d),
            _ => Coef::Big(q),
        }
    }

    pub(crate) fn to_rational(&self) -> Rational {
        match self {
            Coef::Small(n, d) => Rational::new((*n).into(), (*d).into()),
            Coef::Big(q) => q.clone(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        match self {
            Coef::Small(n, _) => *n == 0,
            Coef::Big(q) => q.is_zero(),
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        match self {
            Coef::Small(n, d) => *n == 1 && *d == 1,
            Coef::Big(q) => q.is_one(),
        }
    }

    pub(crate) fn is_negative(&self) -> bool {
        match self {
            Coef::Small(n, _) => *n < 0,
            Coef::Big(q) => q.is_negative(),
        }
    }

    pub(crate) fn is_positive(&self) -> bool {
        match self {
            Coef::Small(n, _) => *n > 0,
            Coef::Big(q) => q.is_positive(),
        }
    }

    pub(crate) fn neg(&self) -> Self {
        match self {
            Coef::Small(n, d) => match n.checked_neg() {
                Some(m) => Coef::Small(m, *d),
                None => Coef::Big(-self.to_rational()),
            },
            Coef::Big(q) => Coef::normalized(-q),
        }
    }

    pub(crate) fn mul(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Small(a, b), Coef::Small(c, d)) => {
                Coef::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Coef::normalized(self.to_rational() * other.to_rational()),
        }
    }

    pub(crate) fn div(&self, other: &Coef) -> Coef {
        match (self, other) {
            (Coef::Small(a, b), Coef::Small(c, d)) => {
                Coef::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Coef::normalized(self.to_rational() / other.to_rational()),
        }
    }

    /// `self - f * s`.
    pub(crate) fn sub_mul(&self, f: &Coef, s: &Coef) -> Coef {
        if let (Coef::Small(a, b), Coef::Small(fn_, fd), Coef::Small(sn, sd)) = (self, f, s) {
            // f*s = p/q with |p|, |q| < 2^126; bail out if the cross products overflow.
            let p = *fn_ as i128 * *sn as i128;
            let q = *fd as i128 * *sd as i128;
            let lhs = (*a as i128).checked_mul(q);
            let rhs = p.checked_mul(*b as i128);
            let den = (*b as i128).checked_mul(q);
            if let (Some(l), Some(r), Some(den)) = (lhs, rhs, den) {
                if let Some(num) = l.checked_sub(r) {
                    return Coef::from_i128(num, den);
                }
            }
        }
        Coef::normalized(self.to_rational() - f.to_rational() * s.to_rational())
    }

    /// `|self| > |other|`.
    pub(crate) fn abs_greater(&self, other: &Coef) -> bool {
        match (self, other) {
            (Coef::Small(a, b), Coef::Small(c, d)) => {
                (*a as i128).abs() * *d as i128 > (*c as i128).abs() * *b as i128
            }
            _ => self.to_rational().abs() > other.to_rational().abs(),
        }
    }
}
