//! Exact rational helpers on top of `num::BigRational`.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction, always in lowest terms with a positive denominator.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.25"`.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), frac.len());
        let f = Q::new(frac_num, scale);
        let i = Q::from_integer(int_part);
        return Ok(if neg { i - f } else { i + f });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Canonical text form: `"a/b"` or `"a"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `2^-k` as an exact rational.
pub fn pow2_inv(k: u32) -> Q {
    Q::new(BigInt::one(), num::pow(BigInt::from(2), k as usize))
}

/// Smallest integer `m >= x`.
pub fn ceil_int(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Reduces a pie coordinate to its representative in `[0, 1)`.
pub fn mod1(x: &Q) -> Q {
    let f = x - x.floor();
    if f.is_negative() {
        f + one()
    } else {
        f
    }
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("2/4").unwrap(), q(1, 2));
        assert_eq!(parse_q(" 3 ").unwrap(), qi(3));
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn format_round_trip() {
        for x in [q(6, 5), qi(0), qi(-4), q(-7, 3)] {
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&q(4, 2)), "2");
    }

    #[test]
    fn mod1_wraps() {
        assert_eq!(mod1(&q(5, 4)), q(1, 4));
        assert_eq!(mod1(&q(-1, 4)), q(3, 4));
        assert_eq!(mod1(&qi(1)), qi(0));
    }
}
