//! Exact integer and rational helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// `n choose k` in 128-bit arithmetic; panics on overflow.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc
            .checked_mul(n - i)
            .expect("binomial overflows u128")
            / (i + 1);
    }
    acc
}

pub fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn ratio_i(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn exact_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses a plain decimal such as `0.8849` or `-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Malformed(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Float to exact rational (the binary value of the float, not a decimal guess).
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// An exact value with its float companion, serialised as
/// `{"exact": "p/q", "approx": f}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exact {
    pub exact: String,
    pub approx: f64,
}

impl From<&BigRational> for Exact {
    fn from(r: &BigRational) -> Self {
        let r = if r.is_zero() { BigRational::zero() } else { r.clone() };
        Exact {
            exact: exact_string(&r),
            approx: to_f64(&r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(4, 4), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(4000, 4), 4000 * 3999 * 3998 * 3997 / 24);
        // (n choose 4) times n - 3 for a large n still fits
        let big = binomial(1 << 20, 4);
        assert!(big.checked_mul(1 << 20).is_some());
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.8849").unwrap(), ratio(8849, 10000));
        assert_eq!(parse_decimal("0.44057").unwrap(), ratio(44057, 100000));
        assert_eq!(parse_decimal("2").unwrap(), ratio(2, 1));
        assert_eq!(parse_decimal("-.5").unwrap(), ratio_i(-1, 2));
        assert!(parse_decimal("1e-3").is_err());
        assert!(parse_decimal(".").is_err());
        assert_eq!(exact_string(&ratio(6, 8)), "3/4");
    }
}
