//! Small helpers around [`BigRational`]: canonical text form and float views.

use alloc::format;
use alloc::string::String;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Canonical `"num/den"` rendering; the denominator is always positive and
/// is printed even when it equals one.
pub fn to_string(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Nearest `f64`, saturating to infinities for values out of range.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(if value.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.25"`.
pub fn parse(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).ok()?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let frac_part = BigInt::from_str(frac).ok()?;
        let magnitude = int_part.clone() * &scale + if negative { -frac_part } else { frac_part };
        return Some(BigRational::new(magnitude, scale));
    }
    BigInt::from_str(text).ok().map(BigRational::from_integer)
}

/// `2^-m` as an exact rational.
pub fn inverse_power_of_two(m: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << m)
}

/// Fractional part in `[0, 1)`.
pub fn fract(value: &BigRational) -> BigRational {
    value - value.floor()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn renders_canonical_form() {
        assert_eq!(to_string(&r(2, 4)), "1/2");
        assert_eq!(to_string(&r(3, 1)), "3/1");
        assert_eq!(to_string(&r(-3, 6)), "-1/2");
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse("1/2"), Some(r(1, 2)));
        assert_eq!(parse(" 7 "), Some(r(7, 1)));
        assert_eq!(parse("0.25"), Some(r(1, 4)));
        assert_eq!(parse("-1.5"), Some(r(-3, 2)));
        assert_eq!(parse("2/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn fract_stays_in_unit_interval() {
        assert_eq!(fract(&r(7, 4)), r(3, 4));
        assert_eq!(fract(&r(-1, 4)), r(3, 4));
        assert_eq!(to_f64(&r(1, 8)), 0.125);
    }
}
