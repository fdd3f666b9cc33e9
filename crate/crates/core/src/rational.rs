// SPDX-License-Identifier: Apache-2.0

//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            if let Some((ip, fp)) = s.split_once('.') {
                // decimal literal, e.g. 0.25
                if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
                    return None;
                }
                let neg = ip.starts_with('-');
                let digits = format!("{}{}", ip.trim_start_matches('-'), fp);
                let n: BigInt = digits.parse().ok()?;
                let d = num_traits::pow(BigInt::from(10), fp.len());
                let r = Rational::new(n, d);
                return Some(if neg { -r } else { r });
            }
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// `"num/den"` encoding used in JSON reports.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact human form: integers without a denominator.
pub fn to_display(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with six significant digits.
pub fn to_decimal(r: &Rational) -> String {
    let v = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{:.*}", decimals, v)
    } else {
        let s = format!("{:.5e}", v);
        s
    }
}

pub fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    let r = Rational::new(n.clone(), d.clone());
    r.ceil().to_integer()
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/6"), Some(frac(1, 2)));
        assert_eq!(parse("-4"), Some(int(-4)));
        assert_eq!(parse("0.25"), Some(frac(1, 4)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn decimal_has_six_significant_digits() {
        assert_eq!(to_decimal(&frac(1, 31)), "0.0322581");
        assert_eq!(to_decimal(&frac(1, 390000)), "2.56410e-6");
        assert_eq!(to_decimal(&int(5)), "5.00000");
    }
}
