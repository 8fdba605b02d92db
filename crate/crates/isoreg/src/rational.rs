//! Exact rational arithmetic used for regression values and errors.

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// The rational type used throughout: reduced fractions over `i128`.
///
/// `i128` leaves ample headroom for the supported input envelope
/// (values and weights up to ~1e3 at a few thousand vertices produce
/// denominators up to (Σw)² ≈ 1e13 and numerators well below 1e30).
pub type Rat = Ratio<i128>;

/// Exact conversion from an integer function value.
pub fn rat(v: i64) -> Rat {
    Ratio::from_integer(v as i128)
}

/// Parses a decimal or fraction literal into an exact rational.
///
/// Accepts `3`, `-2`, `0.25`, `1e-3`, `2.5e2`, and `p/q` forms. This keeps
/// grid spacings like `0.01` exact instead of rounding through an `f64`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidDelta(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num.trim().parse().map_err(|_| bad())?;
        let d: i128 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let (negative, int_digits) = match int_part.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
    };
    if !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
        || (int_digits.is_empty() && frac_part.is_empty())
        || frac_part.len() > 30
    {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut value: i128 = digits.parse().map_err(|_| bad())?;
    if negative {
        value = -value;
    }
    let mut r = Ratio::new(value, 10i128.checked_pow(frac_part.len() as u32).ok_or_else(bad)?);
    match exp.cmp(&0) {
        std::cmp::Ordering::Greater => {
            r *= Ratio::from_integer(10i128.checked_pow(exp as u32).ok_or_else(bad)?)
        }
        std::cmp::Ordering::Less => {
            r /= Ratio::from_integer(10i128.checked_pow((-exp) as u32).ok_or_else(bad)?)
        }
        std::cmp::Ordering::Equal => {}
    }
    Ok(r)
}

/// Renders a rational exactly.
///
/// Integers print bare (`3`), fractions with a terminating decimal
/// expansion print as decimals (`0.5`, `-1.25`), everything else prints
/// as `p/q`. The output is unambiguous and round-trips through
/// [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    let r = r.reduced();
    let denom = *r.denom();
    if denom == 1 {
        return r.numer().to_string();
    }
    // A reduced fraction terminates in decimal iff the denominator is
    // 2^a * 5^b; the expansion then has max(a, b) digits.
    let mut d = denom;
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    let digits = twos.max(fives);
    if d != 1 || digits > 36 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let scale = 10i128.pow(digits);
    let scaled = r.numer().checked_mul(scale).map(|n| n / denom);
    match scaled {
        Some(scaled) => {
            let sign = if scaled < 0 { "-" } else { "" };
            let abs = scaled.unsigned_abs();
            let int = abs / 10u128.pow(digits);
            let frac = abs % 10u128.pow(digits);
            format!("{sign}{int}.{frac:0width$}", width = digits as usize)
        }
        None => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// Converts to `f64`, for approximate reporting only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let n = *r.numer() as f64;
    let d = *r.denom() as f64;
    n / d
}

/// Absolute value.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

/// True if `r` is an integer.
pub fn rat_is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

use num_traits::One;

/// Zero constant.
pub fn rat_zero() -> Rat {
    Rat::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rat("0.01").unwrap(), Ratio::new(1, 100));
        assert_eq!(parse_rat("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), Ratio::new(-3, 2));
        assert_eq!(parse_rat("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(parse_rat("1e-3").unwrap(), Ratio::new(1, 1000));
        assert_eq!(parse_rat("2.5e2").unwrap(), Ratio::from_integer(250));
        assert_eq!(parse_rat("7/4").unwrap(), Ratio::new(7, 4));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "x", "1.2.3", "1/0", "--2", "1e", "0x10"] {
            assert!(parse_rat(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn formats_terminating_decimals() {
        assert_eq!(format_rat(&Ratio::new(1, 2)), "0.5");
        assert_eq!(format_rat(&Ratio::new(-5, 4)), "-1.25");
        assert_eq!(format_rat(&Ratio::from_integer(42)), "42");
        assert_eq!(format_rat(&Ratio::new(1, 3)), "1/3");
        assert_eq!(format_rat(&Ratio::new(22, 7)), "22/7");
    }

    #[test]
    fn format_round_trips() {
        for r in [
            Ratio::new(1i128, 2),
            Ratio::new(-7, 20),
            Ratio::new(13, 3),
            Ratio::from_integer(0),
        ] {
            assert_eq!(parse_rat(&format_rat(&r)).unwrap(), r);
        }
    }
}
