//! Exact rational arithmetic helpers.
//!
//! All probabilities in this crate are carried as [`Rational`]
//! (arbitrary-precision, always canonical: reduced, positive
//! denominator). Floats enter only when a report is rendered.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, canonical form.
pub type Rational = num_rational::BigRational;

/// `n / d` as a [`Rational`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact non-negative integer power, with `0^0 = 1`.
pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    Rational::new_raw(base.numer().pow(exp), base.denom().pow(exp))
}

/// Parse an exact rational from a string.
///
/// Accepted forms: `"3"`, `"-2"`, `"1/3"`, `"0.25"`, `"-1.5e-2"`.
/// Decimal strings convert exactly (`0.1` becomes `1/10`, not the nearest
/// double).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::ParseRational(text.to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::ParseRational(text.to_string()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::ParseRational(text.to_string()))?;
        if d.is_zero() {
            return Err(Error::ParseRational(text.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| Error::ParseRational(text.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mantissa_int: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(mantissa_int * ten.pow(scale as u32))
    } else {
        Rational::new(mantissa_int, ten.pow(scale.unsigned_abs()))
    };
    Some(if sign < 0 { -value } else { value })
}

/// Exact rational from a finite double, via its shortest round-trip
/// decimal rendering. `0.1f64` becomes `1/10`.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::ParseRational(format!("{x}")));
    }
    parse_rational(&format!("{x}"))
}

/// Nearest double to an exact rational (presentation only).
pub fn rational_to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 can overflow to inf/inf = NaN when both sides exceed
    // f64 range; drop common bits first so the quotient stays in range.
    let bits = r.numer().bits().min(r.denom().bits());
    let shift = bits.saturating_sub(512);
    let num = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let den = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    num / den
}

/// Render as `"num/den"`, denominator always present and positive
/// (`1/2`, `0/1`, `-3/1`). This is the crate's lossless wire format.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// True if `r` lies in `[0, 1]`.
pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Round a non-negative rational to the nearest integer, accepting only
/// values within `1e-9` of that integer. Used for ensemble exponents
/// (`rho_i * n`, `lambda_j * k`): grossly fractional inputs would corrupt
/// counts and are rejected instead of silently rounded.
pub fn nearest_integer_within_tolerance(value: &Rational, what: &'static str) -> Result<u64> {
    if value.is_negative() {
        return Err(Error::NonIntegralExponent {
            what,
            value: format_rational(value),
        });
    }
    // (2v + 1) / 2 truncated = round-half-up, operands non-negative here
    let two = BigInt::from(2);
    let rounded = (value.numer() * &two + value.denom()) / (value.denom() * &two);
    let tolerance = Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    let diff = (value - Rational::from_integer(rounded.clone())).abs();
    if diff > tolerance {
        return Err(Error::NonIntegralExponent {
            what,
            value: format_rational(value),
        });
    }
    debug_assert!(!rounded.is_negative());
    rounded.to_u64().ok_or(Error::NonIntegralExponent {
        what,
        value: format_rational(value),
    })
}
