//! Exact rational scalars and the few, carefully fenced conversions to floats.
//!
//! Everything the crate computes — growth values, pattern matrices, certificate
//! checks — happens in `Scalar` (arbitrary-precision rationals), so equality and
//! zero tests are exact. Floats appear in two places only: human-facing "≈"
//! columns, and enclosure endpoints, where the conversion is directed (rounded
//! away from the true value on the safe side) and verified by exact comparison.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number in canonical reduced form (positive denominator).
pub type Scalar = BigRational;

/// Shorthand for an integer scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `num/den`. Panics on a zero denominator, so it
/// is meant for literals in code and tests, not for external input.
pub fn rat(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "rat() denominator must be nonzero");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, an integer `"p"`, or an exact decimal like `"-1.25"`.
pub fn parse_scalar(input: &str) -> Result<Scalar> {
    let s = input.trim();
    let err = || Error::ScalarParse {
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        // Exact decimal: sign belongs to the whole part, the fraction must be
        // bare digits.
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.strip_prefix(['-', '+']).unwrap_or(whole);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{whole_digits}{frac}");
        let num: BigInt = digits.parse().map_err(|_| err())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let value = BigRational::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    let num: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(num))
}

/// Canonical textual form: bare integer when the denominator is one, `"p/q"`
/// otherwise. `parse_scalar ∘ format_scalar` is the identity.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Best-effort `f64` for display. Robust against numerator and denominator
/// being individually too large for `f64` as long as their ratio fits.
pub fn to_f64_approx(x: &Scalar) -> f64 {
    if x.numer().is_zero() {
        return 0.0;
    }
    let negative = x.numer().is_negative();
    let a = x.numer().abs().to_biguint().expect("abs is nonnegative");
    let b = x.denom().to_biguint().expect("canonical denominator is positive");
    // Scale so the integer quotient keeps ~80 significant bits, then undo the
    // scaling in floating point.
    let sh = a.bits() as i64 - b.bits() as i64;
    let e = 80 - sh;
    let (na, nb) = if e >= 0 {
        (a << e as u64, b)
    } else {
        (a, b << (-e) as u64)
    };
    let q: BigUint = na / nb;
    let qf = bytes_to_f64(&q);
    let scale = (-e as f64).exp2();
    let magnitude = qf * scale;
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

fn bytes_to_f64(q: &BigUint) -> f64 {
    // The quotient has at most ~82 bits; fold the limbs manually so no
    // intermediate overflows.
    let mut value = 0.0f64;
    for digit in q.to_u64_digits().iter().rev() {
        value = value * 18446744073709551616.0 + *digit as f64;
    }
    value
}

/// Exact rational equal to the (finite) float `f`.
pub fn scalar_from_f64(f: f64) -> Option<Scalar> {
    BigRational::from_float(f)
}

/// Largest float `r` with `r ≤ x`, verified by exact comparison. A sound
/// downward rounding of `x`; saturates to `-∞` only below every finite float.
pub fn to_f64_below(x: &Scalar) -> f64 {
    let mut r = to_f64_approx(x);
    if r == f64::INFINITY {
        r = f64::MAX;
    } else if r == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let passes = |r: f64| {
        scalar_from_f64(r)
            .map(|exact| exact <= *x)
            .unwrap_or(r == f64::NEG_INFINITY)
    };
    while !passes(r) {
        r = next_down(r);
    }
    while r.is_finite() && passes(next_up(r)) && next_up(r).is_finite() {
        r = next_up(r);
    }
    r
}

/// Smallest float `r` with `r ≥ x`, verified by exact comparison. A sound
/// upward rounding of `x`; saturates to `+∞` only above every finite float.
pub fn to_f64_above(x: &Scalar) -> f64 {
    let mut r = to_f64_approx(x);
    if r == f64::NEG_INFINITY {
        r = f64::MIN;
    } else if r == f64::INFINITY {
        return f64::INFINITY;
    }
    let passes = |r: f64| {
        scalar_from_f64(r)
            .map(|exact| exact >= *x)
            .unwrap_or(r == f64::INFINITY)
    };
    while !passes(r) {
        r = next_up(r);
    }
    while r.is_finite() && passes(next_down(r)) && next_down(r).is_finite() {
        r = next_down(r);
    }
    r
}

/// Largest float `r ≥ 0` with `r^n ≤ x`, verified by exact arithmetic.
/// Requires `x ≥ 0`; the result is a sound lower bound on `x^(1/n)`.
pub fn nth_root_below(x: &Scalar, n: u32) -> f64 {
    assert!(n >= 1, "root order must be at least 1");
    assert!(!x.is_negative(), "nth_root_below needs a nonnegative input");
    if x.is_zero() {
        return 0.0;
    }
    let mut r = to_f64_approx(x).powf(1.0 / n as f64);
    if !r.is_finite() {
        r = f64::MAX;
    }
    if r < 0.0 {
        r = 0.0;
    }
    // Walk down until the exact check passes, then up while it still passes.
    // The starting estimate is within a few ULPs, so both loops are short.
    let passes = |r: f64| {
        r <= 0.0
            || scalar_from_f64(r)
                .map(|exact| pow_scalar(&exact, n) <= *x)
                .unwrap_or(false)
    };
    while !passes(r) {
        r = next_down(r);
        if r <= 0.0 {
            return 0.0;
        }
    }
    while r.is_finite() && passes(next_up(r)) {
        r = next_up(r);
    }
    r.max(0.0)
}

/// Smallest float `r` with `r^n ≥ x`, verified by exact arithmetic.
/// Requires `x ≥ 0`; the result is a sound upper bound on `x^(1/n)`.
pub fn nth_root_above(x: &Scalar, n: u32) -> f64 {
    assert!(n >= 1, "root order must be at least 1");
    assert!(!x.is_negative(), "nth_root_above needs a nonnegative input");
    if x.is_zero() {
        return 0.0;
    }
    let mut r = to_f64_approx(x).powf(1.0 / n as f64);
    if !r.is_finite() || r < 0.0 {
        return f64::INFINITY;
    }
    // Walk up until the exact check passes, then down while it still passes.
    let passes = |r: f64| {
        r.is_finite()
            && r >= 0.0
            && scalar_from_f64(r)
                .map(|exact| pow_scalar(&exact, n) >= *x)
                .unwrap_or(false)
    };
    while !passes(r) {
        r = next_up(r);
        if !r.is_finite() {
            return f64::INFINITY;
        }
    }
    while r > 0.0 && passes(next_down(r)) {
        r = next_down(r);
    }
    r
}

/// Exact `x^n` for `n ≥ 0`.
///
/// Numerator and denominator are raised separately: they are coprime in the
/// canonical form every constructor produces, so the result needs no
/// reduction. This sidesteps the large GCDs that rational multiplication
/// would run at every squaring step.
pub fn pow_scalar(x: &Scalar, n: u32) -> Scalar {
    if n == 0 {
        return Scalar::one();
    }
    BigRational::new_raw(Pow::pow(x.numer(), n), Pow::pow(x.denom(), n))
}

fn next_down(f: f64) -> f64 {
    f64::next_down(f)
}

fn next_up(f: f64) -> f64 {
    f64::next_up(f)
}
