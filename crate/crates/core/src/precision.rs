//! Working precision and the scalar type shared by the whole pipeline.
//!
//! All real quantities are MPFR floats (`rug::Float`) created at the bit
//! precision implied by a [`PrecisionContext`]. MPFR rounds every operation
//! correctly, so a computation repeated under the same context reproduces
//! the same bits.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// High-precision real scalar.
pub type Real = Float;

/// Smallest accepted decimal digit budget.
pub const MIN_DIGITS: u32 = 30;

/// Extra binary digits carried beyond the decimal budget.
const GUARD_BITS: u32 = 16;

/// Decimal-digit budget for all arithmetic of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow {
                digits,
                min: MIN_DIGITS,
            });
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// MPFR precision in bits: `ceil(digits * log2 10)` plus guard bits.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Real {
        Float::with_val(self.bits(), 0)
    }

    pub fn one(&self) -> Real {
        Float::with_val(self.bits(), 1)
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.bits(), rug::float::Constant::Pi)
    }

    /// `10^(-k)` at context precision (k may be negative or fractional).
    pub fn ten_pow_neg(&self, k: f64) -> Real {
        let ten = self.real(10);
        ten.pow(self.real(-k))
    }

    /// Tolerance `10^(-digits + guard)`.
    pub fn tolerance(&self, guard: i64) -> Real {
        self.ten_pow_neg(f64::from(self.digits) - guard as f64)
    }

    /// Parses a decimal, scientific or rational literal (`0.11`, `1e-40`,
    /// `-1/4`) exactly and rounds it once to context precision.
    pub fn parse_real(&self, text: &str) -> Result<Real> {
        Ok(self.real(&parse_rational(text)?))
    }
}

/// `make_context`.
pub fn make_context(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(digits)
}

/// Exact parse of `[-+]digits[.digits][e[-+]digits]` or `[-+]p/q`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidArgument(format!("`{text}` is not a decimal or rational literal"));
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den == 0 {
            return Err(Error::InvalidArgument(format!("`{text}` divides by zero")));
        }
        return Ok(num / den);
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(Integer::from_str_radix(&digits, 10).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let power = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Decimal rendering with `sig` significant digits.
///
/// Values with decimal exponent in `-4..=6` are printed positionally
/// (`0.6576…`), everything else in scientific form (`6.5766…e-41`).
pub fn format_real(x: &Real, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.to_string();
    }
    let (negative, digits, exp) = x.to_sign_string_exp(10, Some(sig.max(1)));
    // value = 0.DIGITS * 10^exp
    let exp = exp.unwrap_or(0);
    let sign = if negative { "-" } else { "" };
    if (-3..=7).contains(&exp) {
        if exp <= 0 {
            format!("{sign}0.{}{digits}", "0".repeat((-exp) as usize))
        } else {
            let e = exp as usize;
            if e >= digits.len() {
                format!("{sign}{digits}{}", "0".repeat(e - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..e], &digits[e..])
            }
        }
    } else {
        format!("{sign}{}.{}e{}", &digits[..1], &digits[1..], exp - 1)
    }
}

/// `-log10(x)` as a double, for budget heuristics only.
pub fn neg_log10(x: &Real) -> f64 {
    let bits = x.prec();
    let mut l = Float::with_val(bits, x.abs_ref());
    l.log10_mut();
    -l.to_f64()
}

/// A closed interval `[a, b]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub a: Rational,
    pub b: Rational,
}

impl Interval {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}] must satisfy a < b"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self {
            a: Rational::from(0),
            b: Rational::from(1),
        }
    }

    pub fn symmetric() -> Self {
        Self {
            a: Rational::from(-1),
            b: Rational::from(1),
        }
    }

    pub fn length(&self) -> Rational {
        Rational::from(&self.b - &self.a)
    }

    /// Affine image of reference coordinate `u in [-1, 1]`.
    pub fn from_reference(&self, u: &Real, ctx: &PrecisionContext) -> Real {
        let half_len = ctx.real(&self.length()) / 2u32;
        let mut x = ctx.real(u + 1u32) * half_len;
        x += &self.a;
        x
    }

    /// Affine image of `x in [a, b]` in reference coordinates.
    pub fn to_reference(&self, x: &Real, ctx: &PrecisionContext) -> Real {
        let twice = ctx.real(x * 2u32);
        let shifted = twice - ctx.real(&(Rational::from(&self.a + &self.b)));
        shifted / ctx.real(&self.length())
    }

    pub fn contains(&self, x: &Real) -> bool {
        *x >= self.a && *x <= self.b
    }

    pub fn to_display(&self) -> String {
        format!("[{}, {}]", self.a, self.b)
    }
}
