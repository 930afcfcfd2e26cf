//! Arithmetic substrate shared by every engine.
//!
//! Two modes exist: exact big rationals ([`Rational`]) and machine-precision
//! complex numbers ([`Complex64`]). Algorithms are generic over [`Scalar`], so a
//! computation is carried out entirely in one mode; nothing converts between
//! modes implicitly.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::BigRational;

pub use num::complex::Complex64;

use crate::error::{HeunError, Result};

/// Exact arbitrary-precision rational. `num` keeps it reduced with a positive
/// denominator after every operation.
pub type Rational = BigRational;

/// Distance to the nearest non-positive integer below which a float-mode
/// parameter is treated as sitting on a pole of `(x)_n` in a denominator.
pub const POLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithmeticMode {
    Exact,
    Float,
}

impl ArithmeticMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithmeticMode::Exact => "exact",
            ArithmeticMode::Float => "float",
        }
    }
}

/// A field element in one of the two supported arithmetic modes.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: ArithmeticMode;

    fn from_i64(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    /// `self / rhs`, or `None` when `rhs` is an exact zero.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    /// Modulus as a double (lossy in exact mode).
    fn modulus(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    /// Lifts a machine complex into this mode; exact mode refuses.
    fn from_complex(c: Complex64) -> Option<Self>;

    /// The value as a real double, if it is real.
    fn real_value(&self) -> Option<f64>;

    /// Ordering of two real values; `None` if either is not real.
    fn cmp_real(&self, other: &Self) -> Option<Ordering>;

    /// Whether the value is (or, in float mode, lies within [`POLE_TOLERANCE`]
    /// of) one of 0, -1, -2, ...
    fn is_nonpositive_integer(&self) -> bool;

    /// Equality: exact in rational mode, relative tolerance `rel` in float mode.
    fn approx_eq(&self, other: &Self, rel: f64) -> bool;

    /// Square root if it exists in this mode (perfect squares only in exact mode).
    fn sqrt(&self) -> Option<Self>;

    fn parse(input: &str) -> Result<Self>;

    /// Text form used in reports: `p/q` in exact mode, 17 significant digits in
    /// float mode.
    fn render(&self) -> String;

    fn is_real(&self) -> bool {
        self.real_value().is_some()
    }

    fn pow(&self, n: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }

    fn real_value(&self) -> Option<f64> {
        self.to_f64()
    }

    fn cmp_real(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }

    fn is_nonpositive_integer(&self) -> bool {
        self.is_integer() && !self.is_positive()
    }

    fn approx_eq(&self, other: &Self, _rel: f64) -> bool {
        self == other
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }

    fn parse(input: &str) -> Result<Self> {
        parse_rational(input)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for Complex64 {
    const MODE: ArithmeticMode = ArithmeticMode::Float;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    // Smith's scaling; `Complex::div` squares the divisor and overflows early.
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (a, d) = (self, rhs);
        Some(if d.re.abs() >= d.im.abs() {
            let r = d.im / d.re;
            let den = d.re + d.im * r;
            Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
        } else {
            let r = d.re / d.im;
            let den = d.re * r + d.im;
            Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
        })
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn from_complex(c: Complex64) -> Option<Self> {
        Some(c)
    }

    fn real_value(&self) -> Option<f64> {
        (self.im == 0.0).then_some(self.re)
    }

    fn cmp_real(&self, other: &Self) -> Option<Ordering> {
        if self.im == 0.0 && other.im == 0.0 {
            self.re.partial_cmp(&other.re)
        } else {
            None
        }
    }

    fn is_nonpositive_integer(&self) -> bool {
        self.im.abs() < POLE_TOLERANCE
            && self.re < POLE_TOLERANCE
            && (self.re - self.re.round()).abs() < POLE_TOLERANCE
    }

    fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        (self - other).norm() <= rel * self.norm().max(other.norm()).max(1.0)
    }

    fn sqrt(&self) -> Option<Self> {
        if self.im == 0.0 && self.re >= 0.0 {
            Some(Complex64::new(self.re.sqrt(), 0.0))
        } else {
            Some(Complex64::sqrt(*self))
        }
    }

    fn parse(input: &str) -> Result<Self> {
        parse_complex(input)
    }

    fn render(&self) -> String {
        if self.im == 0.0 {
            format_f64(self.re)
        } else {
            let sign = if self.im.is_sign_negative() { '-' } else { '+' };
            format!("{}{}{}i", format_f64(self.re), sign, format_f64(self.im.abs()))
        }
    }
}

/// Rising factorial `x (x+1) ... (x+n-1)`, by forward product.
pub fn pochhammer<S: Scalar>(x: &S, n: usize) -> S {
    let mut acc = S::one();
    for i in 0..n {
        acc = acc * (x.clone() + S::from_usize(i));
    }
    acc
}

pub fn factorial<S: Scalar>(n: usize) -> S {
    pochhammer(&S::one(), n)
}

/// `sum_{j=1}^{n} 1/j`.
pub fn harmonic<S: Scalar>(n: usize) -> S {
    (1..=n).fold(S::zero(), |acc, j| acc + S::from_ratio(1, j as i64))
}

/// 17 significant digits in scientific notation (round-trips every double).
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Parses `p/q`, an integer, or a decimal (optionally with exponent) into an
/// exact rational. Decimals are read as exact decimal fractions.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = |reason: &str| HeunError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty value"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_decimal(p.trim()).ok_or_else(|| err("bad numerator"))?;
        let q = parse_decimal(q.trim()).ok_or_else(|| err("bad denominator"))?;
        if q.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(p / q);
    }
    parse_decimal(s).ok_or_else(|| err("not a rational or decimal number"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

fn parse_real_f64(s: &str) -> Option<f64> {
    if s.contains('/') {
        return parse_rational(s).ok()?.to_f64();
    }
    s.parse::<f64>().ok()
}

/// Parses `x`, `x+yi`, `x-yi` or `yi`; each component may be a decimal or `p/q`.
pub fn parse_complex(input: &str) -> Result<Complex64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || HeunError::Parse {
        input: input.to_string(),
        reason: "expected a real or complex number such as 0.5, 1/3 or 1-2i".to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return parse_real_f64(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(err);
    };
    // split at the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => parse_real_f64(t),
        }
    };
    let (re, im) = match split {
        Some(i) => (parse_real_f64(&body[..i]), imag(&body[i..])),
        None => (Some(0.0), imag(body)),
    };
    match (re, im) {
        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
        _ => Err(err()),
    }
}
