//! Explicit envelopes for `|c_n|`.
//!
//! With `d = max{1, |alpha|, |beta|, |gamma|}` and `t = |w| + (1 - k^2)|delta|`:
//!
//! ```text
//! general:        |(alpha)_n| (d)_n^2 / (n! |(gamma)_n|^2) * exp(t H_n / (1 - k^2))
//! delta = beta+1: (d)_n^2 / (n! |(gamma)_n|) * exp(pi^2 |w| / (6 (1 - k^2)))
//! ```
//!
//! The first uses the general-convention `w`, the second the beta-plus-one `w`.
//! Both are evaluated in log space so large `n` does not overflow.

use std::f64::consts::PI;

use crate::error::{HeunError, Result};
use crate::params::{HeunValentParams, WConvention};
use crate::scalar::{Complex64, Scalar};
use crate::table::{CoefficientTable, ParamSet};

pub const ENVELOPE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub d: f64,
    pub t: f64,
    pub k: f64,
}

impl BoundParams {
    pub fn new<S: Scalar>(v: &HeunValentParams<S>) -> Result<Self> {
        let k = real_k(v)?;
        let d = [v.alpha(), v.beta(), v.gamma()]
            .iter()
            .map(|x| x.modulus())
            .fold(1.0, f64::max);
        let t = v.w_general().modulus() + (1.0 - k * k) * v.delta().modulus();
        Ok(BoundParams { d, t, k })
    }
}

fn real_k<S: Scalar>(v: &HeunValentParams<S>) -> Result<f64> {
    v.k()
        .real_value()
        .filter(|k| *k > 0.0 && *k < 1.0)
        .ok_or_else(|| HeunError::Precondition("bounds need real 0 < k < 1".to_string()))
}

/// `ln |(x)_n|`; `-inf` when the product vanishes.
fn ln_abs_pochhammer(x: Complex64, n: usize) -> f64 {
    (0..n).map(|i| (x + i as f64).norm().ln()).sum()
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

fn check_gamma<S: Scalar>(v: &HeunValentParams<S>) -> Result<()> {
    if v.gamma().is_nonpositive_integer() {
        return Err(HeunError::Precondition("gamma is a non-positive integer".to_string()));
    }
    Ok(())
}

/// Natural log of the general envelope at `n`.
pub fn ln_bound_general<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<f64> {
    check_gamma(v)?;
    let p = BoundParams::new(v)?;
    let d = Complex64::new(p.d, 0.0);
    Ok(ln_abs_pochhammer(v.alpha().to_complex(), n) + 2.0 * ln_abs_pochhammer(d, n)
        - ln_factorial(n)
        - 2.0 * ln_abs_pochhammer(v.gamma().to_complex(), n)
        + p.t / (1.0 - p.k * p.k) * harmonic(n))
}

pub fn bound_general<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<f64> {
    ln_bound_general(v, n).map(f64::exp)
}

/// Natural log of the envelope for the `delta = beta + 1` family.
pub fn ln_bound_beta_plus_one<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<f64> {
    check_gamma(v)?;
    if !v.has_delta_beta_plus_one() {
        return Err(HeunError::Precondition("this envelope needs delta = beta + 1".to_string()));
    }
    let p = BoundParams::new(v)?;
    let d = Complex64::new(p.d, 0.0);
    let w = v.w_beta_plus_one().modulus();
    Ok(PI * PI * w / (6.0 * (1.0 - p.k * p.k)) + 2.0 * ln_abs_pochhammer(d, n)
        - ln_factorial(n)
        - ln_abs_pochhammer(v.gamma().to_complex(), n))
}

pub fn bound_beta_plus_one<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<f64> {
    ln_bound_beta_plus_one(v, n).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    General,
    BetaPlusOne,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::General => "general",
            BoundKind::BetaPlusOne => "beta-plus-one",
        }
    }

    /// Beta-plus-one records get their own envelope; everything else the general one.
    pub fn default_for<S: Scalar>(v: &HeunValentParams<S>) -> Self {
        match v.w_convention() {
            WConvention::BetaPlusOneW => BoundKind::BetaPlusOne,
            WConvention::GeneralW => BoundKind::General,
        }
    }

    pub fn eval<S: Scalar>(self, v: &HeunValentParams<S>, n: usize) -> Result<f64> {
        match self {
            BoundKind::General => bound_general(v, n),
            BoundKind::BetaPlusOne => bound_beta_plus_one(v, n),
        }
    }
}

/// `ln bound(n)` for `n = 0, 1, 2, ...`, built one factor at a time.
pub fn ln_bound_sequence<S: Scalar>(
    v: &HeunValentParams<S>,
    kind: BoundKind,
) -> Result<impl Iterator<Item = f64>> {
    let start = match kind {
        BoundKind::General => ln_bound_general(v, 0)?,
        BoundKind::BetaPlusOne => ln_bound_beta_plus_one(v, 0)?,
    };
    let p = BoundParams::new(v)?;
    let alpha = v.alpha().to_complex();
    let gamma = v.gamma().to_complex();
    let rate = p.t / (1.0 - p.k * p.k);
    let mut current = start;
    let mut n = 0usize;
    Ok(std::iter::from_fn(move || {
        let out = current;
        let nf = n as f64;
        let common = 2.0 * (p.d + nf).ln() - (nf + 1.0).ln();
        current += match kind {
            BoundKind::General => {
                common + (alpha + nf).norm().ln() - 2.0 * (gamma + nf).norm().ln() + rate / (nf + 1.0)
            }
            BoundKind::BetaPlusOne => common - (gamma + nf).norm().ln(),
        };
        n += 1;
        Some(out)
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRow {
    pub n: usize,
    pub abs_c: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub kind: BoundKind,
    pub rows: Vec<EnvelopeRow>,
    pub worst_ratio: f64,
    pub all_pass: bool,
}

/// Compares every coefficient of `table` with the envelope that matches its
/// parameter record.
pub fn check_envelope<S: Scalar>(table: &CoefficientTable<S>) -> Result<EnvelopeReport> {
    let v = valent_of(table)?;
    check_envelope_with(table, BoundKind::default_for(&v))
}

pub fn check_envelope_with<S: Scalar>(
    table: &CoefficientTable<S>,
    kind: BoundKind,
) -> Result<EnvelopeReport> {
    let v = valent_of(table)?;
    let mut rows = Vec::with_capacity(table.values().len());
    for (n, c) in table.values().iter().enumerate() {
        let bound = kind.eval(&v, n)?;
        let abs_c = c.modulus();
        let ratio = if bound > 0.0 {
            abs_c / bound
        } else if abs_c == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        rows.push(EnvelopeRow {
            n,
            abs_c,
            bound,
            ratio,
            pass: abs_c <= bound * (1.0 + ENVELOPE_SLACK),
        });
    }
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(EnvelopeReport {
        kind,
        rows,
        worst_ratio,
        all_pass,
    })
}

fn valent_of<S: Scalar>(table: &CoefficientTable<S>) -> Result<HeunValentParams<S>> {
    match table.params() {
        ParamSet::Valent(v) => Ok(v.clone()),
        ParamSet::Canonical(c) => HeunValentParams::from_canonical(c, WConvention::GeneralW),
    }
}
