//! Forward three-term recurrence for the Frobenius coefficients at `z = 0`.
//!
//! With `c_{-1} = 0` and `c_0 = 1` the coefficients satisfy
//!
//! ```text
//! -q c_0 + a gamma c_1 = 0
//! A_n c_{n-1} - (B_n + q) c_n + C_n c_{n+1} = 0,   n >= 1
//! A_n = (n-1+alpha)(n-1+beta)
//! B_n = n((n-1+gamma)(1+a) + a delta + epsilon)
//! C_n = (n+1)(n+gamma) a
//! ```
//!
//! This is the reference path every other engine is checked against.

use crate::error::{HeunError, Result};
use crate::params::{HeunCanonicalParams, HeunValentParams};
use crate::scalar::Scalar;
use crate::table::{CoefficientTable, Method, ParamSet};

/// `(A_n, B_n, C_n)` in the canonical `(a, q)` form.
pub fn canonical_terms<S: Scalar>(c: &HeunCanonicalParams<S>, n: usize) -> (S, S, S) {
    let nn = S::from_usize(n);
    let nm1 = S::from_usize(n) - S::one();
    let a_n = (nm1.clone() + c.alpha().clone()) * (nm1.clone() + c.beta().clone());
    let b_n = nn.clone()
        * ((nm1 + c.gamma().clone()) * (S::one() + c.a().clone())
            + c.a().clone() * c.delta().clone()
            + c.epsilon().clone());
    let c_n = (nn.clone() + S::one()) * (nn + c.gamma().clone()) * c.a().clone();
    (a_n, b_n, c_n)
}

/// `(A_n, B_n, C_n)` written directly in terms of `k`:
/// `B_n = n((n-1+gamma)(1 + 1/k^2) + delta/k^2 + alpha + beta - gamma - delta + 1)`,
/// `C_n = (n+1)(n+gamma)/k^2`.
pub fn valent_terms<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<(S, S, S)> {
    let inv_k2 = inv_k2(v)?;
    let nn = S::from_usize(n);
    let nm1 = nn.clone() - S::one();
    let (alpha, beta, gamma, delta) = (v.alpha(), v.beta(), v.gamma(), v.delta());
    let a_n = (nm1.clone() + alpha.clone()) * (nm1.clone() + beta.clone());
    let b_n = nn.clone()
        * ((nm1 + gamma.clone()) * (S::one() + inv_k2.clone())
            + delta.clone() * inv_k2.clone()
            + alpha.clone()
            + beta.clone()
            - gamma.clone()
            - delta.clone()
            + S::one());
    let c_n = (nn.clone() + S::one()) * (nn + gamma.clone()) * inv_k2;
    Ok((a_n, b_n, c_n))
}

fn inv_k2<S: Scalar>(v: &HeunValentParams<S>) -> Result<S> {
    S::one()
        .checked_div(&v.k2())
        .ok_or_else(|| HeunError::DivisionByZero("k = 0".to_string()))
}

fn run<S: Scalar>(
    order: usize,
    q: &S,
    a_gamma: S,
    mut terms: impl FnMut(usize) -> Result<(S, S, S)>,
) -> Result<Vec<S>> {
    let mut c = Vec::with_capacity(order + 1);
    c.push(S::one());
    if order == 0 {
        return Ok(c);
    }
    let c1 = q
        .checked_div(&a_gamma)
        .ok_or_else(|| HeunError::DivisionByZero("a gamma vanishes in the first step".to_string()))?;
    c.push(c1);
    for n in 1..order {
        let (a_n, b_n, c_n) = terms(n)?;
        let rhs = (b_n + q.clone()) * c[n].clone() - a_n * c[n - 1].clone();
        let next = rhs
            .checked_div(&c_n)
            .ok_or_else(|| HeunError::DivisionByZero(format!("C_{n} = 0 (gamma = -{n})")))?;
        c.push(next);
    }
    Ok(c)
}

/// Coefficients `c_0..=c_order` from the canonical recurrence.
pub fn recurrence_coefficients<S: Scalar>(
    c: &HeunCanonicalParams<S>,
    order: usize,
) -> Result<CoefficientTable<S>> {
    let a_gamma = c.a().clone() * c.gamma().clone();
    let values = run(order, c.q(), a_gamma, |n| Ok(canonical_terms(c, n)))?;
    Ok(CoefficientTable::new(
        ParamSet::Canonical(c.clone()),
        values,
        Method::Recurrence,
    ))
}

/// Same coefficients, computed from the `(k, w)` form of the recurrence without
/// going through the canonical record.
pub fn recurrence_coefficients_valent<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<CoefficientTable<S>> {
    let inv_k2 = inv_k2(v)?;
    let q = -(v.s() * inv_k2.clone());
    let a_gamma = inv_k2 * v.gamma().clone();
    let values = run(order, &q, a_gamma, |n| valent_terms(v, n))?;
    Ok(CoefficientTable::new(
        ParamSet::Valent(v.clone()),
        values,
        Method::Recurrence,
    ))
}

/// `A_n c_{n-1} - (B_n + q) c_n + C_n c_{n+1}` for `1 <= n < values.len() - 1`,
/// together with the largest modulus among the three terms.
pub fn recurrence_residuals<S: Scalar>(
    c: &HeunCanonicalParams<S>,
    values: &[S],
) -> Vec<(S, f64)> {
    (1..values.len().saturating_sub(1))
        .map(|n| {
            let (a_n, b_n, c_n) = canonical_terms(c, n);
            let t0 = a_n * values[n - 1].clone();
            let t1 = (b_n + c.q().clone()) * values[n].clone();
            let t2 = c_n * values[n + 1].clone();
            let scale = t0.modulus().max(t1.modulus()).max(t2.modulus());
            (t0 - t1 + t2, scale)
        })
        .collect()
}
