//! Explicit nested-sum formulas for the coefficients.
//!
//! General `delta`, in the general `w` convention:
//!
//! ```text
//! c_n = (alpha)_n (beta)_n / (n! (gamma)_n) * sum_{m=0}^{n} f_{m,n}
//! f_{0,n} = k^{2n}
//! f_{m,n} = (-1)^m k^{2n-2m} sum_{chains} prod_s
//!     j_s! (gamma)_{j_s} (alpha)_{l_s} (beta)_{l_s}
//!     --------------------------------------------- k^{-2(j_s-l_s)} (w - (1-k^2) delta l_s)
//!     l_s! (gamma)_{l_s} (alpha)_{j_s+1} (beta)_{j_s+1}
//! ```
//!
//! With `delta = 0` the weight is `w^m` and `g_{m,n} = f_{m,n} / w^m` is `w`-free.
//!
//! With `delta = beta + 1`, in the beta-plus-one `w` convention:
//!
//! ```text
//! c_n = (beta)_n / n! * sum_m f~_{m,n} w^m,   f~_{0,n} = 1
//! f~_{m,n} = (-1)^m sum_{chains} prod_s
//!     j_s! (alpha)_{j_s} (beta)_{l_s} (gamma)_{l_s}
//!     --------------------------------------------- k^{2(j_s-l_s)}
//!     l_s! (alpha)_{l_s} (beta)_{j_s+1} (gamma)_{j_s+1}
//! ```
//!
//! Chains run over `0 <= l_1 <= j_1 < l_2 <= ... < l_m <= j_m < n` (see
//! [`IndexChains`]). The brute-force [`Enumerator`] sums the chains directly;
//! the production path uses the first-order recursions in `n`
//!
//! ```text
//! f_{m,n}  = k^2 f_{m,n-1} - V_n  sum_{l=m-1}^{n-1} U_l (w - (1-k^2) delta l) f_{m-1,l}
//! f~_{m,n} = f~_{m,n-1}    - V~_n sum_{l=m-1}^{n-1} U~_l k^{2(n-1-l)} f~_{m-1,l}
//! ```
//!
//! with `U_l = (alpha)_l (beta)_l / (l! (gamma)_l)`, `V_n = (n-1)! (gamma)_{n-1} / ((alpha)_n (beta)_n)`
//! and the tilde versions with `alpha` and `gamma` exchanged. The inner sums
//! are running sums, so a full table up to order `N` costs `O(N^2)`.

use crate::chains::IndexChains;
use crate::error::{HeunError, Result};
use crate::params::HeunValentParams;
use crate::scalar::{factorial, pochhammer, Scalar};
use crate::table::{CoefficientTable, Method, ParamSet};

/// Largest order the brute-force enumerator accepts unless told otherwise.
pub const DEFAULT_NAIVE_CAP: usize = 12;

/// Default largest order for the closed forms in exact mode, where rational
/// bit length grows without bound. The command line can raise it.
pub const DEFAULT_EXACT_ORDER_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NestedSumVariant {
    /// `f_{m,n}` for general `delta`.
    GeneralF,
    /// `g_{m,n}`, the `w`-free sums for `delta = 0`.
    Delta0G,
    /// `f~_{m,n}` for `delta = beta + 1`.
    BetaPlusOneF,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluation {
    NaiveEnumeration,
    DynamicProgram,
}

/// Lower-triangular table of nested sums `f[m][n]`, `0 <= m <= n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedSumTable<S> {
    order: usize,
    variant: NestedSumVariant,
    evaluation: Evaluation,
    // rows[m][n - m]
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> NestedSumTable<S> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn variant(&self) -> NestedSumVariant {
        self.variant
    }

    pub fn evaluation(&self) -> Evaluation {
        self.evaluation
    }

    /// Stored entry for `0 <= m <= n <= N`.
    pub fn entry(&self, m: usize, n: usize) -> Option<&S> {
        if m > n || n > self.order {
            return None;
        }
        self.rows.get(m).and_then(|row| row.get(n - m))
    }

    /// `f_{m,n}` with the conventions `f_{-1,n} = 0` and `f_{m,n} = 0` for `m > n`.
    ///
    /// # Panics
    /// If `n` exceeds the table order.
    pub fn get(&self, m: isize, n: usize) -> S {
        assert!(n <= self.order, "n = {n} beyond table order {}", self.order);
        if m < 0 {
            return S::zero();
        }
        self.entry(m as usize, n).cloned().unwrap_or_else(S::zero)
    }
}

fn zero_denominator(what: impl Into<String>) -> HeunError {
    HeunError::DivisionByZero(what.into())
}

fn div<S: Scalar>(num: S, den: &S, what: impl FnOnce() -> String) -> Result<S> {
    num.checked_div(den).ok_or_else(|| zero_denominator(what()))
}

// ---------------------------------------------------------------------------
// dynamic program

/// `f_{m,n}` recursion with a general weight `w - (1-k^2) delta l`.
fn general_rows<S: Scalar>(
    k2: &S,
    alpha: &S,
    beta: &S,
    gamma: &S,
    w: &S,
    delta: &S,
    order: usize,
) -> Result<Vec<Vec<S>>> {
    let nth = |i: usize| S::from_usize(i);
    // u[l] = (alpha)_l (beta)_l / (l! (gamma)_l), l < order
    let mut u = Vec::with_capacity(order);
    if order > 0 {
        u.push(S::one());
    }
    for l in 0..order.saturating_sub(1) {
        let num = u[l].clone() * (alpha.clone() + nth(l)) * (beta.clone() + nth(l));
        let den = nth(l + 1) * (gamma.clone() + nth(l));
        u.push(div(num, &den, || format!("(gamma)_{} vanishes", l + 1))?);
    }
    // v[n] = (n-1)! (gamma)_{n-1} / ((alpha)_n (beta)_n), 1 <= n <= order
    let mut v = vec![S::zero(); order + 1];
    for n in 1..=order {
        let num = if n == 1 {
            S::one()
        } else {
            v[n - 1].clone() * nth(n - 1) * (gamma.clone() + nth(n - 2))
        };
        let den = (alpha.clone() + nth(n - 1)) * (beta.clone() + nth(n - 1));
        v[n] = div(num, &den, || format!("(alpha)_{n} (beta)_{n} vanishes"))?;
    }
    let drift = (S::one() - k2.clone()) * delta.clone();
    let weight = |l: usize| w.clone() - drift.clone() * nth(l);

    let mut rows: Vec<Vec<S>> = Vec::with_capacity(order + 1);
    rows.push((0..=order).map(|n| k2.pow(n)).collect());
    for m in 1..=order {
        let prev = &rows[m - 1];
        let mut row = Vec::with_capacity(order - m + 1);
        let mut acc = S::zero();
        let mut last = S::zero();
        for n in m..=order {
            let l = n - 1;
            acc = acc + u[l].clone() * weight(l) * prev[l + 1 - m].clone();
            let f = k2.clone() * last - v[n].clone() * acc.clone();
            row.push(f.clone());
            last = f;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn beta_plus_one_rows<S: Scalar>(
    k2: &S,
    alpha: &S,
    beta: &S,
    gamma: &S,
    order: usize,
) -> Result<Vec<Vec<S>>> {
    let nth = |i: usize| S::from_usize(i);
    // u[l] = (beta)_l (gamma)_l / (l! (alpha)_l)
    let mut u = Vec::with_capacity(order);
    if order > 0 {
        u.push(S::one());
    }
    for l in 0..order.saturating_sub(1) {
        let num = u[l].clone() * (beta.clone() + nth(l)) * (gamma.clone() + nth(l));
        let den = nth(l + 1) * (alpha.clone() + nth(l));
        u.push(div(num, &den, || format!("(alpha)_{} vanishes", l + 1))?);
    }
    // v[n] = (n-1)! (alpha)_{n-1} / ((beta)_n (gamma)_n)
    let mut v = vec![S::zero(); order + 1];
    for n in 1..=order {
        let num = if n == 1 {
            S::one()
        } else {
            v[n - 1].clone() * nth(n - 1) * (alpha.clone() + nth(n - 2))
        };
        let den = (beta.clone() + nth(n - 1)) * (gamma.clone() + nth(n - 1));
        v[n] = div(num, &den, || format!("(beta)_{n} (gamma)_{n} vanishes"))?;
    }

    let mut rows: Vec<Vec<S>> = Vec::with_capacity(order + 1);
    rows.push(vec![S::one(); order + 1]);
    for m in 1..=order {
        let prev = &rows[m - 1];
        let mut row = Vec::with_capacity(order - m + 1);
        let mut acc = S::zero();
        let mut last = S::zero();
        for n in m..=order {
            let l = n - 1;
            acc = k2.clone() * acc + u[l].clone() * prev[l + 1 - m].clone();
            let f = last - v[n].clone() * acc.clone();
            row.push(f.clone());
            last = f;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// All `f_{m,n}`, `n <= order`, via the recursion in `n`.
pub fn f_general_dp<S: Scalar>(v: &HeunValentParams<S>, order: usize) -> Result<NestedSumTable<S>> {
    let rows = general_rows(
        &v.k2(),
        v.alpha(),
        v.beta(),
        v.gamma(),
        &v.w_general(),
        v.delta(),
        order,
    )?;
    Ok(NestedSumTable {
        order,
        variant: NestedSumVariant::GeneralF,
        evaluation: Evaluation::DynamicProgram,
        rows,
    })
}

/// All `g_{m,n}` (the `delta = 0` sums with the factor `w^m` removed).
/// Only `k`, `alpha`, `beta`, `gamma` of `v` are used.
pub fn g_delta0_dp<S: Scalar>(v: &HeunValentParams<S>, order: usize) -> Result<NestedSumTable<S>> {
    let rows = general_rows(
        &v.k2(),
        v.alpha(),
        v.beta(),
        v.gamma(),
        &S::one(),
        &S::zero(),
        order,
    )?;
    Ok(NestedSumTable {
        order,
        variant: NestedSumVariant::Delta0G,
        evaluation: Evaluation::DynamicProgram,
        rows,
    })
}

/// All `f~_{m,n}`. Only `k`, `alpha`, `beta`, `gamma` of `v` are used.
pub fn f_beta_plus_one_dp<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<NestedSumTable<S>> {
    let rows = beta_plus_one_rows(&v.k2(), v.alpha(), v.beta(), v.gamma(), order)?;
    Ok(NestedSumTable {
        order,
        variant: NestedSumVariant::BetaPlusOneF,
        evaluation: Evaluation::DynamicProgram,
        rows,
    })
}

// ---------------------------------------------------------------------------
// brute-force enumeration

/// Direct chain-by-chain evaluation of the nested sums. Exponential in `n`;
/// kept as an independent oracle for the dynamic program.
#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    cap: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            cap: DEFAULT_NAIVE_CAP,
        }
    }
}

impl Enumerator {
    pub fn with_cap(cap: usize) -> Self {
        Enumerator { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        if n > self.cap {
            return Err(HeunError::Precondition(format!(
                "naive enumeration capped at n <= {}, requested n = {n}",
                self.cap
            )));
        }
        if m > n {
            return Err(HeunError::Precondition(format!("need m <= n, got m = {m}, n = {n}")));
        }
        Ok(())
    }

    /// `sum over chains of prod_s factor[l_s][j_s]`.
    fn chain_sum<S: Scalar>(m: usize, n: usize, factor: &[Vec<S>]) -> S {
        IndexChains::new(m, n).fold(S::zero(), |acc, chain| {
            let term = chain
                .pairs()
                .iter()
                .fold(S::one(), |p, &(l, j)| p * factor[l][j].clone());
            acc + term
        })
    }

    fn sign<S: Scalar>(m: usize) -> S {
        if m % 2 == 0 {
            S::one()
        } else {
            -S::one()
        }
    }

    // factor[l][j] for the general / delta = 0 sums, straight from Pochhammer products
    fn general_factors<S: Scalar>(
        v: &HeunValentParams<S>,
        n: usize,
        w: &S,
        delta: &S,
    ) -> Result<Vec<Vec<S>>> {
        let (alpha, beta, gamma) = (v.alpha(), v.beta(), v.gamma());
        let k2 = v.k2();
        let mut table = vec![vec![S::zero(); n]; n];
        for l in 0..n {
            let weight = w.clone() - (S::one() - k2.clone()) * delta.clone() * S::from_usize(l);
            for j in l..n {
                let num = factorial::<S>(j)
                    * pochhammer(gamma, j)
                    * pochhammer(alpha, l)
                    * pochhammer(beta, l);
                let den = factorial::<S>(l)
                    * pochhammer(gamma, l)
                    * pochhammer(alpha, j + 1)
                    * pochhammer(beta, j + 1)
                    * k2.pow(j - l);
                table[l][j] = div(num, &den, || format!("denominator vanishes at (l, j) = ({l}, {j})"))? * weight.clone();
            }
        }
        Ok(table)
    }

    fn beta_plus_one_factors<S: Scalar>(v: &HeunValentParams<S>, n: usize) -> Result<Vec<Vec<S>>> {
        let (alpha, beta, gamma) = (v.alpha(), v.beta(), v.gamma());
        let k2 = v.k2();
        let mut table = vec![vec![S::zero(); n]; n];
        for l in 0..n {
            for j in l..n {
                let num = factorial::<S>(j)
                    * pochhammer(alpha, j)
                    * pochhammer(beta, l)
                    * pochhammer(gamma, l)
                    * k2.pow(j - l);
                let den = factorial::<S>(l)
                    * pochhammer(alpha, l)
                    * pochhammer(beta, j + 1)
                    * pochhammer(gamma, j + 1);
                table[l][j] = div(num, &den, || format!("denominator vanishes at (l, j) = ({l}, {j})"))?;
            }
        }
        Ok(table)
    }

    fn general_with<S: Scalar>(&self, v: &HeunValentParams<S>, m: usize, n: usize, w: &S, delta: &S) -> Result<S> {
        self.check(m, n)?;
        let factor = Self::general_factors(v, n, w, delta)?;
        Ok(Self::sign::<S>(m) * v.k2().pow(n - m) * Self::chain_sum(m, n, &factor))
    }

    /// `f_{m,n}` for general `delta`, using `w` in the general convention.
    pub fn general<S: Scalar>(&self, v: &HeunValentParams<S>, m: usize, n: usize) -> Result<S> {
        self.general_with(v, m, n, &v.w_general(), v.delta())
    }

    /// `g_{m,n}` of the `delta = 0` formula.
    pub fn delta0<S: Scalar>(&self, v: &HeunValentParams<S>, m: usize, n: usize) -> Result<S> {
        self.general_with(v, m, n, &S::one(), &S::zero())
    }

    /// `f~_{m,n}` of the `delta = beta + 1` formula.
    pub fn beta_plus_one<S: Scalar>(&self, v: &HeunValentParams<S>, m: usize, n: usize) -> Result<S> {
        self.check(m, n)?;
        let factor = Self::beta_plus_one_factors(v, n)?;
        Ok(Self::sign::<S>(m) * Self::chain_sum(m, n, &factor))
    }

    /// Full table `0 <= m <= n <= order` by enumeration.
    pub fn table<S: Scalar>(
        &self,
        v: &HeunValentParams<S>,
        order: usize,
        variant: NestedSumVariant,
    ) -> Result<NestedSumTable<S>> {
        self.check(0, order)?;
        let mut rows: Vec<Vec<S>> = (0..=order).map(|m| Vec::with_capacity(order + 1 - m)).collect();
        for n in 0..=order {
            for (m, row) in rows.iter_mut().enumerate().take(n + 1) {
                let value = match variant {
                    NestedSumVariant::GeneralF => self.general(v, m, n)?,
                    NestedSumVariant::Delta0G => self.delta0(v, m, n)?,
                    NestedSumVariant::BetaPlusOneF => self.beta_plus_one(v, m, n)?,
                };
                row.push(value);
            }
        }
        Ok(NestedSumTable {
            order,
            variant,
            evaluation: Evaluation::NaiveEnumeration,
            rows,
        })
    }
}

/// `f_{m,n}` by direct enumeration with the default cap.
pub fn f_general_naive<S: Scalar>(v: &HeunValentParams<S>, m: usize, n: usize) -> Result<S> {
    Enumerator::default().general(v, m, n)
}

// ---------------------------------------------------------------------------
// coefficients

/// `(alpha)_n (beta)_n / (n! (gamma)_n)` for `n <= order`, as running ratios.
fn general_prefactors<S: Scalar>(v: &HeunValentParams<S>, order: usize) -> Result<Vec<S>> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(S::one());
    for n in 0..order {
        let nth = S::from_usize(n);
        let num = out[n].clone() * (v.alpha().clone() + nth.clone()) * (v.beta().clone() + nth.clone());
        let den = S::from_usize(n + 1) * (v.gamma().clone() + nth);
        out.push(div(num, &den, || format!("(gamma)_{} vanishes", n + 1))?);
    }
    Ok(out)
}

/// Coefficients from the general nested-sum formula (any `delta`).
pub fn closed_form_coefficients<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<CoefficientTable<S>> {
    let f = f_general_dp(v, order)?;
    let pre = general_prefactors(v, order)?;
    let values = (0..=order)
        .map(|n| {
            let sum = (0..=n).fold(S::zero(), |acc, m| acc + f.get(m as isize, n));
            pre[n].clone() * sum
        })
        .collect();
    Ok(CoefficientTable::new(ParamSet::Valent(v.clone()), values, Method::ClosedForm))
}

/// Coefficients from the `delta = 0` formula, as a polynomial in `w`.
pub fn delta0_coefficients<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<CoefficientTable<S>> {
    if !v.has_delta_zero() {
        return Err(HeunError::Precondition(format!(
            "the delta = 0 formula needs delta = 0, got {}",
            v.delta().render()
        )));
    }
    let g = g_delta0_dp(v, order)?;
    let pre = general_prefactors(v, order)?;
    let w = v.w_general();
    let k2 = v.k2();
    let values = (0..=order)
        .map(|n| {
            // Horner in w over m = n..1, then the m = 0 term k^{2n}
            let poly = (1..=n)
                .rev()
                .fold(S::zero(), |acc, m| (acc + g.get(m as isize, n)) * w.clone());
            pre[n].clone() * (k2.pow(n) + poly)
        })
        .collect();
    Ok(CoefficientTable::new(
        ParamSet::Valent(v.clone()),
        values,
        Method::ClosedFormDelta0,
    ))
}

/// Coefficients from the `delta = beta + 1` formula, as a polynomial in the
/// beta-plus-one `w`.
pub fn beta_plus_one_coefficients<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<CoefficientTable<S>> {
    if !v.has_delta_beta_plus_one() {
        return Err(HeunError::Precondition(format!(
            "the beta-plus-one formula needs delta = beta + 1, got delta = {}",
            v.delta().render()
        )));
    }
    if v.beta().is_nonpositive_integer() {
        return Err(HeunError::Precondition(format!(
            "beta = {} is a non-positive integer; the beta-plus-one sums have poles there",
            v.beta().render()
        )));
    }
    let f = f_beta_plus_one_dp(v, order)?;
    let w = v.w_beta_plus_one();
    // (beta)_n / n!
    let mut pre = vec![S::one()];
    for n in 0..order {
        let next = pre[n].clone() * (v.beta().clone() + S::from_usize(n));
        pre.push(next.checked_div(&S::from_usize(n + 1)).expect("n + 1 is nonzero"));
    }
    let values = (0..=order)
        .map(|n| {
            let poly = (0..=n)
                .rev()
                .fold(S::zero(), |acc, m| acc * w.clone() + f.get(m as isize, n));
            pre[n].clone() * poly
        })
        .collect();
    Ok(CoefficientTable::new(
        ParamSet::Valent(v.clone()),
        values,
        Method::ClosedFormBetaPlusOne,
    ))
}
