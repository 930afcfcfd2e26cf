//! Coefficient dispatch and summation of `F(z) = sum c_n z^n` for `|z| < 1`.

use crate::bounds::{ln_bound_sequence, BoundKind};
use crate::closed_form::{beta_plus_one_coefficients, closed_form_coefficients, delta0_coefficients};
use crate::error::{HeunError, Result};
use crate::jacobi::heun_coefficients_via_green;
use crate::params::HeunValentParams;
use crate::recurrence::recurrence_coefficients_valent;
use crate::scalar::{ArithmeticMode, Complex64, Scalar};
use crate::table::{CoefficientTable, Method, ParamSet};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_TERM_CAP: usize = 4096;
/// Consecutive small terms required before the empirical stop fires.
pub const STOP_RUN: usize = 8;

/// `c_0..=c_order` by the requested method.
pub fn coefficients<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
    method: Method,
) -> Result<CoefficientTable<S>> {
    let not_applicable = |e: HeunError| match e {
        HeunError::Precondition(reason) => HeunError::not_applicable(method, reason),
        other => other,
    };
    match method {
        Method::Recurrence => recurrence_coefficients_valent(v, order),
        Method::ClosedForm => closed_form_coefficients(v, order),
        Method::ClosedFormDelta0 => delta0_coefficients(v, order).map_err(not_applicable),
        Method::ClosedFormBetaPlusOne => beta_plus_one_coefficients(v, order).map_err(not_applicable),
        Method::GreenPath => {
            if S::MODE == ArithmeticMode::Exact {
                return Err(HeunError::not_applicable(
                    method,
                    "the Green path involves square roots and runs in float mode only",
                ));
            }
            let table = heun_coefficients_via_green(v, order).map_err(not_applicable)?;
            let values = table
                .values()
                .iter()
                .map(|c| S::from_complex(*c).expect("float scalars accept complex values"))
                .collect();
            Ok(CoefficientTable::new(ParamSet::Valent(v.clone()), values, Method::GreenPath))
        }
    }
}

/// Whether `method` can produce coefficients for `v` in the scalar type `S`.
pub fn applicable<S: Scalar>(v: &HeunValentParams<S>, method: Method) -> Result<()> {
    coefficients(v, 1, method).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub tol: f64,
    pub cap: usize,
    pub initial_order: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: DEFAULT_TOL,
            cap: DEFAULT_TERM_CAP,
            initial_order: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// Summed from the coefficient envelope.
    Analytic,
    /// Read off the last computed terms.
    Empirical,
}

impl TailKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TailKind::Analytic => "analytic",
            TailKind::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub tail_kind: TailKind,
    pub method: Method,
}

/// Partial sums of `sum c_n z^n` and the first `N` at which `STOP_RUN`
/// consecutive terms `n = N - STOP_RUN + 1 ..= N` satisfy
/// `|c_n z^n| < tol max(1, |S_n|)`.
fn empirical_stop(c: &[Complex64], z: Complex64, tol: f64) -> (Vec<Complex64>, Option<usize>) {
    let mut partial = Vec::with_capacity(c.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut run = 0;
    let mut stop = None;
    for (n, cn) in c.iter().enumerate() {
        let term = cn * power;
        sum += term;
        partial.push(sum);
        power *= z;
        if term.norm() < tol * sum.norm().max(1.0) {
            run += 1;
            if run == STOP_RUN && stop.is_none() {
                stop = Some(n);
            }
        } else {
            run = 0;
        }
    }
    (partial, stop)
}

/// Terms `bound(n) |z|^n` for `n > from`, until they fall below `floor` past
/// their peak. `None` if that does not happen within `limit` terms.
fn envelope_terms<S: Scalar>(
    v: &HeunValentParams<S>,
    kind: BoundKind,
    r: f64,
    from: usize,
    floor: f64,
    limit: usize,
) -> Option<Vec<f64>> {
    let seq = ln_bound_sequence(v, kind).ok()?;
    let ln_r = r.ln();
    let mut out = Vec::new();
    let mut previous = f64::INFINITY;
    for (n, ln_b) in seq.enumerate().skip(from + 1).take(limit) {
        let term = (ln_b + n as f64 * ln_r).exp();
        out.push(term);
        if term < floor && term <= previous {
            return Some(out);
        }
        previous = term;
    }
    None
}

/// Sums the local series at `z`.
///
/// Coefficients are computed in `S` with the order doubled until the
/// empirical stop fires, then summed in complex floating point. The envelope
/// of [`crate::bounds`] then decides whether more terms are needed: the order
/// is raised until the remaining envelope tail is below `tol max(1, |S_N|)`,
/// as long as that stays within `opts.cap`.
pub fn evaluate<S: Scalar>(
    v: &HeunValentParams<S>,
    z: Complex64,
    method: Method,
    opts: &EvalOptions,
) -> Result<EvalResult> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(HeunError::invalid("tol", format!("must be positive, got {}", opts.tol)));
    }
    let r = z.norm();
    if !(r < 1.0) {
        return Err(HeunError::Domain(r));
    }
    applicable(v, method)?;
    if r == 0.0 {
        return Ok(EvalResult {
            value: Complex64::new(1.0, 0.0),
            terms_used: 1,
            tail_estimate: 0.0,
            tail_kind: TailKind::Empirical,
            method,
        });
    }

    let kind = BoundKind::default_for(v);
    let mut order = opts.initial_order.max(STOP_RUN).min(opts.cap);
    let mut required: Option<usize> = None;
    loop {
        let table = coefficients(v, order, method)?;
        let c: Vec<Complex64> = table.values().iter().map(|x| x.to_complex()).collect();
        if c.iter().any(|x| !x.is_finite()) {
            return Err(HeunError::Numerical(format!(
                "non-finite coefficient below order {order}"
            )));
        }
        let (partial, stop) = empirical_stop(&c, z, opts.tol);
        let Some(stop) = stop else {
            if order >= opts.cap {
                return Err(HeunError::NonConvergence { cap: opts.cap });
            }
            order = (2 * order).min(opts.cap);
            continue;
        };

        let target = opts.tol * partial[stop].norm().max(1.0);
        let envelope = match required {
            Some(_) => None,
            None => envelope_terms(v, kind, r, stop, opts.tol / 100.0, 16 * opts.cap.max(order)),
        };
        if let Some(terms) = envelope {
            // smallest N >= stop whose envelope tail is within target
            let mut tail = 0.0;
            let mut needed = stop;
            for (i, t) in terms.iter().enumerate().rev() {
                tail += t;
                if tail > target {
                    needed = stop + i + 1;
                    break;
                }
            }
            required = Some(needed.min(opts.cap));
        }
        let n_final = required.unwrap_or(stop).max(stop);
        if n_final > order {
            order = n_final;
            continue;
        }
        let (tail_estimate, tail_kind) = match required {
            Some(n) => {
                let t = envelope_terms(v, kind, r, n, opts.tol / 100.0, 16 * opts.cap.max(order))
                    .map(|t| t.iter().sum());
                match t {
                    Some(t) => (t, TailKind::Analytic),
                    None => (empirical_tail(&c, z, n_final), TailKind::Empirical),
                }
            }
            None => (empirical_tail(&c, z, n_final), TailKind::Empirical),
        };
        return Ok(EvalResult {
            value: partial[n_final],
            terms_used: n_final + 1,
            tail_estimate,
            tail_kind,
            method,
        });
    }
}

/// Largest of the last `STOP_RUN` terms, continued geometrically.
fn empirical_tail(c: &[Complex64], z: Complex64, n: usize) -> f64 {
    let r = z.norm();
    let lo = n.saturating_sub(STOP_RUN - 1);
    let largest = (lo..=n)
        .map(|i| c[i].norm() * r.powi(i as i32))
        .fold(0.0, f64::max);
    largest * r / (1.0 - r)
}

/// `sum_{n <= order} c_n z^n` in complex floating point.
pub fn partial_sum<S: Scalar>(table: &CoefficientTable<S>, z: Complex64, order: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for c in table.values().iter().take(order + 1) {
        sum += c.to_complex() * power;
        power *= z;
    }
    sum
}
