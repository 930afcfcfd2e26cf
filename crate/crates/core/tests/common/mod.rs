#![allow(dead_code)]

use heun::scalar::{factorial, pochhammer};
use heun::{Complex64, HeunCanonicalParams, HeunValentParams, Rational, Scalar};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SEED: u64 = 0x5eed_4e75;

pub fn rng(stream: u64) -> StdRng {
    StdRng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Rational `p/d` with `d <= 12` in `[lo, hi]`, or `(0, hi]` when `lo == 0`.
pub fn rational_in(rng: &mut StdRng, lo: i64, hi: i64) -> Rational {
    let d = rng.gen_range(1..=12);
    let p_lo = if lo == 0 { 1 } else { lo * d };
    let p = rng.gen_range(p_lo..=hi * d);
    q(p, d)
}

pub fn k_value(rng: &mut StdRng) -> Rational {
    let choices = [(1, 4), (1, 3), (1, 2), (2, 3)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    q(n, d)
}

/// `(k, alpha, beta, gamma, delta, w)` with `k` from {1/4, 1/3, 1/2, 2/3},
/// `alpha, beta, gamma` in (0, 5], `delta` in [delta_lo, delta_hi], `w` in [-3, 3].
#[derive(Debug, Clone)]
pub struct Draw {
    pub k: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub delta: Rational,
    pub w: Rational,
}

impl Draw {
    pub fn sample(rng: &mut StdRng, delta_lo: i64, delta_hi: i64) -> Self {
        Draw {
            k: k_value(rng),
            alpha: rational_in(rng, 0, 5),
            beta: rational_in(rng, 0, 5),
            gamma: rational_in(rng, 0, 5),
            delta: rational_in(rng, delta_lo, delta_hi),
            w: rational_in(rng, -3, 3),
        }
    }

    pub fn general(&self) -> HeunValentParams<Rational> {
        HeunValentParams::general(
            self.k.clone(),
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.delta.clone(),
            self.w.clone(),
        )
        .unwrap()
    }

    pub fn with_delta(&self, delta: Rational) -> Self {
        Draw { delta, ..self.clone() }
    }

    pub fn beta_plus_one(&self) -> HeunValentParams<Rational> {
        HeunValentParams::beta_plus_one(
            self.k.clone(),
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.w.clone(),
        )
        .unwrap()
    }

    pub fn cli_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (flag, v) in [
            ("--k", &self.k),
            ("--alpha", &self.alpha),
            ("--beta", &self.beta),
            ("--gamma", &self.gamma),
            ("--delta", &self.delta),
            ("--w", &self.w),
        ] {
            out.push(flag.to_string());
            out.push(v.render());
        }
        out
    }
}

/// Forward recurrence written out from the canonical `(a, q)` data:
/// `C_n c_{n+1} = (B_n + q) c_n - A_n c_{n-1}`, `c_1 = q / (a gamma)`.
pub fn canonical_oracle(c: &HeunCanonicalParams<Rational>, order: usize) -> Vec<Rational> {
    let one = Rational::from_i64(1);
    let mut out = vec![one.clone()];
    if order == 0 {
        return out;
    }
    out.push(c.q().clone() / (c.a().clone() * c.gamma().clone()));
    for n in 1..order {
        let nn = Rational::from_usize(n);
        let nm1 = nn.clone() - one.clone();
        let a_n = (nm1.clone() + c.alpha().clone()) * (nm1.clone() + c.beta().clone());
        let b_n = nn.clone()
            * ((nm1 + c.gamma().clone()) * (one.clone() + c.a().clone())
                + c.a().clone() * c.delta().clone()
                + c.epsilon().clone());
        let c_n = (nn.clone() + one.clone()) * (nn + c.gamma().clone()) * c.a().clone();
        let next = ((b_n + c.q().clone()) * out[n].clone() - a_n * out[n - 1].clone()) / c_n;
        out.push(next);
    }
    out
}

/// `(beta)_n / n!` for `n <= order`.
pub fn binomial_series(beta: &Rational, order: usize) -> Vec<Rational> {
    (0..=order)
        .map(|n| pochhammer(beta, n) / factorial::<Rational>(n))
        .collect()
}

/// Orthonormal polynomials of the Jacobi matrix with
/// `b_n = lambda_n + mu_n + (1 - k^2) delta n`, `a_n^2 = lambda_n mu_{n+1}`
/// at rational `x`, from the monic recurrence
/// `Q_{n+1} = (x - b_n) Q_n - a_{n-1}^2 Q_{n-1}` in exact arithmetic and
/// `P_n = Q_n / (a_0 ... a_{n-1})`.
pub fn exact_polynomials(d: &Draw, x: &Rational, len: usize) -> Vec<f64> {
    let k2 = d.k.clone() * d.k.clone();
    let one = Rational::from_i64(1);
    let nth = |n: usize| Rational::from_usize(n);
    let lambda = |n: usize| k2.clone() * (nth(n) + d.alpha.clone()) * (nth(n) + d.beta.clone());
    let mu = |n: usize| nth(n) * (nth(n) + d.gamma.clone() - one.clone());
    let b = |n: usize| lambda(n) + mu(n) + (one.clone() - k2.clone()) * d.delta.clone() * nth(n);
    let a2 = |n: usize| lambda(n) * mu(n + 1);
    let mut monic = vec![one.clone()];
    let mut norm2 = vec![one.clone()];
    for n in 1..len {
        let m = n - 1;
        let mut next = (x.clone() - b(m)) * monic[m].clone();
        if m > 0 {
            next = next - a2(m - 1) * monic[m - 1].clone();
        }
        monic.push(next);
        norm2.push(norm2[m].clone() * a2(m));
    }
    monic
        .iter()
        .zip(&norm2)
        .map(|(p, n2)| to_f64(p) / to_f64(n2).sqrt())
        .collect()
}

/// Nearest double, also for values far outside the `i64` range.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_complex().re
}

pub fn to_float(v: &HeunValentParams<Rational>) -> HeunValentParams<Complex64> {
    v.to_float().unwrap()
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
