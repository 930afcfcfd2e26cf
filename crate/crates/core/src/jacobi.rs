//! Truncated Jacobi matrices built from the birth-death rates
//!
//! ```text
//! lambda_n = k^2 (n + alpha)(n + beta)
//! mu_n     = n (n + gamma - 1)
//! gamma_n  = (1 - k^2) delta n
//! a_n = sqrt(lambda_n mu_{n+1}),   b_n = lambda_n + mu_n + gamma_n
//! ```
//!
//! together with their strictly lower triangular right inverses, the diagonal
//! perturbation `J -> J + D` and the orthonormal polynomials `P_n(x)`.
//! Everything here is `f64`.

use crate::error::{HeunError, Result};
use crate::params::HeunValentParams;
use crate::scalar::{Complex64, Scalar};
use crate::table::{CoefficientTable, Method, ParamSet};

const IMAG_TOLERANCE: f64 = 1e-14;

fn real_part(name: &'static str, value: Complex64) -> Result<f64> {
    if value.im.abs() > IMAG_TOLERANCE * value.re.abs().max(1.0) {
        return Err(HeunError::Precondition(format!("{name} must be real, got {value}")));
    }
    Ok(value.re)
}

/// The rates `lambda_n, mu_n, gamma_n` of a Heun parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirthDeathRates {
    k: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
}

impl BirthDeathRates {
    pub fn new(k: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let all = [k, alpha, beta, gamma, delta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(HeunError::Precondition("rates need finite parameters".to_string()));
        }
        if !(k > 0.0 && k < 1.0) {
            return Err(HeunError::Precondition(format!("need 0 < k < 1, got k = {k}")));
        }
        for (name, x) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if x <= 0.0 {
                return Err(HeunError::Precondition(format!("need {name} > 0, got {x}")));
            }
        }
        Ok(BirthDeathRates {
            k,
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lambda(&self, n: usize) -> f64 {
        let n = n as f64;
        self.k * self.k * (n + self.alpha) * (n + self.beta)
    }

    pub fn mu(&self, n: usize) -> f64 {
        let n = n as f64;
        n * (n + self.gamma - 1.0)
    }

    pub fn gamma_n(&self, n: usize) -> f64 {
        (1.0 - self.k * self.k) * self.delta * n as f64
    }

    /// The same rates with `delta = 0`.
    pub fn without_drift(&self) -> Self {
        BirthDeathRates { delta: 0.0, ..*self }
    }

    /// `D = diag(gamma_0, ..., gamma_{len-1})`, the gap between the rates and
    /// their drift-free version.
    pub fn drift(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.gamma_n(n)).collect()
    }
}

/// Rates of a parameter record. Needs `alpha, beta, gamma > 0` and real `delta`.
pub fn rates_from_params<S: Scalar>(v: &HeunValentParams<S>) -> Result<BirthDeathRates> {
    BirthDeathRates::new(
        real_part("k", v.k().to_complex())?,
        real_part("alpha", v.alpha().to_complex())?,
        real_part("beta", v.beta().to_complex())?,
        real_part("gamma", v.gamma().to_complex())?,
        real_part("delta", v.delta().to_complex())?,
    )
}

/// Leading `size x size` block of a symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(HeunError::Precondition(format!(
                "a size {} Jacobi block needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                offdiag.len()
            )));
        }
        if let Some(n) = offdiag.iter().position(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(HeunError::Precondition(format!("a_{n} = {} is not positive", offdiag[n])));
        }
        if diag.iter().any(|b| !b.is_finite()) {
            return Err(HeunError::Precondition("diagonal must be finite".to_string()));
        }
        Ok(JacobiMatrix { diag, offdiag })
    }

    pub fn from_rates(rates: &BirthDeathRates, size: usize) -> Result<Self> {
        let diag = (0..size)
            .map(|n| rates.lambda(n) + rates.mu(n) + rates.gamma_n(n))
            .collect();
        let offdiag = (0..size.saturating_sub(1))
            .map(|n| (rates.lambda(n) * rates.mu(n + 1)).sqrt())
            .collect();
        JacobiMatrix::new(diag, offdiag)
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `J + diag(d)`.
    pub fn perturbed(&self, d: &[f64]) -> Result<Self> {
        if d.len() < self.size() {
            return Err(HeunError::Precondition("diagonal perturbation too short".to_string()));
        }
        let diag = self.diag.iter().zip(d).map(|(b, x)| b + x).collect();
        JacobiMatrix::new(diag, self.offdiag.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Row `i` of `J x`, where `x` may be shorter than the matrix (missing
    /// entries count as zero).
    fn row_times(&self, i: usize, x: impl Fn(usize) -> f64) -> f64 {
        let mut acc = self.diag[i] * x(i);
        if i > 0 {
            acc += self.offdiag[i - 1] * x(i - 1);
        }
        if i + 1 < self.size() {
            acc += self.offdiag[i] * x(i + 1);
        }
        acc
    }

    /// `P_0(x), ..., P_{len-1}(x)` from `P_0 = 1` and
    /// `a_n P_{n+1} = (x - b_n) P_n - a_{n-1} P_{n-1}`.
    pub fn polynomials(&self, x: f64, len: usize) -> Result<Vec<f64>> {
        if len > self.size() {
            return Err(HeunError::Precondition(format!(
                "need a Jacobi block of size {len}, have {}",
                self.size()
            )));
        }
        let mut p = Vec::with_capacity(len);
        for n in 0..len {
            let next = match n {
                0 => 1.0,
                1 => (x - self.diag[0]) * p[0] / self.offdiag[0],
                _ => {
                    let m = n - 1;
                    ((x - self.diag[m]) * p[m] - self.offdiag[m - 1] * p[m - 1]) / self.offdiag[m]
                }
            };
            p.push(next);
        }
        Ok(p)
    }
}

/// Strictly lower triangular `dim x dim` matrix with `dim = order + margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularKernel {
    order: usize,
    margin: usize,
    entries: Vec<f64>,
}

impl TriangularKernel {
    fn zeros(order: usize, margin: usize) -> Self {
        let dim = order + margin;
        TriangularKernel {
            order,
            margin,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn dim(&self) -> usize {
        self.order + self.margin
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        if m <= n || m >= self.dim() {
            return 0.0;
        }
        self.entries[m * self.dim() + n]
    }

    fn set(&mut self, m: usize, n: usize, x: f64) {
        debug_assert!(m > n);
        let dim = self.dim();
        self.entries[m * dim + n] = x;
    }

    /// `(m, n, G_{m,n})` for `0 <= n < m < order`.
    pub fn reported(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.order).flat_map(move |m| (0..m).map(move |n| (m, n, self.get(m, n))))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `G x` with the lower-triangular structure exploited.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|m| (0..m).map(|n| self.get(m, n) * x[n]).sum())
            .collect()
    }

    /// `G diag(d) K` for another kernel `K` of the same shape.
    fn times_diag_times(&self, d: &[f64], other: &TriangularKernel) -> TriangularKernel {
        let mut out = TriangularKernel::zeros(self.order, self.margin);
        let dim = self.dim();
        for m in 0..dim {
            for c in 0..m {
                let s: f64 = (c + 1..m).map(|l| self.get(m, l) * d[l] * other.get(l, c)).sum();
                out.set(m, c, s);
            }
        }
        out
    }

    fn add_assign(&mut self, other: &TriangularKernel) {
        for (x, y) in self.entries.iter_mut().zip(&other.entries) {
            *x += y;
        }
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| *x == 0.0)
    }
}

/// `P_n(0) = (-1)^n sqrt(lambda_0 ... lambda_{n-1} / (mu_1 ... mu_n))` for
/// `n < len`. Only defined for drift-free rates.
pub fn kernel_vector_p0(rates: &BirthDeathRates, len: usize) -> Result<Vec<f64>> {
    if rates.delta() != 0.0 {
        return Err(HeunError::Precondition(format!(
            "kernel vector needs gamma_n = 0, got delta = {}",
            rates.delta()
        )));
    }
    let mut p = Vec::with_capacity(len);
    let mut current = 1.0;
    for n in 0..len {
        if n > 0 {
            current = -current * (rates.lambda(n - 1) / rates.mu(n)).sqrt();
        }
        p.push(current);
    }
    Ok(p)
}

fn check_dims(j: &JacobiMatrix, order: usize, margin: usize) -> Result<usize> {
    let dim = order + margin;
    if j.size() < dim {
        return Err(HeunError::Precondition(format!(
            "Jacobi block of size {} is smaller than order + margin = {dim}",
            j.size()
        )));
    }
    Ok(dim)
}

/// `G_{m,n} = P_m(0) P_n(0) sum_{j=n}^{m-1} 1 / (a_j P_j(0) P_{j+1}(0))` for `m > n`.
pub fn green_function(
    j: &JacobiMatrix,
    p0: &[f64],
    order: usize,
    margin: usize,
) -> Result<TriangularKernel> {
    let dim = check_dims(j, order, margin)?;
    if p0.len() < dim {
        return Err(HeunError::Precondition(format!(
            "kernel vector has {} entries, need {dim}",
            p0.len()
        )));
    }
    if let Some(n) = p0[..dim].iter().position(|p| *p == 0.0 || !p.is_finite()) {
        return Err(HeunError::Numerical(format!("kernel entry P_{n}(0) = {} is unusable", p0[n])));
    }
    let mut g = TriangularKernel::zeros(order, margin);
    for n in 0..dim {
        let mut sum = 0.0;
        for m in n + 1..dim {
            sum += 1.0 / (j.offdiag[m - 1] * p0[m - 1] * p0[m]);
            g.set(m, n, sum * p0[m] * p0[n]);
        }
    }
    Ok(g)
}

/// The right inverse of `J` by forward substitution, column by column:
/// `G_{n+1,n} = 1/a_n`, then row `i` of `J G = I` fixes `G_{i+1,n}`.
pub fn green_direct_solve(j: &JacobiMatrix, order: usize, margin: usize) -> Result<TriangularKernel> {
    let dim = check_dims(j, order, margin)?;
    let mut g = TriangularKernel::zeros(order, margin);
    for c in 0..dim {
        for i in c..dim - 1 {
            let mut rhs = if i == c { 1.0 } else { 0.0 };
            rhs -= j.diag[i] * g.get(i, c);
            if i > 0 {
                rhs -= j.offdiag[i - 1] * g.get(i - 1, c);
            }
            g.set(i + 1, c, rhs / j.offdiag[i]);
        }
    }
    Ok(g)
}

/// `G_{m,n}` for drift-free Heun rates, straight from the product formula
///
/// ```text
/// (-1)^{m+n+1} k^{m+n-2} sqrt((alpha)_m (alpha)_n (beta)_m (beta)_n / (m! n! (gamma)_m (gamma)_n))
///     * sum_{j=n}^{m-1} k^{-2j} j! (gamma)_j / ((alpha)_{j+1} (beta)_{j+1})
/// ```
pub fn green_delta0_closed_form<S: Scalar>(v: &HeunValentParams<S>, m: usize, n: usize) -> Result<f64> {
    let r = rates_from_params(v)?;
    if r.delta() != 0.0 {
        return Err(HeunError::Precondition("closed-form Green function needs delta = 0".to_string()));
    }
    if m <= n {
        return Ok(0.0);
    }
    let (k, a, b, c) = (r.k, r.alpha, r.beta, r.gamma);
    let poch = |x: f64, n: usize| (0..n).fold(1.0, |acc, i| acc * (x + i as f64));
    let fact = |n: usize| poch(1.0, n);
    let sign = if (m + n + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let prefactor = sign
        * k.powi(m as i32 + n as i32 - 2)
        * (poch(a, m) * poch(a, n) * poch(b, m) * poch(b, n)
            / (fact(m) * fact(n) * poch(c, m) * poch(c, n)))
        .sqrt();
    let sum: f64 = (n..m)
        .map(|j| k.powi(-2 * j as i32) * fact(j) * poch(c, j) / (poch(a, j + 1) * poch(b, j + 1)))
        .sum();
    Ok(prefactor * sum)
}

/// `(I + G D)^{-1} G = sum_k (-G D)^k G`, summed until the terms vanish, which
/// happens after at most `dim` steps.
pub fn perturbed_green(g: &TriangularKernel, d: &[f64]) -> Result<TriangularKernel> {
    check_diag(g, d)?;
    let neg: Vec<f64> = d.iter().map(|x| -x).collect();
    let mut total = g.clone();
    let mut term = g.clone();
    for _ in 0..g.dim() {
        term = g.times_diag_times(&neg, &term);
        if term.is_zero() {
            break;
        }
        total.add_assign(&term);
    }
    Ok(total)
}

fn check_diag(g: &TriangularKernel, d: &[f64]) -> Result<()> {
    if d.len() < g.dim() {
        return Err(HeunError::Precondition(format!(
            "diagonal has {} entries, kernel needs {}",
            d.len(),
            g.dim()
        )));
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(HeunError::Precondition("diagonal must be finite".to_string()));
    }
    Ok(())
}

/// `sum_k (G diag(s))^k v`, truncated to `dim` entries.
fn neumann(g: &TriangularKernel, s: &[f64], v: &[f64]) -> Vec<f64> {
    let dim = g.dim();
    let mut total = v[..dim].to_vec();
    let mut term = total.clone();
    for _ in 0..dim {
        let scaled: Vec<f64> = term.iter().zip(s).map(|(t, x)| t * x).collect();
        term = g.apply(&scaled);
        if term.iter().all(|x| *x == 0.0) {
            break;
        }
        for (acc, t) in total.iter_mut().zip(&term) {
            *acc += t;
        }
    }
    total
}

/// `(I + G D)^{-1} P(0)`: the kernel vector of `J + D`.
pub fn perturbed_kernel(g: &TriangularKernel, d: &[f64], p0: &[f64]) -> Result<Vec<f64>> {
    eval_polynomials(g, d, p0, 0.0)
}

/// `(I - G (x I - D))^{-1} P(0)`, the orthonormal polynomials of `J + D` at `x`.
pub fn eval_polynomials(g: &TriangularKernel, d: &[f64], p0: &[f64], x: f64) -> Result<Vec<f64>> {
    check_diag(g, d)?;
    if p0.len() < g.dim() {
        return Err(HeunError::Precondition(format!(
            "kernel vector has {} entries, need {}",
            p0.len(),
            g.dim()
        )));
    }
    let s: Vec<f64> = d[..g.dim()].iter().map(|dn| x - dn).collect();
    Ok(neumann(g, &s, p0))
}

/// `max |(J G - I)_{i,c}|` over `i, c < order`, divided by
/// `1 + max|J| max|G|`.
pub fn right_inverse_residual(j: &JacobiMatrix, g: &TriangularKernel) -> f64 {
    let block = g.order().min(j.size());
    let mut worst: f64 = 0.0;
    for c in 0..block {
        for i in 0..block {
            let id = if i == c { 1.0 } else { 0.0 };
            worst = worst.max((j.row_times(i, |r| g.get(r, c)) - id).abs());
        }
    }
    worst / (1.0 + j.max_abs() * g.max_abs())
}

/// `max |(J p)_i|` over `i < block`, divided by `1 + max|J| max|p|`.
pub fn kernel_residual(j: &JacobiMatrix, p: &[f64], block: usize) -> f64 {
    let block = block.min(j.size());
    let worst = (0..block)
        .map(|i| j.row_times(i, |r| p.get(r).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max);
    let scale = p.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    worst / (1.0 + j.max_abs() * scale)
}

/// `max |x_n - y_n| / max(|x_n|, |y_n|)` over the shared prefix; pairs that are
/// both zero count as equal.
pub fn max_relative_difference(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale == 0.0 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Everything built for one Heun parameter set: drift-free `J` and `G`, the
/// drift `D`, and the kernel vector `P(0)`.
#[derive(Debug, Clone)]
pub struct GreenSetup {
    pub rates: BirthDeathRates,
    pub jacobi: JacobiMatrix,
    pub perturbed_jacobi: JacobiMatrix,
    pub green: TriangularKernel,
    pub drift: Vec<f64>,
    pub p0: Vec<f64>,
}

impl GreenSetup {
    pub fn new<S: Scalar>(v: &HeunValentParams<S>, order: usize, margin: usize) -> Result<Self> {
        let rates = rates_from_params(v)?;
        let free = rates.without_drift();
        let dim = order + margin;
        let jacobi = JacobiMatrix::from_rates(&free, dim)?;
        let p0 = kernel_vector_p0(&free, dim)?;
        let green = green_function(&jacobi, &p0, order, margin)?;
        let drift = rates.drift(dim);
        let perturbed_jacobi = jacobi.perturbed(&drift)?;
        Ok(GreenSetup {
            rates,
            jacobi,
            perturbed_jacobi,
            green,
            drift,
            p0,
        })
    }

    pub fn perturbed_green(&self) -> Result<TriangularKernel> {
        perturbed_green(&self.green, &self.drift)
    }

    pub fn eval_polynomials(&self, x: f64) -> Result<Vec<f64>> {
        eval_polynomials(&self.green, &self.drift, &self.p0, x)
    }
}

/// `c_n = P_n^{(delta=0)}(0) * P̌_n(s + k^2 alpha beta)` for `n <= order`.
///
/// The polynomial argument is the general-convention `w`, so beta-plus-one
/// records are converted first.
pub fn heun_coefficients_via_green<S: Scalar>(
    v: &HeunValentParams<S>,
    order: usize,
) -> Result<CoefficientTable<Complex64>> {
    let vf = v.to_float()?;
    let x = real_part("w", vf.w_general())?;
    let setup = GreenSetup::new(&vf, order + 1, 0)?;
    let p = setup.eval_polynomials(x)?;
    let values: Vec<Complex64> = setup
        .p0
        .iter()
        .zip(&p)
        .map(|(a, b)| Complex64::new(a * b, 0.0))
        .collect();
    if let Some(n) = values.iter().position(|c| !c.re.is_finite()) {
        return Err(HeunError::Numerical(format!("Green-path coefficient c_{n} overflowed")));
    }
    Ok(CoefficientTable::new(ParamSet::Valent(vf), values, Method::GreenPath))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::WConvention;
    use crate::recurrence::recurrence_coefficients_valent;

    fn params(delta: f64, w: f64) -> HeunValentParams<Complex64> {
        let c = |x: f64| Complex64::new(x, 0.0);
        HeunValentParams::general(c(0.5), c(1.0), c(2.0), c(3.0), c(delta), c(w)).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn rates_examples() {
        let r = rates_from_params(&params(0.0, 1.0)).unwrap();
        assert_eq!(r.lambda(0), 0.5);
        assert_eq!(r.mu(1), 3.0);
        assert_eq!(r.gamma_n(1), 0.0);
        assert_eq!(r.mu(0), 0.0);
        let r = rates_from_params(&params(2.0, 1.0)).unwrap();
        assert_eq!(r.gamma_n(2), 3.0);
    }

    #[test]
    fn rates_need_positive_parameters() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let v = HeunValentParams::general(c(0.5), c(-1.0), c(2.0), c(3.0), c(0.0), c(1.0)).unwrap();
        assert!(matches!(rates_from_params(&v), Err(HeunError::Precondition(_))));
        let v = HeunValentParams::general(c(0.5), c(1.0), c(2.0), c(3.0), Complex64::new(0.0, 1.0), c(1.0))
            .unwrap();
        assert!(matches!(rates_from_params(&v), Err(HeunError::Precondition(_))));
    }

    #[test]
    fn kernel_vector_examples() {
        let r = rates_from_params(&params(0.0, 1.0)).unwrap();
        let p = kernel_vector_p0(&r, 3).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(close(p[1], -(1.0f64 / 6.0).sqrt(), 1e-15));
        assert!((p[1] + 0.40824829).abs() < 5e-9);
        assert!(close(p[2], 0.25 * 0.5f64.sqrt(), 1e-15));
        assert!((p[2] - 0.17677670).abs() < 5e-9);
        let drifted = rates_from_params(&params(1.0, 1.0)).unwrap();
        assert!(kernel_vector_p0(&drifted, 3).is_err());
    }

    #[test]
    fn kernel_vector_matches_pochhammer_form_and_recurrence() {
        let r = rates_from_params(&params(0.0, 1.0)).unwrap();
        let p = kernel_vector_p0(&r, 20).unwrap();
        let poch = |x: f64, n: usize| (0..n).fold(1.0, |acc, i| acc * (x + i as f64));
        for (n, pn) in p.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expected = sign * 0.5f64.powi(n as i32) * (poch(1.0, n) * poch(2.0, n) / (poch(1.0, n) * poch(3.0, n))).sqrt();
            assert!(close(*pn, expected, 1e-13), "n = {n}");
        }
        let rec = exact_polynomials(0, 0, 20);
        assert!(max_relative_difference(&p, &rec) < 1e-13);
    }

    // P_n(x) for the reference rates (k = 1/2, alpha = 1, beta = 2, gamma = 3) with
    // drift 3n/4 * delta, from the monic recurrence
    // Q_{n+1} = (x - b_n) Q_n - a_{n-1}^2 Q_{n-1} in exact arithmetic and
    // P_n = Q_n / (a_0 ... a_{n-1}).
    fn exact_polynomials(delta: i64, x: i64, len: usize) -> Vec<f64> {
        use crate::scalar::Rational;
        let r = |n: i64, d: i64| Rational::from_ratio(n, d);
        let lambda = |n: usize| r(1, 4) * Rational::from_usize(n + 1) * Rational::from_usize(n + 2);
        let mu = |n: usize| Rational::from_usize(n) * Rational::from_usize(n + 2);
        let b = |n: usize| lambda(n) + mu(n) + r(3 * delta, 4) * Rational::from_usize(n);
        let a2 = |n: usize| lambda(n) * mu(n + 1);
        let xr = Rational::from_i64(x);
        let mut q = vec![Rational::from_i64(1)];
        let mut norm = vec![Rational::from_i64(1)];
        for n in 1..len {
            let m = n - 1;
            let mut next = (xr.clone() - b(m)) * q[m].clone();
            if m > 0 {
                next = next - a2(m - 1) * q[m - 1].clone();
            }
            q.push(next);
            norm.push(norm[m].clone() * a2(m));
        }
        q.iter()
            .zip(&norm)
            .map(|(qn, nn)| qn.to_complex().re / nn.to_complex().re.sqrt())
            .collect()
    }

    #[test]
    fn green_examples() {
        let s = GreenSetup::new(&params(0.0, 1.0), 6, 2).unwrap();
        let g = &s.green;
        for m in 0..g.dim() {
            for n in m..g.dim() {
                assert_eq!(g.get(m, n), 0.0);
            }
        }
        assert!(close(g.get(1, 0), 1.0 / s.jacobi.offdiag()[0], 1e-15));
        assert!(close(g.get(1, 0), 1.0 / (0.5 * 6f64.sqrt()), 1e-14));
        assert!(close(g.get(1, 0), 0.81649658, 1e-8));
        // hand evaluation of the product formula at (2, 0)
        assert!(close(g.get(2, 0), -1.5 / 2f64.sqrt(), 1e-13));
        let v = params(0.0, 1.0);
        assert!(close(green_delta0_closed_form(&v, 1, 0).unwrap(), 0.81649658, 1e-8));
        assert!(close(green_delta0_closed_form(&v, 2, 0).unwrap(), -1.5 / 2f64.sqrt(), 1e-13));
        assert_eq!(green_delta0_closed_form(&v, 0, 0).unwrap(), 0.0);
        assert!(green_delta0_closed_form(&params(1.0, 1.0), 1, 0).is_err());
    }

    #[test]
    fn green_constructions_agree() {
        let v = params(0.0, 1.0);
        let s = GreenSetup::new(&v, 40, 2).unwrap();
        let direct = green_direct_solve(&s.jacobi, 40, 2).unwrap();
        for m in 0..42 {
            for n in 0..m {
                let (a, b) = (s.green.get(m, n), direct.get(m, n));
                assert!(close(a, b, 1e-10), "({m},{n}): {a} vs {b}");
                let c = green_delta0_closed_form(&v, m, n).unwrap();
                assert!(close(a, c, 1e-10), "({m},{n}): {a} vs {c}");
            }
        }
        assert!(right_inverse_residual(&s.jacobi, &s.green) < 1e-10);
        assert!(right_inverse_residual(&s.jacobi, &direct) < 1e-10);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let s = GreenSetup::new(&params(0.0, 1.0), 10, 2).unwrap();
        let zero = vec![0.0; 12];
        assert_eq!(perturbed_green(&s.green, &zero).unwrap(), s.green);
        assert_eq!(perturbed_kernel(&s.green, &zero, &s.p0).unwrap(), s.p0);
        assert_eq!(eval_polynomials(&s.green, &zero, &s.p0, 0.0).unwrap(), s.p0);
    }

    #[test]
    fn perturbation_matches_direct_green_of_shifted_matrix() {
        let s = GreenSetup::new(&params(1.0, 1.0), 40, 2).unwrap();
        let checked = s.perturbed_green().unwrap();
        assert_eq!(checked.get(1, 0), s.green.get(1, 0));
        let direct = green_direct_solve(&s.perturbed_jacobi, 40, 2).unwrap();
        for m in 0..42 {
            for n in 0..m {
                assert!(close(checked.get(m, n), direct.get(m, n), 1e-10), "({m},{n})");
            }
        }
        assert!(right_inverse_residual(&s.perturbed_jacobi, &checked) < 1e-10);
    }

    #[test]
    fn perturbed_kernel_solves_shifted_recurrence() {
        let s = GreenSetup::new(&params(1.0, 1.0), 40, 2).unwrap();
        let p = perturbed_kernel(&s.green, &s.drift, &s.p0).unwrap();
        assert_eq!(p[0], 1.0);
        assert!(kernel_residual(&s.perturbed_jacobi, &p, 40) < 1e-10);
        assert!(max_relative_difference(&p[..30], &exact_polynomials(1, 0, 30)) < 1e-9);
    }

    #[test]
    fn first_polynomial_step() {
        let s = GreenSetup::new(&params(0.0, 1.0), 2, 0).unwrap();
        for x in [-2.0, 0.3, 4.0] {
            let p = s.eval_polynomials(x).unwrap();
            let expected = (x - s.jacobi.diag()[0]) / s.jacobi.offdiag()[0];
            assert!(close(p[1], expected, 1e-14));
        }
    }

    #[test]
    fn polynomials_match_recurrence() {
        for delta in [0, 1, -1] {
            let s = GreenSetup::new(&params(delta as f64, 1.0), 40, 2).unwrap();
            for x in -5..=5 {
                let geo = s.eval_polynomials(x as f64).unwrap();
                let rec = exact_polynomials(delta, x, 30);
                let err = max_relative_difference(&geo[..30], &rec);
                assert!(err < 1e-9, "delta={delta} x={x}: {err}");
            }
        }
    }

    #[test]
    fn green_coefficients_match_recurrence() {
        let t = heun_coefficients_via_green(&params(0.0, 1.0), 25).unwrap();
        assert_eq!(t.values()[0], Complex64::new(1.0, 0.0));
        assert!(close(t.values()[2].re, -13.0 / 96.0, 1e-13));
        assert_eq!(t.method(), Method::GreenPath);
        for delta in [0.0, 1.0] {
            let v = params(delta, 1.0);
            let g = heun_coefficients_via_green(&v, 25).unwrap();
            let r = recurrence_coefficients_valent(&v, 25).unwrap();
            let gr: Vec<f64> = g.values().iter().map(|c| c.re).collect();
            let rr: Vec<f64> = r.values().iter().map(|c| c.re).collect();
            assert!(max_relative_difference(&gr, &rr) < 1e-9, "delta = {delta}");
        }
    }

    #[test]
    fn green_coefficients_accept_beta_plus_one_records() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let v = HeunValentParams::beta_plus_one(c(0.4), c(1.5), c(0.7), c(2.5), c(0.8)).unwrap();
        assert_eq!(v.w_convention(), WConvention::BetaPlusOneW);
        let g = heun_coefficients_via_green(&v, 20).unwrap();
        let r = recurrence_coefficients_valent(&v, 20).unwrap();
        let gr: Vec<f64> = g.values().iter().map(|c| c.re).collect();
        let rr: Vec<f64> = r.values().iter().map(|c| c.re).collect();
        assert!(max_relative_difference(&gr, &rr) < 1e-9);
    }

    #[test]
    fn jacobi_validation() {
        assert!(JacobiMatrix::new(vec![1.0, 2.0], vec![0.0]).is_err());
        assert!(JacobiMatrix::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(JacobiMatrix::new(vec![1.0, 2.0], vec![0.5]).is_ok());
        let j = JacobiMatrix::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(green_direct_solve(&j, 3, 0).is_err());
    }
}
