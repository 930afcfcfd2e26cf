//! Parametrizations of Heun's equation.
//!
//! [`HeunCanonicalParams`] is the seven-parameter canonical form
//! `(alpha, beta, gamma, delta, epsilon, a, q)`. [`HeunValentParams`] is the
//! `(k, w)` form with `a = 1/k^2` and `q = -s/k^2`, where the shift `s` depends
//! on the [`WConvention`]:
//!
//! * [`WConvention::GeneralW`]: `s = w - k^2 alpha beta`, so `q = -w/k^2 + alpha beta`;
//! * [`WConvention::BetaPlusOneW`]: `s = w - beta gamma` (requires `delta = beta + 1`),
//!   so `q = -(w - beta gamma)/k^2`.
//!
//! The same letter `w` means different things in the two conventions, hence the
//! explicit tag.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{HeunError, Result};
use crate::scalar::{Complex64, Scalar};

const FLOAT_IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WConvention {
    GeneralW,
    BetaPlusOneW,
}

impl WConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            WConvention::GeneralW => "general",
            WConvention::BetaPlusOneW => "beta-plus-one",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "general" | "general-w" => Ok(WConvention::GeneralW),
            "beta-plus-one" | "beta-plus-one-w" => Ok(WConvention::BetaPlusOneW),
            other => Err(HeunError::Parse {
                input: other.to_string(),
                reason: "expected `general` or `beta-plus-one`".to_string(),
            }),
        }
    }
}

/// `alpha + beta + 1 - gamma - delta`, the value forced by the Fuchs condition.
pub fn epsilon_of<S: Scalar>(alpha: &S, beta: &S, gamma: &S, delta: &S) -> S {
    alpha.clone() + beta.clone() + S::one() - gamma.clone() - delta.clone()
}

fn check_finite<S: Scalar>(name: &'static str, x: &S) -> Result<()> {
    let c = x.to_complex();
    if S::MODE == crate::scalar::ArithmeticMode::Float && !(c.re.is_finite() && c.im.is_finite()) {
        return Err(HeunError::invalid(name, "must be finite"));
    }
    Ok(())
}

fn check_gamma<S: Scalar>(gamma: &S) -> Result<()> {
    if gamma.is_nonpositive_integer() {
        return Err(HeunError::invalid(
            "gamma",
            format!("{} is (or is too close to) a non-positive integer", gamma.render()),
        ));
    }
    Ok(())
}

fn modulus_exceeds_one<S: Scalar>(a: &S) -> bool {
    let one = S::one();
    match (a.cmp_real(&one), a.cmp_real(&-one)) {
        (Some(Ordering::Greater), _) | (_, Some(Ordering::Less)) => true,
        (Some(_), Some(_)) => false,
        _ => a.modulus() > 1.0,
    }
}

/// Canonical parameters `(alpha, beta, gamma, delta, epsilon, a, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunCanonicalParams<S> {
    alpha: S,
    beta: S,
    gamma: S,
    delta: S,
    epsilon: S,
    a: S,
    q: S,
}

impl<S: Scalar> HeunCanonicalParams<S> {
    /// Builds a record with all seven parameters given explicitly.
    pub fn new(alpha: S, beta: S, gamma: S, delta: S, epsilon: S, a: S, q: S) -> Result<Self> {
        let p = HeunCanonicalParams {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            a,
            q,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a record with `epsilon` filled in from the Fuchs condition.
    pub fn with_fuchs(alpha: S, beta: S, gamma: S, delta: S, a: S, q: S) -> Result<Self> {
        let epsilon = epsilon_of(&alpha, &beta, &gamma, &delta);
        Self::new(alpha, beta, gamma, delta, epsilon, a, q)
    }

    fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("epsilon", &self.epsilon),
            ("a", &self.a),
            ("q", &self.q),
        ] {
            check_finite(name, x)?;
        }
        let lhs = self.gamma.clone() + self.delta.clone() + self.epsilon.clone();
        let rhs = self.alpha.clone() + self.beta.clone() + S::one();
        if !lhs.approx_eq(&rhs, FLOAT_IDENTITY_TOL) {
            return Err(HeunError::invalid(
                "epsilon",
                "Fuchs condition gamma + delta + epsilon = alpha + beta + 1 fails",
            ));
        }
        check_gamma(&self.gamma)?;
        if !modulus_exceeds_one(&self.a) {
            return Err(HeunError::invalid("a", "|a| > 1 is required"));
        }
        Ok(())
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }
    pub fn beta(&self) -> &S {
        &self.beta
    }
    pub fn gamma(&self) -> &S {
        &self.gamma
    }
    pub fn delta(&self) -> &S {
        &self.delta
    }
    pub fn epsilon(&self) -> &S {
        &self.epsilon
    }
    pub fn a(&self) -> &S {
        &self.a
    }
    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.render(),
            "beta": self.beta.render(),
            "gamma": self.gamma.render(),
            "delta": self.delta.render(),
            "epsilon": self.epsilon.render(),
            "a": self.a.render(),
            "q": self.q.render(),
        })
    }
}

/// The `(k, w)` parametrization with `0 < k < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeunValentParams<S> {
    k: S,
    alpha: S,
    beta: S,
    gamma: S,
    delta: S,
    w: S,
    w_convention: WConvention,
}

impl<S: Scalar> HeunValentParams<S> {
    pub fn new(
        k: S,
        alpha: S,
        beta: S,
        gamma: S,
        delta: S,
        w: S,
        w_convention: WConvention,
    ) -> Result<Self> {
        let p = HeunValentParams {
            k,
            alpha,
            beta,
            gamma,
            delta,
            w,
            w_convention,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters in the [`WConvention::GeneralW`] convention.
    pub fn general(k: S, alpha: S, beta: S, gamma: S, delta: S, w: S) -> Result<Self> {
        Self::new(k, alpha, beta, gamma, delta, w, WConvention::GeneralW)
    }

    /// Parameters in the [`WConvention::BetaPlusOneW`] convention; `delta` is set
    /// to `beta + 1`.
    pub fn beta_plus_one(k: S, alpha: S, beta: S, gamma: S, w: S) -> Result<Self> {
        let delta = beta.clone() + S::one();
        Self::new(k, alpha, beta, gamma, delta, w, WConvention::BetaPlusOneW)
    }

    fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("k", &self.k),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("w", &self.w),
        ] {
            check_finite(name, x)?;
        }
        let k_ok = self.k.cmp_real(&S::zero()) == Some(Ordering::Greater)
            && self.k.cmp_real(&S::one()) == Some(Ordering::Less);
        if !k_ok {
            return Err(HeunError::invalid(
                "k",
                format!("must be real with 0 < k < 1, got {}", self.k.render()),
            ));
        }
        if self.w_convention == WConvention::BetaPlusOneW && !self.has_delta_beta_plus_one() {
            return Err(HeunError::invalid(
                "delta",
                "the beta-plus-one convention requires delta = beta + 1",
            ));
        }
        check_gamma(&self.gamma)
    }

    pub fn k(&self) -> &S {
        &self.k
    }
    pub fn alpha(&self) -> &S {
        &self.alpha
    }
    pub fn beta(&self) -> &S {
        &self.beta
    }
    pub fn gamma(&self) -> &S {
        &self.gamma
    }
    pub fn delta(&self) -> &S {
        &self.delta
    }
    pub fn w(&self) -> &S {
        &self.w
    }
    pub fn w_convention(&self) -> WConvention {
        self.w_convention
    }

    pub fn k2(&self) -> S {
        self.k.clone() * self.k.clone()
    }

    pub fn epsilon(&self) -> S {
        epsilon_of(&self.alpha, &self.beta, &self.gamma, &self.delta)
    }

    pub fn has_delta_zero(&self) -> bool {
        self.delta.approx_eq(&S::zero(), FLOAT_IDENTITY_TOL)
    }

    pub fn has_delta_beta_plus_one(&self) -> bool {
        self.delta
            .approx_eq(&(self.beta.clone() + S::one()), FLOAT_IDENTITY_TOL)
    }

    /// The shift `s = -q k^2` shared by both conventions.
    pub fn s(&self) -> S {
        match self.w_convention {
            WConvention::GeneralW => {
                self.w.clone() - self.k2() * self.alpha.clone() * self.beta.clone()
            }
            WConvention::BetaPlusOneW => {
                self.w.clone() - self.beta.clone() * self.gamma.clone()
            }
        }
    }

    /// `w` as read in the general convention, `s + k^2 alpha beta`.
    pub fn w_general(&self) -> S {
        match self.w_convention {
            WConvention::GeneralW => self.w.clone(),
            WConvention::BetaPlusOneW => {
                self.s() + self.k2() * self.alpha.clone() * self.beta.clone()
            }
        }
    }

    /// `w` as read in the beta-plus-one convention, `s + beta gamma`.
    pub fn w_beta_plus_one(&self) -> S {
        match self.w_convention {
            WConvention::BetaPlusOneW => self.w.clone(),
            WConvention::GeneralW => self.s() + self.beta.clone() * self.gamma.clone(),
        }
    }

    /// The same equation expressed in another convention.
    pub fn with_convention(&self, convention: WConvention) -> Result<Self> {
        let w = match convention {
            WConvention::GeneralW => self.w_general(),
            WConvention::BetaPlusOneW => self.w_beta_plus_one(),
        };
        Self::new(
            self.k.clone(),
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.delta.clone(),
            w,
            convention,
        )
    }

    /// `a = 1/k^2`, `q = -s/k^2`, `epsilon` from the Fuchs condition.
    pub fn to_canonical(&self) -> Result<HeunCanonicalParams<S>> {
        let k2 = self.k2();
        let a = S::one()
            .checked_div(&k2)
            .ok_or_else(|| HeunError::invalid("k", "k must be nonzero"))?;
        let q = -(self.s() * a.clone());
        HeunCanonicalParams::with_fuchs(
            self.alpha.clone(),
            self.beta.clone(),
            self.gamma.clone(),
            self.delta.clone(),
            a,
            q,
        )
    }

    /// Inverse of [`to_canonical`](Self::to_canonical): `k = 1/sqrt(a)`.
    pub fn from_canonical(c: &HeunCanonicalParams<S>, convention: WConvention) -> Result<Self> {
        if c.a.cmp_real(&S::one()) != Some(Ordering::Greater) {
            return Err(HeunError::UnsupportedParameter {
                name: "a",
                reason: format!("the (k, w) form needs real a > 1, got {}", c.a.render()),
            });
        }
        let root = c.a.sqrt().ok_or_else(|| HeunError::UnsupportedParameter {
            name: "a",
            reason: format!("{} is not the square of a rational", c.a.render()),
        })?;
        let k = S::one()
            .checked_div(&root)
            .ok_or_else(|| HeunError::invalid("a", "a must be nonzero"))?;
        let k2 = k.clone() * k.clone();
        // s = -q k^2
        let s = -(c.q.clone() * k2.clone());
        let w = match convention {
            WConvention::GeneralW => s + k2 * c.alpha.clone() * c.beta.clone(),
            WConvention::BetaPlusOneW => s + c.beta.clone() * c.gamma.clone(),
        };
        Self::new(
            k,
            c.alpha.clone(),
            c.beta.clone(),
            c.gamma.clone(),
            c.delta.clone(),
            w,
            convention,
        )
    }

    /// The same record in float mode.
    pub fn to_float(&self) -> Result<HeunValentParams<Complex64>> {
        HeunValentParams::new(
            self.k.to_complex(),
            self.alpha.to_complex(),
            self.beta.to_complex(),
            self.gamma.to_complex(),
            self.delta.to_complex(),
            self.w.to_complex(),
            self.w_convention,
        )
    }

    /// JSON object with keys `k, alpha, beta, gamma, delta, w, w_convention`.
    /// Values are strings: `p/q` in exact mode, 17-digit decimals in float mode.
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k.render(),
            "alpha": self.alpha.render(),
            "beta": self.beta.render(),
            "gamma": self.gamma.render(),
            "delta": self.delta.render(),
            "w": self.w.render(),
            "w_convention": self.w_convention.as_str(),
        })
    }

    /// Reads the object produced by [`to_json`](Self::to_json). Numbers may also
    /// be given as JSON numbers; `delta` may be omitted in the beta-plus-one
    /// convention.
    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |reason: String| HeunError::Parse {
            input: value.to_string(),
            reason,
        };
        let obj = value
            .as_object()
            .ok_or_else(|| bad("expected a JSON object".to_string()))?;
        let field = |key: &str| -> Result<Option<S>> {
            match obj.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => S::parse(s).map(Some),
                Some(Value::Number(n)) => S::parse(&n.to_string()).map(Some),
                Some(other) => Err(bad(format!("`{key}` has unexpected value {other}"))),
            }
        };
        let required = |key: &'static str| -> Result<S> {
            field(key)?.ok_or_else(|| bad(format!("missing key `{key}`")))
        };
        let convention = match obj.get("w_convention") {
            None | Some(Value::Null) => WConvention::GeneralW,
            Some(Value::String(s)) => WConvention::parse(s)?,
            Some(other) => return Err(bad(format!("`w_convention` has unexpected value {other}"))),
        };
        let beta = required("beta")?;
        let delta = match (field("delta")?, convention) {
            (Some(d), _) => d,
            (None, WConvention::BetaPlusOneW) => beta.clone() + S::one(),
            (None, WConvention::GeneralW) => return Err(bad("missing key `delta`".to_string())),
        };
        Self::new(
            required("k")?,
            required("alpha")?,
            beta,
            required("gamma")?,
            delta,
            required("w")?,
            convention,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }
    fn z(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_of(&z(1), &z(2), &z(3), &z(0)), z(1));
        let (a, b) = (q(2, 7), q(-5, 3));
        assert_eq!(epsilon_of(&a, &b, &(a.clone() + b.clone() + z(1)), &z(0)), z(0));
        assert_eq!(epsilon_of(&q(1, 2), &q(1, 2), &z(1), &z(1)), z(0));
    }

    #[test]
    fn to_canonical_general() {
        let v = HeunValentParams::general(q(1, 2), z(1), z(2), z(3), z(0), z(1)).unwrap();
        let c = v.to_canonical().unwrap();
        assert_eq!(c.a(), &z(4));
        assert_eq!(c.q(), &z(-2));
        assert_eq!(c.epsilon(), &z(1));
    }

    #[test]
    fn to_canonical_beta_plus_one() {
        let v = HeunValentParams::new(q(1, 2), z(1), z(2), z(3), z(3), z(0), WConvention::BetaPlusOneW)
            .unwrap();
        let c = v.to_canonical().unwrap();
        assert_eq!(c.a(), &z(4));
        assert_eq!(c.q(), &z(24));
        assert_eq!(c.epsilon(), &z(-2));
    }

    #[test]
    fn vanishing_shift_gives_zero_accessory() {
        let k = q(1, 2);
        let (a, b) = (q(3, 7), q(11, 5));
        let w = k.clone() * k.clone() * a.clone() * b.clone();
        let v = HeunValentParams::general(k, a, b, q(5, 2), q(-1, 3), w).unwrap();
        assert_eq!(v.to_canonical().unwrap().q(), &z(0));
    }

    #[test]
    fn from_canonical_examples() {
        let c = HeunCanonicalParams::with_fuchs(z(1), z(2), z(3), z(0), z(4), z(-2)).unwrap();
        let v = HeunValentParams::from_canonical(&c, WConvention::GeneralW).unwrap();
        assert_eq!((v.k(), v.w()), (&q(1, 2), &z(1)));

        let c = HeunCanonicalParams::with_fuchs(z(0), z(5), z(3), z(0), z(4), z(0)).unwrap();
        let v = HeunValentParams::from_canonical(&c, WConvention::GeneralW).unwrap();
        assert_eq!(v.w(), &z(0));

        // q = -w/k^2 + alpha beta with alpha = beta = 1, w = 1, a = 9
        let c = HeunCanonicalParams::with_fuchs(z(1), z(1), z(3), z(0), z(9), z(-8)).unwrap();
        let v = HeunValentParams::from_canonical(&c, WConvention::GeneralW).unwrap();
        assert_eq!((v.k(), v.w()), (&q(1, 3), &z(1)));
    }

    #[test]
    fn from_canonical_rejects_non_square_and_non_real() {
        let c = HeunCanonicalParams::with_fuchs(z(1), z(2), z(3), z(0), z(2), z(1)).unwrap();
        assert!(matches!(
            HeunValentParams::from_canonical(&c, WConvention::GeneralW),
            Err(HeunError::UnsupportedParameter { name: "a", .. })
        ));
        let c = HeunCanonicalParams::with_fuchs(z(1), z(2), z(3), z(0), z(-4), z(1)).unwrap();
        assert!(HeunValentParams::from_canonical(&c, WConvention::GeneralW).is_err());
        let one = Complex64::new(1.0, 0.0);
        let c = HeunCanonicalParams::with_fuchs(one, one, one, one, Complex64::new(0.0, 2.0), one).unwrap();
        assert!(matches!(
            HeunValentParams::from_canonical(&c, WConvention::GeneralW),
            Err(HeunError::UnsupportedParameter { .. })
        ));
    }

    #[test]
    fn float_round_trip() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let v = HeunValentParams::new(
            c(0.37),
            Complex64::new(1.2, 0.3),
            c(2.5),
            c(0.7),
            Complex64::new(-0.4, 1.1),
            Complex64::new(0.9, -2.0),
            WConvention::GeneralW,
        )
        .unwrap();
        let back = HeunValentParams::from_canonical(&v.to_canonical().unwrap(), WConvention::GeneralW).unwrap();
        assert!(back.k().approx_eq(v.k(), 1e-13));
        assert!(back.w().approx_eq(v.w(), 1e-13));
    }

    #[test]
    fn invalid_records_are_rejected() {
        assert!(HeunValentParams::general(z(1), z(1), z(2), z(3), z(0), z(1)).is_err());
        assert!(HeunValentParams::general(z(0), z(1), z(2), z(3), z(0), z(1)).is_err());
        assert!(HeunValentParams::general(q(1, 2), z(1), z(2), z(-2), z(0), z(1)).is_err());
        assert!(HeunValentParams::general(q(1, 2), z(1), z(2), z(0), z(0), z(1)).is_err());
        assert!(
            HeunValentParams::new(q(1, 2), z(1), z(2), z(3), z(2), z(0), WConvention::BetaPlusOneW).is_err()
        );
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!(HeunValentParams::general(c(0.5), c(1.0), c(2.0), c(-1.0 + 1e-11), c(0.0), c(1.0)).is_err());
        assert!(HeunValentParams::general(Complex64::new(0.5, 0.1), c(1.0), c(2.0), c(3.0), c(0.0), c(1.0)).is_err());
        assert!(HeunValentParams::general(c(0.5), c(f64::NAN), c(2.0), c(3.0), c(0.0), c(1.0)).is_err());

        assert!(HeunCanonicalParams::new(z(1), z(2), z(3), z(0), z(2), z(4), z(1)).is_err());
        assert!(HeunCanonicalParams::with_fuchs(z(1), z(2), z(3), z(0), q(1, 2), z(1)).is_err());
        assert!(HeunCanonicalParams::with_fuchs(z(1), z(2), z(3), z(0), z(-2), z(1)).is_ok());
    }

    #[test]
    fn json_round_trip_exact() {
        let v = HeunValentParams::new(q(1, 3), q(-7, 2), z(2), q(1, 9), q(3, 1), z(5), WConvention::BetaPlusOneW)
            .unwrap();
        let j = v.to_json();
        assert_eq!(j["k"], "1/3");
        assert_eq!(j["w_convention"], "beta-plus-one");
        assert_eq!(HeunValentParams::<Rational>::from_json(&j).unwrap(), v);
    }

    #[test]
    fn json_accepts_numbers_and_defaults() {
        let j: Value = serde_json::from_str(
            r#"{"k": 0.5, "alpha": "1", "beta": 1, "gamma": "3/2", "w": 0, "w_convention": "beta-plus-one"}"#,
        )
        .unwrap();
        let v = HeunValentParams::<Rational>::from_json(&j).unwrap();
        assert_eq!(v.delta(), &z(2));
        assert_eq!(v.k(), &q(1, 2));
        let missing: Value = serde_json::from_str(r#"{"k": 0.5, "alpha": 1, "beta": 1, "gamma": 1, "w": 0}"#).unwrap();
        assert!(HeunValentParams::<Rational>::from_json(&missing).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
            (lo..hi, 1i64..13).prop_map(|(n, d)| Rational::from_ratio(n, d))
        }

        proptest! {
            #[test]
            fn conversions_are_inverse(
                kd in prop::sample::select(vec![(1i64, 4i64), (1, 3), (1, 2), (2, 3), (5, 7)]),
                alpha in rat(1, 60), beta in rat(-30, 60), gamma in rat(1, 60),
                delta in rat(-30, 30), w in rat(-40, 40), beta_plus_one in any::<bool>(),
            ) {
                let k = q(kd.0, kd.1);
                let (delta, conv) = if beta_plus_one {
                    (beta.clone() + z(1), WConvention::BetaPlusOneW)
                } else {
                    (delta, WConvention::GeneralW)
                };
                let v = HeunValentParams::new(k, alpha, beta, gamma, delta, w, conv).unwrap();
                let c = v.to_canonical().unwrap();
                // Fuchs holds exactly
                prop_assert_eq!(c.gamma().clone() + c.delta().clone() + c.epsilon().clone(),
                    c.alpha().clone() + c.beta().clone() + z(1));
                let back = HeunValentParams::from_canonical(&c, conv).unwrap();
                prop_assert_eq!(&back, &v);
                prop_assert_eq!(back.to_canonical().unwrap(), c.clone());
                if conv == WConvention::GeneralW {
                    let k2 = v.k2();
                    prop_assert_eq!(c.q().clone() * k2.clone() + v.w().clone()
                        - k2 * v.alpha().clone() * v.beta().clone(), z(0));
                }
            }
        }
    }
}
