use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::error::HeunError;
use crate::params::{HeunCanonicalParams, HeunValentParams};
use crate::scalar::Scalar;

/// Which algorithm produced a set of coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Recurrence,
    ClosedForm,
    ClosedFormDelta0,
    ClosedFormBetaPlusOne,
    GreenPath,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Recurrence,
        Method::ClosedForm,
        Method::ClosedFormDelta0,
        Method::ClosedFormBetaPlusOne,
        Method::GreenPath,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed-form",
            Method::ClosedFormDelta0 => "closed-form-delta0",
            Method::ClosedFormBetaPlusOne => "closed-form-beta-plus-one",
            Method::GreenPath => "green-path",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = HeunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| HeunError::Parse {
                input: s.to_string(),
                reason: "unknown method".to_string(),
            })
    }
}

/// The parameter record a table was computed from.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSet<S> {
    Canonical(HeunCanonicalParams<S>),
    Valent(HeunValentParams<S>),
}

impl<S: Scalar> ParamSet<S> {
    pub fn to_json(&self) -> Value {
        match self {
            ParamSet::Canonical(c) => c.to_json(),
            ParamSet::Valent(v) => v.to_json(),
        }
    }
}

/// Coefficients `c_0..=c_N` of the local solution, tagged with their origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<S> {
    params: ParamSet<S>,
    values: Vec<S>,
    method: Method,
}

impl<S: Scalar> CoefficientTable<S> {
    pub(crate) fn new(params: ParamSet<S>, values: Vec<S>, method: Method) -> Self {
        debug_assert!(!values.is_empty() && values[0].is_one());
        CoefficientTable {
            params,
            values,
            method,
        }
    }

    pub fn params(&self) -> &ParamSet<S> {
        &self.params
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// The truncation order `N`; the table holds `N + 1` values.
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<&S> {
        self.values.get(n)
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }
}
