use serde_json::{json, Value};

use super::output::{float_value, scalar_cells, scalar_columns, Cell, Report};
use super::{BoundArg, BoundArgs, CoeffsArgs, CompareArgs, EvalArgs, GreenArgs, Mode};
use crate::bounds::{check_envelope_with, BoundKind};
use crate::error::{HeunError, Result};
use crate::jacobi::{right_inverse_residual, GreenSetup};
use crate::params::HeunValentParams;
use crate::recurrence::recurrence_residuals;
use crate::scalar::{parse_complex, Complex64, Rational, Scalar};
use crate::series::{applicable, coefficients, evaluate, EvalOptions};
use crate::table::Method;

const FLOAT_COMPARE_THRESHOLD: f64 = 1e-8;

macro_rules! by_mode {
    ($mode:expr, $f:ident, $args:expr) => {
        match $mode {
            Mode::Exact => $f::<Rational>($args),
            Mode::Float => $f::<Complex64>($args),
        }
    };
}

/// Largest `|residual| / scale` of the three-term recurrence over the table.
fn max_residual<S: Scalar>(v: &HeunValentParams<S>, values: &[S]) -> Result<f64> {
    let c = v.to_canonical()?;
    Ok(recurrence_residuals(&c, values)
        .iter()
        .map(|(r, scale)| {
            let r = r.modulus();
            if *scale > 0.0 {
                r / scale
            } else {
                r
            }
        })
        .fold(0.0, f64::max))
}

pub fn coeffs(a: &CoeffsArgs) -> Result<Report> {
    by_mode!(a.mode, coeffs_in, a)
}

/// Refuses long exact closed-form runs unless the cap was raised.
fn check_exact_order<S: Scalar>(order: usize, cap: usize, methods: &[Method]) -> Result<()> {
    if S::MODE != crate::scalar::ArithmeticMode::Exact || order <= cap {
        return Ok(());
    }
    match methods.iter().find(|m| !matches!(m, Method::Recurrence | Method::GreenPath)) {
        Some(m) => Err(HeunError::Precondition(format!(
            "{m} in exact mode is capped at N = {cap}; pass --max-exact-order to raise it"
        ))),
        None => Ok(()),
    }
}

fn coeffs_in<S: Scalar>(a: &CoeffsArgs) -> Result<Report> {
    let v = a.params.build::<S>()?;
    check_exact_order::<S>(a.order, a.max_exact_order, &[a.method])?;
    let table = coefficients(&v, a.order, a.method)?;
    let mut columns = vec!["n".to_string()];
    columns.extend(scalar_columns::<S>("value"));
    let mut report = Report::new(v.to_json(), json!(a.method.as_str()), columns);
    for (n, c) in table.values().iter().enumerate() {
        let mut row = vec![Cell::Int(n as u64)];
        row.extend(scalar_cells(c));
        report.push(row);
    }
    report.meta("mode", json!(a.mode.as_str()));
    report.meta("order", json!(a.order));
    report.meta("residuals", float_value(max_residual(&v, table.values())?));
    Ok(report)
}

pub fn eval(a: &EvalArgs) -> Result<Report> {
    by_mode!(a.mode, eval_in, a)
}

fn eval_in<S: Scalar>(a: &EvalArgs) -> Result<Report> {
    let v = a.params.build::<S>()?;
    let points = a
        .z
        .iter()
        .map(|s| parse_complex(s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(z) = points.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(HeunError::Domain(z.norm()));
    }
    let opts = EvalOptions {
        tol: a.tol,
        cap: a.max_order,
        ..EvalOptions::default()
    };
    let columns = [
        "z", "z_im", "value", "value_im", "terms_used", "tail_estimate", "tail_kind",
    ];
    let mut report = Report::new(
        v.to_json(),
        json!(a.method.as_str()),
        columns.iter().map(|c| c.to_string()).collect(),
    );
    for z in points {
        let r = evaluate(&v, z, a.method, &opts)?;
        report.push(vec![
            Cell::Float(z.re),
            Cell::Float(z.im),
            Cell::Float(r.value.re),
            Cell::Float(r.value.im),
            Cell::Int(r.terms_used as u64),
            Cell::Float(r.tail_estimate),
            Cell::Text(r.tail_kind.as_str().to_string()),
        ]);
    }
    report.meta("mode", json!(a.mode.as_str()));
    report.meta("tol", float_value(a.tol));
    report.meta("residuals", Value::Null);
    Ok(report)
}

pub fn compare(a: &CompareArgs) -> Result<Report> {
    by_mode!(a.mode, compare_in, a)
}

fn compare_in<S: Scalar>(a: &CompareArgs) -> Result<Report> {
    let v = a.params.build::<S>()?;
    let methods: Vec<Method> = if a.method.is_empty() {
        Method::ALL
            .into_iter()
            .filter(|m| applicable(&v, *m).is_ok())
            .collect()
    } else {
        for (i, m) in a.method.iter().enumerate() {
            if a.method[..i].contains(m) {
                return Err(HeunError::not_applicable(*m, "listed more than once"));
            }
        }
        a.method.clone()
    };
    if methods.len() < 2 {
        return Err(HeunError::not_applicable(
            "compare",
            format!("need at least two applicable methods, have {}", methods.len()),
        ));
    }
    check_exact_order::<S>(a.order, a.max_exact_order, &methods)?;
    let tables = methods
        .iter()
        .map(|m| coefficients(&v, a.order, *m))
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["n".to_string()];
    for m in &methods {
        columns.extend(scalar_columns::<S>(m.as_str()));
    }
    columns.push("abs_diff".to_string());
    columns.push("rel_diff".to_string());
    let names: Vec<&str> = methods.iter().map(|m| m.as_str()).collect();
    let mut report = Report::new(v.to_json(), json!(names), columns);

    let mut max_abs = S::zero();
    let mut max_abs_f = 0.0_f64;
    let mut max_rel = 0.0_f64;
    let mut all_exact_zero = true;
    for n in 0..=a.order {
        let base = &tables[0].values()[n];
        let mut row = vec![Cell::Int(n as u64)];
        let mut worst = S::zero();
        let mut worst_f = 0.0_f64;
        let mut rel = 0.0_f64;
        for t in &tables {
            let c = &t.values()[n];
            row.extend(scalar_cells(c));
            let d = c.clone() - base.clone();
            let dm = d.modulus();
            if !d.is_zero() {
                all_exact_zero = false;
            }
            if dm > worst_f {
                worst_f = dm;
                worst = d.clone();
            }
            let scale = base.modulus().max(c.modulus());
            if scale > 0.0 {
                rel = rel.max(dm / scale);
            }
        }
        if worst_f > max_abs_f {
            max_abs_f = worst_f;
            max_abs = worst.clone();
        }
        max_rel = max_rel.max(rel);
        row.push(match S::MODE {
            crate::scalar::ArithmeticMode::Exact => Cell::Text(abs_render(&worst)),
            crate::scalar::ArithmeticMode::Float => Cell::Float(worst_f),
        });
        row.push(Cell::Float(rel));
        report.push(row);
    }

    let (pass, threshold) = match (a.mode, a.threshold) {
        (Mode::Exact, None) => (all_exact_zero, 0.0),
        (_, Some(t)) => (max_rel <= t, t),
        (Mode::Float, None) => (max_rel <= FLOAT_COMPARE_THRESHOLD, FLOAT_COMPARE_THRESHOLD),
    };
    report.meta("mode", json!(a.mode.as_str()));
    report.meta(
        "max_abs_diff",
        match a.mode {
            Mode::Exact => json!(abs_render(&max_abs)),
            Mode::Float => float_value(max_abs_f),
        },
    );
    report.meta("max_rel_diff", float_value(max_rel));
    report.meta("threshold", float_value(threshold));
    report.meta("pass", json!(pass));
    let residuals: Vec<Value> = tables
        .iter()
        .map(|t| max_residual(&v, t.values()).map(float_value))
        .collect::<Result<_>>()?;
    report.meta("residuals", json!(residuals));
    if !pass {
        report.exit_code = 1;
    }
    Ok(report)
}

fn abs_render<S: Scalar>(x: &S) -> String {
    match x.cmp_real(&S::zero()) {
        Some(std::cmp::Ordering::Less) => (-x.clone()).render(),
        _ => x.render(),
    }
}

pub fn bound(a: &BoundArgs) -> Result<Report> {
    by_mode!(a.mode, bound_in, a)
}

fn bound_in<S: Scalar>(a: &BoundArgs) -> Result<Report> {
    let v = a.params.build::<S>()?;
    let kind = match a.bound {
        Some(BoundArg::General) => BoundKind::General,
        Some(BoundArg::BetaPlusOne) => BoundKind::BetaPlusOne,
        None => BoundKind::default_for(&v),
    };
    check_exact_order::<S>(a.order, a.max_exact_order, &[a.method])?;
    let table = coefficients(&v, a.order, a.method)?;
    let env = check_envelope_with(&table, kind)?;
    let columns = ["n", "abs_c", "bound", "ratio", "pass"];
    let mut report = Report::new(
        v.to_json(),
        json!(a.method.as_str()),
        columns.iter().map(|c| c.to_string()).collect(),
    );
    for r in &env.rows {
        report.push(vec![
            Cell::Int(r.n as u64),
            Cell::Float(r.abs_c),
            Cell::Float(r.bound),
            Cell::Float(r.ratio),
            Cell::Bool(r.pass),
        ]);
    }
    report.meta("mode", json!(a.mode.as_str()));
    report.meta("bound", json!(kind.as_str()));
    report.meta("worst_ratio", float_value(env.worst_ratio));
    report.meta("all_pass", json!(env.all_pass));
    report.meta("residuals", float_value(max_residual(&v, table.values())?));
    if !env.all_pass {
        report.exit_code = 1;
    }
    Ok(report)
}

pub fn green(a: &GreenArgs) -> Result<Report> {
    if a.mode == Mode::Exact {
        return Err(HeunError::not_applicable(
            "green",
            "Green functions involve square roots and are computed in float mode only",
        ));
    }
    let v = a.params.build::<Complex64>()?;
    let setup = GreenSetup::new(&v, a.order + 1, a.margin)?;
    let checked = if a.perturbed {
        Some(setup.perturbed_green()?)
    } else {
        None
    };
    let mut columns: Vec<String> = ["m", "n", "value"].iter().map(|c| c.to_string()).collect();
    if checked.is_some() {
        columns.push("perturbed".to_string());
    }
    let mut report = Report::new(v.to_json(), json!(Method::GreenPath.as_str()), columns);
    for (m, n, g) in setup.green.reported() {
        let mut row = vec![Cell::Int(m as u64), Cell::Int(n as u64), Cell::Float(g)];
        if let Some(c) = &checked {
            row.push(Cell::Float(c.get(m, n)));
        }
        report.push(row);
    }
    report.meta("mode", json!("float"));
    report.meta("order", json!(a.order));
    report.meta("margin", json!(a.margin));
    let mut residuals = serde_json::Map::new();
    residuals.insert(
        "right_inverse".to_string(),
        float_value(right_inverse_residual(&setup.jacobi, &setup.green)),
    );
    if let Some(c) = &checked {
        residuals.insert(
            "perturbed_right_inverse".to_string(),
            float_value(right_inverse_residual(&setup.perturbed_jacobi, c)),
        );
    }
    report.meta("residuals", Value::Object(residuals));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{exit_code, execute, Cli};
    use clap::Parser;
    use serde_json::Value;

    fn run_json(args: &[&str]) -> Result<(Value, i32), i32> {
        let cli = Cli::try_parse_from(std::iter::once("heun").chain(args.iter().copied())).unwrap();
        match execute(&cli) {
            Ok((r, _)) => Ok((r.to_json(), r.exit_code)),
            Err(e) => Err(exit_code(&e)),
        }
    }

    const REF: [&str; 12] = [
        "--k", "1/2", "--alpha", "1", "--beta", "2", "--gamma", "3", "--delta", "0", "--w", "1",
    ];

    fn with_ref(extra: &[&'static str]) -> Vec<&'static str> {
        extra.iter().copied().chain(REF).collect()
    }

    fn values(v: &Value) -> Vec<Value> {
        v["data"].as_array().unwrap().iter().map(|r| r["value"].clone()).collect()
    }

    #[test]
    fn coeffs_examples() {
        let (a, code) = run_json(&with_ref(&["coeffs", "--method", "recurrence", "-N", "2"])).unwrap();
        assert_eq!(code, 0);
        assert_eq!(values(&a), vec![Value::from("1"), Value::from("-1/6"), Value::from("-13/96")]);
        assert_eq!(a["meta"]["residuals"].as_f64(), Some(0.0));
        let (b, _) = run_json(&with_ref(&["coeffs", "--method", "closed-form", "-N", "2"])).unwrap();
        assert_eq!(values(&a), values(&b));
        let (c, _) = run_json(&["coeffs", "-N", "0"]).unwrap();
        assert_eq!(values(&c), vec![Value::from("1")]);
    }

    #[test]
    fn coeffs_float_and_errors() {
        let (a, _) = run_json(&with_ref(&["coeffs", "--mode", "float", "-N", "2"])).unwrap();
        let c2 = a["data"][2]["value"].as_f64().unwrap();
        assert!((c2 + 13.0 / 96.0).abs() < 1e-15);
        assert_eq!(run_json(&["coeffs", "--gamma", "-2"]).unwrap_err(), 2);
        assert_eq!(run_json(&["coeffs", "--k", "3/2"]).unwrap_err(), 2);
        assert_eq!(run_json(&["coeffs", "--w", "1+2i"]).unwrap_err(), 2);
        assert_eq!(run_json(&["coeffs", "--method", "green-path"]).unwrap_err(), 3);
        assert_eq!(run_json(&["coeffs", "--delta", "1", "--method", "closed-form-delta0"]).unwrap_err(), 3);
        assert_eq!(run_json(&["coeffs", "--method", "closed-form", "-N", "65"]).unwrap_err(), 3);
        assert!(run_json(&["coeffs", "--method", "closed-form", "-N", "65", "--max-exact-order", "65"]).is_ok());
        assert!(run_json(&["coeffs", "-N", "65"]).is_ok());
    }

    #[test]
    fn eval_examples() {
        let (a, _) = run_json(&["eval", "--z", "0"]).unwrap();
        assert_eq!(a["data"][0]["value"].as_f64(), Some(1.0));
        let (b, _) = run_json(&["eval", "--delta-convention", "beta-plus-one", "--w", "0", "--beta", "1", "--z", "0.5"])
            .unwrap();
        assert!((b["data"][0]["value"].as_f64().unwrap() - 2.0).abs() < 1e-10);
        assert_eq!(run_json(&["eval", "--z", "0.2", "--z", "1"]).unwrap_err(), 2);
        assert_eq!(run_json(&["eval", "--z", "0.6+0.8i"]).unwrap_err(), 2);
    }

    #[test]
    fn compare_examples() {
        let (a, code) = run_json(&with_ref(&["compare", "--method", "recurrence", "--method", "closed-form"])).unwrap();
        assert_eq!(code, 0);
        assert_eq!(a["meta"]["max_abs_diff"], Value::from("0"));
        assert_eq!(a["meta"]["pass"], Value::from(true));
        let (b, code) = run_json(&with_ref(&[
            "compare", "--mode", "float", "-N", "25", "--method", "recurrence", "--method", "green-path",
        ]))
        .unwrap();
        assert_eq!(code, 0);
        assert!(b["meta"]["max_rel_diff"].as_f64().unwrap() < 1e-8);
        let dup = with_ref(&["compare", "--method", "recurrence", "--method", "recurrence"]);
        assert_eq!(run_json(&dup).unwrap_err(), 3);
        let (c, _) = run_json(&with_ref(&["compare"])).unwrap();
        assert_eq!(c["method"].as_array().unwrap().len(), 3);
        let (d, _) = run_json(&with_ref(&["compare", "--mode", "float"])).unwrap();
        assert_eq!(d["method"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn bound_examples() {
        let (a, code) = run_json(&with_ref(&["bound", "-N", "40"])).unwrap();
        assert_eq!(code, 0);
        assert_eq!(a["data"][0]["ratio"].as_f64(), Some(1.0));
        assert!(a["data"].as_array().unwrap().iter().all(|r| r["ratio"].as_f64().unwrap() <= 1.0));
        assert_eq!(run_json(&with_ref(&["bound", "--bound", "beta-plus-one"])).unwrap_err(), 3);
        let small_alpha = ["bound", "--k", "1/4", "--alpha", "1/10", "--beta", "1/10", "--w", "1", "-N", "3"];
        assert_eq!(run_json(&small_alpha).unwrap().1, 1);
    }

    #[test]
    fn green_examples() {
        let (a, _) = run_json(&with_ref(&["green", "-N", "40"])).unwrap();
        let rows = a["data"].as_array().unwrap();
        assert_eq!(rows.len(), 41 * 40 / 2);
        assert!(rows.iter().all(|r| r["m"].as_u64() > r["n"].as_u64()));
        let g10 = rows.iter().find(|r| r["m"] == 1 && r["n"] == 0).unwrap();
        assert!((g10["value"].as_f64().unwrap() - 0.81649658).abs() < 5e-9);
        assert!(a["meta"]["residuals"]["right_inverse"].as_f64().unwrap() < 1e-10);
        let (b, _) = run_json(&["green", "--perturbed", "--delta", "1", "--beta", "2", "--gamma", "3"]).unwrap();
        assert!(b["meta"]["residuals"]["perturbed_right_inverse"].as_f64().unwrap() < 1e-10);
        assert_eq!(run_json(&["green", "--mode", "exact"]).unwrap_err(), 3);
        assert_eq!(run_json(&["green", "--alpha", "-1/2"]).unwrap_err(), 3);
    }
}
