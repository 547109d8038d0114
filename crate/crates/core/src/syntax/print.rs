//! Canonical text form. Output is deterministic and parses back to the same
//! value.

use num_traits::{One, Signed, Zero};

use crate::poly::Poly;
use crate::polyexp::{OperatorBase, OperatorSpec, PolyExp};
use crate::scalar::GaussianRational;

/// Sign and magnitude text of a coefficient. Coefficients with both a real
/// and an imaginary part are parenthesized and carry no sign.
fn coeff_parts(c: &GaussianRational) -> (bool, String) {
    if c.is_real() {
        (c.re().is_negative(), c.re().abs().to_string())
    } else if c.re().is_zero() {
        let mag = c.im().abs();
        let body = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{mag}*i")
        };
        (c.im().is_negative(), body)
    } else {
        (false, format!("({c})"))
    }
}

/// `body*unit`, dropping a unit coefficient or an empty unit.
fn scaled(body: &str, unit: &str) -> String {
    match (body, unit) {
        (b, "") => b.to_string(),
        ("1", u) => u.to_string(),
        (b, u) => format!("{b}*{u}"),
    }
}

fn join_signed(parts: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut out = String::new();
    for (negative, text) in parts {
        match (out.is_empty(), negative) {
            (true, false) => {}
            (true, true) => out.push('-'),
            (false, false) => out.push_str(" + "),
            (false, true) => out.push_str(" - "),
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn monomial(var: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

fn signed_terms(p: &Poly, unit: impl Fn(usize) -> String) -> Vec<(bool, String)> {
    p.coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let (neg, body) = coeff_parts(c);
            (neg, scaled(&body, &unit(k)))
        })
        .collect()
}

/// Polynomial in `var`, highest degree first, e.g. `n^2 - 3*n + 2`.
pub fn format_poly(p: &Poly, var: &str) -> String {
    join_signed(signed_terms(p, |k| monomial(var, k)))
}

/// The exponential factor of a term, `None` for the constant exponent.
fn exp_factor(lambda: &GaussianRational, base: OperatorBase) -> Option<String> {
    if *lambda == base.unit_lambda() {
        return None;
    }
    Some(match base {
        OperatorBase::Shift => match lambda.as_nonnegative_integer() {
            Some(k) => format!("{k}^n"),
            None => format!("({lambda})^n"),
        },
        OperatorBase::Derivative => {
            let (neg, body) = coeff_parts(lambda);
            let sign = if neg { "-" } else { "" };
            format!("exp({sign}{})", scaled(&body, "t"))
        }
    })
}

/// Canonical text of a polynomial-exponential expression: sequence mode
/// `(p(n))*λ^n + ...`, function mode `(p(t))*exp(λ*t) + ...`.
pub fn format_polyexp(f: &PolyExp, base: OperatorBase) -> String {
    let var = base.variable();
    let mut parts = Vec::new();
    for (lambda, p) in f.terms() {
        match exp_factor(lambda, base) {
            None => parts.extend(signed_terms(p, |k| monomial(var, k))),
            Some(e) => {
                let mut single = signed_terms(p, |k| monomial(var, k));
                if single.len() == 1 {
                    let (neg, text) = single.pop().expect("one term");
                    parts.push((neg, scaled(&text, &e)));
                } else {
                    parts.push((false, format!("({})*{e}", format_poly(p, var))));
                }
            }
        }
    }
    join_signed(parts)
}

/// The operator polynomial in `S` or `D`, e.g. `S^2 - 5*S + 6`.
pub fn format_operator(op: &OperatorSpec) -> String {
    format_poly(op.expanded(), op.base().operator_symbol())
}

/// The operator applied to `y` in equation form, e.g.
/// `y[n+2] - 5*y[n+1] + 6*y[n]` or `y'' - 3*y' + 2*y`.
pub fn format_operator_lhs(op: &OperatorSpec) -> String {
    let base = op.base();
    join_signed(signed_terms(op.expanded(), |k| match base {
        OperatorBase::Shift if k == 0 => "y[n]".to_string(),
        OperatorBase::Shift => format!("y[n+{k}]"),
        OperatorBase::Derivative if k <= 3 => format!("y{}", "'".repeat(k)),
        OperatorBase::Derivative => format!("y^({k})"),
    }))
}
