//! Surface syntax: a recursive-descent parser for polynomial-exponential
//! expressions and constant-coefficient equations, and the canonical printer.
//!
//! Expressions (sequence mode uses `n`, function mode uses `t`):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' primary)?
//! primary := INT | 'i' | 'n' | 't' | 'exp' '(' expr ')' | '(' expr ')' | unknown
//! unknown := 'y' | 'y' '[' 'n' (('+' | '-') INT)? ']' | 'y' "'"+ | 'y' '^' '(' INT ')'
//! ```
//!
//! Equations are `expr '=' expr`, optionally followed by `; roots=λ1^m1,λ2^m2`.

mod lexer;
mod lower;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::polyexp::{OperatorBase, OperatorSpec, PolyExp};
use crate::scalar::GaussianRational;

pub use parser::{Ast, Node, UnknownRef};
pub use print::{format_operator, format_operator_lhs, format_poly, format_polyexp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed input.
    Syntax,
    /// Well-formed but not meaningful in the requested domain (e.g. `2^n`
    /// in function mode).
    Mode,
}

/// Parse failure with the byte offset it was detected at.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub message: String,
    pub hint: Option<String>,
}

impl ParseError {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            offset,
            message: message.into(),
            hint: None,
        }
    }

    pub(crate) fn mode(offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Mode,
            offset,
            message: message.into(),
            hint: None,
        }
    }

    pub(crate) fn hint(mut self, hint: impl Into<String>) -> ParseError {
        self.hint = Some(hint.into());
        self
    }

    /// Moves the offset right, for errors found in a substring.
    pub fn shifted(mut self, by: usize) -> ParseError {
        self.offset += by;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}

/// Parses a polynomial-exponential expression into canonical form.
pub fn parse_expression(src: &str, base: OperatorBase) -> Result<PolyExp> {
    let ast = parser::parse_expr_only(src)?;
    let lowered = lower::lower(&ast, base)?;
    if !lowered.op.is_zero() {
        return Err(
            ParseError::mode(ast.span.0, "the unknown `y` cannot appear in an expression")
                .hint("use `solve` or `verify` for equations")
                .into(),
        );
    }
    Ok(lowered.f)
}

/// Parses an equation `lhs = rhs` into the operator acting on `y` and the
/// right-hand side. The domain is inferred from the syntax (`y[n+k]`, `n`,
/// `^n` for sequences; `y'`, `y^(k)`, `t`, `exp` for functions) unless given.
/// A trailing `; roots=...` attaches a validated factorization.
pub fn parse_equation(src: &str, base: Option<OperatorBase>) -> Result<(OperatorSpec, PolyExp)> {
    let (eq_src, roots_src) = match src.split_once(';') {
        Some((e, r)) => (e, Some((r, e.len() + 1))),
        None => (src, None),
    };
    let (lhs, rhs) = parser::parse_equation(eq_src)?;
    let base = match base.or_else(|| lower::infer_base(&lhs).or_else(|| lower::infer_base(&rhs))) {
        Some(b) => b,
        None => {
            return Err(
                ParseError::mode(0, "cannot tell whether this is a recurrence or an ODE")
                    .hint("write y[n+k] or y', or pass --domain seq|ode")
                    .into(),
            )
        }
    };
    let l = lower::lower(&lhs, base)?;
    let r = lower::lower(&rhs, base)?;
    let op_poly = &l.op - &r.op;
    if op_poly.is_zero() {
        return Err(
            ParseError::syntax(lhs.span.0, "the equation does not involve the unknown `y`")
                .hint("put y, y[n+k] or y' terms on one side")
                .into(),
        );
    }
    let rhs_f = r.f.sub(&l.f);
    let mut op = OperatorSpec::new(base, op_poly)?;
    if let Some((roots_src, offset)) = roots_src {
        let trimmed = roots_src.trim_start();
        let lead_ws = roots_src.len() - trimmed.len();
        let roots = parse_roots(trimmed).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(p.shifted(offset + lead_ws)),
            other => other,
        })?;
        op = op.with_roots(roots)?;
    }
    Ok((op, rhs_f))
}

/// Parses `roots=λ1^m1,λ2^m2,...` (the `roots=` prefix is optional, a
/// missing `^m` means multiplicity 1).
pub fn parse_roots(src: &str) -> Result<Vec<(GaussianRational, usize)>> {
    let lead = src.len() - src.trim_start().len();
    let body_start = if src[lead..].starts_with("roots=") {
        lead + "roots=".len()
    } else {
        0
    };
    let mut out = Vec::new();
    let mut offset = body_start;
    for item in src[body_start..].split(',') {
        let here = offset;
        offset += item.len() + 1;
        if item.trim().is_empty() {
            return Err(ParseError::syntax(here, "empty root entry")
                .hint("roots are written like roots=2^1,3^2")
                .into());
        }
        let (lit, mult) = match item.rfind('^') {
            Some(p) => {
                let m = item[p + 1..].trim();
                let mult: usize = m.parse().map_err(|_| {
                    ParseError::syntax(here + p + 1, format!("multiplicity `{m}` is not a positive integer"))
                })?;
                if mult == 0 {
                    return Err(ParseError::syntax(here + p + 1, "multiplicity must be at least 1").into());
                }
                (&item[..p], mult)
            }
            None => (item, 1),
        };
        let value = parse_scalar(lit).map_err(|e| match e {
            Error::Parse(p) => Error::Parse(p.shifted(here)),
            other => other,
        })?;
        out.push((value, mult));
    }
    crate::polyexp::validate_factors(&out)?;
    Ok(out)
}

/// Parses a scalar literal such as `3`, `-1/2`, `1/2+3/4*i` or `-3*i`.
pub fn parse_scalar(src: &str) -> Result<GaussianRational> {
    let ast = parser::parse_expr_only(src)?;
    if let Some(span) = lower::first_non_constant(&ast) {
        return Err(ParseError::syntax(span, "expected a scalar literal")
            .hint("scalars look like 2, -1/3, 1/2+3/4*i")
            .into());
    }
    let lowered = lower::lower(&ast, OperatorBase::Shift)?;
    lowered
        .f
        .as_constant(OperatorBase::Shift)
        .ok_or_else(|| ParseError::syntax(0, "expected a scalar literal").into())
}
