//! Lowering of syntax trees to operator/right-hand-side pairs.

use num_traits::{Signed, ToPrimitive};

use super::parser::{Ast, Node, UnknownRef};
use super::ParseError;
use crate::poly::Poly;
use crate::polyexp::{OperatorBase, PolyExp};
use crate::scalar::GaussianRational;

/// `Σ op_j·Op^j(y) + f`: the part linear in the unknown and the known part.
pub(crate) struct Lowered {
    pub op: Poly,
    pub f: PolyExp,
}

impl Lowered {
    fn known(f: PolyExp) -> Lowered {
        Lowered { op: Poly::zero(), f }
    }

    fn constant(&self, base: OperatorBase) -> Option<GaussianRational> {
        if self.op.is_zero() {
            self.f.as_constant(base)
        } else {
            None
        }
    }
}

pub(crate) fn infer_base(ast: &Ast) -> Option<OperatorBase> {
    match &ast.node {
        Node::Int(_) | Node::Imag | Node::Unknown(UnknownRef::Plain) => None,
        Node::Var('n') | Node::Unknown(UnknownRef::Shift(_)) => Some(OperatorBase::Shift),
        Node::Var(_) | Node::Exp(_) | Node::Unknown(UnknownRef::Derivative(_)) => Some(OperatorBase::Derivative),
        Node::Neg(a) => infer_base(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            infer_base(a).or_else(|| infer_base(b))
        }
    }
}

/// Offset of the first sub-tree that cannot appear in a scalar literal.
pub(crate) fn first_non_constant(ast: &Ast) -> Option<usize> {
    match &ast.node {
        Node::Int(_) | Node::Imag => None,
        Node::Var(_) | Node::Exp(_) | Node::Unknown(_) => Some(ast.span.0),
        Node::Neg(a) => first_non_constant(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            first_non_constant(a).or_else(|| first_non_constant(b))
        }
    }
}

pub(crate) fn lower(ast: &Ast, base: OperatorBase) -> Result<Lowered, ParseError> {
    let at = ast.span.0;
    match &ast.node {
        Node::Int(v) => Ok(Lowered::known(PolyExp::constant(
            GaussianRational::from_rational(v.clone().into()),
            base,
        ))),
        Node::Imag => Ok(Lowered::known(PolyExp::constant(GaussianRational::i(), base))),
        Node::Var(c) => {
            let expected = base.variable();
            if c.to_string() != expected {
                let (domain, other) = match base {
                    OperatorBase::Shift => ("sequence", "function"),
                    OperatorBase::Derivative => ("function", "sequence"),
                };
                return Err(
                    ParseError::mode(at, format!("variable `{c}` used in {domain} mode")).hint(format!(
                        "{domain} expressions use `{expected}`; `{c}` belongs to {other} mode"
                    )),
                );
            }
            Ok(Lowered::known(PolyExp::variable(base)))
        }
        Node::Neg(a) => {
            let a = lower(a, base)?;
            Ok(Lowered {
                op: -&a.op,
                f: a.f.neg(),
            })
        }
        Node::Add(a, b) => {
            let (a, b) = (lower(a, base)?, lower(b, base)?);
            Ok(Lowered {
                op: &a.op + &b.op,
                f: a.f.add(&b.f),
            })
        }
        Node::Sub(a, b) => {
            let (a, b) = (lower(a, base)?, lower(b, base)?);
            Ok(Lowered {
                op: &a.op - &b.op,
                f: a.f.sub(&b.f),
            })
        }
        Node::Mul(x, y) => {
            let (a, b) = (lower(x, base)?, lower(y, base)?);
            match (a.op.is_zero(), b.op.is_zero()) {
                (true, true) => Ok(Lowered::known(a.f.mul(&b.f, base))),
                (false, false) => Err(ParseError::syntax(at, "product of two terms in the unknown `y`")
                    .hint("only linear equations are supported")),
                (false, true) => scale_linear(a, &b, y.span.0, base),
                (true, false) => scale_linear(b, &a, x.span.0, base),
            }
        }
        Node::Div(x, y) => {
            let (a, b) = (lower(x, base)?, lower(y, base)?);
            let c = b
                .constant(base)
                .ok_or_else(|| ParseError::syntax(y.span.0, "division is only allowed by a nonzero constant"))?;
            let inv = c.inv().map_err(|_| ParseError::syntax(y.span.0, "division by zero"))?;
            Ok(Lowered {
                op: a.op.scale(&inv),
                f: a.f.scale(&inv),
            })
        }
        Node::Pow(x, e) => lower_pow(x, e, at, base),
        Node::Exp(arg) => {
            if base == OperatorBase::Shift {
                return Err(ParseError::mode(at, "exp(...) used in sequence mode")
                    .hint("geometric sequences are written λ^n, e.g. 2^n"));
            }
            let a = lower(arg, base)?;
            let zero = GaussianRational::zero();
            let linear = (a.op.is_zero() && a.f.lambdas().all(|l| *l == zero))
                .then(|| a.f.get(&zero).cloned().unwrap_or_default())
                .filter(|p| p.degree().unwrap_or(0) <= 1 && p.coeff(0).is_zero());
            match linear {
                Some(p) => Ok(Lowered::known(PolyExp::atom(p.coeff(1), 0))),
                None => Err(ParseError::syntax(arg.span.0, "exp argument must be of the form λ*t")
                    .hint("e.g. exp(2*t), exp(-t), exp((1+i)*t)")),
            }
        }
        Node::Unknown(u) => {
            let order = match (*u, base) {
                (UnknownRef::Plain, _) => 0,
                (UnknownRef::Shift(k), OperatorBase::Shift) => {
                    if k < 0 {
                        return Err(ParseError::syntax(at, "negative shifts are not supported")
                            .hint("re-index the recurrence so the lowest term is y[n]"));
                    }
                    k as usize
                }
                (UnknownRef::Derivative(k), OperatorBase::Derivative) => k,
                (UnknownRef::Shift(_), OperatorBase::Derivative) => {
                    return Err(
                        ParseError::mode(at, "shifted unknown y[n+k] in ODE mode").hint("ODEs use y, y', y'' or y^(k)")
                    )
                }
                (UnknownRef::Derivative(_), OperatorBase::Shift) => {
                    return Err(ParseError::mode(at, "derivative y' in recurrence mode")
                        .hint("recurrences use y[n], y[n+1], ..."))
                }
            };
            Ok(Lowered {
                op: Poly::monomial(GaussianRational::one(), order),
                f: PolyExp::zero(),
            })
        }
    }
}

fn scale_linear(linear: Lowered, factor: &Lowered, at: usize, base: OperatorBase) -> Result<Lowered, ParseError> {
    let c = factor.constant(base).ok_or_else(|| {
        ParseError::syntax(at, "coefficients of the unknown must be constants")
            .hint("variable-coefficient equations are not supported")
    })?;
    Ok(Lowered {
        op: linear.op.scale(&c),
        f: linear.f.scale(&c),
    })
}

fn lower_pow(x: &Ast, e: &Ast, at: usize, base: OperatorBase) -> Result<Lowered, ParseError> {
    let b = lower(x, base)?;
    let ex = lower(e, base)?;
    if !ex.op.is_zero() {
        return Err(ParseError::syntax(e.span.0, "the unknown cannot appear in an exponent"));
    }
    if let Some(k) = ex.f.as_constant(base) {
        let k = k
            .as_integer()
            .and_then(|k| k.to_i64())
            .ok_or_else(|| ParseError::syntax(e.span.0, "exponents must be integers"))?;
        if k >= 0 {
            if !b.op.is_zero() && k != 1 {
                return Err(ParseError::syntax(at, "powers of the unknown are not linear")
                    .hint("derivatives are written y^(k) with parentheses"));
            }
            if k == 1 {
                return Ok(b);
            }
            return Ok(Lowered::known(b.f.pow(k as usize, base)));
        }
        let c = b
            .constant(base)
            .ok_or_else(|| ParseError::syntax(at, "negative powers are only allowed for constants"))?;
        let v = c
            .powi(k)
            .map_err(|_| ParseError::syntax(at, "zero raised to a negative power"))?;
        return Ok(Lowered::known(PolyExp::constant(v, base)));
    }
    if base == OperatorBase::Derivative {
        return Err(
            ParseError::mode(e.span.0, "variable exponent in function mode").hint("exponentials are written exp(λ*t)")
        );
    }
    // c^(a·n + d) = c^d · (c^a)^n
    let affine =
        ex.f.get(&base.unit_lambda())
            .filter(|_| ex.f.len() == 1)
            .filter(|p| p.degree() == Some(1))
            .and_then(|p| Some((p.coeff(1).as_integer()?, p.coeff(0).as_integer()?)))
            .filter(|(a, _)| a.is_positive())
            .and_then(|(a, d)| Some((a.to_u64()?, d.to_i64()?)));
    let Some((a, d)) = affine else {
        return Err(
            ParseError::syntax(e.span.0, "exponent must be an integer or an affine expression a*n+b")
                .hint("e.g. 2^n, 3^(n+1), (1/2)^(2*n)"),
        );
    };
    let c = b
        .constant(base)
        .ok_or_else(|| ParseError::syntax(x.span.0, "the base of λ^n must be a constant"))?;
    let prefactor = c
        .powi(d)
        .map_err(|_| ParseError::syntax(at, "zero raised to a negative power"))?;
    Ok(Lowered::known(PolyExp::term(c.pow(a), Poly::constant(prefactor))))
}
