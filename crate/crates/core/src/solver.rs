//! Constant-coefficient equations `q(S)y = f` and `q(D)y = f` with
//! polynomial-exponential right-hand sides.
//!
//! Particular solutions come from undetermined coefficients: for each
//! exponent `λ` of the right-hand side with polynomial degree `d`, and `m`
//! the multiplicity of `λ` as a root of `q`, the ansatz is a `λ`-polynomial
//! of degree `d + m` whose `m` lowest coefficients vanish. The operator lowers
//! the degree by exactly `m` on such terms, so the coefficient system is
//! square and uniquely solvable. Every result is re-checked by substitution.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::Poly;
use crate::polyexp::{kernel_basis, OperatorBase, OperatorSpec, PolyExp};
use crate::scalar::GaussianRational;

/// `q(Op)·candidate == rhs`, exactly.
pub fn verify_residual(op: &OperatorSpec, candidate: &PolyExp, rhs: &PolyExp) -> bool {
    candidate.apply_operator(op).sub(rhs).is_zero()
}

/// Basis of `ker q(Op)`: the kernel bases of `(Op − λ_i)^{l_i}` for the
/// factored roots, concatenated.
pub fn homogeneous_basis(op: &OperatorSpec) -> Result<Vec<PolyExp>> {
    if op.order() == 0 {
        return Ok(Vec::new());
    }
    let factored = op.factored().ok_or(Error::Unfactored)?;
    let mut out = Vec::with_capacity(op.order());
    for (lambda, l) in &factored.roots {
        out.extend(kernel_basis(lambda, *l, op.base())?);
    }
    Ok(out)
}

fn particular_component(op: &OperatorSpec, lambda: &GaussianRational, f: &Poly) -> Result<Poly> {
    let d = f.degree().expect("canonical terms are nonzero");
    let m = op.multiplicity(lambda);
    let rows = d + m + 1;
    let columns = (m..=d + m)
        .map(|j| {
            let image = PolyExp::atom(lambda.clone(), j).apply_operator(op);
            if image.len() > 1 || image.lambdas().any(|l| l != lambda) {
                return Err(Error::Internal("operator image left the exponent class".into()));
            }
            let p = image.get(lambda).cloned().unwrap_or_else(Poly::zero);
            Ok((0..rows).map(|i| p.coeff(i)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let system = Matrix::from_columns(rows, &columns)?;
    if system.rank() != d + 1 {
        return Err(Error::Internal(format!(
            "undetermined-coefficient system for λ = {lambda} is rank deficient"
        )));
    }
    let target: Vec<_> = (0..rows).map(|i| f.coeff(i)).collect();
    let solution = system
        .solve(&target)?
        .ok_or_else(|| Error::Internal(format!("no particular solution for λ = {lambda}")))?;
    let mut coeffs = vec![GaussianRational::zero(); m];
    coeffs.extend(solution);
    Ok(Poly::new(coeffs))
}

/// One solution of `q(Op)y = rhs`.
pub fn particular_solution(op: &OperatorSpec, rhs: &PolyExp) -> Result<PolyExp> {
    if op.base() == OperatorBase::Shift && rhs.get(&GaussianRational::zero()).is_some() {
        return Err(Error::ShiftZeroLambda);
    }
    let y = PolyExp::canonicalize(
        rhs.terms()
            .map(|(lambda, f)| Ok((lambda.clone(), particular_component(op, lambda, f)?)))
            .collect::<Result<Vec<_>>>()?,
    );
    if !verify_residual(op, &y, rhs) {
        return Err(Error::Internal("particular solution failed substitution".into()));
    }
    Ok(y)
}

/// `particular + span(homogeneous_basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralSolution {
    pub particular: PolyExp,
    pub homogeneous_basis: Vec<PolyExp>,
    pub base: OperatorBase,
}

pub fn general_solution(op: &OperatorSpec, rhs: &PolyExp) -> Result<GeneralSolution> {
    let particular = particular_solution(op, rhs)?;
    let homogeneous_basis = homogeneous_basis(op)?;
    if homogeneous_basis.len() != op.order() {
        return Err(Error::Internal("homogeneous basis has the wrong size".into()));
    }
    if let Some(h) = homogeneous_basis.iter().find(|h| !h.apply_operator(op).is_zero()) {
        return Err(Error::Internal(format!("homogeneous element {h:?} is not annihilated")));
    }
    Ok(GeneralSolution {
        particular,
        homogeneous_basis,
        base: op.base(),
    })
}

/// Initial data of `y`: `y_0..y_{k−1}` for sequences, `y(0), y'(0), …` for
/// functions.
pub fn initial_data(y: &PolyExp, base: OperatorBase, k: usize) -> Vec<GaussianRational> {
    match base {
        OperatorBase::Shift => (0..k as u64).map(|n| y.eval_exact_sequence(n)).collect(),
        OperatorBase::Derivative => {
            let mut cur = y.clone();
            let mut out = Vec::with_capacity(k);
            for _ in 0..k {
                out.push(cur.eval_function_at_zero());
                cur = cur.apply_derivative();
            }
            out
        }
    }
}

/// The unique solution with the given initial data.
pub fn solve_ivp(op: &OperatorSpec, rhs: &PolyExp, initial: &[GaussianRational]) -> Result<PolyExp> {
    let k = op.order();
    if initial.len() != k {
        return Err(Error::WrongInitialCount {
            expected: k,
            got: initial.len(),
        });
    }
    let general = general_solution(op, rhs)?;
    let base = op.base();
    let columns: Vec<_> = general
        .homogeneous_basis
        .iter()
        .map(|h| initial_data(h, base, k))
        .collect();
    let system = Matrix::from_columns(k, &columns)?;
    if system.rank() != k {
        return Err(Error::Singular);
    }
    let offset = initial_data(&general.particular, base, k);
    let target: Vec<_> = initial.iter().zip(&offset).map(|(a, b)| a - b).collect();
    let constants = system.solve(&target)?.ok_or(Error::Singular)?;
    let y = general
        .homogeneous_basis
        .iter()
        .zip(&constants)
        .fold(general.particular.clone(), |acc, (h, c)| acc.add(&h.scale(c)));
    if !verify_residual(op, &y, rhs) || initial_data(&y, base, k) != initial {
        return Err(Error::Internal("initial-value solution failed verification".into()));
    }
    Ok(y)
}
