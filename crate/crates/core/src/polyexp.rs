//! Polynomial-exponential expressions and the shift / derivative operators
//! acting on them.
//!
//! A [`PolyExp`] is a finite sum `Σ_λ (λ-term)·p_λ(var)`. Under
//! [`OperatorBase::Shift`] it is the sequence `n ↦ Σ λⁿ p_λ(n)`; under
//! [`OperatorBase::Derivative`] it is the function `t ↦ Σ e^{λt} p_λ(t)`.
//! The value itself does not record which reading applies, callers pass the
//! base explicitly.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{check_distinct_roots, Poly};
use crate::scalar::GaussianRational;

/// Which operator generates the constant-coefficient operator algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorBase {
    /// `(Sy)_n = y_{n+1}` on sequences indexed by `n`.
    Shift,
    /// `Dy = y'` on functions of `t`.
    Derivative,
}

impl OperatorBase {
    pub fn variable(self) -> &'static str {
        match self {
            OperatorBase::Shift => "n",
            OperatorBase::Derivative => "t",
        }
    }

    /// Exponent of the constant functions: `1ⁿ` or `e^{0t}`.
    pub fn unit_lambda(self) -> GaussianRational {
        match self {
            OperatorBase::Shift => GaussianRational::one(),
            OperatorBase::Derivative => GaussianRational::zero(),
        }
    }

    /// Exponent of a product of two exponential terms.
    pub fn combine(self, a: &GaussianRational, b: &GaussianRational) -> GaussianRational {
        match self {
            OperatorBase::Shift => a * b,
            OperatorBase::Derivative => a + b,
        }
    }

    pub fn operator_symbol(self) -> &'static str {
        match self {
            OperatorBase::Shift => "S",
            OperatorBase::Derivative => "D",
        }
    }
}

impl fmt::Display for OperatorBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorBase::Shift => "shift",
            OperatorBase::Derivative => "derivative",
        })
    }
}

/// Canonical polynomial-exponential expression.
///
/// Exponents are distinct, attached polynomials are nonzero, and terms are
/// kept sorted by exponent in the scalar order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PolyExp {
    terms: BTreeMap<GaussianRational, Poly>,
}

impl PolyExp {
    pub fn zero() -> PolyExp {
        PolyExp::default()
    }

    /// Merges equal exponents and drops zero polynomials.
    pub fn canonicalize<I>(raw: I) -> PolyExp
    where
        I: IntoIterator<Item = (GaussianRational, Poly)>,
    {
        let mut terms: BTreeMap<GaussianRational, Poly> = BTreeMap::new();
        for (lambda, p) in raw {
            let slot = terms.entry(lambda).or_default();
            *slot = &*slot + &p;
        }
        terms.retain(|_, p| !p.is_zero());
        PolyExp { terms }
    }

    /// The single term `λ-term · p`.
    pub fn term(lambda: GaussianRational, p: Poly) -> PolyExp {
        PolyExp::canonicalize([(lambda, p)])
    }

    /// `var^j` times the exponential with exponent `lambda`.
    pub fn atom(lambda: GaussianRational, j: usize) -> PolyExp {
        PolyExp::term(lambda, Poly::monomial(GaussianRational::one(), j))
    }

    pub fn constant(c: GaussianRational, base: OperatorBase) -> PolyExp {
        PolyExp::term(base.unit_lambda(), Poly::constant(c))
    }

    /// The independent variable `n` or `t`.
    pub fn variable(base: OperatorBase) -> PolyExp {
        PolyExp::term(base.unit_lambda(), Poly::x())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GaussianRational, &Poly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, lambda: &GaussianRational) -> Option<&Poly> {
        self.terms.get(lambda)
    }

    pub fn lambdas(&self) -> impl Iterator<Item = &GaussianRational> {
        self.terms.keys()
    }

    /// `(λ, j)` for every nonzero coefficient of `var^j` in the λ-term.
    pub fn atoms(&self) -> Vec<(GaussianRational, usize)> {
        self.terms
            .iter()
            .flat_map(|(l, p)| {
                p.coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(move |(j, _)| (l.clone(), j))
            })
            .collect()
    }

    /// The scalar value, if the expression is a constant for this base.
    pub fn as_constant(&self, base: OperatorBase) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (l, p) = self.terms.iter().next().expect("one term");
                (*l == base.unit_lambda() && p.is_constant()).then(|| p.coeff(0))
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &PolyExp) -> PolyExp {
        PolyExp::canonicalize(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(l, p)| (l.clone(), p.clone())),
        )
    }

    pub fn sub(&self, other: &PolyExp) -> PolyExp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyExp {
        PolyExp {
            terms: self.terms.iter().map(|(l, p)| (l.clone(), -p)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> PolyExp {
        PolyExp::canonicalize(self.terms.iter().map(|(l, p)| (l.clone(), p.scale(c))))
    }

    /// Pointwise product; exponents combine multiplicatively for sequences
    /// and additively for functions.
    pub fn mul(&self, other: &PolyExp, base: OperatorBase) -> PolyExp {
        PolyExp::canonicalize(
            self.terms
                .iter()
                .flat_map(|(l1, p1)| other.terms.iter().map(move |(l2, p2)| (base.combine(l1, l2), p1 * p2))),
        )
    }

    pub fn pow(&self, k: usize, base: OperatorBase) -> PolyExp {
        (0..k).fold(PolyExp::constant(GaussianRational::one(), base), |acc, _| {
            acc.mul(self, base)
        })
    }

    /// `λⁿp(n) ↦ λⁿ·λ·p(n+1)`.
    pub fn apply_shift(&self) -> PolyExp {
        PolyExp::canonicalize(
            self.terms
                .iter()
                .map(|(l, p)| (l.clone(), p.substitute_shift().scale(l))),
        )
    }

    /// `e^{λt}p(t) ↦ e^{λt}(λ·p + p')`.
    pub fn apply_derivative(&self) -> PolyExp {
        PolyExp::canonicalize(
            self.terms
                .iter()
                .map(|(l, p)| (l.clone(), &p.scale(l) + &p.derivative())),
        )
    }

    pub fn apply_base(&self, base: OperatorBase) -> PolyExp {
        match base {
            OperatorBase::Shift => self.apply_shift(),
            OperatorBase::Derivative => self.apply_derivative(),
        }
    }

    /// `q(Op)·self` by Horner's scheme in the base operator.
    pub fn apply_poly(&self, q: &Poly, base: OperatorBase) -> PolyExp {
        q.coeffs()
            .iter()
            .rev()
            .fold(PolyExp::zero(), |acc, c| acc.apply_base(base).add(&self.scale(c)))
    }

    pub fn apply_operator(&self, op: &OperatorSpec) -> PolyExp {
        self.apply_poly(op.expanded(), op.base())
    }

    /// Exact sequence value `Σ λⁿ p_λ(n)`, with `0⁰ = 1`.
    pub fn eval_exact_sequence(&self, n: u64) -> GaussianRational {
        let x = GaussianRational::from_int(n as i64);
        self.terms.iter().map(|(l, p)| &l.pow(n) * &p.eval(&x)).sum()
    }

    /// Exact function value at `t = 0`, i.e. `Σ p_λ(0)`.
    pub fn eval_function_at_zero(&self) -> GaussianRational {
        self.terms.values().map(|p| p.coeff(0)).sum()
    }

    /// Floating-point evaluation. For `Shift` the point must be a
    /// nonnegative integer.
    pub fn eval_numeric(&self, x: Complex64, base: OperatorBase) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, p) in &self.terms {
            let lf = l.to_float()?;
            let poly_val = p
                .coeffs()
                .iter()
                .rev()
                .try_fold(Complex64::new(0.0, 0.0), |a, c| c.to_float().map(|c| a * x + c))?;
            let exp_val = match base {
                OperatorBase::Shift => {
                    if x.im != 0.0 || x.re < 0.0 || x.re.fract() != 0.0 || x.re > i32::MAX as f64 {
                        return Err(Error::Domain(format!(
                            "sequence index must be a nonnegative integer, got {x}"
                        )));
                    }
                    lf.powi(x.re as i32)
                }
                OperatorBase::Derivative => (lf * x).exp(),
            };
            acc += exp_val * poly_val;
        }
        if acc.re.is_finite() && acc.im.is_finite() {
            Ok(acc)
        } else {
            Err(Error::Overflow(format!("evaluation at {x}")))
        }
    }
}

impl fmt::Debug for PolyExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(l, p)| (l.to_string(), p)))
            .finish()
    }
}

/// Factored form `lead·∏(x − λ_i)^{l_i}` of an operator polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub roots: Vec<(GaussianRational, usize)>,
    pub lead: GaussianRational,
}

/// A constant-coefficient operator `q(S)` or `q(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    base: OperatorBase,
    expanded: Poly,
    factored: Option<Factorization>,
}

impl OperatorSpec {
    /// Operator from its expanded polynomial; the zero operator is rejected.
    pub fn new(base: OperatorBase, expanded: Poly) -> Result<OperatorSpec> {
        if expanded.is_zero() {
            return Err(Error::Domain("the zero operator annihilates everything".into()));
        }
        Ok(OperatorSpec {
            base,
            expanded,
            factored: None,
        })
    }

    pub fn from_factored(
        base: OperatorBase,
        roots: Vec<(GaussianRational, usize)>,
        lead: GaussianRational,
    ) -> Result<OperatorSpec> {
        let expanded = Poly::from_factored(&roots, &lead)?;
        Ok(OperatorSpec {
            base,
            expanded,
            factored: Some(Factorization { roots, lead }),
        })
    }

    /// `(Op − λ)^k`.
    pub fn root_power(base: OperatorBase, lambda: GaussianRational, k: usize) -> OperatorSpec {
        if k == 0 {
            return OperatorSpec::from_factored(base, vec![], GaussianRational::one()).expect("identity operator");
        }
        OperatorSpec::from_factored(base, vec![(lambda, k)], GaussianRational::one())
            .expect("single root with positive multiplicity")
    }

    /// Attaches roots, checking `lead·∏(x − λ_i)^{l_i}` reproduces the
    /// expanded polynomial exactly.
    pub fn with_roots(self, roots: Vec<(GaussianRational, usize)>) -> Result<OperatorSpec> {
        let lead = self.expanded.leading().cloned().expect("nonzero operator");
        let rebuilt = Poly::from_factored(&roots, &lead)?;
        if rebuilt != self.expanded {
            return Err(Error::RootsMismatch {
                expected: format!("{:?}", self.expanded),
                got: format!("{rebuilt:?}"),
            });
        }
        Ok(OperatorSpec {
            factored: Some(Factorization { roots, lead }),
            ..self
        })
    }

    pub fn base(&self) -> OperatorBase {
        self.base
    }

    pub fn expanded(&self) -> &Poly {
        &self.expanded
    }

    pub fn factored(&self) -> Option<&Factorization> {
        self.factored.as_ref()
    }

    /// Degree of the operator polynomial.
    pub fn order(&self) -> usize {
        self.expanded.degree().expect("nonzero operator")
    }

    /// Multiplicity of `lambda` as a root of the operator polynomial (0 if
    /// it is not a root). Read from the factorization when present,
    /// otherwise found by exact repeated division by `x − λ`.
    pub fn multiplicity(&self, lambda: &GaussianRational) -> usize {
        if let Some(f) = &self.factored {
            return f.roots.iter().find(|(r, _)| r == lambda).map_or(0, |(_, l)| *l);
        }
        let divisor = Poly::x_minus(lambda);
        let mut p = self.expanded.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.divmod(&divisor).expect("nonzero divisor");
            if !r.is_zero() {
                return m;
            }
            p = q;
            m += 1;
        }
    }
}

/// Coefficients `α_j^{k,r}`, `j = 0..=r−k`, of `(Op − λ)^k` applied to the
/// degree-`r` atom, expressed in the degree-`j` atoms.
///
/// Closed forms: for `D`, `(D−λ)(t^r e^{λt}) = r·t^{r−1}e^{λt}` so only the
/// last coefficient `r!/(r−k)!` survives. For `S`,
/// `(S−λ)(n^r λⁿ) = λ·Δ(n^r)·λⁿ` with `Δ` the forward difference, hence
/// `α_j = λ^k·C(r,j)·Σ_i (−1)^{k−i} C(k,i) i^{r−j}`.
pub fn alpha_coeffs(
    k: usize,
    r: usize,
    lambda: &GaussianRational,
    base: OperatorBase,
) -> Result<Vec<GaussianRational>> {
    if k > r {
        return Err(Error::Index(format!("k = {k} exceeds r = {r}")));
    }
    let len = r - k + 1;
    match base {
        OperatorBase::Derivative => {
            let falling: i64 = ((r - k + 1)..=r).map(|v| v as i64).product();
            let mut out = vec![GaussianRational::zero(); len];
            out[len - 1] = GaussianRational::from_int(falling);
            Ok(out)
        }
        OperatorBase::Shift => {
            if lambda.is_zero() {
                return Err(Error::ShiftZeroLambda);
            }
            let lk = lambda.pow(k as u64);
            Ok((0..len)
                .map(|j| {
                    let diff: GaussianRational = (0..=k)
                        .map(|i| {
                            let sign = if (k - i).is_multiple_of(2) { 1 } else { -1 };
                            let term = binomial(k, i) * GaussianRational::from_int(i as i64).pow((r - j) as u64);
                            term * GaussianRational::from_int(sign)
                        })
                        .sum();
                    &(&lk * &binomial(r, j)) * &diff
                })
                .collect())
        }
    }
}

fn binomial(n: usize, k: usize) -> GaussianRational {
    let mut acc = GaussianRational::one();
    for i in 0..k {
        acc = &acc * &GaussianRational::from_ratio((n - i) as i64, (i + 1) as i64).expect("nonzero");
    }
    acc
}

/// Basis `{var^j · exp-term : j < m}` of `ker (Op − λ)^m`.
pub fn kernel_basis(lambda: &GaussianRational, m: usize, base: OperatorBase) -> Result<Vec<PolyExp>> {
    if m == 0 {
        return Err(Error::Domain("kernel dimension m must be positive".into()));
    }
    if base == OperatorBase::Shift && lambda.is_zero() {
        return Err(Error::ShiftZeroLambda);
    }
    Ok((0..m).map(|j| PolyExp::atom(lambda.clone(), j)).collect())
}

pub(crate) fn validate_factors(roots: &[(GaussianRational, usize)]) -> Result<()> {
    check_distinct_roots(roots)?;
    if let Some((r, _)) = roots.iter().find(|(_, l)| *l == 0) {
        return Err(Error::Domain(format!("multiplicity of root {r} must be positive")));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::scalar::tests::{arb_scalar, q};
    use proptest::prelude::*;

    use OperatorBase::{Derivative, Shift};

    fn pe(terms: &[(i64, &[i64])]) -> PolyExp {
        PolyExp::canonicalize(terms.iter().map(|(l, c)| (q(*l, 1), Poly::from_ints(c))))
    }

    #[test]
    fn canonicalize_examples() {
        let raw = vec![
            (q(2, 1), Poly::from_ints(&[0, 1])),
            (q(2, 1), Poly::from_ints(&[1, -1])),
        ];
        assert_eq!(PolyExp::canonicalize(raw), pe(&[(2, &[1])]));
        assert!(PolyExp::canonicalize(vec![]).is_zero());
        let raw = vec![(q(3, 1), Poly::zero()), (q(2, 1), Poly::x())];
        assert_eq!(PolyExp::canonicalize(raw), pe(&[(2, &[0, 1])]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(pe(&[(2, &[1])]).apply_shift(), pe(&[(2, &[2])]));
        assert_eq!(pe(&[(2, &[0, 1])]).apply_shift(), pe(&[(2, &[2, 2])]));
        assert!(PolyExp::zero().apply_shift().is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(pe(&[(1, &[1])]).apply_derivative(), pe(&[(1, &[1])]));
        assert_eq!(pe(&[(0, &[0, 0, 1])]).apply_derivative(), pe(&[(0, &[0, 2])]));
        assert_eq!(pe(&[(2, &[0, 1])]).apply_derivative(), pe(&[(2, &[1, 2])]));
    }

    #[test]
    fn operator_examples() {
        let s_minus_2 = OperatorSpec::root_power(Shift, q(2, 1), 1);
        assert_eq!(pe(&[(2, &[0, 1])]).apply_operator(&s_minus_2), pe(&[(2, &[2])]));
        let sq = OperatorSpec::root_power(Shift, q(2, 1), 2);
        assert!(pe(&[(2, &[0, 1])]).apply_operator(&sq).is_zero());
        let ode = OperatorSpec::new(Derivative, Poly::from_ints(&[2, -3, 1])).unwrap();
        assert_eq!(pe(&[(1, &[0, -1])]).apply_operator(&ode), pe(&[(1, &[1])]));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(
            alpha_coeffs(0, 3, &q(5, 1), Shift).unwrap(),
            vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)]
        );
        assert_eq!(alpha_coeffs(1, 1, &q(2, 1), Shift).unwrap(), vec![q(2, 1)]);
        assert_eq!(alpha_coeffs(1, 1, &q(-7, 3), Derivative).unwrap(), vec![q(1, 1)]);
        assert_eq!(alpha_coeffs(0, 0, &q(0, 1), Shift), Err(Error::ShiftZeroLambda));
        assert!(matches!(alpha_coeffs(3, 2, &q(1, 1), Derivative), Err(Error::Index(_))));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(
            kernel_basis(&q(2, 1), 3, Shift).unwrap(),
            vec![pe(&[(2, &[1])]), pe(&[(2, &[0, 1])]), pe(&[(2, &[0, 0, 1])])]
        );
        assert_eq!(
            kernel_basis(&q(0, 1), 2, Derivative).unwrap(),
            vec![pe(&[(0, &[1])]), pe(&[(0, &[0, 1])])]
        );
        assert_eq!(kernel_basis(&q(1, 1), 1, Derivative).unwrap(), vec![pe(&[(1, &[1])])]);
        assert_eq!(kernel_basis(&q(0, 1), 1, Shift), Err(Error::ShiftZeroLambda));
    }

    #[test]
    fn numeric_examples() {
        let v = pe(&[(2, &[0, 1])])
            .eval_numeric(Complex64::new(3.0, 0.0), Shift)
            .unwrap();
        assert_eq!(v, Complex64::new(24.0, 0.0));
        let v = PolyExp::zero()
            .eval_numeric(Complex64::new(0.3, 0.0), Derivative)
            .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        let v = pe(&[(1, &[0, 1])])
            .eval_numeric(Complex64::new(1.0, 0.0), Derivative)
            .unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-15);
        assert!(pe(&[(2, &[1])]).eval_numeric(Complex64::new(0.5, 0.0), Shift).is_err());
    }

    #[test]
    fn exact_sequence_examples() {
        assert_eq!(pe(&[(2, &[1])]).eval_exact_sequence(10), q(1024, 1));
        let half = PolyExp::term(q(1, 2), Poly::one());
        assert_eq!(half.eval_exact_sequence(2), q(1, 4));
        assert_eq!(pe(&[(2, &[0, 1]), (3, &[1])]).eval_exact_sequence(2), q(17, 1));
        // 0⁰ = 1
        assert_eq!(pe(&[(0, &[1])]).eval_exact_sequence(0), q(1, 1));
        assert_eq!(pe(&[(0, &[1])]).eval_exact_sequence(1), q(0, 1));
    }

    #[test]
    fn multiplicity_without_factorization() {
        let op = OperatorSpec::new(Shift, Poly::from_ints(&[-4, 8, -5, 1])).unwrap(); // (x-1)(x-2)^2
        assert_eq!(op.multiplicity(&q(2, 1)), 2);
        assert_eq!(op.multiplicity(&q(1, 1)), 1);
        assert_eq!(op.multiplicity(&q(3, 1)), 0);
    }

    #[test]
    fn roots_validation() {
        let op = OperatorSpec::new(Shift, Poly::from_ints(&[6, -5, 1])).unwrap();
        assert!(op.clone().with_roots(vec![(q(2, 1), 1), (q(3, 1), 1)]).is_ok());
        assert!(matches!(
            op.with_roots(vec![(q(2, 1), 2)]),
            Err(Error::RootsMismatch { .. })
        ));
    }

    pub(crate) fn arb_polyexp() -> impl Strategy<Value = PolyExp> {
        prop::collection::vec((arb_scalar(), prop::collection::vec(arb_scalar(), 0..4)), 0..4)
            .prop_map(|ts| PolyExp::canonicalize(ts.into_iter().map(|(l, c)| (l, Poly::new(c)))))
    }

    proptest! {
        #[test]
        fn shift_is_index_advance(f in arb_polyexp(), n in 0u64..20) {
            prop_assert_eq!(f.apply_shift().eval_exact_sequence(n), f.eval_exact_sequence(n + 1));
        }

        #[test]
        fn derivative_matches_finite_difference(f in arb_polyexp(), t in -1.0f64..1.0) {
            let h = 1e-5;
            let at = |x: f64| f.eval_numeric(Complex64::new(x, 0.0), Derivative).unwrap();
            let fd = (at(t + h) - at(t - h)) / (2.0 * h);
            let exact = f.apply_derivative().eval_numeric(Complex64::new(t, 0.0), Derivative).unwrap();
            let scale = exact.norm().max(at(t).norm()).max(1.0);
            prop_assert!((fd - exact).norm() / scale < 1e-6, "fd {} exact {}", fd, exact);
        }

        #[test]
        fn canonical_form_is_stable(f in arb_polyexp(), g in arb_polyexp(), c in arb_scalar()) {
            let again = PolyExp::canonicalize(f.terms().map(|(l, p)| (l.clone(), p.clone())));
            prop_assert_eq!(&again, &f);
            for h in [f.add(&g), f.scale(&c)] {
                prop_assert!(h.terms().all(|(_, p)| !p.is_zero()));
            }
            prop_assert!(f.sub(&f).is_zero());
        }
    }
}
