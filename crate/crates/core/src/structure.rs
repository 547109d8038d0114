//! Invariant subspaces of polynomial-exponential spaces and primary
//! decompositions.
//!
//! A finite-dimensional space of sequences (functions) is invariant under the
//! shift (derivative) exactly when it is a direct sum of full spaces
//! `ker (Op − λ_i)^{l_i}`. The components are cut out by the Bezout
//! projectors `π_i = r_i·p_i`, where `p_i = p/(x − λ_i)^{l_i}` and
//! `Σ r_i p_i = 1`. Two independent routes are provided: the structural one
//! working on atoms `var^j·exp-term` and a coordinate one on matrices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, RowEchelon, Vector};
use crate::poly::{bezout, Poly};
use crate::polyexp::{kernel_basis, validate_factors, OperatorBase, OperatorSpec, PolyExp};
use crate::scalar::GaussianRational;

/// `(λ, j)`: the atom `var^j` times the λ exponential.
pub type Atom = (GaussianRational, usize);

/// Factored polynomial `∏(x − λ_i)^{l_i}`, roots in canonical order.
pub type Factors = Vec<(GaussianRational, usize)>;

/// Span of linearly independent polynomial-exponential expressions,
/// together with their coordinates in a frame of atoms.
#[derive(Clone, Debug)]
pub struct Subspace {
    base: OperatorBase,
    basis: Vec<PolyExp>,
    frame: Vec<Atom>,
    echelon: RowEchelon,
}

impl Subspace {
    fn in_frame(base: OperatorBase, frame: Vec<Atom>, candidates: impl IntoIterator<Item = PolyExp>) -> Subspace {
        let mut space = Subspace {
            base,
            basis: Vec::new(),
            echelon: RowEchelon::new(frame.len()),
            frame,
        };
        for g in candidates {
            space.try_push(g);
        }
        space
    }

    /// Adjoins `v` if it is independent of the current basis and expressible
    /// in the frame.
    fn try_push(&mut self, v: PolyExp) -> bool {
        match self.frame_coordinates(&v) {
            Some(c) if self.echelon.insert(&c) => {
                self.basis.push(v);
                true
            }
            _ => false,
        }
    }

    pub fn base(&self) -> OperatorBase {
        self.base
    }

    pub fn basis(&self) -> &[PolyExp] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn frame(&self) -> &[Atom] {
        &self.frame
    }

    /// Rows are basis elements, columns are frame atoms.
    pub fn coordinate_matrix(&self) -> Matrix {
        let rows = self
            .basis
            .iter()
            .map(|b| self.frame_coordinates(b).expect("basis lies in its frame"))
            .collect();
        Matrix::from_rows(rows).unwrap_or_else(|_| Matrix::zeros(0, self.frame.len()))
    }

    /// Coordinates of `v` in the atom frame, `None` if `v` uses an atom
    /// outside it.
    pub fn frame_coordinates(&self, v: &PolyExp) -> Option<Vector> {
        let mut out = vec![GaussianRational::zero(); self.frame.len()];
        for (lambda, p) in v.terms() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let k = self.frame.binary_search_by(|(l, d)| (l, *d).cmp(&(lambda, j))).ok()?;
                out[k] = c.clone();
            }
        }
        Some(out)
    }

    pub fn contains(&self, v: &PolyExp) -> bool {
        self.frame_coordinates(v).is_some_and(|c| self.echelon.contains(&c))
    }

    /// Coordinates of `v` in the basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &PolyExp) -> Option<Vector> {
        let target = self.frame_coordinates(v)?;
        let columns = self
            .basis
            .iter()
            .map(|b| self.frame_coordinates(b).expect("basis lies in its frame"))
            .collect::<Vec<_>>();
        crate::linalg::in_span(&target, &columns).ok().flatten()
    }

    /// Matrix of the base operator restricted to the subspace, column `j`
    /// holding the coordinates of `Op(b_j)`.
    pub fn operator_matrix(&self) -> Result<Matrix> {
        let columns = self
            .basis
            .iter()
            .map(|b| self.coordinates(&b.apply_base(self.base)).ok_or(Error::NotInvariant))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(self.dim(), &columns)
    }
}

fn check_shift_lambdas(generators: &[PolyExp], base: OperatorBase) -> Result<()> {
    if base == OperatorBase::Shift && generators.iter().any(|g| g.get(&GaussianRational::zero()).is_some()) {
        return Err(Error::ShiftZeroLambda);
    }
    Ok(())
}

/// Span of the generators; the basis keeps the generators that raise the rank.
pub fn make_subspace(generators: &[PolyExp], base: OperatorBase) -> Result<Subspace> {
    check_shift_lambdas(generators, base)?;
    let mut frame: Vec<Atom> = generators.iter().flat_map(PolyExp::atoms).collect();
    frame.sort();
    frame.dedup();
    Ok(Subspace::in_frame(base, frame, generators.iter().cloned()))
}

/// Smallest subspace containing the generators and invariant under the base
/// operator. The frame `{(λ, j) : j ≤ max degree of λ}` is closed under the
/// operator, so repeatedly adjoining images terminates.
pub fn closure(generators: &[PolyExp], base: OperatorBase) -> Result<Subspace> {
    check_shift_lambdas(generators, base)?;
    let mut top: BTreeMap<GaussianRational, usize> = BTreeMap::new();
    for (lambda, j) in generators.iter().flat_map(PolyExp::atoms) {
        let d = top.entry(lambda).or_insert(0);
        *d = (*d).max(j);
    }
    let frame: Vec<Atom> = top
        .into_iter()
        .flat_map(|(l, d)| (0..=d).map(move |j| (l.clone(), j)))
        .collect();
    let mut space = Subspace::in_frame(base, frame, std::iter::empty());
    let mut pending: std::collections::VecDeque<PolyExp> = generators.iter().cloned().collect();
    while let Some(v) = pending.pop_front() {
        let image = v.apply_base(base);
        if space.try_push(v) {
            pending.push_back(image);
        }
    }
    Ok(space)
}

/// A basis element whose image under the base operator leaves the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub element: PolyExp,
    pub image: PolyExp,
}

pub fn invariance_witness(space: &Subspace) -> Option<Witness> {
    space.basis.iter().find_map(|b| {
        let image = b.apply_base(space.base);
        (!space.contains(&image)).then(|| Witness {
            element: b.clone(),
            image,
        })
    })
}

/// Invariance under the base operator, hence under every polynomial in it.
pub fn is_invariant(space: &Subspace) -> bool {
    invariance_witness(space).is_none()
}

/// Factored minimal polynomial of the base operator restricted to an
/// invariant subspace, read off the atoms: `l_i` is one more than the top
/// degree attached to `λ_i`. Both annihilation and minimality are checked.
pub fn structural_min_poly(space: &Subspace) -> Result<Factors> {
    if space.dim() == 0 {
        return Err(Error::ZeroSpace);
    }
    if !is_invariant(space) {
        return Err(Error::NotInvariant);
    }
    let mut top: BTreeMap<GaussianRational, usize> = BTreeMap::new();
    for b in &space.basis {
        for (lambda, p) in b.terms() {
            let d = top.entry(lambda.clone()).or_insert(0);
            *d = (*d).max(p.degree().expect("canonical terms are nonzero") + 1);
        }
    }
    let factors: Factors = top.into_iter().collect();
    let annihilates = |fs: &[(GaussianRational, usize)]| {
        let fs: Factors = fs.iter().filter(|(_, l)| *l > 0).cloned().collect();
        let op = OperatorSpec::from_factored(space.base, fs, GaussianRational::one()).expect("distinct roots");
        space.basis.iter().all(|b| b.apply_operator(&op).is_zero())
    };
    if !annihilates(&factors) {
        return Err(Error::Internal(
            "structural minimal polynomial does not annihilate".into(),
        ));
    }
    for i in 0..factors.len() {
        let mut lowered = factors.clone();
        lowered[i].1 -= 1;
        if annihilates(&lowered) {
            return Err(Error::Internal(format!(
                "exponent of root {} is not minimal",
                factors[i].0
            )));
        }
    }
    Ok(factors)
}

/// Projector polynomials `π_i = r_i·p_i mod p` with `Σ π_i ≡ 1 (mod p)`,
/// where `p = ∏(x − λ_i)^{l_i}` and `p_i = p/(x − λ_i)^{l_i}`.
pub fn bezout_projectors(factors: &[(GaussianRational, usize)]) -> Result<Vec<Poly>> {
    validate_factors(factors)?;
    if factors.is_empty() {
        return Ok(Vec::new());
    }
    let one = GaussianRational::one();
    let p = Poly::from_factored(factors, &one)?;
    let cofactors: Vec<Poly> = factors
        .iter()
        .map(|(root, l)| {
            let (q, r) = p.divmod(&Poly::x_minus(root).pow(*l))?;
            debug_assert!(r.is_zero());
            Ok(q)
        })
        .collect::<Result<_>>()?;
    let cert = bezout(&cofactors)?;
    let projectors: Vec<Poly> = cert
        .cofactors
        .iter()
        .zip(&cofactors)
        .map(|(r, pi)| (r * pi).rem(&p))
        .collect::<Result<_>>()?;
    let total = projectors.iter().fold(Poly::zero(), |acc, x| &acc + x).rem(&p)?;
    if total != Poly::one().rem(&p)? {
        return Err(Error::Internal("projectors do not sum to 1 modulo p".into()));
    }
    Ok(projectors)
}

/// The factored minimal polynomial of an invariant subspace together with
/// its Bezout projectors.
#[derive(Clone, Debug)]
pub struct PrimaryProjectors {
    pub base: OperatorBase,
    pub factors: Factors,
    pub projectors: Vec<Poly>,
}

impl PrimaryProjectors {
    pub fn for_subspace(space: &Subspace) -> Result<PrimaryProjectors> {
        let factors = structural_min_poly(space)?;
        let projectors = bezout_projectors(&factors)?;
        Ok(PrimaryProjectors {
            base: space.base,
            factors,
            projectors,
        })
    }

    /// `π_i(Op)·v`.
    pub fn project(&self, v: &PolyExp, i: usize) -> Result<PolyExp> {
        let pi = self
            .projectors
            .get(i)
            .ok_or_else(|| Error::Index(format!("component {i} of {}", self.projectors.len())))?;
        Ok(v.apply_poly(pi, self.base))
    }
}

/// Component `i` of `v` in the primary decomposition of `space`.
pub fn project_component(v: &PolyExp, space: &Subspace, i: usize) -> Result<PolyExp> {
    if !space.contains(v) {
        return Err(Error::NotMember);
    }
    if v.is_zero() && space.dim() == 0 {
        return Ok(PolyExp::zero());
    }
    PrimaryProjectors::for_subspace(space)?.project(v, i)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub lambda: GaussianRational,
    pub multiplicity: usize,
    pub basis: Vec<PolyExp>,
}

/// `V = ⊕ ker (Op − λ_i)^{l_i} ∩ V`, components sorted by `λ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub components: Vec<Component>,
    /// Every component is the full kernel `ker (Op − λ_i)^{l_i}`.
    pub is_full: bool,
}

impl Decomposition {
    pub fn signature(&self) -> Vec<(GaussianRational, usize)> {
        self.components
            .iter()
            .map(|c| (c.lambda.clone(), c.multiplicity))
            .collect()
    }
}

/// Primary decomposition of an invariant subspace through its projectors.
pub fn decompose(space: &Subspace) -> Result<Decomposition> {
    if !is_invariant(space) {
        return Err(Error::NotInvariant);
    }
    if space.dim() == 0 {
        return Ok(Decomposition {
            components: Vec::new(),
            is_full: true,
        });
    }
    let proj = PrimaryProjectors::for_subspace(space)?;
    let mut components = Vec::new();
    let mut all = RowEchelon::new(space.frame.len());
    for (i, (lambda, mult)) in proj.factors.iter().enumerate() {
        let mut part = Subspace::in_frame(space.base, space.frame.clone(), std::iter::empty());
        for b in &space.basis {
            part.try_push(proj.project(b, i)?);
        }
        for v in &part.basis {
            all.insert(&part.frame_coordinates(v).expect("projection stays in frame"));
        }
        components.push((part, lambda.clone(), *mult));
    }
    let total: usize = components.iter().map(|(p, _, _)| p.dim()).sum();
    if total != space.dim() || all.dim() != space.dim() {
        return Err(Error::Internal(format!(
            "component dimensions {total} (rank {}) do not add up to {}",
            all.dim(),
            space.dim()
        )));
    }
    for (a, (pa, _, _)) in components.iter().enumerate() {
        for (pb, _, _) in &components[a + 1..] {
            let mut pair = pa.echelon.clone();
            let independent = pb
                .basis
                .iter()
                .all(|v| pair.insert(&pb.frame_coordinates(v).expect("in frame")));
            if !independent {
                return Err(Error::Internal("components intersect nontrivially".into()));
            }
        }
    }
    // A full component is reported in the standard basis `var^j·λ-exponential`.
    let mut is_full = true;
    let mut out = Vec::with_capacity(components.len());
    for (part, lambda, multiplicity) in components {
        let kernel = kernel_basis(&lambda, multiplicity, space.base)?;
        let full = part.dim() == multiplicity && kernel.iter().all(|k| part.contains(k));
        is_full &= full;
        out.push(Component {
            lambda,
            multiplicity,
            basis: if full { kernel } else { part.basis },
        });
    }
    Ok(Decomposition {
        components: out,
        is_full,
    })
}

/// Outcome of checking a span of generators for invariance.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub span: Subspace,
    pub witness: Option<Witness>,
    /// The invariant closure, present only when the span is not invariant.
    pub closure: Option<Subspace>,
    /// Decomposition of the span if invariant, otherwise of its closure.
    pub decomposition: Decomposition,
}

/// Decides whether the span of the generators is invariant and decomposes it
/// (or, failing that, its invariant closure).
pub fn check_invariance(generators: &[PolyExp], base: OperatorBase) -> Result<InvarianceReport> {
    let span = make_subspace(generators, base)?;
    match invariance_witness(&span) {
        None => Ok(InvarianceReport {
            invariant: true,
            decomposition: decompose(&span)?,
            span,
            witness: None,
            closure: None,
        }),
        Some(w) => {
            let closed = closure(generators, base)?;
            Ok(InvarianceReport {
                invariant: false,
                decomposition: decompose(&closed)?,
                span,
                witness: Some(w),
                closure: Some(closed),
            })
        }
    }
}

/// Generalized eigenspace of a matrix for one root of its minimal polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixComponent {
    pub lambda: GaussianRational,
    pub multiplicity: usize,
    pub basis: Vec<Vector>,
}

fn check_annihilates(m: &Matrix, factors: &[(GaussianRational, usize)]) -> Result<()> {
    validate_factors(factors)?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "primary decomposition needs a square matrix".into(),
        ));
    }
    let p = Poly::from_factored(factors, &GaussianRational::one())?;
    if !m.eval_poly(&p)?.is_zero() {
        return Err(Error::InvalidMinPoly(
            "the supplied factors do not annihilate the matrix".into(),
        ));
    }
    Ok(())
}

/// `ker (M − λ_i)^{l_i}` for each supplied root; the caller provides the
/// factored annihilating polynomial. Directness is verified by rank.
pub fn primary_decompose_matrix(m: &Matrix, factors: &[(GaussianRational, usize)]) -> Result<Vec<MatrixComponent>> {
    check_annihilates(m, factors)?;
    let n = m.rows();
    let id = Matrix::identity(n);
    let mut out = Vec::new();
    let mut stacked = Vec::new();
    for (lambda, mult) in factors {
        let shifted = m.sub(&id.scale(lambda))?.pow(*mult)?;
        let basis = shifted.kernel_basis();
        stacked.extend(basis.iter().cloned());
        out.push(MatrixComponent {
            lambda: lambda.clone(),
            multiplicity: *mult,
            basis,
        });
    }
    if stacked.len() != n || Matrix::from_columns(n, &stacked)?.rank() != n {
        return Err(Error::Internal("generalized eigenspaces are not a direct sum".into()));
    }
    Ok(out)
}

/// The projector matrices `π_i(M)`.
pub fn matrix_projectors(m: &Matrix, factors: &[(GaussianRational, usize)]) -> Result<Vec<Matrix>> {
    check_annihilates(m, factors)?;
    bezout_projectors(factors)?.iter().map(|pi| m.eval_poly(pi)).collect()
}
