//! JSON documents for expressions, decompositions and solver results.
//!
//! Scalars serialize as `{"re":"a/b","im":"c/d"}`. Every document converts
//! back into the value it was made from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::polyexp::{OperatorBase, PolyExp};
use crate::scalar::GaussianRational;
use crate::solver::GeneralSolution;
use crate::structure::{Component, Decomposition, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub lambda: GaussianRational,
    pub coeffs: Vec<GaussianRational>,
}

/// `{"base":"shift"|"derivative","terms":[{"lambda":…,"coeffs":[…]},…]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyExpJson {
    pub base: OperatorBase,
    pub terms: Vec<TermJson>,
}

impl PolyExpJson {
    pub fn new(f: &PolyExp, base: OperatorBase) -> PolyExpJson {
        PolyExpJson {
            base,
            terms: f
                .terms()
                .map(|(lambda, p)| TermJson {
                    lambda: lambda.clone(),
                    coeffs: p.coeffs().to_vec(),
                })
                .collect(),
        }
    }

    /// Rejects documents that are not in canonical form, so a round trip is
    /// an exact identity.
    pub fn to_polyexp(&self) -> Result<PolyExp> {
        let f = PolyExp::canonicalize(
            self.terms
                .iter()
                .map(|t| (t.lambda.clone(), Poly::new(t.coeffs.clone()))),
        );
        if PolyExpJson::new(&f, self.base) != *self {
            return Err(Error::Domain(
                "terms must have distinct lambdas in increasing order and no trailing zero coefficients".into(),
            ));
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub lambda: GaussianRational,
    pub multiplicity: usize,
    pub basis: Vec<PolyExpJson>,
}

/// `{"invariant":bool,"components":[…],"witness":polyexp?}`; the witness is
/// the image that leaves the span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub invariant: bool,
    pub components: Vec<ComponentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PolyExpJson>,
}

impl DecompositionJson {
    pub fn new(invariant: bool, d: &Decomposition, witness: Option<&Witness>, base: OperatorBase) -> DecompositionJson {
        DecompositionJson {
            invariant,
            components: d
                .components
                .iter()
                .map(|c| ComponentJson {
                    lambda: c.lambda.clone(),
                    multiplicity: c.multiplicity,
                    basis: c.basis.iter().map(|b| PolyExpJson::new(b, base)).collect(),
                })
                .collect(),
            witness: witness.map(|w| PolyExpJson::new(&w.image, base)),
        }
    }

    pub fn components(&self) -> Result<Vec<Component>> {
        self.components
            .iter()
            .map(|c| {
                Ok(Component {
                    lambda: c.lambda.clone(),
                    multiplicity: c.multiplicity,
                    basis: c.basis.iter().map(PolyExpJson::to_polyexp).collect::<Result<_>>()?,
                })
            })
            .collect()
    }
}

/// `{"particular":…,"homogeneous":[…],"residual_verified":true,"solution":…?}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub particular: PolyExpJson,
    pub homogeneous: Vec<PolyExpJson>,
    pub residual_verified: bool,
    /// Present when initial values pinned the free constants.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<PolyExpJson>,
}

impl SolutionJson {
    /// Only built from solutions that passed substitution, hence
    /// `residual_verified` is always true.
    pub fn new(g: &GeneralSolution, solution: Option<&PolyExp>) -> SolutionJson {
        SolutionJson {
            particular: PolyExpJson::new(&g.particular, g.base),
            homogeneous: g
                .homogeneous_basis
                .iter()
                .map(|h| PolyExpJson::new(h, g.base))
                .collect(),
            residual_verified: true,
            solution: solution.map(|y| PolyExpJson::new(y, g.base)),
        }
    }

    pub fn to_general(&self) -> Result<GeneralSolution> {
        Ok(GeneralSolution {
            particular: self.particular.to_polyexp()?,
            homogeneous_basis: self
                .homogeneous
                .iter()
                .map(PolyExpJson::to_polyexp)
                .collect::<Result<_>>()?,
            base: self.particular.base,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexp::tests::arb_polyexp;
    use crate::polyexp::OperatorSpec;
    use crate::scalar::tests::q;
    use crate::solver::general_solution;
    use crate::structure::{check_invariance, closure, decompose};
    use proptest::prelude::*;

    #[test]
    fn polyexp_document_shape() {
        let f = PolyExp::canonicalize([(q(2, 1), Poly::from_ints(&[1, 0, 1])), (q(3, 1), Poly::one())]);
        let doc = serde_json::to_value(PolyExpJson::new(&f, OperatorBase::Shift)).unwrap();
        assert_eq!(
            doc,
            serde_json::json!({
                "base": "shift",
                "terms": [
                    {"lambda": {"re": "2", "im": "0"}, "coeffs": [{"re": "1", "im": "0"}, {"re": "0", "im": "0"}, {"re": "1", "im": "0"}]},
                    {"lambda": {"re": "3", "im": "0"}, "coeffs": [{"re": "1", "im": "0"}]}
                ]
            })
        );
    }

    #[test]
    fn non_canonical_documents_are_rejected() {
        let doc = PolyExpJson {
            base: OperatorBase::Shift,
            terms: vec![TermJson {
                lambda: q(2, 1),
                coeffs: vec![q(1, 1), q(0, 1)],
            }],
        };
        assert!(doc.to_polyexp().is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let g = [PolyExp::atom(q(2, 1), 1)];
        let report = check_invariance(&g, OperatorBase::Shift).unwrap();
        let doc = DecompositionJson::new(
            report.invariant,
            &report.decomposition,
            report.witness.as_ref(),
            OperatorBase::Shift,
        );
        let text = serde_json::to_string(&doc).unwrap();
        let back: DecompositionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(!back.invariant);
        assert_eq!(back.components().unwrap(), report.decomposition.components);
        assert_eq!(
            back.witness.unwrap().to_polyexp().unwrap(),
            report.witness.unwrap().image
        );

        let d = decompose(&closure(&g, OperatorBase::Shift).unwrap()).unwrap();
        let doc = DecompositionJson::new(true, &d, None, OperatorBase::Shift);
        assert!(!serde_json::to_string(&doc).unwrap().contains("witness"));
    }

    #[test]
    fn solution_round_trip() {
        let op =
            OperatorSpec::from_factored(OperatorBase::Derivative, vec![(q(1, 1), 1), (q(2, 1), 1)], q(1, 1)).unwrap();
        let g = general_solution(&op, &PolyExp::atom(q(1, 1), 0)).unwrap();
        let doc = SolutionJson::new(&g, None);
        let back: SolutionJson = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back.to_general().unwrap(), g);
        assert!(back.residual_verified);
    }

    proptest! {
        #[test]
        fn polyexp_documents_round_trip(f in arb_polyexp(), shift in any::<bool>()) {
            let base = if shift { OperatorBase::Shift } else { OperatorBase::Derivative };
            let doc = PolyExpJson::new(&f, base);
            let back: PolyExpJson = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_polyexp().unwrap(), f);
        }
    }
}
