//! Exact computations with polynomial-exponential sequences and functions.
//!
//! The finite-dimensional subspaces of sequences (resp. functions) that are
//! invariant under the shift operator `S` (resp. the derivative `D`) are
//! exactly the direct sums of spaces `{λⁿ p(n) : deg p < m}` (resp.
//! `{e^{λt} p(t) : deg p < m}`). This crate builds those spaces, checks and
//! decomposes invariant subspaces through Bezout projectors, and solves
//! constant-coefficient recurrences and ODEs whose right-hand sides live in
//! them. All arithmetic is exact over the Gaussian rationals.
//!
//! ```
//! use polyexp::{format_polyexp, parse_equation, solve_ivp, GaussianRational};
//!
//! let (op, rhs) = parse_equation("y[n+2] = 5*y[n+1] - 6*y[n]; roots=2,3", None)?;
//! let y = solve_ivp(&op, &rhs, &[GaussianRational::from_int(1), GaussianRational::from_int(2)])?;
//! assert_eq!(format_polyexp(&y, op.base()), "2^n");
//! # Ok::<(), polyexp::Error>(())
//! ```

pub mod error;
pub mod json;
pub mod linalg;
pub mod poly;
pub mod polyexp;
pub mod scalar;
pub mod solver;
pub mod structure;
pub mod syntax;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use poly::{bezout, pairwise_bezout, BezoutCertificate, Poly};
pub use polyexp::{alpha_coeffs, kernel_basis, Factorization, OperatorBase, OperatorSpec, PolyExp};
pub use scalar::{GaussianRational, Rational};
pub use solver::{
    general_solution, homogeneous_basis, particular_solution, solve_ivp, verify_residual, GeneralSolution,
};
pub use structure::{
    bezout_projectors, check_invariance, closure, decompose, is_invariant, make_subspace, primary_decompose_matrix,
    structural_min_poly, Decomposition, Subspace,
};
pub use syntax::{format_polyexp, parse_equation, parse_expression, ParseError};
