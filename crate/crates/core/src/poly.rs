//! Dense univariate polynomials over the Gaussian rationals, with the
//! extended Euclidean algorithm and Bezout certificates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// Polynomial with `coeffs[j]` the coefficient of `x^j`.
///
/// The highest stored coefficient is always nonzero; the zero polynomial has
/// no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<GaussianRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(GaussianRational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::monomial(GaussianRational::one(), 1)
    }

    /// `c·x^k`.
    pub fn monomial(c: GaussianRational, k: usize) -> Self {
        let mut coeffs = vec![GaussianRational::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// `x - root`.
    pub fn x_minus(root: &GaussianRational) -> Self {
        Poly::new(vec![-root, GaussianRational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| GaussianRational::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<GaussianRational> {
        self.coeffs
    }

    /// Coefficient of `x^j`, zero past the degree.
    pub fn coeff(&self, j: usize) -> GaussianRational {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    /// `None` stands for the degree of the zero polynomial (−∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// Divides by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(lead) => self.scale(&lead.inv().expect("nonzero leading coefficient")),
            None => Poly::zero(),
        }
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, modulus: &Poly) -> Result<Poly> {
        self.divmod(modulus).map(|(_, r)| r)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        Poly::ext_gcd(a, b).0
    }

    /// Returns `(g, s, t)` with `s·a + t·b = g` and `g` monic (or zero).
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading().cloned() {
            Some(lead) => {
                let inv = lead.inv().expect("nonzero leading coefficient");
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (Poly::zero(), Poly::zero(), Poly::zero()),
        }
    }

    /// Monic least common multiple.
    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let g = Poly::gcd(a, b);
        let (q, _) = (a * b).divmod(&g).expect("gcd of nonzero polynomials");
        q.monic()
    }

    pub fn eval(&self, x: &GaussianRational) -> GaussianRational {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussianRational::zero(), |acc, c| &(&acc * x) + c)
    }

    /// `p(x + 1)`.
    pub fn substitute_shift(&self) -> Poly {
        let x_plus_one = Poly::from_ints(&[1, 1]);
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| {
            &(&acc * &x_plus_one) + &Poly::constant(c.clone())
        })
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * &GaussianRational::from_int(j as i64))
                .collect(),
        )
    }

    /// Expands `lead·∏(x − λ_i)^{l_i}`.
    pub fn from_factored(factors: &[(GaussianRational, usize)], lead: &GaussianRational) -> Result<Poly> {
        if lead.is_zero() {
            return Err(Error::ZeroLead);
        }
        check_distinct_roots(factors)?;
        let mut p = Poly::constant(lead.clone());
        for (root, mult) in factors {
            if *mult == 0 {
                return Err(Error::Domain(format!("multiplicity of root {root} must be positive")));
            }
            p = &p * &Poly::x_minus(root).pow(*mult);
        }
        Ok(p)
    }
}

pub(crate) fn check_distinct_roots(factors: &[(GaussianRational, usize)]) -> Result<()> {
    for (k, (root, _)) in factors.iter().enumerate() {
        if factors[..k].iter().any(|(other, _)| other == root) {
            return Err(Error::DuplicateRoot(root.to_string()));
        }
    }
    Ok(())
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::format_poly(self, "x"))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|j| &self.coeff(j) + &rhs.coeff(j)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|j| &self.coeff(j) - &rhs.coeff(j)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Cofactors `r_i` with `Σ r_i·p_i = combination`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutCertificate {
    pub cofactors: Vec<Poly>,
    pub inputs: Vec<Poly>,
    pub combination: Poly,
}

impl BezoutCertificate {
    /// Recomputes `Σ r_i·p_i` and compares it with the stored combination.
    pub fn verify(&self) -> bool {
        self.cofactors.len() == self.inputs.len()
            && self
                .cofactors
                .iter()
                .zip(&self.inputs)
                .fold(Poly::zero(), |acc, (r, p)| &acc + &(r * p))
                == self.combination
    }
}

/// Bezout cofactors for a family with trivial gcd, folding the pairwise
/// extended Euclidean algorithm over the inputs.
pub fn bezout(ps: &[Poly]) -> Result<BezoutCertificate> {
    let (first, rest) = ps
        .split_first()
        .ok_or_else(|| Error::Domain("bezout needs at least one polynomial".into()))?;
    let mut g = first.clone();
    let mut cofactors = vec![Poly::one()];
    for p in rest {
        let (g2, s, t) = Poly::ext_gcd(&g, p);
        for r in cofactors.iter_mut() {
            *r = &*r * &s;
        }
        cofactors.push(t);
        g = g2;
    }
    if g.degree() != Some(0) {
        return Err(Error::NotCoprime(format!("{g:?}")));
    }
    let inv = g.coeffs[0].inv()?;
    let cert = BezoutCertificate {
        cofactors: cofactors.iter().map(|r| r.scale(&inv)).collect(),
        inputs: ps.to_vec(),
        combination: Poly::one(),
    };
    if !cert.verify() {
        return Err(Error::Internal("Bezout certificate failed verification".into()));
    }
    Ok(cert)
}

/// `(s, t)` with `s·a + t·b = 1`.
pub fn pairwise_bezout(a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
    let mut cert = bezout(&[a.clone(), b.clone()])?;
    let t = cert.cofactors.pop().expect("two cofactors");
    let s = cert.cofactors.pop().expect("two cofactors");
    Ok((s, t))
}
