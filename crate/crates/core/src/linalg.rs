//! Exact dense linear algebra over the Gaussian rationals.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::GaussianRational;

/// A column vector.
pub type Vector = Vec<GaussianRational>;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<GaussianRational>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            entries: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::diagonal(&vec![GaussianRational::one(); n])
    }

    pub fn diagonal(diag: &[GaussianRational]) -> Matrix {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (k, d) in diag.iter().enumerate() {
            m.set(k, k, d.clone());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Matrix::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Matrix> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| GaussianRational::from_int(v)).collect())
                .collect(),
        )
    }

    /// Builds an `len × columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(len: usize, columns: &[Vector]) -> Result<Matrix> {
        let mut m = Matrix::zeros(len, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "column {c} has length {}, expected {len}",
                    col.len()
                )));
            }
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &GaussianRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GaussianRational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[GaussianRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussianRational::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn scale(&self, s: &GaussianRational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    fn same_shape(&self, other: &Matrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + &(a * other.get(k, c));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn pow(&self, k: usize) -> Result<Matrix> {
        self.require_square()?;
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `p(M)` by Horner's scheme.
    pub fn eval_poly(&self, p: &Poly) -> Result<Matrix> {
        self.require_square()?;
        let id = Matrix::identity(self.rows);
        let mut acc = Matrix::zeros(self.rows, self.cols);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self)?.add(&id.scale(c))?;
        }
        Ok(acc)
    }

    /// Reduced row-echelon form and the (strictly increasing) pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for c in col..m.cols {
                    let v = m.get(r, c) - &(&factor * m.get(row, c));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Some solution of `A·x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (r, rhs) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, rhs.clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = red.get(r, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// A basis of `{x : M·x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let (red, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![GaussianRational::zero(); self.cols];
                v[free] = GaussianRational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -red.get(r, free);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Option<Matrix>> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(Some(Matrix::zeros(0, 0)));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, GaussianRational::one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Ok(None);
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c).clone());
            }
        }
        Ok(Some(inv))
    }

    /// Monic polynomial of least degree annihilating the matrix, computed as
    /// the lcm of the Krylov annihilators of the standard basis vectors.
    pub fn minimal_polynomial(&self) -> Result<Poly> {
        self.require_square()?;
        let n = self.rows;
        let mut acc = Poly::one();
        for j in 0..n {
            let mut e = vec![GaussianRational::zero(); n];
            e[j] = GaussianRational::one();
            acc = Poly::lcm(&acc, &self.krylov_annihilator(e)?);
        }
        Ok(acc)
    }

    fn krylov_annihilator(&self, v: Vector) -> Result<Poly> {
        let n = self.rows;
        let mut krylov = vec![v];
        loop {
            let next = self.mul_vec(krylov.last().expect("nonempty"))?;
            let basis = Matrix::from_columns(n, &krylov)?;
            if let Some(c) = basis.solve(&next)? {
                let mut coeffs: Vec<GaussianRational> = c.into_iter().map(|x| -x).collect();
                coeffs.push(GaussianRational::one());
                return Ok(Poly::new(coeffs));
            }
            krylov.push(next);
        }
    }
}

/// Coordinates of `v` in the span of `basis` (columns), if it lies there.
pub fn in_span(v: &[GaussianRational], basis: &[Vector]) -> Result<Option<Vector>> {
    if basis.is_empty() {
        return Ok(v.iter().all(GaussianRational::is_zero).then(Vec::new));
    }
    Matrix::from_columns(v.len(), basis)?.solve(v)
}

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained reduced echelon basis of a row space.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RowEchelon {
    width: usize,
    rows: Vec<(usize, Vector)>,
}

impl RowEchelon {
    pub fn new(width: usize) -> RowEchelon {
        RowEchelon {
            width,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// What is left of `v` after eliminating every stored pivot.
    pub fn reduce(&self, v: &[GaussianRational]) -> Vector {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &(&f * y);
            }
        }
        v
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        self.reduce(v).iter().all(GaussianRational::is_zero)
    }

    /// Adds `v` to the span; returns false (and changes nothing) if it was
    /// already there.
    pub fn insert(&mut self, v: &[GaussianRational]) -> bool {
        assert_eq!(v.len(), self.width, "vector width");
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = &*x * &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                *x -= &(&f * y);
            }
        }
        self.rows.push((p, r));
        true
    }
}
