//! Small dense complex linear algebra.
//!
//! Everything here is sized for desk-scale problems (a few dozen rows at
//! most). Matrices are stored row-major and are validated on construction,
//! so no public operation ever sees a NaN or an infinity.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Relative tolerance for scalar equality predicates.
    pub eq_tol: f64,
    /// Width of the boundary band used by region membership.
    pub geom_tol: f64,
    /// Off-diagonal convergence threshold of the Jacobi eigensolver, relative
    /// to the Frobenius norm of the input.
    pub eig_tol: f64,
    /// Sweep cap of the Jacobi eigensolver.
    pub max_sweeps: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eq_tol: 1e-9,
            geom_tol: 1e-9,
            eig_tol: 1e-12,
            max_sweeps: 64,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eq_tol", self.eq_tol),
            ("geom_tol", self.geom_tol),
            ("eig_tol", self.eig_tol),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidTolerance("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_finite(z: Complex64, context: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Wire form of [`Matrix`]: `{"rows", "cols", "entries": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixDoc> for Matrix {
    type Error = Error;

    fn try_from(doc: MatrixDoc) -> Result<Self> {
        let data = doc
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Matrix::new(doc.rows, doc.cols, data)
    }
}

impl From<Matrix> for MatrixDoc {
    fn from(m: Matrix) -> Self {
        MatrixDoc {
            rows: m.rows,
            cols: m.cols,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be at least 1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for &z in &data {
            check_finite(z, "matrix entry")?;
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be at least 1");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![ZERO; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self::new(n, n, data)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        let cols = columns.len();
        let mut data = vec![ZERO; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                data[i * cols + j] = z;
            }
        }
        Self::new(rows, cols, data)
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `M* M`.
    pub fn gram(&self) -> Self {
        &self.adjoint() * self
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `max |M - M*|` over entries; zero for non-square input is meaningless,
    /// so non-square matrices report infinity.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub(crate) fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `<x, y> = sum x_i conj(y_i)`, linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scales `x` to unit length; returns `None` for the zero vector.
pub fn normalized(x: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = norm(x);
    (n > 0.0).then(|| x.iter().map(|z| z / n).collect())
}

pub fn basis_vector(n: usize, i: usize) -> Vec<Complex64> {
    let mut e = vec![ZERO; n];
    e[i] = ONE;
    e
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `j` pairs with `values[j]`.
    pub vectors: Matrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j)
    }

    pub fn top(&self) -> (f64, Vec<Complex64>) {
        let j = self.values.len() - 1;
        (self.values[j], self.vector(j))
    }

    /// Applies `f(H)` to `x` through the spectral decomposition:
    /// `sum_j f(lambda_j) <x, e_j> e_j`.
    pub fn apply_fn(&self, x: &[Complex64], f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let n = self.values.len();
        let mut out = vec![ZERO; n];
        for (j, &lambda) in self.values.iter().enumerate() {
            let e = self.vector(j);
            let coeff = f(lambda) * inner(x, &e);
            for (o, ei) in out.iter_mut().zip(&e) {
                *o += coeff * ei;
            }
        }
        out
    }
}

/// Cyclic-by-row complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eigen(m: &Matrix, cfg: &ToleranceConfig) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let allowed = cfg.eq_tol * (1.0 + m.max_abs());
    let deviation = m.hermitian_deviation();
    if deviation > allowed {
        return Err(Error::NotHermitian { deviation, allowed });
    }

    let n = m.rows;
    // Work on the exact Hermitian part.
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let threshold = cfg.eig_tol * scale;

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == cfg.max_sweeps {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| v.column(i)).collect();
    Ok(HermitianEigen {
        values,
        vectors: Matrix::from_columns(&columns)?,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// With `a[p][q] = r e^{i phi}`, the rotation is `G = D R D*` where
/// `D = diag(1, e^{-i phi})` on the `(p, q)` plane and `R` is the real
/// symmetric Jacobi rotation for `[[a_pp, r], [r, a_qq]]`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, scale: f64) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 || r <= f64::EPSILON * 1e-3 * scale {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pq = phase * s;
    let g_qp = -phase.conj() * s;

    let n = a.rows;
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * c;
    }
    // A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * g_qp.conj();
        a[(q, k)] = apk * g_pq.conj() + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    // V <- V G
    for k in 0..v.rows {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * c;
    }
}

/// Largest singular value with its singular vectors: `M right = value * left`.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub value: f64,
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

/// Top singular triple from the smaller of the two Gram matrices.
pub fn top_singular(m: &Matrix, cfg: &ToleranceConfig) -> Result<SingularTriple> {
    if m.is_zero() {
        return Ok(SingularTriple {
            value: 0.0,
            left: basis_vector(m.rows, 0),
            right: basis_vector(m.cols, 0),
        });
    }
    if m.cols <= m.rows {
        let (_, right) = hermitian_eigen(&m.gram(), cfg)?.top();
        let image = m.matvec(&right);
        let value = norm(&image);
        let left = normalized(&image).unwrap_or_else(|| basis_vector(m.rows, 0));
        Ok(SingularTriple { value, left, right })
    } else {
        let adj = m.adjoint();
        let (_, left) = hermitian_eigen(&adj.gram(), cfg)?.top();
        let image = adj.matvec(&left);
        let value = norm(&image);
        let right = normalized(&image).unwrap_or_else(|| basis_vector(m.cols, 0));
        Ok(SingularTriple { value, left, right })
    }
}

/// Spectral norm (largest singular value); exactly zero for the zero matrix.
pub fn operator_norm(m: &Matrix, cfg: &ToleranceConfig) -> Result<f64> {
    top_singular(m, cfg).map(|t| t.value)
}
