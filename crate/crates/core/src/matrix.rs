//! Dense complex matrices, the Hermitian newtype, and Loewner-order comparison.

use std::fmt;

use num_complex::Complex64;

use crate::eigen::eigvalsh;
use crate::error::{Error, Result};
use crate::par::for_each_row_mut;
use crate::policy::NumericPolicy;

pub type ComplexScalar = Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix in row-major order. No symmetry is assumed.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged, empty or non-finite input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    row: i,
                    cols: row.len(),
                });
            }
            for (j, z) in row.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Wraps a row-major buffer. Panics if the length is not `dim²`.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "buffer length must be dim²");
        Self { dim, data }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &x) in diag.iter().enumerate() {
            m.data[i * dim + i] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        let (a, b) = (&self.data, &other.data);
        for_each_row_mut(&mut out.data, n, |i, row| {
            let a_row = &a[i * n..(i + 1) * n];
            for (k, &aik) in a_row.iter().enumerate() {
                if aik == ZERO {
                    continue;
                }
                let b_row = &b[k * n..(k + 1) * n];
                for (o, &bkj) in row.iter_mut().zip(b_row) {
                    *o += aik * bkj;
                }
            }
        });
        Ok(out)
    }

    /// `self · other†` without materializing the adjoint.
    pub fn matmul_adjoint(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        let (a, b) = (&self.data, &other.data);
        for_each_row_mut(&mut out.data, n, |i, row| {
            let a_row = &a[i * n..(i + 1) * n];
            for (j, o) in row.iter_mut().enumerate() {
                let b_row = &b[j * n..(j + 1) * n];
                *o = a_row
                    .iter()
                    .zip(b_row)
                    .map(|(x, y)| x * y.conj())
                    .sum();
            }
        });
        Ok(out)
    }

    /// Trace of `self · other` in O(d²).
    pub fn trace_of_product(&self, other: &Self) -> Result<Complex64> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        }
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `‖M − M†‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M†)/2` with the diagonal forced real; exactly Hermitian.
    pub fn symmetrized(&self) -> HermitianMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            out.data[i * n + i] = Complex64::new(self.data[i * n + i].re, 0.0);
            for j in (i + 1)..n {
                let z = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                out.data[i * n + j] = z;
                out.data[j * n + i] = z.conj();
            }
        }
        HermitianMatrix(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// A square complex matrix that is exactly equal to its conjugate transpose.
///
/// The only ways in are [`HermitianMatrix::new`], which gates on
/// `NumericPolicy::herm_tol` and then symmetrizes, and [`CMatrix::symmetrized`].
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian")?;
        self.0.fmt(f)
    }
}

impl HermitianMatrix {
    /// Accepts `raw` when `‖raw − raw†‖_F ≤ herm_tol·(1 + ‖raw‖_F)` and returns
    /// its Hermitian part.
    pub fn new(raw: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        let asymmetry = raw.hermitian_defect();
        let tolerance = policy.herm_tol * (1.0 + raw.frobenius_norm());
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(raw.symmetrized())
    }

    pub fn from_real_rows(rows: &[Vec<f64>], policy: &NumericPolicy) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows)?, policy)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(CMatrix::from_diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0.get(row, col)
    }

    /// Real because the diagonal is real.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.sub(&other.0)?))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(Complex64::new(c, 0.0)))
    }

    /// General product; the result is Hermitian only when the operands commute.
    pub fn matmul(&self, other: &Self) -> Result<CMatrix> {
        self.0.matmul(&other.0)
    }

    /// `U · self · U†`, symmetrized.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Ok(u.matmul(&self.0)?.matmul_adjoint(u)?.symmetrized())
    }

    pub fn is_zero(&self) -> bool {
        self.0.data.iter().all(|z| *z == ZERO)
    }
}

/// Input gate for raw grids: square, finite, and Hermitian within `herm_tol`.
pub fn construct_hermitian(raw: &[Vec<Complex64>], policy: &NumericPolicy) -> Result<HermitianMatrix> {
    HermitianMatrix::new(CMatrix::from_rows(raw)?, policy)
}

/// Loewner order test `a ≤ b`: the smallest eigenvalue of `b − a` must be at
/// least `−psd_tol·max(1, max |eig(b − a)|)`.
pub fn loewner_leq(a: &HermitianMatrix, b: &HermitianMatrix, policy: &NumericPolicy) -> Result<bool> {
    Ok(psd_margin(&b.sub(a)?, policy)? >= 0.0)
}

/// Smallest eigenvalue plus the PSD slack; non-negative iff `m` passes as PSD.
pub(crate) fn psd_margin(m: &HermitianMatrix, policy: &NumericPolicy) -> Result<f64> {
    let (min, slack) = psd_min_and_slack(m, policy)?;
    Ok(min + slack)
}

pub(crate) fn psd_min_and_slack(m: &HermitianMatrix, policy: &NumericPolicy) -> Result<(f64, f64)> {
    let eig = eigvalsh(m, policy)?;
    let min = eig[0];
    let radius = eig.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok((min, policy.psd_tol * radius.max(1.0)))
}
