//! Block pinching and the spectral pinching map `X ↦ Σ_λ P_λ X P_λ`.
//!
//! The spectral map is evaluated in the eigenbasis of the reference matrix:
//! `V·mask(V†XV)·V†`, where the mask keeps only entries whose row and column
//! eigenvectors belong to the same cluster. That is the same sum of
//! `P_i X P_i` terms without materializing any projector. The dephasing-unitary
//! mixture `(1/n)·Σ_y U_y X U_y†` is provided as an independent second route.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::matrix::{psd_min_and_slack, CMatrix, HermitianMatrix};
use crate::policy::NumericPolicy;
use crate::spectral::{decompose, SpectralDecomposition};

/// Pinching-property tolerance factor; multiplied by `(1+‖A‖_F)(1+‖X‖_F)`.
pub const PINCH_TOL: f64 = 1e-10;

/// Zeroes every off-diagonal block of `m` for the given block sizes.
pub fn block_diagonal_part(m: &CMatrix, partition: &[usize]) -> Result<CMatrix> {
    let sum: usize = partition.iter().sum();
    if sum != m.dim() || partition.contains(&0) {
        return Err(Error::BadPartition { sum, dim: m.dim() });
    }
    let mut labels = Vec::with_capacity(sum);
    for (block, &size) in partition.iter().enumerate() {
        labels.extend(std::iter::repeat_n(block, size));
    }
    Ok(masked(m, &labels))
}

fn masked(m: &CMatrix, labels: &[usize]) -> CMatrix {
    let n = m.dim();
    let mut out = m.clone();
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                out.set(i, j, Complex64::new(0.0, 0.0));
            }
        }
    }
    out
}

/// The spectral pinching map of a reference Hermitian matrix.
#[derive(Debug, Clone)]
pub struct PinchOperator {
    source: HermitianMatrix,
    base: SpectralDecomposition,
    labels: Vec<usize>,
}

/// `U_y = Σ_u e^{i2πyu/n} P_u` for `y = 1..n`, `u` running over ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct DephasingFamily {
    pub unitaries: Vec<CMatrix>,
}

impl PinchOperator {
    pub fn new(a: &HermitianMatrix, policy: &NumericPolicy) -> Result<Self> {
        Ok(Self::from_decomposition(a.clone(), decompose(a, policy)?))
    }

    pub fn from_decomposition(source: HermitianMatrix, base: SpectralDecomposition) -> Self {
        let labels = base.column_labels();
        Self {
            source,
            base,
            labels,
        }
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Number of distinct eigenvalues of the reference matrix.
    pub fn n(&self) -> usize {
        self.base.distinct_count()
    }

    pub fn source(&self) -> &HermitianMatrix {
        &self.source
    }

    pub fn base(&self) -> &SpectralDecomposition {
        &self.base
    }

    fn check_dim(&self, x: &HermitianMatrix) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: x.dim(),
            });
        }
        Ok(())
    }

    /// `Σ_i P_i X P_i`.
    pub fn pinch(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(x)?;
        if self.n() == 1 {
            return Ok(x.clone());
        }
        let v = self.base.vectors();
        let in_basis = v.adjoint().matmul(&x.as_matrix().matmul(v)?)?;
        let kept = masked(&in_basis, &self.labels);
        Ok(v.matmul(&kept)?.matmul_adjoint(v)?.symmetrized())
    }

    pub fn dephasing_family(&self) -> DephasingFamily {
        let n = self.n();
        let unitaries = (1..=n)
            .map(|y| {
                let weights: Vec<Complex64> = self
                    .labels
                    .iter()
                    .map(|&label| {
                        let u = (label + 1) as f64;
                        let angle = 2.0 * PI * (y as f64) * u / n as f64;
                        Complex64::from_polar(1.0, angle)
                    })
                    .collect();
                self.base.synthesize(&weights)
            })
            .collect();
        DephasingFamily { unitaries }
    }

    /// `(1/n)·Σ_y U_y X U_y†`.
    pub fn pinch_via_mixture(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.check_dim(x)?;
        let family = self.dephasing_family();
        let mut acc = CMatrix::zeros(self.dim());
        for u in &family.unitaries {
            acc = acc.add(&u.matmul(x.as_matrix())?.matmul_adjoint(u)?)?;
        }
        Ok(acc.scale(Complex64::new(1.0 / self.n() as f64, 0.0)).symmetrized())
    }

    fn scale(&self, x: &HermitianMatrix) -> f64 {
        (1.0 + self.source.frobenius_norm()) * (1.0 + x.frobenius_norm())
    }

    /// `‖P_A[X]·A − A·P_A[X]‖_F` against `1e-10·scale`.
    pub fn commutation_check(&self, x: &HermitianMatrix) -> Result<CheckRecord> {
        let pinched = self.pinch(x)?;
        let residual = pinched
            .as_matrix()
            .commutator(self.source.as_matrix())?
            .frobenius_norm();
        Ok(CheckRecord::at_most("commutes_with_source", residual, PINCH_TOL * self.scale(x)))
    }

    /// `|tr(P_A[X]·A) − tr(X·A)|` against `1e-10·scale`.
    pub fn source_trace_check(&self, x: &HermitianMatrix) -> Result<CheckRecord> {
        let pinched = self.pinch(x)?;
        let a = self.source.as_matrix();
        let lhs = pinched.as_matrix().trace_of_product(a)?;
        let rhs = x.as_matrix().trace_of_product(a)?;
        Ok(CheckRecord::at_most(
            "source_trace_preserved",
            (lhs - rhs).norm(),
            PINCH_TOL * self.scale(x),
        ))
    }

    /// `X/n ≤ P_A[X]` in the Loewner order. `X` must be positive semidefinite.
    ///
    /// The residual is how far the smallest eigenvalue of `P_A[X] − X/n` dips
    /// below zero; the tolerance is the PSD slack.
    pub fn pinching_inequality_check(&self, x: &HermitianMatrix, policy: &NumericPolicy) -> Result<CheckRecord> {
        self.check_dim(x)?;
        let (x_min, x_slack) = psd_min_and_slack(x, policy)?;
        if x_min < -x_slack {
            return Err(Error::NotPsd {
                min_eigenvalue: x_min,
                threshold: -x_slack,
            });
        }
        let diff = self.pinch(x)?.sub(&x.scale(1.0 / self.n() as f64))?;
        let (min, slack) = psd_min_and_slack(&diff, policy)?;
        Ok(CheckRecord::at_most("pinching_inequality", (-min).max(0.0), slack))
    }

    /// `‖P_A[X] − mixture‖_F / ‖P_A[X]‖_F` against `1e-10`.
    pub fn mixture_check(&self, x: &HermitianMatrix) -> Result<CheckRecord> {
        let direct = self.pinch(x)?;
        let mixed = self.pinch_via_mixture(x)?;
        let residual = mixed.sub(&direct)?.frobenius_norm() / direct.frobenius_norm().max(1.0);
        Ok(CheckRecord::at_most("pinch_equals_mixture", residual, PINCH_TOL))
    }

    /// `|tr P_A[X] − tr X|` relative, against `1e-10`.
    pub fn trace_check(&self, x: &HermitianMatrix) -> Result<CheckRecord> {
        let t = x.trace();
        let residual = (self.pinch(x)?.trace() - t).abs() / t.abs().max(1.0);
        Ok(CheckRecord::at_most("pinch_preserves_trace", residual, PINCH_TOL))
    }

    /// `P_A[P_A[X]] = P_A[X]` relative, against `1e-10`.
    pub fn idempotence_check(&self, x: &HermitianMatrix) -> Result<CheckRecord> {
        let once = self.pinch(x)?;
        let twice = self.pinch(&once)?;
        let residual = twice.sub(&once)?.frobenius_norm() / once.frobenius_norm().max(1.0);
        Ok(CheckRecord::at_most("pinch_idempotent", residual, PINCH_TOL))
    }

    /// Every check above; the pinching inequality only when `x` is positive semidefinite.
    pub fn property_suite(&self, x: &HermitianMatrix, policy: &NumericPolicy) -> Result<Vec<CheckRecord>> {
        let mut out = vec![
            self.commutation_check(x)?,
            self.source_trace_check(x)?,
            self.mixture_check(x)?,
            self.trace_check(x)?,
            self.idempotence_check(x)?,
        ];
        match self.pinching_inequality_check(x, policy) {
            Ok(record) => out.push(record),
            Err(Error::NotPsd { .. }) => {}
            Err(e) => return Err(e),
        }
        Ok(out)
    }
}

pub fn verify_commutation(op: &PinchOperator, x: &HermitianMatrix) -> Result<bool> {
    Ok(op.commutation_check(x)?.passed)
}

pub fn verify_source_trace(op: &PinchOperator, x: &HermitianMatrix) -> Result<bool> {
    Ok(op.source_trace_check(x)?.passed)
}

pub fn verify_pinching_inequality(op: &PinchOperator, x: &HermitianMatrix, policy: &NumericPolicy) -> Result<bool> {
    Ok(op.pinching_inequality_check(x, policy)?.passed)
}
