//! Functional calculus `f(A) = Σ f(λ_i)·P_i` over the clustered decomposition.
//!
//! exp and log go through the same projectors that pinching uses, so the two
//! stay exactly consistent. Note that `exp` is not operator monotone; what the
//! verification chain relies on is monotonicity of `H ↦ tr exp(H)` in the
//! Loewner order, which is tested separately.

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::policy::NumericPolicy;
use crate::spectral::{decompose, SpectralDecomposition};

pub fn apply_spectral_function<F>(f: F, a: &HermitianMatrix, policy: &NumericPolicy) -> Result<HermitianMatrix>
where
    F: Fn(f64) -> f64,
{
    decompose(a, policy)?.map_values(f)
}

pub fn herm_exp(a: &HermitianMatrix, policy: &NumericPolicy) -> Result<HermitianMatrix> {
    decompose(a, policy)?.map_values(f64::exp)
}

/// Matrix logarithm of a positive definite matrix.
pub fn herm_log(a: &HermitianMatrix, policy: &NumericPolicy) -> Result<HermitianMatrix> {
    log_of(&decompose(a, policy)?, policy)
}

/// `Σ_i m_i·exp(λ_i)` without forming `exp(A)`.
pub fn trace_exp(a: &HermitianMatrix, policy: &NumericPolicy) -> Result<f64> {
    Ok(trace_exp_of(&decompose(a, policy)?))
}

pub fn trace_exp_of(decomp: &SpectralDecomposition) -> f64 {
    decomp
        .clusters()
        .iter()
        .map(|c| c.multiplicity as f64 * c.value.exp())
        .sum()
}

/// Fails unless every clustered eigenvalue exceeds `psd_tol·max(1, ρ)`.
pub fn ensure_positive_definite(decomp: &SpectralDecomposition, policy: &NumericPolicy) -> Result<()> {
    let threshold = policy.psd_tol * decomp.spectral_radius().max(1.0);
    let min = decomp.min_value();
    if min > threshold {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        })
    }
}

pub fn log_of(decomp: &SpectralDecomposition, policy: &NumericPolicy) -> Result<HermitianMatrix> {
    ensure_positive_definite(decomp, policy)?;
    decomp.map_values(f64::ln)
}
