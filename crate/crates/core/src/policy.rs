//! Numeric tolerances shared by every order, clustering and residual decision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All tolerances used by the library, in one place.
///
/// Every field is relative; see the individual operations for the scale each
/// one is multiplied by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Accept `raw` as Hermitian when `‖raw − raw†‖_F ≤ herm_tol·(1 + ‖raw‖_F)`.
    pub herm_tol: f64,
    /// Adjacent eigenvalues merge when their gap is at most `cluster_tol·max(1, ρ)`.
    pub cluster_tol: f64,
    /// Slack for positive-semidefinite acceptance, relative to spectral scale.
    pub psd_tol: f64,
    /// Bound on eigendecomposition and projector residuals.
    pub residual_tol: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            cluster_tol: 1e-8,
            psd_tol: 1e-9,
            residual_tol: 1e-9,
        }
    }
}

impl NumericPolicy {
    pub fn validated(self) -> Result<Self> {
        let fields = [
            ("herm_tol", self.herm_tol),
            ("cluster_tol", self.cluster_tol),
            ("psd_tol", self.psd_tol),
            ("residual_tol", self.residual_tol),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidPolicy(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        Ok(self)
    }
}
