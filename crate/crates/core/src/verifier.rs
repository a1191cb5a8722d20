//! Golden-Thompson checks and the finite-m pinching chain.
//!
//! For positive definite `A`, `B` and tensor power `m` the chain is
//!
//! ```text
//! s0 = log tr exp(log A + log B)
//!    = (1/m) log tr exp(log A^⊗m + log B^⊗m)                      (tensorization)
//!    ≤ (1/m) log tr exp(log P[A^⊗m] + log B^⊗m) + (1/m) log n     (pinching inequality)
//!    = (1/m) log tr(P[A^⊗m]·B^⊗m) + (1/m) log n                  (P[A^⊗m] commutes with B^⊗m)
//!    = log tr(AB) + (1/m) log n                                   (pinching preserves tr(·B^⊗m))
//! ```
//!
//! where `P` pinches with respect to `B^⊗m` and `n` counts its distinct
//! eigenvalues. The reported `bound` uses the distinct count of `A^⊗m`;
//! `pinch_bound` uses that of `B^⊗m`, which is the count the pinching step
//! actually needs. Both are valid upper bounds on `s0`.

use serde::Serialize;

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::functions::{ensure_positive_definite, herm_exp, log_of, trace_exp};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::par::Execution;
use crate::pinching::PinchOperator;
use crate::policy::NumericPolicy;
use crate::spectral::{decompose, SpectralDecomposition};
use crate::tensor::{count_distinct_spectrum, tensor_power, SpectrumCount, DEFAULT_DIM_CAP};

/// Relative slack for the GT gap and commuting equality.
pub const GT_TOL: f64 = 1e-9;
/// `‖AB − BA‖_F ≤ COMMUTE_TOL·(1+‖A‖_F)(1+‖B‖_F)` counts as commuting.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Tensorization identity and chain upper bounds.
pub const CHAIN_TOL: f64 = 1e-8;
/// Pinched exponent collapsing onto `log tr(AB)`.
pub const COLLAPSE_TOL: f64 = 1e-7;
/// Imaginary residue allowed in `tr(AB)`.
pub const TRACE_IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtReport {
    /// `tr exp(A+B)`
    pub lhs: f64,
    /// `tr(exp A · exp B)`
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub commuting: bool,
    pub commutator_norm: f64,
}

impl GtReport {
    pub fn tolerance(&self) -> f64 {
        GT_TOL * (self.lhs.abs() + self.rhs.abs())
    }

    pub fn checks(&self) -> Vec<CheckRecord> {
        let mut out = vec![CheckRecord::at_most("gt_gap", (-self.gap).max(0.0), self.tolerance())];
        if self.commuting {
            out.push(CheckRecord::at_most(
                "gt_commuting_equality",
                self.gap.abs(),
                self.tolerance(),
            ));
        }
        out
    }
}

pub fn gt_check(a: &HermitianMatrix, b: &HermitianMatrix, policy: &NumericPolicy) -> Result<GtReport> {
    let lhs = trace_exp(&a.add(b)?, policy)?;
    let (ea, eb) = (herm_exp(a, policy)?, herm_exp(b, policy)?);
    let rhs = ea.as_matrix().trace_of_product(eb.as_matrix())?.re;
    let gap = rhs - lhs;
    let commutator_norm = a.as_matrix().commutator(b.as_matrix())?.frobenius_norm();
    let scale = (1.0 + a.frobenius_norm()) * (1.0 + b.frobenius_norm());
    Ok(GtReport {
        lhs,
        rhs,
        gap,
        holds: gap >= -GT_TOL * (lhs.abs() + rhs.abs()),
        commuting: commutator_norm <= COMMUTE_TOL * scale,
        commutator_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainOptions {
    /// Largest `d^m` for which the tensor-power matrices are materialized.
    pub cap: usize,
    /// Fail with `SizeOverflow` instead of skipping the full tier above `cap`.
    pub require_full_tier: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_DIM_CAP,
            require_full_tier: false,
        }
    }
}

/// Quantities that need the `d^m`-dimensional operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullTier {
    /// `(1/m) log tr exp(log A^⊗m + log B^⊗m)`
    pub s0_tensorized: f64,
    /// `(1/m) log tr exp(log P[A^⊗m] + log B^⊗m)`
    pub t_pinched: f64,
    /// Distinct eigenvalues of the materialized `B^⊗m`.
    pub pinch_distinct: usize,
    /// `‖exp(log P[A^⊗m] + log B^⊗m) − P[A^⊗m]·B^⊗m‖_F`, relative.
    pub collapse_residual: f64,
    /// `|tr(P[A^⊗m]·B^⊗m) − tr(A^⊗m·B^⊗m)|`, relative.
    pub pinched_trace_residual: f64,
    /// `(1/m) log tr exp(log(n·P[A^⊗m]) + log B^⊗m)`: the pinching-inequality
    /// upper side, `t_pinched + (1/m) log n`.
    pub pinching_rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainTrace {
    pub m: u32,
    /// `log tr exp(log A + log B)`
    pub s0: f64,
    /// `log tr(AB)`
    pub target: f64,
    /// `target + (1/m) log |spec(A^⊗m)|`
    pub bound: f64,
    /// `target + (1/m) log |spec(B^⊗m)|`
    pub pinch_bound: f64,
    /// `(1/m) log C(m+n−1, n−1)` with `n = |spec(A)|`.
    pub gap_bound: f64,
    pub spectrum_a: SpectrumCount,
    pub spectrum_b: SpectrumCount,
    /// `|Im tr(AB)|` and the tolerance it is held to.
    pub target_imag: f64,
    pub target_imag_tol: f64,
    pub full: Option<FullTier>,
}

fn rel_diff(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(1.0)
}

impl ChainTrace {
    pub fn full_matrix_tier(&self) -> bool {
        self.full.is_some()
    }

    pub fn s0_tensorized(&self) -> Option<f64> {
        self.full.as_ref().map(|f| f.s0_tensorized)
    }

    pub fn t_pinched(&self) -> Option<f64> {
        self.full.as_ref().map(|f| f.t_pinched)
    }

    fn upper_slack(&self, upper: f64) -> f64 {
        CHAIN_TOL * self.s0.abs().max(upper.abs()).max(1.0)
    }

    /// Every per-m invariant as a check record.
    pub fn checks(&self) -> Vec<CheckRecord> {
        let m = self.m;
        let mut out = vec![
            CheckRecord::at_most(
                format!("m{m}_s0_le_bound"),
                (self.s0 - self.bound).max(0.0),
                self.upper_slack(self.bound),
            ),
            CheckRecord::at_most(
                format!("m{m}_s0_le_pinch_bound"),
                (self.s0 - self.pinch_bound).max(0.0),
                self.upper_slack(self.pinch_bound),
            ),
            CheckRecord::at_most(
                format!("m{m}_bound_excess_le_gap_bound"),
                (self.bound - self.target - self.gap_bound).max(0.0),
                1e-12 * self.gap_bound.abs().max(1.0),
            ),
            CheckRecord::flag(format!("m{m}_spectrum_count_le_binomial"), self.spectrum_a.within_bound()),
            CheckRecord::at_most(format!("m{m}_target_imag_residue"), self.target_imag, self.target_imag_tol),
        ];
        if let Some(f) = &self.full {
            out.extend([
                CheckRecord::at_most(
                    format!("m{m}_tensorization"),
                    rel_diff(f.s0_tensorized, self.s0),
                    CHAIN_TOL,
                ),
                CheckRecord::at_most(
                    format!("m{m}_pinching_inequality_step"),
                    (f.s0_tensorized - f.pinching_rhs).max(0.0),
                    self.upper_slack(f.pinching_rhs),
                ),
                CheckRecord::at_most(format!("m{m}_commuting_collapse"), f.collapse_residual, CHAIN_TOL),
                CheckRecord::at_most(format!("m{m}_pinched_trace"), f.pinched_trace_residual, CHAIN_TOL),
                CheckRecord::at_most(
                    format!("m{m}_t_pinched_eq_target"),
                    rel_diff(f.t_pinched, self.target),
                    COLLAPSE_TOL,
                ),
            ]);
        }
        out
    }
}

/// Positive definite operands with their decompositions and logarithms.
struct PdPair {
    a: HermitianMatrix,
    b: HermitianMatrix,
    dec_a: SpectralDecomposition,
    dec_b: SpectralDecomposition,
    s0: f64,
    target: f64,
    target_imag: f64,
    target_imag_tol: f64,
}

impl PdPair {
    fn new(a: &HermitianMatrix, b: &HermitianMatrix, policy: &NumericPolicy) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        let dec_a = decompose(a, policy)?;
        let dec_b = decompose(b, policy)?;
        let log_sum = log_of(&dec_a, policy)?.add(&log_of(&dec_b, policy)?)?;
        let s0 = trace_exp(&log_sum, policy)?.ln();
        let tr = a.as_matrix().trace_of_product(b.as_matrix())?;
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            dec_a,
            dec_b,
            s0,
            target: tr.re.ln(),
            target_imag: tr.im.abs(),
            target_imag_tol: TRACE_IMAG_TOL * a.frobenius_norm() * b.frobenius_norm(),
        })
    }

    fn trace_at(&self, m: u32, options: &ChainOptions, policy: &NumericPolicy) -> Result<ChainTrace> {
        if m == 0 {
            return Err(Error::InvalidArgument("tensor power m must be positive".into()));
        }
        let spectrum_a = count_distinct_spectrum(&self.dec_a, m, policy)?;
        let spectrum_b = count_distinct_spectrum(&self.dec_b, m, policy)?;
        let per_m = |count: u64| (count as f64).ln() / m as f64;

        let dim = (self.a.dim() as u128).checked_pow(m).unwrap_or(u128::MAX);
        let full = if dim <= options.cap as u128 {
            Some(self.full_tier(m, options.cap, policy)?)
        } else if options.require_full_tier {
            return Err(Error::SizeOverflow {
                requested: dim,
                cap: options.cap as u128,
            });
        } else {
            None
        };

        Ok(ChainTrace {
            m,
            s0: self.s0,
            target: self.target,
            bound: self.target + per_m(spectrum_a.distinct_count),
            pinch_bound: self.target + per_m(spectrum_b.distinct_count),
            gap_bound: spectrum_a.log_bound / m as f64,
            spectrum_a,
            spectrum_b,
            target_imag: self.target_imag,
            target_imag_tol: self.target_imag_tol,
            full,
        })
    }

    fn full_tier(&self, m: u32, cap: usize, policy: &NumericPolicy) -> Result<FullTier> {
        let inv_m = 1.0 / m as f64;
        let am = tensor_power(&self.a, m, cap)?;
        let bm = tensor_power(&self.b, m, cap)?;
        let dec_am = decompose(&am, policy)?;
        let dec_bm = decompose(&bm, policy)?;
        let log_am = log_of(&dec_am, policy)?;
        let log_bm = log_of(&dec_bm, policy)?;
        let s0_tensorized = inv_m * trace_exp(&log_am.add(&log_bm)?, policy)?.ln();

        let op = PinchOperator::from_decomposition(bm.clone(), dec_bm);
        let pinched = op.pinch(&am)?;
        let dec_p = decompose(&pinched, policy)?;
        ensure_positive_definite(&dec_p, policy)?;
        let exponent = log_of(&dec_p, policy)?.add(&log_bm)?;
        let exp_sum = herm_exp(&exponent, policy)?;
        let t_pinched = inv_m * exp_sum.trace().ln();

        let product: CMatrix = pinched.matmul(&bm)?;
        let collapse_residual = exp_sum
            .as_matrix()
            .sub(&product)?
            .frobenius_norm()
            / product.frobenius_norm();
        let pinched_trace = product.trace().re;
        let plain_trace = am.as_matrix().trace_of_product(bm.as_matrix())?.re;
        let n = op.n();
        Ok(FullTier {
            s0_tensorized,
            t_pinched,
            pinch_distinct: n,
            collapse_residual,
            pinched_trace_residual: (pinched_trace - plain_trace).abs() / plain_trace.abs(),
            pinching_rhs: t_pinched + inv_m * (n as f64).ln(),
        })
    }
}

/// One step of the chain at tensor power `m`.
pub fn chain_trace(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    options: &ChainOptions,
    policy: &NumericPolicy,
) -> Result<ChainTrace> {
    PdPair::new(a, b, policy)?.trace_at(m, options, policy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub traces: Vec<ChainTrace>,
}

impl ConvergenceStudy {
    pub fn bound_non_increasing(&self) -> bool {
        self.traces
            .windows(2)
            .all(|w| w[1].bound <= w[0].bound + 1e-12 * w[0].bound.abs().max(1.0))
    }

    /// Per-m checks plus monotonicity of `bound` across the study.
    pub fn checks(&self) -> Vec<CheckRecord> {
        let mut out: Vec<CheckRecord> = self.traces.iter().flat_map(ChainTrace::checks).collect();
        out.push(CheckRecord::flag("bound_non_increasing", self.bound_non_increasing()));
        out
    }
}

pub fn convergence_study(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m_list: &[u32],
    options: &ChainOptions,
    policy: &NumericPolicy,
) -> Result<ConvergenceStudy> {
    convergence_study_with(Execution::default(), a, b, m_list, options, policy)
}

pub fn convergence_study_with(
    exec: Execution,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m_list: &[u32],
    options: &ChainOptions,
    policy: &NumericPolicy,
) -> Result<ConvergenceStudy> {
    if m_list.is_empty() {
        return Err(Error::InvalidArgument("m list is empty".into()));
    }
    if !m_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("m list must be strictly ascending".into()));
    }
    let pair = PdPair::new(a, b, policy)?;
    let traces = exec
        .map_indexed(m_list.len(), |i| pair.trace_at(m_list[i], options, policy))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { traces })
}

/// Finite-m certificate `tr exp(log A + log B) ≤ |spec(A^⊗m)|^{1/m}·tr(AB)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCertificate {
    pub m: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn gt_from_chain_certificate(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    policy: &NumericPolicy,
) -> Result<ChainCertificate> {
    let options = ChainOptions {
        cap: 1,
        require_full_tier: false,
    };
    let trace = chain_trace(a, b, m, &options, policy)?;
    let lhs = trace.s0.exp();
    let factor = (trace.spectrum_a.distinct_count as f64).powf(1.0 / m as f64);
    let rhs = factor * trace.target.exp();
    Ok(ChainCertificate {
        m,
        lhs,
        rhs,
        holds: lhs <= rhs + GT_TOL * (lhs.abs() + rhs.abs()),
    })
}

pub fn gt_from_chain(a: &HermitianMatrix, b: &HermitianMatrix, m: u32, policy: &NumericPolicy) -> Result<bool> {
    Ok(gt_from_chain_certificate(a, b, m, policy)?.holds)
}

/// GT for arbitrary Hermitian `A`, `B` through the substitution `A → exp A`,
/// `B → exp B` in the positive definite chain.
pub fn gt_from_chain_hermitian(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u32,
    policy: &NumericPolicy,
) -> Result<ChainCertificate> {
    gt_from_chain_certificate(&herm_exp(a, policy)?, &herm_exp(b, policy)?, m, policy)
}
