//! Seeded bulk suites. Trial `i` is generated from `seed + i` alone, so the
//! results do not depend on scheduling and are merged by trial index.

use serde::Serialize;

use crate::check::CheckRecord;
use crate::error::Result;
use crate::par::Execution;
use crate::pinching::PinchOperator;
use crate::policy::NumericPolicy;
use crate::random::{random_distinct_values, random_hermitian, random_pd, random_psd, with_spectrum};
use crate::matrix::HermitianMatrix;
use crate::verifier::{gt_check, GtReport};

/// Two independent Hermitian samples for one trial seed.
pub fn hermitian_pair(dim: usize, trial_seed: u64) -> (HermitianMatrix, HermitianMatrix) {
    let s = trial_seed.wrapping_mul(2);
    (random_hermitian(dim, s, 1.0), random_hermitian(dim, s.wrapping_add(1), 1.0))
}

/// A positive definite reference and a positive semidefinite argument.
///
/// Odd seeds draw the reference from a small set of repeated eigenvalues, so
/// degenerate projectors get exercised as well.
pub fn pinch_pair(dim: usize, trial_seed: u64) -> (HermitianMatrix, HermitianMatrix) {
    let a = if trial_seed % 2 == 1 {
        let distinct = 1 + (trial_seed / 2) as usize % dim;
        let values = random_distinct_values(distinct, 0.2, 4.0, trial_seed);
        let spectrum: Vec<f64> = (0..dim).map(|i| values[i % distinct]).collect();
        with_spectrum(&spectrum, trial_seed)
    } else {
        random_pd(dim, trial_seed, 0.1)
    };
    let rank = 1 + (trial_seed as usize / 3) % dim;
    (a, random_psd(dim, rank, trial_seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GtTrial {
    pub index: usize,
    pub dim: usize,
    pub seed: u64,
    pub report: GtReport,
}

/// `trials` Golden-Thompson checks per dimension.
pub fn gt_bulk_suite(
    exec: Execution,
    dims: &[usize],
    trials: usize,
    seed: u64,
    policy: &NumericPolicy,
) -> Result<Vec<GtTrial>> {
    exec.map_indexed(dims.len() * trials, |index| {
        let dim = dims[index / trials];
        let trial_seed = seed.wrapping_add(index as u64);
        let (a, b) = hermitian_pair(dim, trial_seed);
        Ok(GtTrial {
            index,
            dim,
            seed: trial_seed,
            report: gt_check(&a, &b, policy)?,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchTrial {
    pub index: usize,
    pub dim: usize,
    pub seed: u64,
    pub distinct: usize,
    pub records: Vec<CheckRecord>,
}

/// Pinching properties on `trials` (PD, PSD) pairs, cycling through `dims`.
pub fn pinch_suite(
    exec: Execution,
    dims: &[usize],
    trials: usize,
    seed: u64,
    policy: &NumericPolicy,
) -> Result<Vec<PinchTrial>> {
    exec.map_indexed(trials, |index| {
        let dim = dims[index % dims.len()];
        let trial_seed = seed.wrapping_add(index as u64);
        let (a, x) = pinch_pair(dim, trial_seed);
        let op = PinchOperator::new(&a, policy)?;
        Ok(PinchTrial {
            index,
            dim,
            seed: trial_seed,
            distinct: op.n(),
            records: op.property_suite(&x, policy)?,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub index: usize,
    pub dim: usize,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
}

impl TrialOutcome {
    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| !r.passed).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub trials: usize,
    pub checks: usize,
    pub violations: usize,
}

/// Combined suite behind `random-suite`: per trial one GT check on a
/// Hermitian pair and the pinching checks on a (PD, PSD) pair, both drawn
/// from the same trial seed.
pub fn random_suite(
    exec: Execution,
    dims: &[usize],
    trials: usize,
    seed: u64,
    policy: &NumericPolicy,
) -> Result<Vec<TrialOutcome>> {
    exec.map_indexed(dims.len() * trials, |index| {
        let dim = dims[index / trials];
        let trial_seed = seed.wrapping_add(index as u64);
        let (a, b) = hermitian_pair(dim, trial_seed);
        let mut records = gt_check(&a, &b, policy)?.checks();
        let (p, x) = pinch_pair(dim, trial_seed);
        records.extend(PinchOperator::new(&p, policy)?.property_suite(&x, policy)?);
        Ok(TrialOutcome {
            index,
            dim,
            seed: trial_seed,
            records,
        })
    })
    .into_iter()
    .collect()
}

pub fn summarize(outcomes: &[TrialOutcome]) -> SuiteSummary {
    SuiteSummary {
        trials: outcomes.len(),
        checks: outcomes.iter().map(|o| o.records.len()).sum(),
        violations: outcomes.iter().map(TrialOutcome::violations).sum(),
    }
}
