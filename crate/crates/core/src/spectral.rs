//! Distinct-eigenvalue decomposition `A = Σ λ_i P_i` with orthogonal projectors.
//!
//! Numerically coincident eigenvalues are clustered: after sorting, two
//! neighbours merge when their gap is at most `cluster_tol·max(1, ρ(A))`, and
//! merging chains, so a run of small gaps becomes one cluster even if its
//! extremes are further apart. A cluster's value is the mean of its members.
//!
//! Projectors are kept implicitly as groups of eigenvector columns; `P_i` is
//! only materialized on request, which keeps memory at O(d²) for tensor powers
//! with many distinct eigenvalues.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{eigh, Eigh};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::policy::NumericPolicy;

/// A run of eigenvector columns sharing one distinct eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub value: f64,
    pub start: usize,
    pub multiplicity: usize,
}

/// One `(λ_i, P_i, multiplicity_i)` triple with the projector materialized.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub projector: HermitianMatrix,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
    clusters: Vec<Cluster>,
}

/// Groups sorted values into chains whose consecutive gaps are `≤ threshold`.
/// Returns `(start, len)` runs covering the input in order.
pub fn cluster_sorted(values: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > threshold {
            runs.push((start, i - start));
            start = i;
        }
    }
    runs
}

pub fn decompose(a: &HermitianMatrix, policy: &NumericPolicy) -> Result<SpectralDecomposition> {
    Ok(SpectralDecomposition::from_eigh(eigh(a, policy)?, policy))
}

pub fn distinct_count(decomp: &SpectralDecomposition) -> usize {
    decomp.distinct_count()
}

/// Spectral radius of an ascending list.
pub(crate) fn radius_of(sorted: &[f64]) -> f64 {
    match (sorted.first(), sorted.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

/// Cluster count for ascending eigenvalues under the decomposition's rule.
pub fn clustered_count(sorted: &[f64], policy: &NumericPolicy) -> usize {
    let threshold = policy.cluster_tol * radius_of(sorted).max(1.0);
    cluster_sorted(sorted, threshold).len()
}

impl SpectralDecomposition {
    pub fn from_eigh(eig: Eigh, policy: &NumericPolicy) -> Self {
        let threshold = policy.cluster_tol * radius_of(&eig.values).max(1.0);
        let clusters = cluster_sorted(&eig.values, threshold)
            .into_iter()
            .map(|(start, len)| Cluster {
                value: eig.values[start..start + len].iter().sum::<f64>() / len as f64,
                start,
                multiplicity: len,
            })
            .collect();
        Self {
            eigenvalues: eig.values,
            vectors: eig.vectors,
            clusters,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn distinct_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    /// Distinct eigenvalues, strictly ascending.
    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    /// Unclustered eigenvalues from the eigensolver.
    pub fn raw_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, grouped by cluster.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn min_value(&self) -> f64 {
        self.clusters.first().map_or(0.0, |c| c.value)
    }

    pub fn spectral_radius(&self) -> f64 {
        radius_of(&self.values())
    }

    /// Cluster index of every eigenvector column.
    pub fn column_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.source_dim()];
        for (i, c) in self.clusters.iter().enumerate() {
            labels[c.start..c.start + c.multiplicity].fill(i);
        }
        labels
    }

    /// `V·diag(g)·V†` for per-column weights `g`.
    pub(crate) fn synthesize(&self, weights: &[Complex64]) -> CMatrix {
        let n = self.source_dim();
        let v = self.vectors.as_slice();
        let mut scaled = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                scaled.push(v[i * n + j] * weights[j]);
            }
        }
        CMatrix::from_vec(n, scaled)
            .matmul_adjoint(&self.vectors)
            .expect("square")
    }

    /// `Σ_i f(λ_i)·P_i`.
    pub fn map_values<F>(&self, f: F) -> Result<HermitianMatrix>
    where
        F: Fn(f64) -> f64,
    {
        let mut weights = Vec::with_capacity(self.source_dim());
        for c in &self.clusters {
            let y = f(c.value);
            if !y.is_finite() {
                return Err(Error::DomainError { eigenvalue: c.value });
            }
            weights.extend(std::iter::repeat_n(Complex64::new(y, 0.0), c.multiplicity));
        }
        Ok(self.synthesize(&weights).symmetrized())
    }

    /// `Σ_i λ_i·P_i`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map_values(|x| x).expect("identity is finite")
    }

    pub fn projector(&self, index: usize) -> HermitianMatrix {
        let c = self.clusters[index];
        let mut weights = vec![Complex64::new(0.0, 0.0); self.source_dim()];
        weights[c.start..c.start + c.multiplicity].fill(Complex64::new(1.0, 0.0));
        self.synthesize(&weights).symmetrized()
    }

    pub fn eigen_pairs(&self) -> Vec<EigenPair> {
        (0..self.distinct_count())
            .map(|i| EigenPair {
                lambda: self.clusters[i].value,
                projector: self.projector(i),
                multiplicity: self.clusters[i].multiplicity,
            })
            .collect()
    }

    /// Measures every structural invariant against `source`. Materializes all
    /// projectors, so intended for tests and certificates at modest dimension.
    pub fn invariant_report(&self, source: &HermitianMatrix) -> InvariantReport {
        let n = self.source_dim();
        let projectors: Vec<CMatrix> = (0..self.distinct_count())
            .map(|i| self.projector(i).into_matrix())
            .collect();
        let mut sum = CMatrix::zeros(n);
        let mut idempotence: f64 = 0.0;
        let mut orthogonality: f64 = 0.0;
        for (i, p) in projectors.iter().enumerate() {
            sum = sum.add(p).expect("square");
            let sq = p.matmul(p).expect("square");
            idempotence = idempotence.max(sq.sub(p).expect("square").frobenius_norm());
            for q in &projectors[i + 1..] {
                orthogonality = orthogonality.max(p.matmul(q).expect("square").frobenius_norm());
            }
        }
        let completeness = sum.sub(&CMatrix::identity(n)).expect("square").frobenius_norm();
        let reconstruction = self
            .reconstruct()
            .sub(source)
            .expect("square")
            .frobenius_norm();
        let values = self.values();
        InvariantReport {
            completeness,
            idempotence,
            orthogonality,
            reconstruction,
            reconstruction_scale: 1.0 + source.frobenius_norm(),
            multiplicity_total: self.multiplicities().iter().sum(),
            dim: n,
            strictly_increasing: values.windows(2).all(|w| w[0] < w[1]),
        }
    }
}

/// Residuals of the decomposition invariants.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    /// `‖Σ P_i − I‖_F`
    pub completeness: f64,
    /// `max_i ‖P_i² − P_i‖_F`
    pub idempotence: f64,
    /// `max_{i≠j} ‖P_i P_j‖_F`
    pub orthogonality: f64,
    /// `‖Σ λ_i P_i − A‖_F`
    pub reconstruction: f64,
    pub reconstruction_scale: f64,
    pub multiplicity_total: usize,
    pub dim: usize,
    pub strictly_increasing: bool,
}

impl InvariantReport {
    pub fn holds(&self, policy: &NumericPolicy) -> bool {
        let tol = policy.residual_tol;
        self.completeness <= tol
            && self.idempotence <= tol
            && self.orthogonality <= tol
            && self.reconstruction <= tol * self.reconstruction_scale
            && self.multiplicity_total == self.dim
            && self.strictly_increasing
    }
}
