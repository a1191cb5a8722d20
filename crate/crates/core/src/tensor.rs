//! Kronecker products, tensor powers and the distinct-eigenvalue count of `A^⊗m`.
//!
//! The eigenvalues of `A^⊗m` are the products `λ_{u1}·…·λ_{um}`, which depend
//! only on the multiset `{u1..um}`. Counting therefore enumerates multisets of
//! size `m` over the `n` distinct eigenvalues (there are `C(m+n−1, n−1)`), sums
//! logarithms, and clusters the sums with absolute tolerance `m·cluster_tol`.
//! Nothing of dimension `d^m` is ever formed.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::functions::ensure_positive_definite;
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::par::Execution;
use crate::policy::NumericPolicy;
use crate::eigen::eigvalsh;
use crate::spectral::{cluster_sorted, clustered_count, SpectralDecomposition};

/// Largest matrix dimension any Kronecker construction may produce.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Largest number of multisets [`count_distinct_spectrum`] will enumerate.
pub const MAX_MULTISETS: u128 = 1 << 27;

fn check_cap(requested: u128, cap: usize) -> Result<()> {
    if requested > cap as u128 {
        return Err(Error::SizeOverflow {
            requested,
            cap: cap as u128,
        });
    }
    Ok(())
}

pub fn kron(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let (p, q) = (a.dim(), b.dim());
    check_cap(p as u128 * q as u128, cap)?;
    let n = p * q;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..p {
        for k in 0..q {
            for j in 0..p {
                let aij = a.get(i, j);
                data.extend(b.row(k).iter().map(|&bkl| aij * bkl));
            }
        }
    }
    Ok(CMatrix::from_vec(n, data))
}

pub fn kron_hermitian(a: &HermitianMatrix, b: &HermitianMatrix, cap: usize) -> Result<HermitianMatrix> {
    Ok(kron(a.as_matrix(), b.as_matrix(), cap)?.symmetrized())
}

/// `A^⊗m`; `m = 0` gives the 1×1 identity.
pub fn tensor_power(a: &HermitianMatrix, m: u32, cap: usize) -> Result<HermitianMatrix> {
    let requested = (a.dim() as u128).checked_pow(m).unwrap_or(u128::MAX);
    check_cap(requested, cap)?;
    let mut out = HermitianMatrix::identity(1);
    for _ in 0..m {
        out = kron_hermitian(&out, a, cap)?;
    }
    Ok(out)
}

/// Distinct eigenvalues of the materialized `A^⊗m`, clustered the same way
/// [`crate::spectral::decompose`] clusters them. Eigenvalues only.
pub fn materialized_distinct_count(a: &HermitianMatrix, m: u32, cap: usize, policy: &NumericPolicy) -> Result<usize> {
    let values = eigvalsh(&tensor_power(a, m, cap)?, policy)?;
    Ok(clustered_count(&values, policy))
}

/// `C(m+n−1, n−1)`, exactly when it fits in `u128`, and its natural log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialBound {
    pub exact: Option<u128>,
    pub log_value: f64,
}

pub fn binomial_bound(m: u64, n_distinct: u64) -> BinomialBound {
    assert!(n_distinct >= 1, "need at least one symbol");
    let k = n_distinct - 1;
    let top = m + k;
    let mut exact: Option<u128> = Some(1);
    for i in 1..=k as u128 {
        // c·(top−k+i)/i stays integral at every step.
        exact = exact
            .and_then(|c| c.checked_mul(top as u128 - k as u128 + i))
            .map(|c| c / i);
    }
    let log_value = ln_gamma(top as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma(m as f64 + 1.0);
    BinomialBound {
        exact,
        log_value: if k == 0 { 0.0 } else { log_value },
    }
}

/// `log((m+n−1)^{n−1} / (n−1)!)`, the polynomial envelope of the binomial.
pub fn polynomial_envelope_log(m: u64, n_distinct: u64) -> f64 {
    let k = (n_distinct - 1) as f64;
    if k == 0.0 {
        return 0.0;
    }
    k * ((m + n_distinct - 1) as f64).ln() - ln_gamma(k + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCount {
    pub m: u32,
    pub distinct_count: u64,
    /// Distinct eigenvalues of the base.
    pub d_distinct: usize,
    /// `C(m + d_distinct − 1, d_distinct − 1)`.
    pub bound: BinomialBound,
    /// `log C(m + d_distinct − 1, d_distinct − 1)`.
    pub log_bound: f64,
    /// The same bound with the full matrix dimension in place of `d_distinct`.
    pub dim_bound: BinomialBound,
}

impl SpectrumCount {
    pub fn within_bound(&self) -> bool {
        match self.bound.exact {
            Some(b) => (self.distinct_count as u128) <= b,
            None => (self.distinct_count as f64).ln() <= self.log_bound,
        }
    }
}

pub fn count_distinct_spectrum(
    decomp: &SpectralDecomposition,
    m: u32,
    policy: &NumericPolicy,
) -> Result<SpectrumCount> {
    count_distinct_spectrum_with(Execution::default(), decomp, m, policy)
}

pub fn count_distinct_spectrum_with(
    exec: Execution,
    decomp: &SpectralDecomposition,
    m: u32,
    policy: &NumericPolicy,
) -> Result<SpectrumCount> {
    ensure_positive_definite(decomp, policy)?;
    let logs: Vec<f64> = decomp.values().iter().map(|x| x.ln()).collect();
    let n = logs.len();
    let bound = binomial_bound(m as u64, n as u64);
    let candidates = bound.exact.unwrap_or(u128::MAX);
    if candidates > MAX_MULTISETS {
        return Err(Error::SizeOverflow {
            requested: candidates,
            cap: MAX_MULTISETS,
        });
    }
    let mut sums = multiset_log_sums(exec, &logs, m);
    debug_assert_eq!(sums.len() as u128, candidates);
    sums.sort_by(f64::total_cmp);
    let distinct_count = cluster_sorted(&sums, m as f64 * policy.cluster_tol).len() as u64;
    Ok(SpectrumCount {
        m,
        distinct_count,
        d_distinct: n,
        bound,
        log_bound: bound.log_value,
        dim_bound: binomial_bound(m as u64, decomp.source_dim() as u64),
    })
}

/// `Σ k_i·logs[i]` for every composition `k` of `m` into `logs.len()` parts.
/// Parallel over the multiplicity of the first symbol.
fn multiset_log_sums(exec: Execution, logs: &[f64], m: u32) -> Vec<f64> {
    let Some((&first, rest)) = logs.split_first() else {
        return Vec::new();
    };
    if rest.is_empty() {
        return vec![m as f64 * first];
    }
    let chunks = exec.map_indexed(m as usize + 1, |k| {
        let mut out = Vec::new();
        push_sums(rest, m - k as u32, k as f64 * first, &mut out);
        out
    });
    chunks.concat()
}

fn push_sums(logs: &[f64], remaining: u32, partial: f64, out: &mut Vec<f64>) {
    match logs {
        [] => {}
        [last] => out.push(partial + remaining as f64 * last),
        [head, tail @ ..] => {
            for k in 0..=remaining {
                push_sums(tail, remaining - k, partial + k as f64 * head, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigvalsh;
    use crate::random::{random_hermitian, random_pd, with_spectrum};
    use crate::spectral::decompose;

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    /// Independent oracle: brute-force over ordered m-tuples, then dedupe.
    fn brute_force_count(values: &[f64], m: u32) -> usize {
        let n = values.len();
        let mut products = Vec::new();
        let total = n.pow(m);
        for mut idx in 0..total {
            let mut prod = 1.0;
            for _ in 0..m {
                prod *= values[idx % n];
                idx /= n;
            }
            products.push(prod);
        }
        products.sort_by(f64::total_cmp);
        products.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
        products.len()
    }

    #[test]
    fn kron_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2, DEFAULT_DIM_CAP).unwrap(), CMatrix::identity(4));
        let out = kron(&CMatrix::from_diag(&[1.0, 2.0]), &CMatrix::from_diag(&[1.0, 3.0]), 16).unwrap();
        assert_eq!(out, CMatrix::from_diag(&[1.0, 3.0, 2.0, 6.0]));
    }

    #[test]
    fn kron_layout() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[vec![0.0, 5.0], vec![6.0, 7.0]]).unwrap();
        let k = kron(&a, &b, 16).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        assert_eq!(k.get(2 * i + r, 2 * j + s), a.get(i, j) * b.get(r, s));
                    }
                }
            }
        }
    }

    #[test]
    fn kron_trace_is_multiplicative() {
        for seed in 0..10 {
            let a = random_hermitian(3, seed, 1.0);
            let b = random_hermitian(3, seed + 77, 1.0);
            let k = kron_hermitian(&a, &b, 64).unwrap();
            assert!((k.trace() - a.trace() * b.trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_cap() {
        let a = CMatrix::identity(65);
        assert!(matches!(kron(&a, &a, DEFAULT_DIM_CAP), Err(Error::SizeOverflow { .. })));
        let h = HermitianMatrix::identity(4);
        assert!(matches!(tensor_power(&h, 7, DEFAULT_DIM_CAP), Err(Error::SizeOverflow { .. })));
        assert!(tensor_power(&h, 6, DEFAULT_DIM_CAP).is_ok());
    }

    #[test]
    fn tensor_power_examples() {
        let a = random_hermitian(3, 1, 1.0);
        assert_eq!(tensor_power(&a, 1, 16).unwrap(), a);
        let s = HermitianMatrix::identity(2).scale(2.0);
        assert_eq!(tensor_power(&s, 3, 16).unwrap(), HermitianMatrix::identity(8).scale(8.0));
        assert_eq!(
            tensor_power(&HermitianMatrix::diag(&[1.0, 2.0]), 2, 16).unwrap(),
            HermitianMatrix::diag(&[1.0, 2.0, 2.0, 4.0])
        );
        assert_eq!(tensor_power(&a, 0, 16).unwrap(), HermitianMatrix::identity(1));
    }

    #[test]
    fn kron_eigenvalues_are_pairwise_products() {
        let p = policy();
        for (da, db) in [(2, 2), (2, 3), (3, 4), (4, 4)] {
            let a = random_hermitian(da, da as u64, 1.0);
            let b = random_hermitian(db, 100 + db as u64, 1.0);
            let ea = eigvalsh(&a, &p).unwrap();
            let eb = eigvalsh(&b, &p).unwrap();
            let mut expected: Vec<f64> = ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect();
            expected.sort_by(f64::total_cmp);
            let got = eigvalsh(&kron_hermitian(&a, &b, 64).unwrap(), &p).unwrap();
            for (x, y) in got.iter().zip(&expected) {
                assert!((x - y).abs() < 1e-12, "{got:?} vs {expected:?}");
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_bound(3, 2).exact, Some(4));
        assert_eq!(binomial_bound(2, 3).exact, Some(6));
        for m in [1, 5, 1000] {
            let b = binomial_bound(m, 1);
            assert_eq!(b.exact, Some(1));
            assert_eq!(b.log_value, 0.0);
        }
        let b = binomial_bound(6, 4);
        assert_eq!(b.exact, Some(84));
        assert!((b.log_value - 84f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn binomial_overflow_keeps_log() {
        let b = binomial_bound(1 << 40, 8);
        assert!(b.exact.is_none());
        assert!(b.log_value.is_finite() && b.log_value > 0.0);
    }

    #[test]
    fn binomial_below_polynomial_envelope() {
        for n in 1..=8u64 {
            for m in 1..=40u64 {
                let b = binomial_bound(m, n);
                assert!(b.log_value <= polynomial_envelope_log(m, n) + 1e-12);
            }
        }
    }

    #[test]
    fn log_bound_per_m_decreases() {
        for n in 2..=6u64 {
            let per_m: Vec<f64> = (1..=50u64).map(|m| binomial_bound(m, n).log_value / m as f64).collect();
            assert!(per_m.windows(2).all(|w| w[1] < w[0]), "n = {n}");
        }
    }

    #[test]
    fn count_examples() {
        let p = policy();
        let d = decompose(&HermitianMatrix::diag(&[1.0, 2.0]), &p).unwrap();
        let c2 = count_distinct_spectrum(&d, 2, &p).unwrap();
        assert_eq!(c2.distinct_count, 3);
        let c3 = count_distinct_spectrum(&d, 3, &p).unwrap();
        assert_eq!(c3.distinct_count, 4);
        assert_eq!(c3.bound.exact, Some(4));
        let scalar = decompose(&HermitianMatrix::identity(3).scale(2.5), &p).unwrap();
        for m in [1, 4, 9] {
            assert_eq!(count_distinct_spectrum(&scalar, m, &p).unwrap().distinct_count, 1);
        }
    }

    #[test]
    fn count_coincident_products() {
        // {1, 2, 4}: 2·2 = 4·1, so the count is 2m+1 rather than C(m+2, 2).
        let p = policy();
        let d = decompose(&HermitianMatrix::diag(&[1.0, 2.0, 4.0]), &p).unwrap();
        for m in 1..=6 {
            let c = count_distinct_spectrum(&d, m, &p).unwrap();
            assert_eq!(c.distinct_count, 2 * m as u64 + 1);
            assert!(c.within_bound());
        }
    }

    #[test]
    fn count_rejects_non_pd() {
        let p = policy();
        let d = decompose(&HermitianMatrix::diag(&[0.0, 2.0]), &p).unwrap();
        assert!(matches!(count_distinct_spectrum(&d, 2, &p), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn count_matches_brute_force() {
        let p = policy();
        for n in 1..=4 {
            let values = crate::random::random_distinct_values(n, 0.3, 3.0, n as u64);
            let d = decompose(&HermitianMatrix::diag(&values), &p).unwrap();
            for m in 1..=5 {
                let c = count_distinct_spectrum(&d, m, &p).unwrap();
                assert_eq!(c.distinct_count as usize, brute_force_count(&d.values(), m));
            }
        }
    }

    #[test]
    fn count_matches_materialized_tensor_power() {
        let p = policy();
        for dim in 1..=4usize {
            for m in 1..=6u32 {
                if dim.pow(m) > 256 {
                    continue;
                }
                let a = random_pd(dim, 10 * dim as u64 + m as u64, 0.2);
                let d = decompose(&a, &p).unwrap();
                let count = count_distinct_spectrum(&d, m, &p).unwrap();
                let big = tensor_power(&a, m, DEFAULT_DIM_CAP).unwrap();
                let materialized = decompose(&big, &p).unwrap().distinct_count();
                assert_eq!(count.distinct_count as usize, materialized, "dim {dim} m {m}");
                let by_values = materialized_distinct_count(&a, m, DEFAULT_DIM_CAP, &p).unwrap();
                assert_eq!(by_values, materialized);
                assert!(count.within_bound());
            }
        }
    }

    #[test]
    fn degenerate_base_counts_distinct_not_dimension() {
        let p = policy();
        let a = with_spectrum(&[0.5, 0.5, 2.0, 2.0], 3);
        let d = decompose(&a, &p).unwrap();
        let c = count_distinct_spectrum(&d, 3, &p).unwrap();
        assert_eq!(c.d_distinct, 2);
        assert_eq!(c.distinct_count, 4);
        assert_eq!(c.dim_bound.exact, Some(20));
    }

    #[test]
    fn parallel_and_sequential_counts_agree() {
        let p = policy();
        let d = decompose(&random_pd(5, 1, 0.1), &p).unwrap();
        let s = count_distinct_spectrum_with(Execution::Sequential, &d, 7, &p).unwrap();
        let q = count_distinct_spectrum_with(Execution::Parallel, &d, 7, &p).unwrap();
        assert_eq!(s, q);
    }
}
