//! Dense Hermitian eigensolver.
//!
//! The matrix is reduced to Hermitian tridiagonal form with Householder
//! reflectors (lower triangle only), a diagonal unitary rotates the
//! off-diagonal to real non-negative values, and the resulting real symmetric
//! tridiagonal matrix is diagonalized with implicit-shift QL (the EISPACK
//! `tql2` iteration). Eigenvectors are `Q·D·Z`, where `Q` is the product of
//! reflectors, `D` the phase matrix and `Z` the accumulated QL rotations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, HermitianMatrix};
use crate::policy::NumericPolicy;

/// QL sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors,
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// `‖A·V − V·Λ‖_F`.
    pub fn residual(&self, a: &HermitianMatrix) -> f64 {
        let av = a.as_matrix().matmul(&self.vectors).expect("dimensions match");
        let n = self.values.len();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (av.get(i, j) - self.vectors.get(i, j) * self.values[j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖V†V − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.vectors;
        let gram = v.adjoint().matmul(v).expect("square");
        gram.sub(&CMatrix::identity(v.dim())).expect("square").frobenius_norm()
    }
}

struct Reflector {
    /// Index of the first row the reflector acts on.
    offset: usize,
    v: Vec<Complex64>,
    tau: f64,
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[k]` is the (k+1, k) entry, complex in general.
    off: Vec<Complex64>,
    reflectors: Vec<Reflector>,
}

/// Full eigendecomposition.
///
/// The policy is accepted for interface symmetry with the rest of the crate;
/// convergence is judged against machine precision, not a tolerance.
pub fn eigh(a: &HermitianMatrix, _policy: &NumericPolicy) -> Result<Eigh> {
    let n = a.dim();
    let tri = tridiagonalize(a.as_matrix(), true);
    let phases = unit_phases(&tri.off);
    let mut diag = tri.diag.clone();
    let off: Vec<f64> = tri.off.iter().map(|z| z.norm()).collect();
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tql(&mut diag, &off, Some(&mut zt))?;

    let order = ascending_order(&diag);
    let values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();

    // M = D·Z with columns already permuted into ascending order.
    let mut m = vec![ZERO; n * n];
    for i in 0..n {
        for (col, &k) in order.iter().enumerate() {
            m[i * n + col] = phases[i] * zt[k * n + i];
        }
    }
    for r in tri.reflectors.iter().rev() {
        apply_reflector_left(&mut m, n, r);
    }
    Ok(Eigh {
        values,
        vectors: CMatrix::from_vec(n, m),
    })
}

/// Eigenvalues only, ascending. Skips vector accumulation entirely.
pub fn eigvalsh(a: &HermitianMatrix, _policy: &NumericPolicy) -> Result<Vec<f64>> {
    let tri = tridiagonalize(a.as_matrix(), false);
    let mut diag = tri.diag;
    let off: Vec<f64> = tri.off.iter().map(|z| z.norm()).collect();
    tql(&mut diag, &off, None)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Scalar field the reduction runs over: `f64` for real symmetric input,
/// `Complex64` otherwise.
trait Scalar:
    Copy
    + Send
    + Sync
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign<f64>
{
    const ZERO: Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn from_real(x: f64) -> Self;
    fn into_complex(self) -> Complex64;
    fn scaled(self, s: f64) -> Self;
    fn real_part_only(self) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn into_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn real_part_only(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn into_complex(self) -> Complex64 {
        self
    }
    fn scaled(self, s: f64) -> Self {
        self * s
    }
    fn real_part_only(self) -> Self {
        Complex64::new(self.re, 0.0)
    }
}

fn tridiagonalize(a: &CMatrix, keep_reflectors: bool) -> Tridiagonal {
    if a.as_slice().iter().all(|z| z.im == 0.0) {
        let real: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
        reduce(real, a.dim(), keep_reflectors)
    } else {
        reduce(a.as_slice().to_vec(), a.dim(), keep_reflectors)
    }
}

/// Householder reduction working on the lower triangle of `w` (row-major, n×n).
///
/// The rank-2 update of step k is deferred and applied row by row during the
/// matrix-vector product of step k+1, so each reflector costs a single sweep
/// over the trailing block.
fn reduce<T: Scalar>(mut w: Vec<T>, n: usize, keep_reflectors: bool) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![ZERO; n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    // (v, w) such that the true trailing block from index k on is
    // stored − v·w† − w·v†.
    let mut pending: Option<(Vec<T>, Vec<T>)> = None;
    let mut p: Vec<T> = Vec::with_capacity(n);

    for k in 0..n {
        let mut col: Vec<T> = (k..n).map(|i| w[i * n + k]).collect();
        if let Some((pv, pw)) = &pending {
            let (vk, wk) = (pv[0].conj(), pw[0].conj());
            for (c, (&vi, &wi)) in col.iter_mut().zip(pv.iter().zip(pw)) {
                *c -= vi * wk + wi * vk;
            }
        }
        diag[k] = col[0].re();
        if k + 1 == n {
            break;
        }
        let mut v = col.split_off(1);
        let x0 = v[0].into_complex();
        let tail: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        let reflect = tail != 0.0;
        let mut tau = 0.0;
        if reflect {
            let alpha = (x0.norm_sqr() + tail).sqrt();
            let x0_abs = x0.norm();
            // β = −phase(x0)·‖x‖ keeps v0 = x0 − β free of cancellation.
            let (beta, shift) = if x0_abs == 0.0 {
                (Complex64::new(-alpha, 0.0), T::from_real(alpha))
            } else {
                (-(x0 / x0_abs) * alpha, v[0].scaled(alpha / x0_abs))
            };
            v[0] += shift;
            tau = 1.0 / (alpha * alpha + alpha * x0_abs);
            off[k] = beta;
        } else {
            off[k] = x0;
        }

        // Bring rows k+1.. up to date and, if reflecting, accumulate B·v from
        // the lower triangle only.
        let base = k + 1;
        let m = n - base;
        p.clear();
        p.resize(m, T::ZERO);
        let deferred = pending.as_ref().map(|(pv, pw)| (&pv[1..], &pw[1..]));
        for ii in 0..m {
            let start = (base + ii) * n + base;
            let row = &mut w[start..=start + ii];
            if let Some((pv, pw)) = deferred {
                let (vi, wi) = (pv[ii], pw[ii]);
                for ((b, &wj), &vj) in row.iter_mut().zip(pw).zip(pv) {
                    *b -= vi * wj.conj() + wi * vj.conj();
                }
                row[ii] = row[ii].real_part_only();
            }
            if reflect {
                let vi = v[ii];
                let acc = hemv_row(&row[..ii], &v[..ii], vi, &mut p[..ii]);
                p[ii] += acc + vi.scaled(row[ii].re());
            }
        }
        pending = None;
        if !reflect {
            continue;
        }

        // w = τ·B·v − (τ²·v†B·v/2)·v
        let mut vp = 0.0;
        for (pi, vi) in p.iter_mut().zip(&v) {
            *pi *= tau;
            vp += (vi.conj() * *pi).re();
        }
        let half = 0.5 * tau * vp;
        for (pi, vi) in p.iter_mut().zip(&v) {
            *pi -= vi.scaled(half);
        }
        if keep_reflectors {
            reflectors.push(Reflector {
                offset: base,
                v: v.iter().map(|&z| z.into_complex()).collect(),
                tau,
            });
        }
        pending = Some((v, p.clone()));
    }
    Tridiagonal {
        diag,
        off,
        reflectors,
    }
}

/// Returns `Σ_j row_j·v_j` and adds `conj(row_j)·vi` into `p_j`.
///
/// Four independent accumulators break the dependency chain of the dot
/// product so the loop vectorizes.
#[inline]
fn hemv_row<T: Scalar>(row: &[T], v: &[T], vi: T, p: &mut [T]) -> T {
    let mut acc = [T::ZERO; 4];
    let mut rows = row.chunks_exact(4);
    let mut vs = v.chunks_exact(4);
    let mut ps = p.chunks_exact_mut(4);
    for ((r, x), q) in (&mut rows).zip(&mut vs).zip(&mut ps) {
        for l in 0..4 {
            acc[l] += r[l] * x[l];
            q[l] += r[l].conj() * vi;
        }
    }
    let mut tail = T::ZERO;
    for ((&b, &x), q) in rows
        .remainder()
        .iter()
        .zip(vs.remainder())
        .zip(ps.into_remainder())
    {
        tail += b * x;
        *q += b.conj() * vi;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Phases `φ` with `conj(φ_{k+1})·off_k·φ_k = |off_k|`.
fn unit_phases(off: &[Complex64]) -> Vec<Complex64> {
    let mut phases = Vec::with_capacity(off.len() + 1);
    let mut current = Complex64::new(1.0, 0.0);
    phases.push(current);
    for &e in off {
        let r = e.norm();
        current = if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            current * (e / r)
        };
        phases.push(current);
    }
    phases
}

/// `M ← H·M` for `H = I − τ·v·v†` acting on rows `offset..`.
fn apply_reflector_left(m: &mut [Complex64], n: usize, r: &Reflector) {
    let mut s = vec![ZERO; n];
    for (ii, vi) in r.v.iter().enumerate() {
        let row = &m[(r.offset + ii) * n..(r.offset + ii + 1) * n];
        let cv = vi.conj();
        for (sj, &x) in s.iter_mut().zip(row) {
            *sj += cv * x;
        }
    }
    for (ii, vi) in r.v.iter().enumerate() {
        let row = &mut m[(r.offset + ii) * n..(r.offset + ii + 1) * n];
        let f = vi * r.tau;
        for (x, &sj) in row.iter_mut().zip(&s) {
            *x -= f * sj;
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (`diag`, sub-diagonal
/// `off`, length n−1). On return `diag` holds the eigenvalues, unsorted. When
/// `zt` is given, row `i` of `zt` is rotated as the i-th eigenvector.
fn tql(diag: &mut [f64], off: &[f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let d = diag;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::ConvergenceFailure {
                        iterations: MAX_SWEEPS_PER_EIGENVALUE,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in d.iter_mut().skip(l + 2) {
                    *x -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_hermitian;

    fn check(a: &HermitianMatrix) -> Eigh {
        let p = NumericPolicy::default();
        let e = eigh(a, &p).unwrap();
        let scale = 1.0 + a.frobenius_norm();
        assert!(e.residual(a) <= p.residual_tol * scale, "residual {}", e.residual(a));
        assert!(e.orthonormality_defect() <= p.residual_tol);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        e
    }

    #[test]
    fn diagonal_input() {
        let e = check(&HermitianMatrix::diag(&[3.0, 1.0, 2.0]));
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let p = NumericPolicy::default();
        let a = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], &p).unwrap();
        let e = check(&a);
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_four() {
        let e = check(&HermitianMatrix::identity(4));
        assert_eq!(e.values, vec![1.0; 4]);
    }

    #[test]
    fn one_by_one_and_zero() {
        let e = check(&HermitianMatrix::diag(&[-2.5]));
        assert_eq!(e.values, vec![-2.5]);
        let e = check(&HermitianMatrix::zeros(3));
        assert_eq!(e.values, vec![0.0; 3]);
    }

    #[test]
    fn random_complex_matrices() {
        let p = NumericPolicy::default();
        for dim in 1..=24 {
            for seed in 0..4 {
                let a = random_hermitian(dim, seed * 31 + dim as u64, 1.0);
                let e = check(&a);
                let vals = eigvalsh(&a, &p).unwrap();
                for (x, y) in vals.iter().zip(&e.values) {
                    assert!((x - y).abs() <= 1e-12 * (1.0 + a.frobenius_norm()));
                }
                let trace: f64 = e.values.iter().sum();
                assert!((trace - a.trace()).abs() <= 1e-12 * (1.0 + a.frobenius_norm()));
            }
        }
    }

    #[test]
    fn phase_sweep_makes_offdiagonal_real() {
        let off = [Complex64::new(0.0, 2.0), Complex64::new(-1.0, 1.0), ZERO];
        let phases = unit_phases(&off);
        for (k, &e) in off.iter().enumerate() {
            let r = phases[k + 1].conj() * e * phases[k];
            assert!(r.im.abs() < 1e-15 && (r.re - e.norm()).abs() < 1e-15);
        }
    }
}
