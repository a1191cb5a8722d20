//! Seeded instance generators.
//!
//! Every generator draws from a ChaCha20 stream keyed by `seed`, with a
//! distinct stream id per generator kind, so `(kind, dim, seed)` fully
//! determines the output and trial `t` of a suite can be regenerated in
//! isolation from `seed + t`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::matrix::{CMatrix, HermitianMatrix};

#[derive(Clone, Copy)]
#[repr(u64)]
enum Stream {
    PositiveDefinite = 1,
    Hermitian = 2,
    Semidefinite = 3,
    Unitary = 4,
    Spectrum = 5,
}

fn rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Complex standard normal with `E|z|² = 1`.
fn complex_normal(rng: &mut ChaCha20Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    (0..rows * cols).map(|_| complex_normal(rng)).collect()
}

/// `G·G† + floor·I` for a seeded complex Gaussian `G`; smallest eigenvalue ≥ `floor`.
pub fn random_pd(dim: usize, seed: u64, floor: f64) -> HermitianMatrix {
    assert!(dim >= 1, "dim must be positive");
    assert!(floor > 0.0, "floor must be positive");
    let mut rng = rng(seed, Stream::PositiveDefinite);
    let g = CMatrix::from_vec(dim, ginibre(dim, dim, &mut rng));
    let gram = g.matmul_adjoint(&g).expect("square").symmetrized();
    gram.add(&HermitianMatrix::identity(dim).scale(floor))
        .expect("same dim")
}

/// Gaussian-unitary-ensemble style sample `scale·(G + G†)/2`.
pub fn random_hermitian(dim: usize, seed: u64, scale: f64) -> HermitianMatrix {
    let mut rng = rng(seed, Stream::Hermitian);
    let g = CMatrix::from_vec(dim, ginibre(dim, dim, &mut rng));
    g.scale(Complex64::new(scale, 0.0)).symmetrized()
}

/// `G·G†` with `G` of shape `dim × rank`; positive semidefinite, rank ≤ `rank`.
pub fn random_psd(dim: usize, rank: usize, seed: u64) -> HermitianMatrix {
    let mut rng = rng(seed, Stream::Semidefinite);
    let g = ginibre(dim, rank, &mut rng);
    let mut out = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let z: Complex64 = (0..rank)
                .map(|k| g[i * rank + k] * g[j * rank + k].conj())
                .sum();
            out.set(i, j, z);
        }
    }
    out.symmetrized()
}

/// Haar-like unitary: modified Gram–Schmidt on the columns of a Gaussian matrix.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = rng(seed, Stream::Unitary);
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|_| ginibre(dim, 1, &mut rng)).collect();
    for j in 0..dim {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[k];
            let proj: Complex64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, qa) in rest[0].iter_mut().zip(q) {
                *x -= proj * qa;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut u = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u.set(i, j, z);
        }
    }
    u
}

/// `U·diag(eigenvalues)·U†` for a seeded random unitary `U`.
pub fn with_spectrum(eigenvalues: &[f64], seed: u64) -> HermitianMatrix {
    let u = random_unitary(eigenvalues.len(), seed);
    HermitianMatrix::diag(eigenvalues)
        .conjugate_by(&u)
        .expect("same dim")
}

/// `count` distinct values drawn uniformly from `[lo, hi)`, sorted.
pub fn random_distinct_values(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed, Stream::Spectrum);
    let dist = Uniform::new(lo, hi).expect("lo < hi");
    let mut out: Vec<f64> = Vec::with_capacity(count);
    while out.len() < count {
        let x: f64 = dist.sample(&mut rng);
        if out.iter().all(|y| (x - y).abs() > 1e-3 * (hi - lo)) {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}
