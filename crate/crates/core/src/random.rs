//! Seeded random instances for property sweeps and verification suites.
//!
//! Every randomized suite draws from [`Substreams`]: one ChaCha8 generator
//! keyed by the 64-bit seed, with an independent stream per trial index, so a
//! failing trial can be replayed from `(seed, trial)` alone and results do not
//! depend on how trials are scheduled across threads.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, C64};
use crate::symplectic::{delta, CovarianceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for trial `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Haar-random unitary (QR of a Ginibre matrix with the phases of `R` fixed).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = ginibre(rng, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Full-rank random density matrix `G G† / Tr`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Random probability vector with strictly positive entries (flat Dirichlet).
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random symplectic matrix `exp(Δ H)` with `H` a symmetric Gaussian matrix
/// scaled by `scale`. `Δ H` lies in the symplectic Lie algebra.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, 2 * n, 2 * n);
    let h = (&g + g.transpose()) * (0.5 * scale);
    (delta(n) * h).exp()
}

/// Random valid covariance `S (⊕ νₖ I₂) Sᵀ` with `νₖ = 1 + Exp(spread)`.
pub fn random_covariance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    squeeze: f64,
    spread: f64,
) -> CovarianceMatrix {
    let s = random_symplectic(rng, n, squeeze);
    let diag: Vec<f64> = (0..n)
        .flat_map(|_| {
            let nu = 1.0 - spread * (1.0 - rng.random::<f64>()).ln();
            [nu, nu]
        })
        .collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    CovarianceMatrix::new(&s * d * s.transpose()).expect("congruence of a diagonal is symmetric")
}

/// Random real symmetric positive semidefinite matrix `G Gᵀ · scale / dim`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, dim, dim);
    let m = &g * g.transpose() * (scale / dim as f64);
    crate::linalg::symmetrize(&m)
}
