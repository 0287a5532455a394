//! Symplectic linear algebra on the phase space of `n` bosonic modes.
//!
//! Quadratures are ordered `(q1, p1, q2, p2, ...)`, so the symplectic form is
//! the block-diagonal `Δ = ⊕ [[0, 1], [-1, 0]]`. Covariance matrices use the
//! convention in which the vacuum has `σ = I`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{max_asymmetry, sym_eigen, sym_function};

/// Default absolute tolerance for the predicates in this module.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative tolerance used when checking that an input matrix is symmetric.
const SYMMETRY_TOL: f64 = 1e-9;

/// The symplectic form `Δ` on `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Self {
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            matrix[(2 * k, 2 * k + 1)] = 1.0;
            matrix[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { n, matrix }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

/// Shorthand for `SymplecticForm::new(n).into_matrix()`.
pub fn delta(n: usize) -> DMatrix<f64> {
    SymplecticForm::new(n).into_matrix()
}

/// Transposition (momentum reflection) `T = ⊕ diag(1, -1)` on `n` modes.
pub fn transposition(n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::identity(2 * n, 2 * n);
    for k in 0..n {
        t[(2 * k + 1, 2 * k + 1)] = -1.0;
    }
    t
}

/// A real symmetric `2n × 2n` matrix of second moments.
///
/// Construction only checks shape and symmetry; physical validity is a
/// separate question answered by [`is_valid_covariance`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    sigma: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() {
            return Err(Error::DimensionMismatch {
                expected: sigma.nrows(),
                got: sigma.ncols(),
            });
        }
        if sigma.nrows() % 2 != 0 {
            return Err(Error::OddDimension(sigma.nrows()));
        }
        let asym = max_asymmetry(&sigma);
        let scale = sigma.amax().max(1.0);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            sigma: crate::linalg::symmetrize(&sigma),
        })
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// `ν · I_{2n}`.
    pub fn scaled_identity(n: usize, nu: f64) -> Self {
        Self {
            sigma: DMatrix::identity(2 * n, 2 * n) * nu,
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.sigma
    }

    /// `S σ Sᵀ`.
    pub fn congruence(&self, s: &DMatrix<f64>) -> Result<Self> {
        if s.ncols() != self.sigma.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.sigma.nrows(),
                got: s.ncols(),
            });
        }
        Self::new(s * &self.sigma * s.transpose())
    }

    fn is_positive_definite(&self) -> bool {
        self.sigma.clone().cholesky().is_some()
    }
}

/// Result of a Williamson decomposition: `S σ Sᵀ = ⊕ νₖ I₂` with `S` symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, ascending.
    pub nu: Vec<f64>,
}

impl WilliamsonDecomposition {
    /// The diagonal form `⊕ νₖ I₂`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let diag: Vec<f64> = self.nu.iter().flat_map(|&v| [v, v]).collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    }
}

/// Symplectic eigenvalues of a strictly positive definite covariance matrix,
/// sorted ascending.
///
/// The eigenvalues of `Δσ` come in pairs `±iνₖ`; each pair is collapsed to a
/// single entry.
pub fn symplectic_eigenvalues(sigma: &CovarianceMatrix) -> Result<Vec<f64>> {
    if !sigma.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(raw_symplectic_eigenvalues(sigma.matrix()))
}

fn raw_symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Vec<f64> {
    let n = sigma.nrows() / 2;
    let product = delta(n) * sigma;
    let mut moduli: Vec<f64> = product
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .collect();
    moduli.sort_by(f64::total_cmp);
    moduli
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Williamson normal form of a strictly positive definite `σ`.
///
/// Built from `M = σ^{1/2} Δ σ^{1/2}`, which is skew-symmetric: an orthogonal
/// `O` with `Oᵀ M O = ⊕ νₖ [[0, 1], [-1, 0]]` gives the symplectic
/// `S = D^{1/2} Oᵀ σ^{-1/2}`, where `D = ⊕ νₖ I₂`.
pub fn williamson(sigma: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    if !sigma.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = sigma.modes();
    let dim = 2 * n;
    let (values, _) = sym_eigen(sigma.matrix());
    if values[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let sqrt_sigma = sym_function(sigma.matrix(), f64::sqrt);
    let inv_sqrt_sigma = sym_function(sigma.matrix(), |x| 1.0 / x.sqrt());
    let m = &sqrt_sigma * delta(n) * &sqrt_sigma;
    // -M² = MᵀM is symmetric PSD with eigenvalues νₖ², each twice.
    let (_, candidates) = sym_eigen(&(m.transpose() * &m));

    // Pick (u, v = Mᵀu / ν) pairs greedily. Each span{u, v} is M-invariant,
    // so projecting out earlier pairs keeps later candidates inside their
    // eigenspace even when νₖ are degenerate.
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(dim);
    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
    let mut used = vec![false; dim];
    for _ in 0..n {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for j in 0..dim {
            if used[j] {
                continue;
            }
            let mut r = candidates.column(j).into_owned();
            for c in &chosen {
                let proj = c.dot(&r);
                r.axpy(-proj, c, 1.0);
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|b| norm > b.2) {
                best = Some((j, r, norm));
            }
        }
        let (j, r, norm) = best.ok_or_else(|| Error::Numerical("williamson: ran out of candidates".into()))?;
        if norm < 1e-6 {
            return Err(Error::Numerical("williamson: degenerate candidate basis".into()));
        }
        used[j] = true;
        let u = r / norm;
        let mu = m.transpose() * &u;
        let nu = mu.norm();
        if nu <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        let v = mu / nu;
        chosen.push(u.clone());
        chosen.push(v.clone());
        pairs.push((nu, u, v));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut o = DMatrix::zeros(dim, dim);
    let mut nu = Vec::with_capacity(n);
    for (k, (val, u, v)) in pairs.into_iter().enumerate() {
        o.set_column(2 * k, &u);
        o.set_column(2 * k + 1, &v);
        nu.push(val);
    }
    let d_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        nu.iter().flat_map(|&v| [v.sqrt(), v.sqrt()]),
    ));
    let s = d_sqrt * o.transpose() * inv_sqrt_sigma;
    Ok(WilliamsonDecomposition { s, nu })
}

/// Robertson–Heisenberg check `σ ≥ ±iΔ`, i.e. all symplectic eigenvalues
/// at least `1 - tol`. Matrices that are not positive definite are invalid.
pub fn is_valid_covariance(sigma: &CovarianceMatrix, tol: f64) -> bool {
    match symplectic_eigenvalues(sigma) {
        Ok(nu) => nu.first().is_none_or(|&v| v >= 1.0 - tol),
        Err(_) => false,
    }
}

/// Whether `S Δ Sᵀ = Δ` within `tol` (max-abs entry norm).
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch {
            expected: s.nrows(),
            got: s.ncols(),
        });
    }
    if s.nrows() % 2 != 0 {
        return Err(Error::OddDimension(s.nrows()));
    }
    let d = delta(s.nrows() / 2);
    Ok((s * &d * s.transpose() - d).amax() <= tol)
}
