//! Truncated Fock-space numerics for the one-mode quantum-limited attenuator.
//!
//! A [`FockDensity`] lives on span{|0⟩, …, |N⟩}. The attenuator only lowers
//! photon numbers, so this space is invariant and its Kraus sum is exact on
//! it: every Kraus operator `B_l` with `l > N` annihilates the truncation.

use nalgebra::DMatrix;

use crate::error::{out_of_range, Error, Result};
use crate::gaussian::{f as entropy_rate, g, g_inv};
use crate::linalg::{hermitian_eigenvalues, max_non_hermiticity, CMatrix, C64};

/// Tolerance used when validating density matrices.
pub const DENSITY_TOL: f64 = 1e-9;

/// Default tolerance for majorization predicates.
pub const MAJORIZATION_TOL: f64 = 1e-9;

/// Density matrix in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    rho: CMatrix,
}

impl FockDensity {
    /// Validates Hermiticity, unit trace and positivity within [`DENSITY_TOL`].
    pub fn new(rho: CMatrix) -> Result<Self> {
        Self::with_tolerance(rho, DENSITY_TOL)
    }

    pub fn with_tolerance(rho: CMatrix, tol: f64) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                got: rho.ncols(),
            });
        }
        let herm = max_non_hermiticity(&rho);
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = hermitian_eigenvalues(&rho)[0];
        if min < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            rho: crate::linalg::hermitize(&rho),
        })
    }

    /// Diagonal state `Σ pₙ |n⟩⟨n|`.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let mut rho = CMatrix::zeros(p.len(), p.len());
        for (i, &v) in p.iter().enumerate() {
            rho[(i, i)] = C64::new(v, 0.0);
        }
        Self::new(rho)
    }

    /// `|n⟩⟨n|` in dimension `dim`.
    pub fn number_state(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(out_of_range("n", n as f64, "n < dim"));
        }
        let mut p = vec![0.0; dim];
        p[n] = 1.0;
        Self::diagonal(&p)
    }

    /// Truncated thermal state with mean photon number `nbar` (before
    /// truncation), renormalized on `dim` levels.
    pub fn truncated_thermal(dim: usize, nbar: f64) -> Result<Self> {
        Self::diagonal(&crate::thinning::truncated_geometric(dim, nbar))
    }

    /// Pure state `|ψ⟩⟨ψ|` from an unnormalized amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| a / norm));
        Self::new(&v * v.adjoint())
    }

    pub(crate) fn from_matrix_unchecked(rho: CMatrix) -> Self {
        Self { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    /// Eigenvalues sorted descending.
    pub fn spectrum(&self) -> SpectrumVector {
        SpectrumVector::new(hermitian_eigenvalues(&self.rho))
    }

    /// Diagonal entries `⟨n|ρ|n⟩`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        Self::new(u * &self.rho * u.adjoint())
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    worst = worst.max(self.rho[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Nonnegative values sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector {
    values: Vec<f64>,
    sum: f64,
}

impl SpectrumVector {
    /// Sorts descending; negative rounding noise is kept as is.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let sum = values.iter().sum();
        Self { values, sum }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect()
    }
}

/// `√C(m+l, l) (1−λ)^{l/2} λ^{m/2}`, the `(m, m+l)` entry of Kraus operator `B_l`.
fn kraus_entry(m: usize, l: usize, lambda: f64) -> f64 {
    let c = crate::linalg::binomial(m + l, l);
    (c * (1.0 - lambda).powi(l as i32) * lambda.powi(m as i32)).sqrt()
}

/// Kraus operators `B_0 … B_N` of the attenuator on `dim = N + 1` levels.
pub fn attenuator_kraus(dim: usize, lambda: f64) -> Result<Vec<DMatrix<f64>>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(out_of_range("lambda", lambda, "0 <= lambda <= 1"));
    }
    Ok((0..dim)
        .map(|l| {
            let mut b = DMatrix::zeros(dim, dim);
            for m in 0..dim - l {
                b[(m, m + l)] = kraus_entry(m, l, lambda);
            }
            b
        })
        .collect())
}

/// Quantum-limited attenuator `Σ_l B_l ρ B_l†` on the truncated space.
pub fn attenuator_fock(rho: &FockDensity, lambda: f64) -> Result<FockDensity> {
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for b in attenuator_kraus(dim, lambda)? {
        // B_l is real; out += B ρ Bᵀ.
        let bc = crate::linalg::to_complex(&b);
        out += &bc * rho.matrix() * bc.transpose();
    }
    Ok(FockDensity {
        rho: crate::linalg::hermitize(&out),
    })
}

/// Truncated annihilation operator `â = Σ √n |n−1⟩⟨n|`.
pub fn annihilation(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Generator `â ρ â† − ½{â†â, ρ}` of the attenuator semigroup `λ = e^{−t}`.
pub fn attenuator_lindbladian(rho: &FockDensity) -> CMatrix {
    apply_attenuator_generator(rho.matrix())
}

pub(crate) fn apply_attenuator_generator(x: &CMatrix) -> CMatrix {
    let dim = x.nrows();
    let a = annihilation(dim);
    let num = a.adjoint() * &a;
    let half = C64::new(0.5, 0.0);
    &a * x * a.adjoint() - (&num * x + x * &num) * half
}

/// Fock rearrangement: eigenvalues of `ρ` sorted descending along |0⟩, |1⟩, ….
pub fn passive_rearrangement(rho: &FockDensity) -> FockDensity {
    let spec = rho.spectrum();
    let mut out = CMatrix::zeros(rho.dim(), rho.dim());
    for (i, &v) in spec.values().iter().enumerate() {
        out[(i, i)] = C64::new(v, 0.0);
    }
    FockDensity { rho: out }
}

fn padded_partial_sums(x: &SpectrumVector, y: &SpectrumVector) -> (Vec<f64>, Vec<f64>) {
    let len = x.values().len().max(y.values().len());
    let pad = |s: &SpectrumVector| {
        let mut p = s.partial_sums();
        let last = p.last().copied().unwrap_or(0.0);
        p.resize(len, last);
        p
    };
    (pad(x), pad(y))
}

/// `min_k (Σ_{i≤k} x↓ᵢ − Σ_{i≤k} y↓ᵢ)`; nonnegative iff `x` weakly
/// sub-majorizes `y`.
pub fn majorization_margin(x: &SpectrumVector, y: &SpectrumVector) -> f64 {
    let (px, py) = padded_partial_sums(x, y);
    px.iter()
        .zip(&py)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min)
}

/// Weak sub-majorization `x ≻_w y`: every partial sum of `x` is at least the
/// corresponding partial sum of `y` minus `tol` (shorter vector zero-padded).
pub fn majorizes(x: &SpectrumVector, y: &SpectrumVector, tol: f64) -> bool {
    majorization_margin(x, y) >= -tol
}

/// Majorization `x ≻ y`: weak sub-majorization plus equal totals within `tol`.
pub fn majorizes_strict(x: &SpectrumVector, y: &SpectrumVector, tol: f64) -> bool {
    majorizes(x, y, tol) && (x.sum() - y.sum()).abs() <= tol
}

fn entropy_of(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Von Neumann entropy in nats, with `0 ln 0 = 0`.
pub fn vn_entropy(rho: &FockDensity) -> f64 {
    entropy_of(&hermitian_eigenvalues(rho.matrix()))
}

/// Entropy growth rate `−F(p) = −Σ_{n≥1} n pₙ ln(p_{n−1}/pₙ)` at `t = 0` of a
/// Fock-diagonal state under the attenuator semigroup.
///
/// The support must be connected: `p₀ > 0` and no zero entry may precede a
/// positive one. Trailing zeros are allowed.
pub fn entropy_flux(p: &[f64]) -> Result<f64> {
    let support = connected_support(p)?;
    let mut flux = 0.0;
    for n in 1..support {
        flux += n as f64 * p[n] * (p[n - 1] / p[n]).ln();
    }
    Ok(-flux)
}

/// Length of the connected support `{0, …, N′}` of `p`.
pub(crate) fn connected_support(p: &[f64]) -> Result<usize> {
    if p.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidDistribution("negative or non-finite entry".into()));
    }
    let last = match p.iter().rposition(|&v| v > 0.0) {
        Some(i) => i,
        None => return Err(Error::InvalidDistribution("all entries zero".into())),
    };
    if let Some(i) = p[..last].iter().position(|&v| v == 0.0) {
        return Err(Error::DisconnectedSupport(i));
    }
    Ok(last + 1)
}

/// Isoperimetric gap `−F(p) − f(H(p))`, nonnegative for connected supports.
pub fn isoperimetric_gap(p: &[f64]) -> Result<f64> {
    let flux = entropy_flux(p)?;
    Ok(flux - entropy_rate(entropy_of(p))?)
}

/// Both sides of the constrained minimum-output-entropy bound:
/// `(S(E_λ(ρ)), g(λ g⁻¹(S(ρ))))`, with `lhs ≥ rhs`.
pub fn cmoe_check(rho: &FockDensity, lambda: f64) -> Result<(f64, f64)> {
    let out = attenuator_fock(rho, lambda)?;
    let lhs = vn_entropy(&out);
    let rhs = g(lambda * g_inv(vn_entropy(rho))?);
    Ok((lhs, rhs))
}
