//! Gaussian states, Gaussian channels in `(K, α, y)` form, and the entropy
//! scalars `g`, `g⁻¹`, `h`, `f`.

use nalgebra::{DMatrix, DVector};

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{hermitian_eigenvalues, max_asymmetry, symmetrize, CMatrix, C64};
use crate::symplectic::{delta, is_valid_covariance, symplectic_eigenvalues, CovarianceMatrix};

/// Entropy (nats) of the thermal state with mean photon number `nbar`:
/// `g(N) = (N+1) ln(N+1) − N ln N`, with `g(0) = 0`.
pub fn g(nbar: f64) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    // (N+1)ln(N+1) − N ln N = ln(1+N) + N ln(1 + 1/N), stable at both ends.
    nbar.ln_1p() + nbar * (1.0 / nbar).ln_1p()
}

/// `g'(N) = ln(1 + 1/N)`.
pub fn g_prime(nbar: f64) -> f64 {
    (1.0 / nbar).ln_1p()
}

/// Checked variant of [`g`].
pub fn g_checked(nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return Err(out_of_range("nbar", nbar, "nbar >= 0"));
    }
    Ok(g(nbar))
}

/// Inverse of `g` on `[0, ∞)` by bisection.
///
/// The upper end of the bracket is doubled until `g(hi) ≥ s`, then the bracket
/// is halved until it no longer shrinks in floating point.
pub fn g_inv(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(out_of_range("s", s, "s >= 0"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut hi = 1.0;
    while g(hi) < s {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Entropy of a one-mode Gaussian state with symplectic eigenvalue `nu`:
/// `h(ν) = g((ν − 1)/2)`.
pub fn h(nu: f64) -> Result<f64> {
    if !(nu >= 1.0) {
        return Err(out_of_range("nu", nu, "nu >= 1"));
    }
    Ok(g((nu - 1.0) / 2.0))
}

/// `f(S) = −g⁻¹(S) g'(g⁻¹(S))`, the entropy growth rate of thermal inputs
/// under the attenuator semigroup. `f(0) = 0`.
pub fn f(s: f64) -> Result<f64> {
    let x = g_inv(s)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(-x * g_prime(x))
}

/// `f'(S) = 1 / ((1 + x) ln(1 + 1/x)) − 1` with `x = g⁻¹(S)`; tends to −1 as
/// `S → 0`.
pub fn f_prime(s: f64) -> Result<f64> {
    let x = g_inv(s)?;
    if x == 0.0 {
        return Ok(-1.0);
    }
    Ok(1.0 / ((1.0 + x) * g_prime(x)) - 1.0)
}

/// First moments and covariance matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub r: DVector<f64>,
    pub sigma: CovarianceMatrix,
}

impl GaussianState {
    /// Validates `σ ≥ ±iΔ` within `tol` and matching dimensions.
    pub fn new(r: DVector<f64>, sigma: CovarianceMatrix, tol: f64) -> Result<Self> {
        if r.len() != sigma.matrix().nrows() {
            return Err(Error::DimensionMismatch {
                expected: sigma.matrix().nrows(),
                got: r.len(),
            });
        }
        if !is_valid_covariance(&sigma, tol) {
            let nu = symplectic_eigenvalues(&sigma)
                .ok()
                .and_then(|v| v.first().copied())
                .unwrap_or(f64::NAN);
            return Err(Error::InvalidCovariance(nu));
        }
        Ok(Self { r, sigma })
    }

    /// Centered state with covariance `sigma`.
    pub fn centered(sigma: CovarianceMatrix) -> Result<Self> {
        let dim = sigma.matrix().nrows();
        Self::new(DVector::zeros(dim), sigma, crate::symplectic::DEFAULT_TOL)
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            r: DVector::zeros(2 * n),
            sigma: CovarianceMatrix::scaled_identity(n, 1.0),
        }
    }

    pub fn modes(&self) -> usize {
        self.sigma.modes()
    }
}

/// `n`-mode thermal state with mean photon number `nbar` per mode.
pub fn thermal_state(n: usize, nbar: f64) -> Result<GaussianState> {
    if !(nbar >= 0.0) {
        return Err(out_of_range("nbar", nbar, "nbar >= 0"));
    }
    Ok(GaussianState {
        r: DVector::zeros(2 * n),
        sigma: CovarianceMatrix::scaled_identity(n, 2.0 * nbar + 1.0),
    })
}

/// Von Neumann entropy `Σₖ h(νₖ)` of a Gaussian state.
pub fn gaussian_entropy(state: &GaussianState) -> Result<f64> {
    covariance_entropy(&state.sigma)
}

/// Entropy of the Gaussian state with covariance `sigma`.
pub fn covariance_entropy(sigma: &CovarianceMatrix) -> Result<f64> {
    let nu = symplectic_eigenvalues(sigma)?;
    if let Some(&min) = nu.first() {
        if min < 1.0 - crate::symplectic::DEFAULT_TOL {
            return Err(Error::InvalidCovariance(min));
        }
    }
    // Clamp rounding just below 1.
    Ok(nu.iter().map(|&v| g(((v - 1.0) / 2.0).max(0.0))).sum())
}

/// A Gaussian channel acting on moments as `σ ↦ KσKᵀ + α`, `r ↦ Kr + y`.
/// `K` is `2m × 2n` for an `n`-mode input and `m`-mode output.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    pub k: DMatrix<f64>,
    pub alpha: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl GaussianChannel {
    pub fn new(k: DMatrix<f64>, alpha: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let m2 = k.nrows();
        if k.nrows() % 2 != 0 {
            return Err(Error::OddDimension(k.nrows()));
        }
        if k.ncols() % 2 != 0 {
            return Err(Error::OddDimension(k.ncols()));
        }
        if alpha.nrows() != m2 || alpha.ncols() != m2 {
            return Err(Error::DimensionMismatch {
                expected: m2,
                got: alpha.nrows(),
            });
        }
        if y.len() != m2 {
            return Err(Error::DimensionMismatch {
                expected: m2,
                got: y.len(),
            });
        }
        let asym = max_asymmetry(&alpha);
        if asym > 1e-9 * alpha.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            k,
            alpha: symmetrize(&alpha),
            y,
        })
    }

    /// `(K, α)` with `y = 0`.
    pub fn linear(k: DMatrix<f64>, alpha: DMatrix<f64>) -> Result<Self> {
        let y = DVector::zeros(k.nrows());
        Self::new(k, alpha, y)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            k: DMatrix::identity(2 * n, 2 * n),
            alpha: DMatrix::zeros(2 * n, 2 * n),
            y: DVector::zeros(2 * n),
        }
    }

    pub fn input_modes(&self) -> usize {
        self.k.ncols() / 2
    }

    pub fn output_modes(&self) -> usize {
        self.k.nrows() / 2
    }
}

/// Quantum-limited attenuator `K = √λ I`, `α = (1 − λ) I`.
pub fn attenuator(n: usize, lambda: f64) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(out_of_range("lambda", lambda, "0 <= lambda <= 1"));
    }
    let id = DMatrix::identity(2 * n, 2 * n);
    GaussianChannel::linear(&id * lambda.sqrt(), &id * (1.0 - lambda))
}

/// Quantum-limited amplifier `K = √κ I`, `α = (κ − 1) I`.
pub fn amplifier(n: usize, kappa: f64) -> Result<GaussianChannel> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(out_of_range("kappa", kappa, "kappa >= 1"));
    }
    let id = DMatrix::identity(2 * n, 2 * n);
    GaussianChannel::linear(&id * kappa.sqrt(), &id * (kappa - 1.0))
}

/// Additive classical noise `K = I`, `α = γ` with `γ` symmetric PSD.
pub fn additive_noise(n: usize, gamma: DMatrix<f64>) -> Result<GaussianChannel> {
    if gamma.nrows() != 2 * n || gamma.ncols() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: gamma.nrows(),
        });
    }
    let asym = max_asymmetry(&gamma);
    if asym > 1e-9 * gamma.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let min = crate::linalg::sym_eigen(&gamma).0.first().copied().unwrap_or(0.0);
    if min < -1e-12 * gamma.amax().max(1.0) {
        return Err(out_of_range("gamma", min, "gamma positive semidefinite"));
    }
    GaussianChannel::linear(DMatrix::identity(2 * n, 2 * n), gamma)
}

/// `σ′ = KσKᵀ + α`, `r′ = Kr + y`.
///
/// The output is not re-validated: for maps that are not positive on
/// Gaussian states the returned moments may violate `σ ≥ ±iΔ`.
pub fn apply_channel(ch: &GaussianChannel, st: &GaussianState) -> Result<GaussianState> {
    if ch.k.ncols() != st.r.len() {
        return Err(Error::DimensionMismatch {
            expected: ch.k.ncols(),
            got: st.r.len(),
        });
    }
    let sigma = &ch.k * st.sigma.matrix() * ch.k.transpose() + &ch.alpha;
    Ok(GaussianState {
        r: &ch.k * &st.r + &ch.y,
        sigma: CovarianceMatrix::new(symmetrize(&sigma))?,
    })
}

/// Complete positivity `α ≥ ±i(Δ_Y − KΔ_XKᵀ)`, checked as the minimum
/// eigenvalue of both Hermitian matrices being at least `−tol`.
pub fn is_completely_positive(ch: &GaussianChannel, tol: f64) -> bool {
    let dx = delta(ch.input_modes());
    let dy = delta(ch.output_modes());
    let b = dy - &ch.k * dx * ch.k.transpose();
    let alpha = symmetrize(&ch.alpha);
    [1.0, -1.0].iter().all(|&sign| {
        let m = CMatrix::from_fn(alpha.nrows(), alpha.ncols(), |i, j| {
            C64::new(alpha[(i, j)], -sign * b[(i, j)])
        });
        hermitian_eigenvalues(&m)
            .first()
            .is_none_or(|&min| min >= -tol)
    })
}

/// `second ∘ first`: `K = K₂K₁`, `α = K₂α₁K₂ᵀ + α₂`, `y = K₂y₁ + y₂`.
pub fn compose(second: &GaussianChannel, first: &GaussianChannel) -> Result<GaussianChannel> {
    if second.k.ncols() != first.k.nrows() {
        return Err(Error::DimensionMismatch {
            expected: second.k.ncols(),
            got: first.k.nrows(),
        });
    }
    let k = &second.k * &first.k;
    let alpha = &second.k * &first.alpha * second.k.transpose() + &second.alpha;
    let y = &second.k * &first.y + &second.y;
    GaussianChannel::new(k, symmetrize(&alpha), y)
}
