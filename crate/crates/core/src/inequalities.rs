//! Entropy power and entropy photon-number inequalities, their gap
//! functions, and the degraded broadcast rate-region bounds.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::gaussian::{covariance_entropy, g, g_inv};
use crate::symplectic::{is_valid_covariance, CovarianceMatrix, DEFAULT_TOL};

/// Linear combination `Y = Σ_α M_α X_α` of independent `n`-mode inputs,
/// reduced to the scalars `λ_α = |det M_α|^{1/n}` and entropies `S_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpiInstance {
    n: usize,
    coefficients: Vec<f64>,
    entropies: Vec<f64>,
}

impl EpiInstance {
    pub fn new(n: usize, coefficients: Vec<f64>, entropies: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(out_of_range("n", 0.0, "n >= 1"));
        }
        if coefficients.len() != entropies.len() {
            return Err(Error::DimensionMismatch {
                expected: coefficients.len(),
                got: entropies.len(),
            });
        }
        if let Some(&c) = coefficients.iter().find(|&&c| !(c >= 0.0)) {
            return Err(out_of_range("lambda", c, "lambda >= 0"));
        }
        if let Some(&s) = entropies.iter().find(|&&s| !(s >= 0.0)) {
            return Err(out_of_range("entropy", s, "entropy >= 0"));
        }
        Ok(Self { n, coefficients, entropies })
    }

    /// Coefficients from `2n × 2n` mixing blocks.
    pub fn from_mixing_matrices(n: usize, blocks: &[DMatrix<f64>], entropies: Vec<f64>) -> Result<Self> {
        let coefficients = blocks
            .iter()
            .map(|m| {
                if m.shape() != (2 * n, 2 * n) {
                    return Err(Error::DimensionMismatch { expected: 2 * n, got: m.nrows() });
                }
                Ok(m.determinant().abs().powf(1.0 / n as f64))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, coefficients, entropies)
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn entropies(&self) -> &[f64] {
        &self.entropies
    }
}

/// `n · ln(Σ_α λ_α e^{S_α/n})`, evaluated as a log-sum-exp.
pub fn epi_lower_bound(inst: &EpiInstance) -> Result<f64> {
    let n = inst.n as f64;
    let terms: Vec<f64> = inst
        .coefficients
        .iter()
        .zip(&inst.entropies)
        .filter(|(&c, _)| c > 0.0)
        .map(|(&c, &s)| c.ln() + s / n)
        .collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::InvalidMap("all EPI coefficients vanish".into()));
    }
    let sum: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    Ok(n * (peak + sum.ln()))
}

fn mix(sigma_a: &CovarianceMatrix, sigma_b: &CovarianceMatrix, lambda: f64) -> Result<CovarianceMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(out_of_range("lambda", lambda, "0 <= lambda <= 1"));
    }
    if sigma_a.modes() != sigma_b.modes() {
        return Err(Error::DimensionMismatch {
            expected: sigma_a.modes(),
            got: sigma_b.modes(),
        });
    }
    for s in [sigma_a, sigma_b] {
        if !is_valid_covariance(s, DEFAULT_TOL) {
            let nu = crate::symplectic::symplectic_eigenvalues(s).map_or(f64::NAN, |v| v[0]);
            return Err(Error::InvalidCovariance(nu));
        }
    }
    CovarianceMatrix::new(sigma_a.matrix() * lambda + sigma_b.matrix() * (1.0 - lambda))
}

/// Photon number per mode `g⁻¹(S/n)`.
pub fn photon_number(sigma: &CovarianceMatrix) -> Result<f64> {
    g_inv(covariance_entropy(sigma)? / sigma.modes() as f64)
}

/// Beamsplitter output `σ_C = λσ_A + (1−λ)σ_B` compared on the photon-number
/// scale: returns `(N_C, λN_A + (1−λ)N_B)`.
pub fn epni_gaussian_check(
    sigma_a: &CovarianceMatrix,
    sigma_b: &CovarianceMatrix,
    lambda: f64,
) -> Result<(f64, f64)> {
    let sigma_c = mix(sigma_a, sigma_b, lambda)?;
    let lhs = photon_number(&sigma_c)?;
    let rhs = lambda * photon_number(sigma_a)? + (1.0 - lambda) * photon_number(sigma_b)?;
    Ok((lhs, rhs))
}

/// Beamsplitter output entropy against the EPI bound: returns
/// `(S_C, n ln(λe^{S_A/n} + (1−λ)e^{S_B/n}))`.
pub fn epi_gaussian_check(
    sigma_a: &CovarianceMatrix,
    sigma_b: &CovarianceMatrix,
    lambda: f64,
) -> Result<(f64, f64)> {
    let sigma_c = mix(sigma_a, sigma_b, lambda)?;
    let inst = EpiInstance::new(
        sigma_a.modes(),
        vec![lambda, 1.0 - lambda],
        vec![covariance_entropy(sigma_a)?, covariance_entropy(sigma_b)?],
    )?;
    Ok((covariance_entropy(&sigma_c)?, epi_lower_bound(&inst)?))
}

/// Largest possible EPnI violation implied by the EPI: `1/e − 1/2`.
pub fn epni_violation_floor() -> f64 {
    (-1.0_f64).exp() - 0.5
}

/// `δ(x) = g⁻¹(ln x) − x/e + 1/2`, decreasing from `1/2 − 1/e` at `x = 1`
/// toward 0.
pub fn delta_gap(x: f64) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(out_of_range("x", x, "x >= 1"));
    }
    Ok(g_inv(x.ln())? - x / std::f64::consts::E + 0.5)
}

/// `Δ(S̄, λ) = g(λ g⁻¹(S̄)) − ln(λ e^{S̄} + 1 − λ)`: how far the EPI falls
/// short of the attenuator's constrained minimum output entropy.
pub fn cmoe_gap(sbar: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(out_of_range("lambda", lambda, "0 <= lambda <= 1"));
    }
    let epi = (lambda * sbar.exp_m1()).ln_1p();
    Ok(g(lambda * g_inv(sbar)?) - epi)
}

/// One grid point of the broadcast rate-region bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BroadcastPoint {
    pub r_b: f64,
    pub r_c_conjectured: f64,
    pub r_c_epi: f64,
}

/// Upper bounds on the rate `R_C` of the weaker receiver as a function of
/// `R_B`, for a beamsplitter of transmissivity `η` and mean input energy `E`.
/// `R_B` runs over `points` uniform values in `[0, g(ηE)]`, the largest rate
/// the stronger receiver can reach.
pub fn broadcast_region(eta: f64, energy: f64, points: usize) -> Result<Vec<BroadcastPoint>> {
    if !(0.5..=1.0).contains(&eta) {
        return Err(out_of_range("eta", eta, "0.5 <= eta <= 1"));
    }
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(out_of_range("energy", energy, "energy >= 0"));
    }
    if points < 2 {
        return Err(out_of_range("points", points as f64, "points >= 2"));
    }
    let top = g(eta * energy);
    (0..points)
        .map(|k| {
            let r_b = top * k as f64 / (points - 1) as f64;
            broadcast_point(eta, energy, r_b)
        })
        .collect()
}

/// Both bounds at a single `R_B ≥ 0`.
pub fn broadcast_point(eta: f64, energy: f64, r_b: f64) -> Result<BroadcastPoint> {
    if !(r_b >= 0.0) {
        return Err(out_of_range("r_b", r_b, "r_b >= 0"));
    }
    let head = g((1.0 - eta) * energy);
    let ratio = (1.0 - eta) / eta;
    let conj = head - g(ratio * g_inv(r_b)?);
    let epi = head - (ratio * r_b.exp_m1()).ln_1p();
    Ok(BroadcastPoint {
        r_b,
        r_c_conjectured: conj.max(0.0),
        r_c_epi: epi.max(0.0),
    })
}
