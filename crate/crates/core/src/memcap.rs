//! Classical capacity of the Gaussian thermal channel with memory.
//!
//! Each use mixes the input with a memory mode (mixing `μ`) before a
//! one-mode channel of transmissivity or gain `κ` with `N` thermal photons.
//! Many uses decouple into independent channels whose transmissivities
//! approach the symbol `η(z)`, `z ∈ [0, 2π]`, and the capacity follows from
//! water-filling the input energy over `z`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::gaussian::g;
use crate::linalg::{bisect, sym_eigen, simpson};

/// Simpson panels over `[z₀, 2π]`.
pub const PANELS: usize = 2048;

/// Default relative tolerance on the energy constraint.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemoryChannelParams {
    kappa: f64,
    mu: f64,
    nbar: f64,
    energy: f64,
}

impl MemoryChannelParams {
    pub fn new(kappa: f64, mu: f64, nbar: f64, energy: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(out_of_range("kappa", kappa, "kappa >= 0"));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(out_of_range("mu", mu, "0 <= mu <= 1"));
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(out_of_range("nbar", nbar, "nbar >= 0"));
        }
        if !(energy >= 0.0) || !energy.is_finite() {
            return Err(out_of_range("energy", energy, "energy >= 0"));
        }
        Ok(Self { kappa, mu, nbar, energy })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        Self::new(self.kappa, self.mu, self.nbar, energy)
    }

    pub fn with_nbar(&self, nbar: f64) -> Result<Self> {
        Self::new(self.kappa, self.mu, nbar, self.energy)
    }

    pub fn is_amplifier(&self) -> bool {
        self.kappa > 1.0
    }

    /// `η ≡ 1`: the channel is the identity.
    fn is_identity(&self) -> bool {
        self.kappa == 1.0 || self.mu == 1.0
    }

    fn check_threshold(&self) -> Result<()> {
        if (self.mu * self.kappa - 1.0).abs() < 1e-12 && !self.is_identity() {
            return Err(Error::ThresholdCase);
        }
        Ok(())
    }

    /// Noise floor added to `η N(z)`: `(1−η)N` for attenuators, `(η−1)(N+1)`
    /// for amplifiers.
    fn noise(&self, eta: f64) -> f64 {
        if self.is_amplifier() {
            (eta - 1.0) * (self.nbar + 1.0)
        } else {
            (1.0 - eta) * self.nbar
        }
    }

    fn eta(&self, z: f64) -> f64 {
        eta_raw(z, self.kappa, self.mu)
    }
}

fn eta_raw(z: f64, kappa: f64, mu: f64) -> f64 {
    if kappa == 1.0 || mu == 1.0 {
        // Identically 1; the formula is 0/0 at z = 0 when both are 1.
        return 1.0;
    }
    let c = 2.0 * (kappa * mu).sqrt() * (z / 2.0).cos();
    (kappa + mu - c) / (1.0 + kappa * mu - c)
}

/// Asymptotic spectrum `η(z) = (κ + μ − 2√(κμ) cos(z/2)) / (1 + κμ − 2√(κμ) cos(z/2))`.
pub fn eta(z: f64, kappa: f64, mu: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(out_of_range("kappa", kappa, "kappa >= 0"));
    }
    if !(mu >= 0.0) {
        return Err(out_of_range("mu", mu, "mu >= 0"));
    }
    Ok(eta_raw(z, kappa, mu))
}

/// Eigenvalues (ascending) of the `n × n` matrix
/// `M_{jj′} = δ_{jj′} + (κ_{jj′} − 1) √(μκ)^{|j−j′|}`,
/// `κ_{jj′} = κ + μ(κ−1)² Σ_{h=0}^{min(j,j′)−2} (μκ)^h` with 1-based `j`.
pub fn finite_toeplitz_spectrum(n: usize, kappa: f64, mu: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(out_of_range("n", 0.0, "n >= 1"));
    }
    Ok(sym_eigen(&finite_toeplitz_matrix(n, kappa, mu)?).0)
}

pub fn finite_toeplitz_matrix(n: usize, kappa: f64, mu: f64) -> Result<DMatrix<f64>> {
    if !(kappa >= 0.0) || !(0.0..=1.0).contains(&mu) {
        return Err(out_of_range("kappa", kappa, "kappa >= 0 and 0 <= mu <= 1"));
    }
    let mk = mu * kappa;
    let root = mk.sqrt();
    // prefix[m] = Σ_{h=0}^{m−1} (μκ)^h
    let mut prefix = vec![0.0; n + 1];
    for m in 1..=n {
        prefix[m] = prefix[m - 1] + mk.powi(m as i32 - 1);
    }
    let step = mu * (kappa - 1.0) * (kappa - 1.0);
    let mut out = DMatrix::zeros(n, n);
    for j in 1..=n {
        for jp in 1..=n {
            let m = j.min(jp);
            let kjj = kappa + step * if m >= 2 { prefix[m - 1] } else { 0.0 };
            let d = j.abs_diff(jp);
            let decay = if d == 0 { 1.0 } else { root.powi(d as i32) };
            out[(j - 1, jp - 1)] = if j == jp { 1.0 } else { 0.0 } + (kjj - 1.0) * decay;
        }
    }
    Ok(out)
}

/// Optimal energy allocation over the decoupled channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterfillSolution {
    pub lambda_mult: f64,
    pub z0: f64,
    pub capacity: f64,
    /// `(z, N(z))` on a uniform grid over `[0, 2π]`.
    pub samples: Vec<(f64, f64)>,
    /// `(1/2π)∫N − E` from the solver's own quadrature.
    pub energy_residual: f64,
    #[serde(skip_serializing)]
    params: MemoryChannelParams,
}

impl WaterfillSolution {
    /// `N(z)` at an arbitrary point.
    pub fn allocation(&self, z: f64) -> f64 {
        allocation_raw(&self.params, z, self.lambda_mult).max(0.0)
    }
}

/// Unconstrained Lagrange solution `(1/η)(1/(e^{λ/η} − 1) − noise(η))`.
fn allocation_raw(p: &MemoryChannelParams, z: f64, lambda: f64) -> f64 {
    let eta = p.eta(z);
    if eta <= 0.0 {
        // Limit η → 0⁺: the Bose term vanishes faster than 1/η.
        return if p.nbar > 0.0 { f64::NEG_INFINITY } else { 0.0 };
    }
    (1.0 / (lambda / eta).exp_m1() - p.noise(eta)) / eta
}

/// Start of the support of `N(z)`; the raw allocation is nondecreasing in `z`.
fn cutoff(p: &MemoryChannelParams, lambda: f64) -> f64 {
    let two_pi = 2.0 * PI;
    if allocation_raw(p, 0.0, lambda) >= 0.0 {
        return 0.0;
    }
    if allocation_raw(p, two_pi, lambda) <= 0.0 {
        return two_pi;
    }
    bisect(|z| allocation_raw(p, z, lambda), 0.0, two_pi, MAX_ITER)
}

fn allocated_energy(p: &MemoryChannelParams, lambda: f64) -> (f64, f64) {
    let z0 = cutoff(p, lambda);
    let e = simpson(|z| allocation_raw(p, z, lambda).max(0.0), z0, 2.0 * PI, PANELS) / (2.0 * PI);
    (e, z0)
}

fn capacity_integrand(p: &MemoryChannelParams, z: f64, n_z: f64) -> f64 {
    let eta = p.eta(z);
    let noise = p.noise(eta).max(0.0);
    g(eta * n_z + noise) - g(noise)
}

/// Water-filling with `samples + 1` grid points in the reported profile.
pub fn waterfill_with_samples(
    params: &MemoryChannelParams,
    tol: f64,
    samples: usize,
) -> Result<WaterfillSolution> {
    params.check_threshold()?;
    if params.energy <= 0.0 {
        return Err(out_of_range("energy", params.energy, "energy > 0"));
    }
    let target = params.energy;
    let abs_tol = tol * target.max(1.0);

    let lo_start = 1e-12_f64;
    let mut hi = 1.0_f64;
    while allocated_energy(params, hi).0 >= target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Numerical("multiplier bracket diverged".into()));
        }
    }
    if allocated_energy(params, lo_start).0 < target {
        return Err(Error::Numerical("energy exceeds the smallest multiplier".into()));
    }
    // Energy decreases in λ; bisect on ln λ.
    let (mut lo, mut hi) = (lo_start.ln(), hi.ln());
    let mut lambda = hi.exp();
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        lambda = mid.exp();
        let (e, _) = allocated_energy(params, lambda);
        if (e - target).abs() <= abs_tol {
            break;
        }
        if e > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let (e, z0) = allocated_energy(params, lambda);
    let capacity = simpson(
        |z| capacity_integrand(params, z, allocation_raw(params, z, lambda).max(0.0)),
        z0,
        2.0 * PI,
        PANELS,
    ) / (2.0 * PI);
    let samples = samples.max(1);
    let grid = (0..=samples)
        .map(|k| {
            let z = 2.0 * PI * k as f64 / samples as f64;
            (z, allocation_raw(params, z, lambda).max(0.0))
        })
        .collect();
    Ok(WaterfillSolution {
        lambda_mult: lambda,
        z0,
        capacity,
        samples: grid,
        energy_residual: e - target,
        params: *params,
    })
}

pub fn waterfill(params: &MemoryChannelParams, tol: f64) -> Result<WaterfillSolution> {
    waterfill_with_samples(params, tol, 256)
}

/// Capacity in nats per use. `E = 0` gives 0.
pub fn memory_capacity(params: &MemoryChannelParams, tol: f64) -> Result<f64> {
    params.check_threshold()?;
    if params.energy == 0.0 {
        return Ok(0.0);
    }
    Ok(waterfill(params, tol)?.capacity)
}

/// Capacity rate achieved by spreading the energy evenly, `N(z) ≡ E`.
pub fn flat_allocation_capacity(params: &MemoryChannelParams) -> Result<f64> {
    params.check_threshold()?;
    let e = params.energy;
    Ok(simpson(|z| capacity_integrand(params, z, e), 0.0, 2.0 * PI, PANELS) / (2.0 * PI))
}

/// Smallest energy at which every decoupled channel receives photons
/// (`z₀ = 0`). Infinite when `η(0) = 0` at positive temperature.
pub fn critical_energy(kappa: f64, mu: f64, nbar: f64) -> Result<f64> {
    let p = MemoryChannelParams::new(kappa, mu, nbar, 0.0)?;
    p.check_threshold()?;
    let eta0 = p.eta(0.0);
    let floor = p.noise(eta0);
    if floor <= 0.0 {
        return Ok(0.0);
    }
    if eta0 <= 0.0 {
        return Ok(f64::INFINITY);
    }
    // λ_c makes the raw allocation vanish at z = 0.
    let lambda = eta0 * (1.0 / floor).ln_1p();
    Ok(simpson(|z| allocation_raw(&p, z, lambda).max(0.0), 0.0, 2.0 * PI, PANELS) / (2.0 * PI))
}

/// Energy below which the additive-noise limit needs the positive part.
pub fn additive_noise_min_energy(mu: f64, noise_nc: f64) -> f64 {
    let s = mu.sqrt();
    2.0 * noise_nc * s / (1.0 - s)
}

/// `N_C(1−μ) / (1 + μ − 2√μ cos(z/2))`, the mode-dependent added noise.
pub fn additive_noise_profile(z: f64, mu: f64, noise_nc: f64) -> f64 {
    noise_nc * (1.0 - mu) / (1.0 + mu - 2.0 * mu.sqrt() * (z / 2.0).cos())
}

/// Capacity `g(E + N_C) − (1/2π)∫ g(N_C(z)) dz` of the additive-noise limit
/// (`κ → 1`, `N(1−κ) → N_C`).
pub fn additive_noise_capacity(mu: f64, noise_nc: f64, energy: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&mu) {
        return Err(out_of_range("mu", mu, "0 <= mu < 1"));
    }
    if !(noise_nc >= 0.0) {
        return Err(out_of_range("noise_nc", noise_nc, "noise_nc >= 0"));
    }
    if !(energy >= 0.0) {
        return Err(out_of_range("energy", energy, "energy >= 0"));
    }
    let min = additive_noise_min_energy(mu, noise_nc);
    if energy < min - tol * min.max(1.0) {
        return Err(out_of_range("energy", energy, "energy >= 2 N_C sqrt(mu) / (1 - sqrt(mu))"));
    }
    if noise_nc == 0.0 {
        return Ok(g(energy));
    }
    let avg = simpson(|z| g(additive_noise_profile(z, mu, noise_nc)), 0.0, 2.0 * PI, PANELS) / (2.0 * PI);
    Ok(g(energy + noise_nc) - avg)
}

/// `(1/2π)∫ F(η(z)) dz` by Simpson.
pub fn symbol_average(kappa: f64, mu: f64, f: impl Fn(f64) -> f64) -> f64 {
    simpson(|z| f(eta_raw(z, kappa, mu)), 0.0, 2.0 * PI, PANELS) / (2.0 * PI)
}

/// `|(1/n) Σⱼ F(ηⱼ) − (1/2π)∫ F(η(z)) dz|` for the finite matrix of size `n`.
pub fn szego_error(n: usize, kappa: f64, mu: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let eig = finite_toeplitz_spectrum(n, kappa, mu)?;
    let finite = eig.iter().map(|&v| f(v)).sum::<f64>() / n as f64;
    Ok((finite - symbol_average(kappa, mu, f)).abs())
}

/// [`szego_error`] with `F = ln`.
///
/// `det M⁽ⁿ⁾ = κⁿ` exactly, so the finite average is `ln κ` for every `n`
/// while the integral is `ln max(κ, μ)`: the two agree to rounding when
/// `κ ≥ μ`, and differ by `ln(μ/κ)` when `κ < μ` because one eigenvalue
/// decays like `(κ/μ)ⁿ`.
pub fn szego_log_error(n: usize, kappa: f64, mu: f64) -> Result<f64> {
    let eig = finite_toeplitz_spectrum(n, kappa, mu)?;
    if eig[0] <= 0.0 {
        return Err(Error::Numerical(format!("nonpositive eigenvalue {}", eig[0])));
    }
    szego_error(n, kappa, mu, f64::ln)
}
