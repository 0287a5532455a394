//! Classical thinning of photon-number distributions.

use crate::error::{out_of_range, Error, Result};
use crate::gaussian::{g, g_inv};
use crate::linalg::{binomial, ln_binomial};

pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// Probability distribution on `{0, 1, …, len−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    p: Vec<f64>,
}

impl DiscreteDistribution {
    /// Requires nonnegative finite entries summing to 1 within [`DISTRIBUTION_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDistribution("negative or non-finite entry".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("sum {total} != 1")));
        }
        Ok(Self { p })
    }

    /// Point mass at `n`, stored on `{0, …, n}`.
    pub fn delta(n: usize) -> Self {
        let mut p = vec![0.0; n + 1];
        p[n] = 1.0;
        Self { p }
    }

    pub fn uniform(len: usize) -> Result<Self> {
        Self::new(vec![1.0 / len as f64; len])
    }

    /// Geometric distribution with mean `nbar`, truncated to `len` entries and
    /// renormalized.
    pub fn truncated_geometric(len: usize, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || len == 0 {
            return Err(out_of_range("nbar", nbar, "nbar >= 0"));
        }
        Ok(Self {
            p: truncated_geometric(len, nbar),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, &v)| n as f64 * v).sum()
    }
}

pub(crate) fn truncated_geometric(len: usize, nbar: f64) -> Vec<f64> {
    let z = nbar / (nbar + 1.0);
    let raw: Vec<f64> = (0..len).map(|n| z.powi(n as i32)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// `C(k, n) λⁿ (1−λ)^{k−n}`, the probability that `n` of `k` photons survive.
pub fn transition_probability(n: usize, k: usize, lambda: f64) -> f64 {
    if n > k {
        return 0.0;
    }
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if lambda == 1.0 {
        return if n == k { 1.0 } else { 0.0 };
    }
    if k <= 60 {
        binomial(k, n) * lambda.powi(n as i32) * (1.0 - lambda).powi((k - n) as i32)
    } else {
        (ln_binomial(k, n) + n as f64 * lambda.ln() + (k - n) as f64 * (1.0 - lambda).ln()).exp()
    }
}

/// Thinning `[T_λ p]ₙ = Σ_k C(k,n) λⁿ (1−λ)^{k−n} p_k`.
pub fn thin(p: &DiscreteDistribution, lambda: f64) -> Result<DiscreteDistribution> {
    Ok(DiscreteDistribution {
        p: thin_sequence(p.probabilities(), lambda)?,
    })
}

/// Thinning applied to an arbitrary nonnegative sequence (not renormalized).
pub fn thin_sequence(p: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(out_of_range("lambda", lambda, "0 <= lambda <= 1"));
    }
    let len = p.len();
    let mut out = vec![0.0; len];
    for (k, &pk) in p.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        for (n, slot) in out.iter_mut().enumerate().take(k + 1) {
            *slot += transition_probability(n, k, lambda) * pk;
        }
    }
    Ok(out)
}

/// Shannon entropy in nats, `0 ln 0 = 0`.
pub fn shannon_entropy(p: &DiscreteDistribution) -> f64 {
    p.probabilities()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum()
}

/// `H(T_λ p) − g(λ g⁻¹(H(p)))`; nonnegative, zero on geometric inputs.
pub fn thinning_bound_gap(p: &DiscreteDistribution, lambda: f64) -> Result<f64> {
    let out = thin(p, lambda)?;
    Ok(shannon_entropy(&out) - g(lambda * g_inv(shannon_entropy(p))?))
}
