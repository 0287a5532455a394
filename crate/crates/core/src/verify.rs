//! Seeded property sweeps over the numerical modules.
//!
//! Every randomized trial draws from its own substream of the seed, so a
//! report is reproducible from `(suite, dim, trials, seed)` alone and does
//! not depend on how trials are scheduled across threads.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{
    attenuator_fock, cmoe_check, isoperimetric_gap, majorization_margin, passive_rearrangement,
    FockDensity,
};
use crate::gaussian::{apply_channel, is_completely_positive, GaussianState};
use crate::inequalities::{epi_gaussian_check, epni_gaussian_check};
use crate::linalg::{bisect, CMatrix};
use crate::lossy::{
    passivity_condition, two_mode, two_mode_attenuator, two_qubit, two_qubit_counterexample,
    uniform_mixture, LindbladSpec,
};
use crate::memcap::{
    flat_allocation_capacity, memory_capacity, szego_error, szego_log_error, waterfill,
    MemoryChannelParams, DEFAULT_TOL,
};
use crate::random::{
    normal, random_covariance, random_density, random_probabilities, random_symplectic,
    random_unitary, Substreams,
};
use crate::superop::{classify_one_mode, one_mode_cp, random_valid_one_mode};
use crate::symplectic::CovarianceMatrix;
use crate::thinning::{thin, DiscreteDistribution};

pub const SUITES: &[&str] = &[
    "majorization",
    "passive",
    "cmoe",
    "isoperimetric",
    "thinning",
    "epni-gaussian",
    "counterexamples",
    "normalform",
    "memcap",
    "szego",
];

/// Size overrides; `None` selects the suite default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub dim: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            dim: None,
            trials: None,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub violation: f64,
    pub inputs: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub trials: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// Largest signed violation; negative values are the smallest slack.
    pub max_violation: f64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scope: Option<&'static str>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// One trial's signed violation (`> tolerance` fails) and its inputs.
type Outcome = Result<(f64, Value)>;

struct Sweep {
    suite: &'static str,
    dim: Option<usize>,
    trials: usize,
    tolerance: f64,
    scope: Option<&'static str>,
}

impl Sweep {
    fn run<F>(self, seed: u64, trial: F) -> Result<VerificationReport>
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Outcome + Sync,
    {
        let start = Instant::now();
        let streams = Substreams::new(seed);
        let outcomes: Vec<(f64, Value)> = (0..self.trials)
            .into_par_iter()
            .map(|i| trial(i, &mut streams.stream(i as u64)))
            .collect::<Result<_>>()?;
        let max_violation = outcomes
            .iter()
            .map(|o| o.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let failures: Vec<Failure> = outcomes
            .into_iter()
            .enumerate()
            .filter(|(_, (v, _))| !(*v <= self.tolerance))
            .map(|(trial, (violation, inputs))| Failure {
                trial,
                violation,
                inputs,
            })
            .collect();
        Ok(VerificationReport {
            suite: self.suite.to_string(),
            seed,
            dim: self.dim,
            trials: self.trials,
            tolerance: self.tolerance,
            passed: failures.is_empty(),
            max_violation,
            failures,
            scope: self.scope,
            wall_time: start.elapsed(),
        })
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let seed = cfg.seed;
    let trials = |default: usize| cfg.trials.unwrap_or(default);
    let dim = |default: usize| cfg.dim.unwrap_or(default);
    match name {
        "majorization" => majorization(dim(8), trials(200), seed),
        "passive" => passive(dim(6), trials(50), seed),
        "cmoe" => cmoe(dim(10), trials(500), seed),
        "isoperimetric" => isoperimetric(dim(12), trials(500), seed),
        "thinning" => thinning(dim(30), trials(100), seed),
        "epni-gaussian" => epni_gaussian(cfg.dim.unwrap_or(3), trials(1000), seed),
        "counterexamples" => counterexamples(trials(40), seed),
        "normalform" => normalform(trials(1000), seed),
        "memcap" => memcap(trials(40), seed),
        "szego" => szego(seed),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn complex_rows(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = m
        .row_iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect();
    json!(rows)
}

fn real_rows(m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    json!(rows)
}

/// Passive rearrangement against a random unitary conjugate under the
/// quantum-limited attenuator.
fn majorization(dim: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    const LAMBDAS: [f64; 2] = [0.3, 0.7];
    Sweep {
        suite: "majorization",
        dim: Some(dim),
        trials,
        tolerance: 1e-9,
        scope: None,
    }
    .run(seed, |_, rng| {
        let rho = FockDensity::new(random_density(rng, dim))?;
        let u = random_unitary(rng, dim);
        let conj = rho.conjugate(&u)?;
        let passive = passive_rearrangement(&rho);
        let mut worst = f64::NEG_INFINITY;
        for lam in LAMBDAS {
            let best = attenuator_fock(&passive, lam)?.spectrum();
            let other = attenuator_fock(&conj, lam)?.spectrum();
            worst = worst.max(-majorization_margin(&best, &other));
        }
        Ok((
            worst,
            json!({"lambdas": LAMBDAS, "rho": complex_rows(rho.matrix()), "u": complex_rows(&u)}),
        ))
    })
}

/// Random concave single-jump profile: increments sorted descending with
/// zero sum give `r₀ = r_d = 0` and a positive interior.
fn random_concave_rates(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut inc: Vec<f64> = (0..dim).map(|_| normal(rng)).collect();
    let mean = inc.iter().sum::<f64>() / dim as f64;
    inc.iter_mut().for_each(|v| *v -= mean);
    inc.sort_by(|a, b| b.total_cmp(a));
    let mut r = 0.0;
    inc[..dim - 1]
        .iter()
        .map(|d| {
            r += d;
            r.max(0.0).sqrt()
        })
        .collect()
}

/// Passive inputs are optimal for lossy generators with concave rates.
fn passive(dim: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    const TIMES: [f64; 3] = [0.1, 0.5, 2.0];
    Sweep {
        suite: "passive",
        dim: Some(dim),
        trials,
        tolerance: 1e-8,
        scope: None,
    }
    .run(seed, |_, rng| {
        let spec = LindbladSpec::single_jump(&random_concave_rates(rng, dim))?;
        if !passivity_condition(&spec.rate_profile()) {
            return Err(Error::Numerical("sampled profile is not concave".into()));
        }
        let gen = spec.generator();
        let rho = FockDensity::new(random_density(rng, dim))?;
        let other = rho.conjugate(&random_unitary(rng, dim))?;
        let passive = passive_rearrangement(&rho);
        let mut worst = f64::NEG_INFINITY;
        for t in TIMES {
            let best = gen.evolve(&passive, t)?.spectrum();
            let out = gen.evolve(&other, t)?.spectrum();
            worst = worst.max(-majorization_margin(&best, &out));
        }
        Ok((
            worst,
            json!({"spec": spec, "times": TIMES, "rho": complex_rows(rho.matrix()), "conjugated": complex_rows(other.matrix())}),
        ))
    })
}

/// `S(E_λ(ρ)) ≥ g(λ g⁻¹(S(ρ)))` on Fock-diagonal inputs.
fn cmoe(dim: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    const LAMBDAS: [f64; 3] = [0.2, 0.5, 0.8];
    Sweep {
        suite: "cmoe",
        dim: Some(dim),
        trials,
        tolerance: 1e-9,
        scope: Some("Fock-diagonal inputs"),
    }
    .run(seed, |_, rng| {
        let p = random_probabilities(rng, dim);
        let rho = FockDensity::diagonal(&p)?;
        let mut worst = f64::NEG_INFINITY;
        for lam in LAMBDAS {
            let (lhs, rhs) = cmoe_check(&rho, lam)?;
            worst = worst.max(rhs - lhs);
        }
        Ok((worst, json!({"p": p, "lambdas": LAMBDAS})))
    })
}

/// `−F(p) ≥ f(H(p))` on strictly positive decreasing distributions.
fn isoperimetric(dim: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    Sweep {
        suite: "isoperimetric",
        dim: Some(dim),
        trials,
        tolerance: 1e-9,
        scope: Some("strictly positive decreasing distributions"),
    }
    .run(seed, |_, rng| {
        let mut p = random_probabilities(rng, dim);
        p.sort_by(|a, b| b.total_cmp(a));
        Ok((-isoperimetric_gap(&p)?, json!({ "p": p })))
    })
}

/// Fock-diagonal attenuator against classical thinning.
fn thinning(dim: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    const LAMBDAS: [f64; 3] = [0.25, 0.5, 0.9];
    Sweep {
        suite: "thinning",
        dim: Some(dim),
        trials,
        tolerance: 1e-10,
        scope: None,
    }
    .run(seed, |_, rng| {
        let p = random_probabilities(rng, dim);
        let rho = FockDensity::diagonal(&p)?;
        let dist = DiscreteDistribution::new(p.clone())?;
        let mut worst: f64 = 0.0;
        for lam in LAMBDAS {
            let a = attenuator_fock(&rho, lam)?.populations();
            let b = thin(&dist, lam)?;
            for (x, y) in a.iter().zip(b.probabilities()) {
                worst = worst.max((x - y).abs());
            }
        }
        Ok((worst, json!({"p": p, "lambdas": LAMBDAS})))
    })
}

/// EPI and photon-number EPI on beamsplitter-mixed Gaussian pairs, plus
/// saturation of the latter on proportional inputs.
fn epni_gaussian(max_modes: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    Sweep {
        suite: "epni-gaussian",
        dim: Some(max_modes),
        trials,
        tolerance: 1e-9,
        scope: Some(
            "Gaussian inputs only; saturation checked on proportional pairs with degenerate symplectic spectrum",
        ),
    }
    .run(seed, |trial, rng| {
        let n = 1 + trial % max_modes.max(1);
        let a = random_covariance(rng, n, 0.7, 1.0);
        let b = random_covariance(rng, n, 0.7, 1.0);
        let lam: f64 = rng.random();
        let (s, bound) = epi_gaussian_check(&a, &b, lam)?;
        let (l, r) = epni_gaussian_check(&a, &b, lam)?;

        let s_mat = random_symplectic(rng, n, 0.7);
        let base = &s_mat * s_mat.transpose();
        let (x, y) = (1.0 + 2.0 * rng.random::<f64>(), 1.0 + 2.0 * rng.random::<f64>());
        let pa = CovarianceMatrix::new(&base * x)?;
        let pb = CovarianceMatrix::new(&base * y)?;
        let (pl, pr) = epni_gaussian_check(&pa, &pb, lam)?;

        let violation = (bound - s).max(r - l).max((pl - pr).abs());
        Ok((
            violation,
            json!({
                "modes": n,
                "lambda": lam,
                "sigma_a": real_rows(a.matrix()),
                "sigma_b": real_rows(b.matrix()),
                "proportional_base": real_rows(&base),
                "proportional_factors": [x, y],
            }),
        ))
    })
}

/// Computed evolutions of the two-mode and two-qubit examples against their
/// closed forms. Trial `k < trials` checks time `t_k`; the last trial
/// locates the crossing of the two three-term partial sums.
fn counterexamples(trials: usize, seed: u64) -> Result<VerificationReport> {
    let cutoff = 6;
    let gen2 = two_mode_attenuator(cutoff);
    let idx = |i: usize, j: usize| i * cutoff + j;
    let rho = uniform_mixture(36, &[idx(0, 0), idx(0, 1), idx(1, 0), idx(0, 2), idx(1, 1), idx(2, 0)])?;
    let sigma = uniform_mixture(36, &(0..6).map(|j| idx(0, j)).collect::<Vec<_>>())?;
    let genq = two_qubit_counterexample();
    let mixed = uniform_mixture(4, &[0, 1, 2, 3])?;
    let q1 = uniform_mixture(4, &[0, 1, 2])?;
    let q2 = uniform_mixture(4, &[0, 1, 3])?;
    let s3 = |t: f64| -> Result<(f64, f64)> {
        let a = gen2.evolve(&rho, t)?.spectrum();
        let b = gen2.evolve(&sigma, t)?.spectrum();
        Ok((a.values()[..3].iter().sum(), b.values()[..3].iter().sum()))
    };

    Sweep {
        suite: "counterexamples",
        dim: None,
        trials: trials + 1,
        tolerance: 1e-8,
        scope: None,
    }
    .run(seed, |k, _| {
        if k == trials {
            let t0 = two_mode::crossing_time();
            let diff = |t: f64| s3(t).map(|(a, b)| b - a).unwrap_or(f64::NAN);
            let found = bisect(diff, 0.5, 3.0, 200);
            return Ok(((found - t0).abs(), json!({"crossing": found, "expected": t0})));
        }
        let t = 5.0 * (k + 1) as f64 / trials as f64;
        let (a, b) = s3(t)?;
        let mut err = (a - two_mode::s3(t)).abs().max((b - two_mode::s3_tilde(t)).abs());
        for (input, closed) in [
            (&mixed, two_qubit::from_maximally_mixed(t)),
            (&q1, two_qubit::from_passive(t)),
            (&q2, two_qubit::from_non_passive(t)),
        ] {
            let out = genq.evolve(input, t)?.populations();
            for (x, y) in out.iter().zip(closed) {
                err = err.max((x - y).abs());
            }
        }
        Ok((err, json!({ "t": t })))
    })
}

/// One-mode normal forms: recomposition on random states, CP residue, and
/// agreement of the determinant CP test with the matrix-level one.
fn normalform(trials: usize, seed: u64) -> Result<VerificationReport> {
    const STATES: usize = 100;
    Sweep {
        suite: "normalform",
        dim: None,
        trials,
        tolerance: 1e-9,
        scope: Some("one-mode maps"),
    }
    .run(seed, |_, rng| {
        let spec = random_valid_one_mode(rng);
        let nf = classify_one_mode(&spec, 1e-9)?;
        let total = nf.recompose()?;
        let orig = spec.to_channel();
        let mut err: f64 = 0.0;
        for _ in 0..STATES {
            let sigma = random_covariance(rng, 1, 0.5, 1.0);
            let r = DVector::from_fn(2, |_, _| normal(rng));
            let st = GaussianState::new(r, sigma, 1e-9)?;
            let a = apply_channel(&total, &st)?;
            let b = apply_channel(&orig, &st)?;
            let scale = b.sigma.matrix().amax().max(1.0);
            err = err.max((a.sigma.matrix() - b.sigma.matrix()).amax() / scale);
            err = err.max((&a.r - &b.r).amax() / scale);
        }
        let residue = crate::superop::MapSpec::new(nf.symplectic_part.clone(), nf.residual_noise.clone())?;
        let residue_cp = one_mode_cp(&residue, 1e-9)?;
        let agree = one_mode_cp(&spec, 1e-9)? == is_completely_positive(&orig, 1e-9);
        let violation = if residue_cp && agree { err } else { 1.0 };
        Ok((
            violation,
            json!({"spec": spec, "case": nf.case, "residue_cp": residue_cp, "cp_tests_agree": agree}),
        ))
    })
}

/// Water-filling on random memory channels: energy constraint, dominance
/// over the flat allocation, and the `κ ↔ μ` symmetry.
fn memcap(trials: usize, seed: u64) -> Result<VerificationReport> {
    Sweep {
        suite: "memcap",
        dim: None,
        trials,
        tolerance: 1e-6,
        scope: Some("0 <= kappa, mu < 1"),
    }
    .run(seed, |_, rng| {
        let kappa = rng.random::<f64>() * 0.99;
        let mu = rng.random::<f64>() * 0.99;
        let nbar = 3.0 * rng.random::<f64>();
        let energy = 0.1 + 9.9 * rng.random::<f64>();
        let p = MemoryChannelParams::new(kappa, mu, nbar, energy)?;
        let sol = waterfill(&p, DEFAULT_TOL)?;
        let flat = flat_allocation_capacity(&p)?;
        let swapped = memory_capacity(&MemoryChannelParams::new(mu, kappa, nbar, energy)?, DEFAULT_TOL)?;
        let violation = (sol.energy_residual.abs() / energy.max(1.0))
            .max(flat - sol.capacity)
            .max((swapped - sol.capacity).abs());
        Ok((violation, json!({"kappa": kappa, "mu": mu, "nbar": nbar, "energy": energy})))
    })
}

/// Eigenvalue averages of the finite memory matrix against the symbol
/// average at `(κ, μ) = (0.9, 0.8)`. For `F = ln` the finite average is
/// `ln κ` for every `n` (`det M = κⁿ`), so the error sits at rounding level;
/// `F = η²` shows the genuine `O(1/n)` decay.
fn szego(seed: u64) -> Result<VerificationReport> {
    const SIZES: [usize; 3] = [64, 128, 256];
    let (kappa, mu) = (0.9, 0.8);
    Sweep {
        suite: "szego",
        dim: None,
        trials: 1,
        tolerance: 0.0,
        scope: Some("(kappa, mu) = (0.9, 0.8); F = ln and F = eta^2"),
    }
    .run(seed, |_, _| {
        let log_err: Vec<f64> = SIZES
            .iter()
            .map(|&n| szego_log_error(n, kappa, mu))
            .collect::<Result<_>>()?;
        let sq_err: Vec<f64> = SIZES
            .iter()
            .map(|&n| szego_error(n, kappa, mu, |x| x * x))
            .collect::<Result<_>>()?;
        let mut v = (log_err[2] - 2e-2).max(sq_err[2] - 2e-2);
        for w in log_err.windows(2) {
            v = v.max(w[1] - w[0] - 1e-12);
        }
        for w in sq_err.windows(2) {
            v = v.max(w[1] - w[0]);
        }
        Ok((v, json!({"sizes": SIZES, "log_error": log_err, "square_error": sq_err})))
    })
}
