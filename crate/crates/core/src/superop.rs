//! Gaussian-to-Gaussian maps `σ ↦ KσKᵀ + α` that need not be completely
//! positive: one-mode determinant tests, normal forms, and a sampling
//! falsifier for the multimode case.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{out_of_range, Error, Result};
use crate::gaussian::{is_completely_positive, GaussianChannel};
use crate::linalg::{hermitian_eigenvalues, max_asymmetry, symmetrize, CMatrix, C64};
use crate::random::{gaussian_matrix, normal, random_covariance, random_psd, Substreams};
use crate::symplectic::{delta, transposition};

/// Below this magnitude a negative `det α` is treated as zero.
pub const DET_CLAMP: f64 = 1e-12;

/// Moments action `(K, α, y)` of a map on `n` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapSpec", into = "RawMapSpec")]
pub struct MapSpec {
    k: DMatrix<f64>,
    alpha: DMatrix<f64>,
    y: DVector<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapSpec {
    n: usize,
    k: Vec<f64>,
    alpha: Vec<f64>,
    #[serde(default)]
    y: Option<Vec<f64>>,
}

impl TryFrom<RawMapSpec> for MapSpec {
    type Error = Error;

    fn try_from(raw: RawMapSpec) -> Result<Self> {
        let d = 2 * raw.n;
        for len in [raw.k.len(), raw.alpha.len()] {
            if len != d * d {
                return Err(Error::DimensionMismatch {
                    expected: d * d,
                    got: len,
                });
            }
        }
        let y = match raw.y {
            Some(y) => DVector::from_vec(y),
            None => DVector::zeros(d),
        };
        MapSpec::with_displacement(
            DMatrix::from_row_slice(d, d, &raw.k),
            DMatrix::from_row_slice(d, d, &raw.alpha),
            y,
        )
    }
}

impl From<MapSpec> for RawMapSpec {
    fn from(spec: MapSpec) -> Self {
        let row_major = |m: &DMatrix<f64>| m.transpose().as_slice().to_vec();
        RawMapSpec {
            n: spec.modes(),
            k: row_major(&spec.k),
            alpha: row_major(&spec.alpha),
            y: Some(spec.y.as_slice().to_vec()),
        }
    }
}

impl MapSpec {
    /// `(K, α)` with `y = 0`.
    pub fn new(k: DMatrix<f64>, alpha: DMatrix<f64>) -> Result<Self> {
        let y = DVector::zeros(k.nrows());
        Self::with_displacement(k, alpha, y)
    }

    pub fn with_displacement(k: DMatrix<f64>, alpha: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let d = k.nrows();
        if d % 2 != 0 {
            return Err(Error::OddDimension(d));
        }
        for got in [k.ncols(), alpha.nrows(), alpha.ncols(), y.len()] {
            if got != d {
                return Err(Error::DimensionMismatch { expected: d, got });
            }
        }
        if k.iter().chain(alpha.iter()).chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidMap("non-finite entry".into()));
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

    pub fn modes(&self) -> usize {
        self.k.nrows() / 2
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn alpha(&self) -> &DMatrix<f64> {
        &self.alpha
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn to_channel(&self) -> GaussianChannel {
        GaussianChannel {
            k: self.k.clone(),
            alpha: self.alpha.clone(),
            y: self.y.clone(),
        }
    }
}

impl From<&GaussianChannel> for MapSpec {
    fn from(ch: &GaussianChannel) -> Self {
        Self {
            k: ch.k.clone(),
            alpha: ch.alpha.clone(),
            y: ch.y.clone(),
        }
    }
}

fn require_one_mode(spec: &MapSpec) -> Result<()> {
    if spec.modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: spec.modes(),
        });
    }
    Ok(())
}

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// `√det α` for a 2×2 noise matrix, or `None` if `α` is not positive
/// semidefinite. Tiny negative determinants are clamped to zero.
fn sqrt_det_noise(alpha: &DMatrix<f64>, tol: f64) -> Option<f64> {
    let mut det = det2(alpha);
    if det < 0.0 && det > -DET_CLAMP {
        det = 0.0;
    }
    if det < 0.0 || alpha.trace() < -tol {
        return None;
    }
    Some(det.sqrt())
}

/// One-mode test for `KσKᵀ + α ≥ ±iΔ` on all valid `σ`:
/// `√det α ≥ 1 − |det K|`, with `α ⪰ 0`.
pub fn one_mode_valid(spec: &MapSpec, tol: f64) -> Result<bool> {
    require_one_mode(spec)?;
    Ok(sqrt_det_noise(&spec.alpha, tol).is_some_and(|s| s >= 1.0 - det2(&spec.k).abs() - tol))
}

/// One-mode complete positivity `√det α ≥ |1 − det K|`, with `α ⪰ 0`.
pub fn one_mode_cp(spec: &MapSpec, tol: f64) -> Result<bool> {
    require_one_mode(spec)?;
    Ok(sqrt_det_noise(&spec.alpha, tol).is_some_and(|s| s >= (1.0 - det2(&spec.k)).abs() - tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormCase {
    #[serde(rename = "CP")]
    Cp,
    DilatationThenCP,
    TransposeThenCP,
    DilatationTransposeThenCP,
    NotGaussianToGaussian,
}

impl NormalFormCase {
    pub fn transposes(self) -> bool {
        matches!(self, Self::TransposeThenCP | Self::DilatationTransposeThenCP)
    }

    pub fn is_gaussian_to_gaussian(self) -> bool {
        self != Self::NotGaussianToGaussian
    }
}

/// Decomposition `Φ = Φ_CP ∘ T^t ∘ D_λ` into a phase-space dilatation
/// `D_λ = (λI, 0)`, an optional transposition `T = ⊕diag(1, −1)` and a
/// residue `(symplectic_part, residual_noise, y)`.
///
/// `symplectic_part` is a genuine symplectic matrix whenever a dilatation
/// was split off; in the `CP` and `TransposeThenCP` cases it is the linear
/// part of the residue. For `NotGaussianToGaussian` it holds the original
/// `K` and nothing else is meaningful.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalForm {
    pub case: NormalFormCase,
    pub dilation: f64,
    #[serde(serialize_with = "rows")]
    pub symplectic_part: DMatrix<f64>,
    #[serde(serialize_with = "rows")]
    pub residual_noise: DMatrix<f64>,
    #[serde(serialize_with = "vector")]
    pub y: DVector<f64>,
}

fn rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

fn vector<S: Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

impl NormalForm {
    fn new(case: NormalFormCase, dilation: f64, residue: DMatrix<f64>, spec: &MapSpec) -> Self {
        Self {
            case,
            dilation,
            symplectic_part: residue,
            residual_noise: spec.alpha.clone(),
            y: spec.y.clone(),
        }
    }

    pub fn modes(&self) -> usize {
        self.symplectic_part.nrows() / 2
    }

    /// Stages in application order. Trivial dilatations are omitted.
    pub fn stages(&self) -> Result<Vec<GaussianChannel>> {
        if !self.case.is_gaussian_to_gaussian() {
            return Err(Error::InvalidMap("no normal form".into()));
        }
        let d = 2 * self.modes();
        let zero = || DMatrix::zeros(d, d);
        let mut out = Vec::with_capacity(3);
        if self.dilation != 1.0 {
            out.push(GaussianChannel::linear(
                DMatrix::identity(d, d) * self.dilation,
                zero(),
            )?);
        }
        if self.case.transposes() {
            out.push(GaussianChannel::linear(transposition(d / 2), zero())?);
        }
        out.push(GaussianChannel::new(
            self.symplectic_part.clone(),
            self.residual_noise.clone(),
            self.y.clone(),
        )?);
        Ok(out)
    }

    /// Composition of [`stages`](Self::stages).
    pub fn recompose(&self) -> Result<GaussianChannel> {
        let stages = self.stages()?;
        let mut total = GaussianChannel::identity(self.modes());
        for st in &stages {
            total = crate::gaussian::compose(st, &total)?;
        }
        Ok(total)
    }
}

/// One-mode normal form, split on the sign and size of `det K`.
pub fn classify_one_mode(spec: &MapSpec, tol: f64) -> Result<NormalForm> {
    if !one_mode_valid(spec, tol)? {
        return Err(Error::InvalidMap(format!(
            "sqrt(det alpha) < 1 - |det K| (det K = {})",
            det2(&spec.k)
        )));
    }
    let det = det2(&spec.k);
    let t = transposition(1);
    let nf = if det >= 0.0 && det <= 1.0 {
        NormalForm::new(NormalFormCase::Cp, 1.0, spec.k.clone(), spec)
    } else if det > 1.0 {
        let lam = det.sqrt();
        NormalForm::new(NormalFormCase::DilatationThenCP, lam, &spec.k / lam, spec)
    } else if det >= -1.0 {
        NormalForm::new(NormalFormCase::TransposeThenCP, 1.0, &spec.k * t, spec)
    } else {
        let lam = (-det).sqrt();
        NormalForm::new(
            NormalFormCase::DilatationTransposeThenCP,
            lam,
            &spec.k * t / lam,
            spec,
        )
    };
    Ok(nf)
}

/// Noiseless multimode maps: `K` is Gaussian-to-Gaussian iff
/// `KΔKᵀ = cΔ` with `|c| ≥ 1`, and then `K = S T^t (√|c| I)`.
pub fn classify_multimode_nonoise(k: &DMatrix<f64>, tol: f64) -> Result<NormalForm> {
    let spec = MapSpec::new(k.clone(), DMatrix::zeros(k.nrows(), k.nrows()))?;
    let n = spec.modes();
    let d = delta(n);
    let kdk = k * &d * k.transpose();
    let c = (d.transpose() * &kdk).trace() / (2 * n) as f64;
    let proportional = (&kdk - &d * c).amax() <= tol * c.abs().max(1.0);
    let not_g2g = || NormalForm::new(NormalFormCase::NotGaussianToGaussian, 1.0, k.clone(), &spec);
    if !proportional || c.abs() < 1.0 - tol {
        return Ok(not_g2g());
    }
    let lam = c.abs().sqrt();
    let near_one = (lam - 1.0).abs() <= tol;
    let nf = match (c > 0.0, near_one) {
        (true, true) => NormalForm::new(NormalFormCase::Cp, 1.0, k.clone(), &spec),
        (true, false) => NormalForm::new(NormalFormCase::DilatationThenCP, lam, k / lam, &spec),
        (false, true) => {
            NormalForm::new(NormalFormCase::TransposeThenCP, 1.0, k * transposition(n), &spec)
        }
        (false, false) => NormalForm::new(
            NormalFormCase::DilatationTransposeThenCP,
            lam,
            k * transposition(n) / lam,
            &spec,
        ),
    };
    Ok(nf)
}

/// `(μK, α)`: the original map is admissible on all `σ ≥ ±iμ²Δ` iff this one
/// is admissible on all `σ ≥ ±iΔ`.
pub fn shift_threshold(spec: &MapSpec, mu: f64) -> Result<MapSpec> {
    if !(mu > 1.0) || !mu.is_finite() {
        return Err(out_of_range("mu", mu, "mu > 1"));
    }
    MapSpec::with_displacement(&spec.k * mu, spec.alpha.clone(), spec.y.clone())
}

/// Evidence that a map violates `KσKᵀ + α ≥ ±iΔ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A valid input covariance whose image is not a valid covariance.
    Covariance(DMatrix<f64>),
    /// A vector with `|w†KΔKᵀw| + w†αw < |w†Δw|`.
    Vector(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FalsifierOutcome {
    pub trials: usize,
    /// Lowest-index trial that produced a witness.
    pub witness: Option<(usize, Witness)>,
    /// Largest violation seen over all trials (≤ 0 when none).
    pub max_violation: f64,
}

/// Violation tolerance, relative to the scale of the compared quantities.
pub const FALSIFIER_TOL: f64 = 1e-9;

fn min_eig_plus_i_delta(sigma: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let m = CMatrix::from_fn(sigma.nrows(), sigma.ncols(), |i, j| {
        C64::new(sigma[(i, j)], d[(i, j)])
    });
    hermitian_eigenvalues(&m)[0]
}

fn quad(w: &[C64], m: &DMatrix<f64>) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            acc += wi.conj() * m[(i, j)] * wj;
        }
    }
    acc
}

/// Randomized search for a violation of positivity on Gaussian inputs.
///
/// Each trial draws a valid `σ` (the vacuum on trial 0) and a complex `w`
/// from its own substream, so results do not depend on scheduling. A `None`
/// witness is not a certificate of validity.
pub fn sampled_positivity_falsifier(spec: &MapSpec, trials: usize, seed: u64) -> FalsifierOutcome {
    let n = spec.modes();
    let d = delta(n);
    let dk = &spec.k * &d * spec.k.transpose();
    let streams = Substreams::new(seed);
    let results: Vec<(f64, Option<Witness>)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = streams.stream(trial as u64);
            let sigma = if trial == 0 {
                DMatrix::identity(2 * n, 2 * n)
            } else {
                let squeeze = rng.random::<f64>();
                random_covariance(&mut rng, n, squeeze, 1.0).into_matrix()
            };
            let out = &spec.k * &sigma * spec.k.transpose() + &spec.alpha;
            let scale = out.amax().max(1.0);
            let cov_violation = -min_eig_plus_i_delta(&symmetrize(&out), &d) / scale;

            let w: Vec<C64> = (0..2 * n)
                .map(|_| C64::new(normal(&mut rng), normal(&mut rng)))
                .collect();
            let lhs = quad(&w, &dk).norm() + quad(&w, &spec.alpha).re;
            let rhs = quad(&w, &d).norm();
            let vec_violation = (rhs - lhs) / lhs.abs().max(rhs).max(1e-300);

            let witness = if cov_violation > FALSIFIER_TOL {
                Some(Witness::Covariance(sigma))
            } else if vec_violation > FALSIFIER_TOL {
                Some(Witness::Vector(w))
            } else {
                None
            };
            (cov_violation.max(vec_violation), witness)
        })
        .collect();
    let max_violation = results
        .iter()
        .map(|r| r.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let witness = results
        .into_iter()
        .enumerate()
        .find_map(|(i, (_, w))| w.map(|w| (i, w)));
    FalsifierOutcome {
        trials,
        witness,
        max_violation,
    }
}

/// Exchange of position between two modes with a momentum flip on the
/// first, `K = √ν P`, paired with noise `α`.
pub fn q_exchange(nu: f64, alpha: DMatrix<f64>) -> Result<MapSpec> {
    #[rustfmt::skip]
    let p = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, 1.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    ]);
    MapSpec::new(p * nu.sqrt(), alpha)
}

/// Agreement check between the one-mode determinant test and the general
/// CP criterion.
pub fn cp_tests_agree(spec: &MapSpec, tol: f64) -> Result<bool> {
    Ok(one_mode_cp(spec, tol)? == is_completely_positive(&spec.to_channel(), tol))
}

/// Random valid one-mode spec: `K` Gaussian with `det K` landing in all four
/// normal-form cases, `α` a random positive matrix scaled to clear
/// `√det α ≥ 1 − |det K|` by a uniform margin in `[0, 0.3)`.
pub fn random_valid_one_mode<R: Rng + ?Sized>(rng: &mut R) -> MapSpec {
    let k = gaussian_matrix(rng, 2, 2) * 1.5;
    let p = random_psd(rng, 2, 1.0) + DMatrix::identity(2, 2) * 0.05;
    let p = &p / det2(&p).sqrt();
    let a = (1.0 - det2(&k).abs()).max(0.0) + 0.3 * rng.random::<f64>();
    MapSpec::new(k, p * a).expect("symmetric noise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{apply_channel, attenuator, GaussianState};
    use crate::random::random_symplectic;
    use crate::symplectic::{is_symplectic, CovarianceMatrix};
    use proptest::prelude::*;
    use rand::Rng;

    const TOL: f64 = 1e-9;

    fn one(k: &[f64], alpha: &[f64]) -> MapSpec {
        MapSpec::new(
            DMatrix::from_row_slice(2, 2, k),
            DMatrix::from_row_slice(2, 2, alpha),
        )
        .unwrap()
    }

    fn scaled_id(c: f64) -> MapSpec {
        one(&[c, 0.0, 0.0, c], &[0.0; 4])
    }

    #[test]
    fn validity_examples() {
        assert!(one_mode_valid(&scaled_id(1.0), TOL).unwrap());
        assert!(!one_mode_valid(&scaled_id(0.5), TOL).unwrap());
        assert!(one_mode_valid(&one(&[0.0; 4], &[1.0, 0.0, 0.0, 1.0]), TOL).unwrap());
        assert!(one_mode_valid(&scaled_id(1.0).clone(), TOL).is_ok());
        let two = MapSpec::new(DMatrix::identity(4, 4), DMatrix::zeros(4, 4)).unwrap();
        assert!(one_mode_valid(&two, TOL).is_err());
        assert!(one_mode_cp(&two, TOL).is_err());
    }

    #[test]
    fn cp_examples() {
        assert!(one_mode_cp(&scaled_id(1.0), TOL).unwrap());
        assert!(!one_mode_cp(&scaled_id(2.0), TOL).unwrap());
        assert!(!one_mode_cp(&one(&[1.0, 0.0, 0.0, -1.0], &[0.0; 4]), TOL).unwrap());
        assert!(one_mode_valid(&one(&[1.0, 0.0, 0.0, -1.0], &[0.0; 4]), TOL).unwrap());
    }

    #[test]
    fn tiny_negative_noise_determinant_is_clamped() {
        // det α = −1e-14, on the boundary for K = I.
        let s = one(&[1.0, 0.0, 0.0, 1.0], &[1e-7, 0.0, 0.0, -1e-7]);
        assert!(one_mode_valid(&s, TOL).unwrap());
        let s = one(&[1.0, 0.0, 0.0, 1.0], &[-0.1, 0.0, 0.0, -0.1]);
        assert!(!one_mode_valid(&s, TOL).unwrap());
    }

    #[test]
    fn classify_examples() {
        let nf = classify_one_mode(&scaled_id(1.0), TOL).unwrap();
        assert_eq!((nf.case, nf.dilation), (NormalFormCase::Cp, 1.0));

        let nf = classify_one_mode(&scaled_id(2.0), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::DilatationThenCP);
        assert_eq!(nf.dilation, 2.0);
        assert_eq!(nf.symplectic_part, DMatrix::identity(2, 2));
        assert_eq!(nf.residual_noise, DMatrix::zeros(2, 2));

        let nf = classify_one_mode(&one(&[3.0, 0.0, 0.0, -3.0], &[0.0; 4]), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::DilatationTransposeThenCP);
        assert_eq!(nf.dilation, 3.0);
        assert_eq!(nf.symplectic_part, DMatrix::identity(2, 2));

        let nf = classify_one_mode(&one(&[1.0, 0.0, 0.0, -1.0], &[0.0; 4]), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::TransposeThenCP);

        assert!(classify_one_mode(&scaled_id(0.5), TOL).is_err());
    }

    #[test]
    fn random_specs_recompose_and_leave_cp_residue() {
        let streams = Substreams::new(2024);
        let mut seen = std::collections::HashSet::new();
        for trial in 0..200 {
            let mut rng = streams.stream(trial);
            let spec = random_valid_one_mode(&mut rng);
            let nf = classify_one_mode(&spec, TOL).unwrap();
            seen.insert(nf.case as u8);

            let residue = MapSpec::new(nf.symplectic_part.clone(), nf.residual_noise.clone()).unwrap();
            assert!(one_mode_cp(&residue, 1e-9).unwrap(), "{nf:?}");
            if nf.dilation != 1.0 {
                assert!(is_symplectic(&nf.symplectic_part, 1e-12).unwrap());
            }

            let total = nf.recompose().unwrap();
            let orig = spec.to_channel();
            for _ in 0..100 {
                let sigma = random_covariance(&mut rng, 1, 0.5, 1.0);
                let r = DVector::from_fn(2, |_, _| normal(&mut rng));
                let st = GaussianState::new(r, sigma, 1e-9).unwrap();
                let a = apply_channel(&total, &st).unwrap();
                let b = apply_channel(&orig, &st).unwrap();
                let err = (a.sigma.matrix() - b.sigma.matrix()).amax().max((&a.r - &b.r).amax());
                assert!(err < 1e-9 * b.sigma.matrix().amax().max(1.0));
            }
        }
        assert_eq!(seen.len(), 4, "all four valid cases should be sampled");
    }

    #[test]
    fn cp_implies_valid_and_matches_general_test() {
        let streams = Substreams::new(9);
        for trial in 0..500 {
            let mut rng = streams.stream(trial);
            let k = gaussian_matrix(&mut rng, 2, 2);
            let scale = 3.0 * rng.random::<f64>();
            let alpha = random_psd(&mut rng, 2, scale);
            let spec = MapSpec::new(k, alpha).unwrap();
            let cp = one_mode_cp(&spec, 1e-9).unwrap();
            if cp {
                assert!(one_mode_valid(&spec, 1e-9).unwrap());
            }
            // Skip specs on the boundary, where the two tests read tolerances differently.
            let sd = det2(spec.alpha()).max(0.0).sqrt();
            if (sd - (1.0 - det2(spec.k())).abs()).abs() > 1e-6 {
                assert!(cp_tests_agree(&spec, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn multimode_examples() {
        let nf = classify_multimode_nonoise(&DMatrix::identity(4, 4), TOL).unwrap();
        assert_eq!((nf.case, nf.dilation), (NormalFormCase::Cp, 1.0));

        let nf = classify_multimode_nonoise(&(DMatrix::identity(4, 4) * 2.0), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::DilatationThenCP);
        assert!((nf.dilation - 2.0).abs() < 1e-15);
        assert!((&nf.symplectic_part - DMatrix::identity(4, 4)).amax() < 1e-15);

        let mut partial = DMatrix::identity(4, 4);
        partial[(3, 3)] = -1.0;
        let nf = classify_multimode_nonoise(&partial, TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::NotGaussianToGaussian);
        assert!(nf.stages().is_err());

        let nf = classify_multimode_nonoise(&(transposition(2) * 1.5), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::DilatationTransposeThenCP);
        assert!((nf.dilation - 1.5).abs() < 1e-15);

        let nf = classify_multimode_nonoise(&(DMatrix::identity(4, 4) * 0.7), TOL).unwrap();
        assert_eq!(nf.case, NormalFormCase::NotGaussianToGaussian);
    }

    #[test]
    fn multimode_symplectic_and_scaled() {
        let streams = Substreams::new(77);
        for trial in 0..50 {
            let mut rng = streams.stream(trial);
            let n = 1 + trial as usize % 3;
            let s = random_symplectic(&mut rng, n, 0.4);
            let nf = classify_multimode_nonoise(&s, 1e-9).unwrap();
            assert_eq!((nf.case, nf.dilation), (NormalFormCase::Cp, 1.0));
            assert!(is_symplectic(&nf.symplectic_part, 1e-9).unwrap());

            let lam = 1.0 + 2.0 * rng.random::<f64>();
            let k = &s * transposition(n) * lam;
            let nf = classify_multimode_nonoise(&k, 1e-9).unwrap();
            assert_eq!(nf.case, NormalFormCase::DilatationTransposeThenCP);
            assert!((nf.dilation - lam).abs() < 1e-9);
            assert!(is_symplectic(&nf.symplectic_part, 1e-8).unwrap());
            assert!((nf.recompose().unwrap().k - k).amax() < 1e-9 * lam);
        }
    }

    #[test]
    fn shift_threshold_examples() {
        let s = shift_threshold(&scaled_id(1.0), 2.0).unwrap();
        assert_eq!(s.k(), &(DMatrix::identity(2, 2) * 2.0));
        assert!(one_mode_valid(&s, TOL).unwrap());
        assert!(shift_threshold(&scaled_id(1.0), 1.0).is_err());
        let s = shift_threshold(&scaled_id(0.5), 2.0).unwrap();
        assert_eq!(s.k(), &DMatrix::identity(2, 2));
        assert!(one_mode_valid(&s, TOL).unwrap());
    }

    #[test]
    fn shifted_map_is_admissible_on_restricted_inputs() {
        // 0.5·I is admissible on σ ≥ ±4iΔ: every ν ≥ 4 state maps to ν/4 ≥ 1.
        let spec = scaled_id(0.5);
        let mut rng = Substreams::new(3).stream(0);
        for _ in 0..100 {
            let sigma = random_covariance(&mut rng, 1, 0.5, 1.0).into_matrix() * 4.0;
            let out = spec.k() * sigma * spec.k().transpose();
            let out = CovarianceMatrix::new(symmetrize(&out)).unwrap();
            assert!(crate::symplectic::is_valid_covariance(&out, 1e-9));
        }
    }

    #[test]
    fn falsifier_examples() {
        let att = MapSpec::from(&attenuator(1, 0.6).unwrap());
        let out = sampled_positivity_falsifier(&att, 10_000, 1);
        assert!(out.witness.is_none(), "{:?}", out.witness);
        assert!(out.max_violation <= FALSIFIER_TOL);

        let out = sampled_positivity_falsifier(&scaled_id(0.5), 100, 1);
        match out.witness {
            Some((0, Witness::Covariance(s))) => assert_eq!(s, DMatrix::identity(2, 2)),
            other => panic!("expected vacuum witness, got {other:?}"),
        }

        let q = q_exchange(1.0, DMatrix::identity(4, 4)).unwrap();
        let out = sampled_positivity_falsifier(&q, 10_000, 5);
        assert!(out.witness.is_none());
        // Not completely positive, so the falsifier is the only available check.
        assert!(!is_completely_positive(&q.to_channel(), 1e-9));
    }

    #[test]
    fn falsifier_is_deterministic() {
        let q = q_exchange(0.3, DMatrix::identity(4, 4) * 0.5).unwrap();
        let a = sampled_positivity_falsifier(&q, 500, 11);
        let b = sampled_positivity_falsifier(&q, 500, 11);
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"n":1,"k":[2,0,0,2],"alpha":[0,0,0,0]}"#;
        let spec: MapSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, scaled_id(2.0));
        let back: MapSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"n":1,"k":[1,0,0,1],"alpha":[1,2,0,1]}"#;
        assert!(serde_json::from_str::<MapSpec>(bad).is_err());
        let bad = r#"{"n":1,"k":[1,0,0],"alpha":[0,0,0,0]}"#;
        assert!(serde_json::from_str::<MapSpec>(bad).is_err());
    }

    proptest! {
        #[test]
        fn cp_implies_valid(k in prop::array::uniform4(-2.0f64..2.0), a in 0.0f64..2.0, b in 0.0f64..2.0, c in -1.0f64..1.0) {
            let off = c * (a * b).sqrt();
            let spec = one(&k, &[a, off, off, b]);
            if one_mode_cp(&spec, 1e-9).unwrap() {
                prop_assert!(one_mode_valid(&spec, 1e-9).unwrap());
            }
        }
    }
}
