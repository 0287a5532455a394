//! Finite-dimensional lossy Lindblad dynamics.
//!
//! Levels are indexed `0..d` in order of increasing energy. A [`LindbladSpec`]
//! describes generators whose Lindblad operators either dephase in the energy
//! basis or jump down by exactly one level; [`Lindbladian`] accepts arbitrary
//! operators so that multi-step counterexamples can be expressed as well.
//!
//! Superoperators use column stacking: `vec(X)[i + d·j] = X[i, j]`, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::fock::{annihilation, FockDensity, SpectrumVector};
use crate::linalg::{hermitian_eigenvalues, kron, max_non_hermiticity, CMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest dimension evolved through the dense `d² × d²` exponential.
pub const MAX_DENSE_DIM: usize = 32;

/// Dephasing and single-step jump coefficients of a lossy generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct LindbladSpec {
    dim: usize,
    dephasing: Vec<Vec<C64>>,
    jumps: Vec<Vec<C64>>,
    lamb_shift: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    dim: usize,
    #[serde(default)]
    dephasing: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    jumps: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    lamb_shift: Vec<f64>,
}

impl TryFrom<RawSpec> for LindbladSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let conv = |rows: Vec<Vec<[f64; 2]>>| -> Vec<Vec<C64>> {
            rows.into_iter()
                .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
                .collect()
        };
        let lamb = if raw.lamb_shift.is_empty() { None } else { Some(raw.lamb_shift) };
        LindbladSpec::new(raw.dim, conv(raw.dephasing), conv(raw.jumps), lamb)
    }
}

impl From<LindbladSpec> for RawSpec {
    fn from(spec: LindbladSpec) -> Self {
        let conv = |rows: Vec<Vec<C64>>| -> Vec<Vec<[f64; 2]>> {
            rows.into_iter()
                .map(|r| r.into_iter().map(|c| [c.re, c.im]).collect())
                .collect()
        };
        RawSpec {
            dim: spec.dim,
            dephasing: conv(spec.dephasing),
            jumps: conv(spec.jumps),
            lamb_shift: spec.lamb_shift,
        }
    }
}

impl LindbladSpec {
    /// Dephasing rows have length `dim`, jump rows `dim − 1`; `jumps[α][i]`
    /// is the amplitude of `|i⟩⟨i+1|`.
    pub fn new(
        dim: usize,
        dephasing: Vec<Vec<C64>>,
        jumps: Vec<Vec<C64>>,
        lamb_shift: Option<Vec<f64>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(out_of_range("dim", 0.0, "dim >= 1"));
        }
        for row in &dephasing {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
        }
        for row in &jumps {
            if row.len() != dim - 1 {
                return Err(Error::DimensionMismatch { expected: dim - 1, got: row.len() });
            }
        }
        let lamb_shift = lamb_shift.unwrap_or_else(|| vec![0.0; dim]);
        if lamb_shift.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: lamb_shift.len() });
        }
        Ok(Self { dim, dephasing, jumps, lamb_shift })
    }

    /// Single jump row `bᵢ = √(i+1)`: the truncated photon ladder.
    pub fn ladder(dim: usize) -> Result<Self> {
        let row = (1..dim).map(|i| C64::new((i as f64).sqrt(), 0.0)).collect();
        Self::new(dim, vec![], vec![row], None)
    }

    /// Single real jump row.
    pub fn single_jump(rates: &[f64]) -> Result<Self> {
        let row = rates.iter().map(|&b| C64::new(b, 0.0)).collect();
        Self::new(rates.len() + 1, vec![], vec![row], None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dephasing(&self) -> &[Vec<C64>] {
        &self.dephasing
    }

    pub fn jumps(&self) -> &[Vec<C64>] {
        &self.jumps
    }

    pub fn lamb_shift(&self) -> &[f64] {
        &self.lamb_shift
    }

    pub fn rate_profile(&self) -> RateProfile {
        let mut r = vec![0.0; self.dim + 1];
        for row in &self.jumps {
            for (i, b) in row.iter().enumerate() {
                r[i + 1] += b.norm_sqr();
            }
        }
        RateProfile { r }
    }

    /// Lindblad operators, dephasing first.
    pub fn operators(&self) -> Vec<CMatrix> {
        let d = self.dim;
        let mut ops = Vec::with_capacity(self.dephasing.len() + self.jumps.len());
        for row in &self.dephasing {
            ops.push(CMatrix::from_diagonal(&DVector::from_column_slice(row)));
        }
        for row in &self.jumps {
            let mut l = CMatrix::zeros(d, d);
            for (i, &b) in row.iter().enumerate() {
                l[(i, i + 1)] = b;
            }
            ops.push(l);
        }
        ops
    }

    pub fn generator(&self) -> Lindbladian {
        let h = CMatrix::from_diagonal(&DVector::from_iterator(
            self.dim,
            self.lamb_shift.iter().map(|&e| C64::new(e, 0.0)),
        ));
        Lindbladian {
            hamiltonian: h,
            operators: self.operators(),
        }
    }
}

/// Jump rates `r₀ … r_d` with `r₀ = r_d = 0` and `rᵢ = Σ_α |b_i^α|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    r: Vec<f64>,
}

impl RateProfile {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.len() < 2 {
            return Err(out_of_range("len", r.len() as f64, "at least two entries"));
        }
        if r[0] != 0.0 || r[r.len() - 1] != 0.0 {
            return Err(Error::InvalidDistribution("rate profile endpoints must vanish".into()));
        }
        if r.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidDistribution("negative rate".into()));
        }
        Ok(Self { r })
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }
}

/// Concavity of the rate profile, `2rᵢ ≥ r_{i−1} + r_{i+1}`: the condition
/// under which the generator maps the identity to a passive operator.
/// Rounding in `|b|²` is absorbed by a tolerance relative to the largest rate.
pub fn passivity_condition(profile: &RateProfile) -> bool {
    let scale = profile.r.iter().copied().fold(0.0, f64::max);
    passivity_condition_tol(profile, 1e-12 * scale)
}

pub fn passivity_condition_tol(profile: &RateProfile, tol: f64) -> bool {
    profile.r.windows(3).all(|w| 2.0 * w[1] >= w[0] + w[2] - tol)
}

/// Generator `−i[H, ρ] + Σ_α (L_α ρ L_α† − ½{L_α†L_α, ρ})` with arbitrary
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Lindbladian {
    hamiltonian: CMatrix,
    operators: Vec<CMatrix>,
}

impl Lindbladian {
    pub fn new(hamiltonian: CMatrix, operators: Vec<CMatrix>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: hamiltonian.ncols() });
        }
        let herm = max_non_hermiticity(&hamiltonian);
        if herm > 1e-12 {
            return Err(Error::NotHermitian(herm));
        }
        for l in &operators {
            if l.shape() != (d, d) {
                return Err(Error::DimensionMismatch { expected: d, got: l.nrows() });
            }
        }
        Ok(Self { hamiltonian, operators })
    }

    pub fn dissipator(operators: Vec<CMatrix>) -> Result<Self> {
        let d = operators.first().map_or(0, |l| l.nrows());
        Self::new(CMatrix::zeros(d, d), operators)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    /// `L(X)` for an arbitrary square matrix `X`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mi = C64::new(0.0, -1.0);
        let half = C64::new(0.5, 0.0);
        let mut out = (&self.hamiltonian * x - x * &self.hamiltonian) * mi;
        for l in &self.operators {
            let ld = l.adjoint();
            let n = &ld * l;
            out += l * x * &ld - (&n * x + x * &n) * half;
        }
        out
    }

    /// Matrix of `L` acting on column-stacked `vec(ρ)`.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.dim();
        let id = CMatrix::identity(d, d);
        let mi = C64::new(0.0, -1.0);
        let half = C64::new(0.5, 0.0);
        let h = &self.hamiltonian;
        let mut out = (kron(&id, h) - kron(&h.transpose(), &id)) * mi;
        for l in &self.operators {
            let n = l.adjoint() * l;
            out += kron(&l.conjugate(), l) - (kron(&id, &n) + kron(&n.transpose(), &id)) * half;
        }
        out
    }

    /// Whether diagonal states stay diagonal through a classical rate
    /// equation: `H` diagonal and every operator has at most one nonzero
    /// entry per row and per column.
    pub fn is_classical(&self) -> bool {
        let d = self.dim();
        let h_diag = (0..d).all(|i| (0..d).all(|j| i == j || self.hamiltonian[(i, j)] == ZERO));
        h_diag
            && self.operators.iter().all(|l| {
                (0..d).all(|i| (0..d).filter(|&j| l[(i, j)] != ZERO).count() <= 1)
                    && (0..d).all(|j| (0..d).filter(|&i| l[(i, j)] != ZERO).count() <= 1)
            })
    }

    /// Transition-rate matrix `W` with `ṗ = W p` on populations, if
    /// [`Self::is_classical`].
    pub fn rate_matrix(&self) -> Option<DMatrix<f64>> {
        if !self.is_classical() {
            return None;
        }
        let d = self.dim();
        let mut w = DMatrix::zeros(d, d);
        for l in &self.operators {
            for i in 0..d {
                for j in 0..d {
                    let v = l[(i, j)].norm_sqr();
                    w[(i, j)] += v;
                    w[(j, j)] -= v;
                }
            }
        }
        Some(w)
    }

    /// `e^{tL}(ρ)`.
    pub fn evolve(&self, rho: &FockDensity, t: f64) -> Result<FockDensity> {
        if !(t >= 0.0) {
            return Err(out_of_range("t", t, "t >= 0"));
        }
        let d = self.dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.dim() });
        }
        if t == 0.0 {
            return Ok(rho.clone());
        }
        if rho.off_diagonal_norm() == 0.0 {
            if let Some(w) = self.rate_matrix() {
                let p = (w * t).exp() * DVector::from_vec(rho.populations());
                let m = CMatrix::from_diagonal(&p.map(|v| C64::new(v, 0.0)));
                return Ok(FockDensity::from_matrix_unchecked(m));
            }
        }
        if d > MAX_DENSE_DIM {
            return Err(Error::Numerical(format!(
                "dense evolution limited to dim <= {MAX_DENSE_DIM}, got {d}"
            )));
        }
        let prop = (self.superoperator() * C64::new(t, 0.0)).exp();
        let v = prop * DVector::from_column_slice(rho.matrix().as_slice());
        let m = CMatrix::from_column_slice(d, d, v.as_slice());
        Ok(FockDensity::from_matrix_unchecked(crate::linalg::hermitize(&m)))
    }

    /// `λₙ = Tr[Πₙ L(I)]` for `n = 1 … d`, with `Πₙ` the projector on the
    /// `n` lowest levels.
    pub fn identity_response(&self) -> Vec<f64> {
        let d = self.dim();
        let l = self.apply(&CMatrix::identity(d, d));
        (0..d)
            .scan(0.0, |acc, i| {
                *acc += l[(i, i)].re;
                Some(*acc)
            })
            .collect()
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ e^{tL}(|i⟩⟨j|)`, PSD iff `e^{tL}` is
    /// completely positive.
    pub fn choi(&self, t: f64) -> CMatrix {
        let d = self.dim();
        let prop = (self.superoperator() * C64::new(t, 0.0)).exp();
        let mut choi = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let col = prop.column(i + d * j);
                for a in 0..d {
                    for b in 0..d {
                        choi[(i * d + a, j * d + b)] = col[a + d * b];
                    }
                }
            }
        }
        choi
    }
}

/// `build_superoperator` for a spec.
pub fn build_superoperator(spec: &LindbladSpec) -> CMatrix {
    spec.generator().superoperator()
}

pub fn evolve(spec: &LindbladSpec, rho: &FockDensity, t: f64) -> Result<FockDensity> {
    spec.generator().evolve(rho, t)
}

/// Output spectrum of `e^{tL}(ρ)`.
pub fn output_spectrum(gen: &Lindbladian, rho: &FockDensity, t: f64) -> Result<SpectrumVector> {
    Ok(gen.evolve(rho, t)?.spectrum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub purity: f64,
}

/// Closed-form qubit relaxation toward `z∞ = −1/(2N+1)` at rate
/// `γ = γ₀(2N+1)`, with `σ_z = |1⟩⟨1| − |0⟩⟨0|`.
pub fn qubit_optical_bloch(
    x0: f64,
    y0: f64,
    z0: f64,
    gamma0: f64,
    nbar: f64,
    t: f64,
) -> Result<BlochState> {
    let r2 = x0 * x0 + y0 * y0 + z0 * z0;
    if !(r2 <= 1.0 + 1e-12) {
        return Err(out_of_range("bloch_norm", r2.sqrt(), "x0^2 + y0^2 + z0^2 <= 1"));
    }
    if !(gamma0 > 0.0) {
        return Err(out_of_range("gamma0", gamma0, "gamma0 > 0"));
    }
    if !(nbar >= 0.0) {
        return Err(out_of_range("nbar", nbar, "nbar >= 0"));
    }
    if !(t >= 0.0) {
        return Err(out_of_range("t", t, "t >= 0"));
    }
    let gamma = gamma0 * (2.0 * nbar + 1.0);
    let z_inf = -1.0 / (2.0 * nbar + 1.0);
    let coh = (-0.5 * gamma * t).exp();
    let x = coh * x0;
    let y = coh * y0;
    let z = z_inf + (-gamma * t).exp() * (z0 - z_inf);
    Ok(BlochState {
        x,
        y,
        z,
        purity: 0.5 * (1.0 + x * x + y * y + z * z),
    })
}

/// Qubit thermal generator: `√(γ₀(N+1)) |0⟩⟨1|` and `√(γ₀N) |1⟩⟨0|`.
pub fn qubit_thermal_generator(gamma0: f64, nbar: f64) -> Result<Lindbladian> {
    let mut down = CMatrix::zeros(2, 2);
    down[(0, 1)] = C64::new((gamma0 * (nbar + 1.0)).sqrt(), 0.0);
    let mut up = CMatrix::zeros(2, 2);
    up[(1, 0)] = C64::new((gamma0 * nbar).sqrt(), 0.0);
    Lindbladian::dissipator(vec![down, up])
}

/// Qubit density matrix `(I + xσx + yσy + zσz)/2` in the basis `|0⟩, |1⟩`.
pub fn bloch_density(x: f64, y: f64, z: f64) -> Result<FockDensity> {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = C64::new(0.5 * (1.0 - z), 0.0);
    m[(1, 1)] = C64::new(0.5 * (1.0 + z), 0.0);
    m[(0, 1)] = C64::new(0.5 * x, -0.5 * y);
    m[(1, 0)] = C64::new(0.5 * x, 0.5 * y);
    FockDensity::new(m)
}

/// Two independent attenuator modes truncated at `cutoff` photons each;
/// basis index `i·cutoff + j` for `|i, j⟩`.
pub fn two_mode_attenuator(cutoff: usize) -> Lindbladian {
    let a = annihilation(cutoff);
    let id = CMatrix::identity(cutoff, cutoff);
    Lindbladian {
        hamiltonian: CMatrix::zeros(cutoff * cutoff, cutoff * cutoff),
        operators: vec![kron(&a, &id), kron(&id, &a)],
    }
}

/// Two-qubit generator with `L₁ = |00⟩⟨10|` and `L₂ = |00⟩⟨01| + √2 |01⟩⟨11|`;
/// basis index `2i + j` for `|i, j⟩`.
pub fn two_qubit_counterexample() -> Lindbladian {
    let mut l1 = CMatrix::zeros(4, 4);
    l1[(0, 2)] = ONE;
    let mut l2 = CMatrix::zeros(4, 4);
    l2[(0, 1)] = ONE;
    l2[(1, 3)] = C64::new(std::f64::consts::SQRT_2, 0.0);
    Lindbladian {
        hamiltonian: CMatrix::zeros(4, 4),
        operators: vec![l1, l2],
    }
}

/// Uniform mixture of the given basis states.
pub fn uniform_mixture(dim: usize, support: &[usize]) -> Result<FockDensity> {
    let mut p = vec![0.0; dim];
    for &i in support {
        if i >= dim {
            return Err(out_of_range("index", i as f64, "index < dim"));
        }
        p[i] += 1.0 / support.len() as f64;
    }
    FockDensity::diagonal(&p)
}

/// Closed forms for the two-mode attenuator counterexample.
pub mod two_mode {
    /// Sum of the three largest output eigenvalues for the passive input.
    pub fn s3(t: f64) -> f64 {
        1.0 - 0.5 * (-2.0 * t).exp()
    }

    /// Same for the non-passive input on `|0, 0…5⟩`.
    pub fn s3_tilde(t: f64) -> f64 {
        let e = (-t).exp();
        1.0 - e.powi(3) * (5.0 - 6.0 * e + 2.0 * e * e) / 2.0
    }

    /// `ln(2 + √2)`, beyond which `s3 < s3_tilde`.
    pub fn crossing_time() -> f64 {
        (2.0 + std::f64::consts::SQRT_2).ln()
    }

    pub fn p1(t: f64) -> f64 {
        let e = (-t).exp();
        (6.0 - 8.0 * e + 3.0 * e * e) / 6.0
    }

    pub fn p1_tilde(t: f64) -> f64 {
        let e = (-t).exp();
        (2.0 - e) * (3.0 - 3.0 * e + e * e) * (1.0 - e + e * e) / 6.0
    }
}

/// Closed forms for the two-qubit counterexample, as `[p00, p01, p10, p11]`.
pub mod two_qubit {
    pub fn from_maximally_mixed(t: f64) -> [f64; 4] {
        let e = (-t).exp();
        [1.0 - e + e * e / 4.0, e * (3.0 - 2.0 * e) / 4.0, e / 4.0, e * e / 4.0]
    }

    /// Input `(|00⟩⟨00| + |01⟩⟨01| + |10⟩⟨10|)/3`.
    pub fn from_passive(t: f64) -> [f64; 4] {
        let e = (-t).exp();
        [1.0 - 2.0 * e / 3.0, e / 3.0, e / 3.0, 0.0]
    }

    /// Input `(|00⟩⟨00| + |01⟩⟨01| + |11⟩⟨11|)/3`.
    pub fn from_non_passive(t: f64) -> [f64; 4] {
        let e = (-t).exp();
        [1.0 - e + e * e / 3.0, e * (1.0 - 2.0 * e / 3.0), 0.0, e * e / 3.0]
    }
}

/// Smallest eigenvalue of the Choi matrix of `e^{tL}`.
pub fn choi_min_eigenvalue(gen: &Lindbladian, t: f64) -> f64 {
    hermitian_eigenvalues(&gen.choi(t))[0]
}
