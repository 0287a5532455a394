//! Small dense linear-algebra and quadrature helpers shared by the modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest absolute entry of `a - a^T`.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Largest absolute entry of `a - a^dagger`.
pub fn max_non_hermiticity(a: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigen-decomposition of the symmetric part of `a`, eigenvalues ascending.
pub fn sym_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrize(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitize(a));
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitize(a));
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// `V f(D) V^T` for a symmetric matrix with eigen-decomposition `V D V^T`.
pub fn sym_function(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (values, vectors) = sym_eigen(a);
    let mapped = DVector::from_iterator(values.len(), values.iter().map(|&x| f(x)));
    &vectors * DMatrix::from_diagonal(&mapped) * vectors.transpose()
}

pub fn to_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| C64::new(x, 0.0))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2) + panels % 2;
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Bisection for a sign change of `f` on `[lo, hi]`, where `f(lo) <= 0 < f(hi)`
/// is assumed to bracket the root. Stops when the bracket stops shrinking.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, max_iter: usize) -> f64 {
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Binomial coefficient as f64: exact integer product up to `n = 60`,
/// log-space sum above.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 60 {
        let mut acc: u64 = 1;
        for i in 0..k {
            // exact: acc * (n - i) is divisible by (i + 1)
            acc = acc * (n - i) as u64 / (i + 1) as u64;
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_exact_and_log_branches_agree() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424.0);
        let exact = binomial(60, 7);
        let logged = ln_binomial(60, 7).exp();
        assert!((exact - logged).abs() / exact < 1e-12);
        // n = 61 goes through the log branch; Pascal's rule ties it to n = 60.
        let pascal = binomial(60, 6) + binomial(60, 7);
        assert!((binomial(61, 7) - pascal).abs() / pascal < 1e-12);
    }

    #[test]
    fn simpson_integrates_cubic_exactly() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 4);
        assert!((v - 0.0).abs() < 1e-12);
        let v = simpson(f64::sin, 0.0, std::f64::consts::PI, 2048);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kron_of_identities() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert_eq!(kron(&a, &b), CMatrix::identity(6, 6));
    }
}
