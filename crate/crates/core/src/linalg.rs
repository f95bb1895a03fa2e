//! Dense complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Hermitian spectra come from a
//! cyclic Jacobi eigensolver; factorizations and solves delegate to nalgebra.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const JACOBI_MAX_SWEEPS: usize = 80;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is a unit eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

/// Hermitian eigensolver by cyclic Jacobi rotations.
///
/// Only the Hermitian part of `m` is used. Sweeps stop once the off-diagonal
/// Frobenius mass falls below `1e-15` relative to the whole matrix.
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    let mut a = hermitian_part(m);
    let mut v = CMatrix::identity(n, n);
    let total = a.iter().map(|z| z.norm_sqr()).sum::<f64>();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[(p, q)].norm_sqr())
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b < 1e-300 {
        return;
    }
    let phase = apq / b;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();

    // Columns: A <- A U with U = [[c, s], [-s e, c e]] on (p, q).
    let n = a.nrows();
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * c - y * e * s;
        a[(k, q)] = x * s + y * e * c;
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * c - y * e * s;
        v[(k, q)] = x * s + y * e * c;
    }
    // Rows: A <- U^* A.
    let ec = e.conj();
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = x * c - y * ec * s;
        a[(q, k)] = x * s + y * ec * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// `(m + m^*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).values.last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Largest singular value, from the Jacobi spectrum of `m^* m`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    max_eigenvalue(&gram).max(0.0).sqrt()
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_entry(&(m - m.adjoint())) <= tol
}

/// Cholesky factor of a Hermitian positive definite matrix, or a conditioning
/// error when the factorization breaks down.
pub fn cholesky(m: &CMatrix) -> Result<Cholesky<Complex64, Dyn>> {
    Cholesky::new(hermitian_part(m))
        .ok_or_else(|| Error::Conditioning("matrix is not numerically positive definite".into()))
}

/// Largest eigenvalue of the pencil `b - lambda a` for Hermitian `b` and
/// positive definite `a`, via `L^{-1} b L^{-*}`.
pub fn pencil_max_eigenvalue(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let chol = cholesky(a)?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(b)
        .ok_or_else(|| Error::Conditioning("singular Cholesky factor".into()))?;
    let y = l
        .solve_lower_triangular(&x.adjoint())
        .ok_or_else(|| Error::Conditioning("singular Cholesky factor".into()))?;
    Ok(max_eigenvalue(&y))
}

/// Haar-distributed unitary matrix via QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal absorbed.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
