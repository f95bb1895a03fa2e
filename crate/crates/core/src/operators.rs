//! Commuting matrix tuples built from dual kernels, and von Neumann checks.
//!
//! A positive definite kernel `K` with unit diagonal is the Gram matrix of unit
//! vectors `v_i`; declaring each `v_i` a joint eigenvector with eigenvalue
//! `lambda_i` defines commuting matrices `T_1, ..., T_d`. For any `p`,
//!
//! ```text
//! <(I - p(T)* p(T)) x, x> = sum_ij c_i conj(c_j) (1 - p(lambda_i) conj(p(lambda_j))) K_ij,
//! ```
//!
//! where `x = sum c_i v_i`, so kernels in the dual cone give tuples satisfying
//! the von Neumann inequality on the nodes' interpolation data.

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agler::{agler_feasible, AglerOutcome, DualKernel, PolyPickData};
use crate::disk::PolyPoint;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::MultiPoly;
use crate::realization::TransferRealization;

/// Smallest admissible eigenvalue of the kernel.
pub const KERNEL_CONDITION_TOL: f64 = 1e-10;
/// Tolerance on commutation, eigenvector and Gram identities.
pub const TUPLE_TOL: f64 = 1e-10;
/// Default torus grid per axis for `d <= 2`.
pub const TORUS_GRID: usize = 128;
/// Default torus grid per axis for `d = 3`.
pub const TORUS_GRID_3D: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Commuting `n x n` matrices with joint eigenvectors `v_i` at the nodes.
#[derive(Debug, Clone)]
pub struct AndoTuple {
    matrices: Vec<CMatrix>,
    /// Columns are the unit vectors `v_i`.
    vectors: CMatrix,
    vectors_inv: CMatrix,
    kernel: CMatrix,
    nodes: Vec<PolyPoint>,
}

/// Largest defects of the tuple identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleResiduals {
    pub commutation: f64,
    pub eigenvectors: f64,
    pub gram: f64,
}

impl TupleResiduals {
    pub fn max(&self) -> f64 {
        self.commutation.max(self.eigenvectors).max(self.gram)
    }
}

/// Builds `T_j = V diag(lambda^j) V^{-1}` where `V* V = conj(K)`, i.e.
/// `<v_i, v_j> = K_ij` with the inner product linear in the first slot.
pub fn build_tuple_from_kernel(kernel: &DualKernel, nodes: &[PolyPoint]) -> Result<AndoTuple> {
    let n = kernel.dim();
    if nodes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: nodes.len() });
    }
    let d = nodes.first().map_or(0, |p| p.dim());
    if let Some(p) = nodes.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if nodes[i] == nodes[j] {
                return Err(Error::Precondition(format!("nodes {i} and {j} coincide")));
            }
        }
    }
    let lo = linalg::min_eigenvalue(&kernel.k);
    if !(lo >= KERNEL_CONDITION_TOL) {
        return Err(Error::Conditioning(format!("kernel smallest eigenvalue {lo:e} below {KERNEL_CONDITION_TOL:e}")));
    }
    let chol = linalg::cholesky(&kernel.k.map(|z| z.conj()))?;
    let vectors = chol.l().adjoint();
    let vectors_inv = vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("Gram vectors are linearly dependent".into()))?;
    let matrices = (0..d)
        .map(|j| {
            let diag = CMatrix::from_diagonal(&DVector::from_iterator(n, nodes.iter().map(|p| p.coord(j))));
            &vectors * diag * &vectors_inv
        })
        .collect();
    Ok(AndoTuple { matrices, vectors, vectors_inv, kernel: kernel.k.clone(), nodes: nodes.to_vec() })
}

impl AndoTuple {
    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn size(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn gram_vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn nodes(&self) -> &[PolyPoint] {
        &self.nodes
    }

    pub fn residuals(&self) -> TupleResiduals {
        let d = self.dim();
        let n = self.size();
        let mut commutation: f64 = 0.0;
        for j in 0..d {
            for k in (j + 1)..d {
                let c = &self.matrices[j] * &self.matrices[k] - &self.matrices[k] * &self.matrices[j];
                commutation = commutation.max(linalg::max_abs_entry(&c));
            }
        }
        let mut eigenvectors: f64 = 0.0;
        for (j, t) in self.matrices.iter().enumerate() {
            for i in 0..n {
                let v = self.vectors.column(i);
                let r = t * v - v * self.nodes[i].coord(j);
                eigenvectors = eigenvectors.max(r.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        let gram_actual = (self.vectors.adjoint() * &self.vectors).transpose();
        let gram = linalg::max_abs_entry(&(gram_actual - &self.kernel));
        TupleResiduals { commutation, eigenvectors, gram }
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let r = self.residuals();
        if r.max() > tol {
            return Err(Error::ContractViolation(format!(
                "tuple residuals: commutation {:e}, eigenvectors {:e}, gram {:e}",
                r.commutation, r.eigenvectors, r.gram
            )));
        }
        Ok(())
    }

    /// The matrix acting as `v_i -> values[i] v_i`.
    pub fn evaluate_values(&self, values: &[Complex64]) -> Result<CMatrix> {
        let n = self.size();
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: values.len() });
        }
        let diag = CMatrix::from_diagonal(&DVector::from_column_slice(values));
        Ok(&self.vectors * diag * &self.vectors_inv)
    }

    /// `f(T)` through the joint eigenbasis.
    pub fn evaluate_function(&self, f: &MultiPoly) -> Result<CMatrix> {
        if f.nvars() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.nvars() });
        }
        let values: Vec<Complex64> = self.nodes.iter().map(|p| f.eval(p.coords())).collect();
        self.evaluate_values(&values)
    }

    /// `f(T)` by substituting the matrices into the monomials.
    pub fn substitute(&self, f: &MultiPoly) -> Result<CMatrix> {
        if f.nvars() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.nvars() });
        }
        let n = self.size();
        let powers: Vec<Vec<CMatrix>> = self
            .matrices
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let mut p = vec![CMatrix::identity(n, n)];
                for _ in 0..f.degree_in(j) {
                    let next = p.last().expect("nonempty") * t;
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = CMatrix::zeros(n, n);
        for (exp, c) in f.terms() {
            let mut m = CMatrix::identity(n, n) * *c;
            for (j, &e) in exp.iter().enumerate() {
                m *= &powers[j][e as usize];
            }
            out += m;
        }
        Ok(out)
    }
}

/// Options for [`von_neumann_check`].
#[derive(Debug, Clone, Copy)]
pub struct VnOptions {
    pub degree: u32,
    /// Gaussian polynomials drawn; the same number of realization
    /// truncations is added.
    pub samples: usize,
    pub seed: u64,
    /// Torus grid per axis; `None` picks [`TORUS_GRID`] or [`TORUS_GRID_3D`].
    pub grid: Option<usize>,
}

impl Default for VnOptions {
    fn default() -> Self {
        Self { degree: 4, samples: 1000, seed: 0, grid: None }
    }
}

#[derive(Debug, Clone)]
pub struct VnReport {
    pub max_ratio: f64,
    pub worst_function: String,
    pub samples: usize,
    pub grid_resolution: usize,
}

/// Exponents of all monomials in `d` variables of total degree at most `degree`.
fn monomials(d: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=degree - used).map(move |k| {
                    let mut f = e.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    out
}

fn torus_eval(p: &MultiPoly, theta: &[f64]) -> f64 {
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    p.eval(&z).norm()
}

/// Maximum of `|p|` over a uniform torus grid, refined by pattern search from
/// the grid maximum and `starts` random angles.
pub fn torus_sup<R: Rng + ?Sized>(p: &MultiPoly, grid: usize, starts: usize, rng: &mut R) -> f64 {
    let d = p.nvars();
    if d == 0 || p.is_zero() {
        return p.terms().first().map_or(0.0, |t| t.1.norm());
    }
    let tables: Vec<Vec<Vec<Complex64>>> = (0..d)
        .map(|k| {
            (0..=p.degree_in(k))
                .map(|e| (0..grid).map(|g| Complex64::from_polar(1.0, TAU * (e as f64) * (g as f64) / grid as f64)).collect())
                .collect()
        })
        .collect();
    let total = grid.pow(d as u32);
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut idx = vec![0usize; d];
    for flat in 0..total {
        let mut rem = flat;
        for slot in idx.iter_mut() {
            *slot = rem % grid;
            rem /= grid;
        }
        let mut s = ZERO;
        for (exp, c) in p.terms() {
            let mut m = *c;
            for k in 0..d {
                m *= tables[k][exp[k] as usize][idx[k]];
            }
            s += m;
        }
        let v = s.norm();
        if v > best.0 {
            best = (v, flat);
        }
    }
    let mut starts_theta = Vec::with_capacity(starts + 1);
    let mut rem = best.1;
    starts_theta.push(
        (0..d)
            .map(|_| {
                let g = rem % grid;
                rem /= grid;
                TAU * g as f64 / grid as f64
            })
            .collect::<Vec<f64>>(),
    );
    for _ in 0..starts {
        starts_theta.push((0..d).map(|_| rng.random_range(0.0..TAU)).collect());
    }
    let mut sup = best.0;
    for mut theta in starts_theta {
        let mut val = torus_eval(p, &theta);
        let mut h = TAU / grid as f64;
        while h > 1e-12 {
            let mut moved = false;
            for k in 0..d {
                for sign in [1.0, -1.0] {
                    theta[k] += sign * h;
                    let v = torus_eval(p, &theta);
                    if v > val {
                        val = v;
                        moved = true;
                    } else {
                        theta[k] -= sign * h;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        sup = sup.max(val);
    }
    sup
}

/// Largest ratio `||p(T)|| / sup_{T^d} |p|` over random Gaussian polynomials
/// and Taylor truncations of random unitary-colligation realizations.
pub fn von_neumann_check(tuple: &AndoTuple, opts: &VnOptions) -> Result<VnReport> {
    let d = tuple.dim();
    let grid = opts.grid.unwrap_or(if d <= 2 { TORUS_GRID } else { TORUS_GRID_3D });
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let exps = monomials(d, opts.degree);
    let mut family: Vec<(MultiPoly, String, u64)> = Vec::with_capacity(2 * opts.samples);
    for s in 0..opts.samples {
        let terms = exps.iter().map(|e| (e.clone(), linalg::complex_gaussian(&mut rng))).collect();
        let p = MultiPoly::new(d, terms)?;
        family.push((p, format!("gaussian polynomial #{s} of degree {}", opts.degree), rng.random()));
        let r = TransferRealization::random(&mut rng, d, 3);
        family.push((r.truncate(opts.degree), format!("degree-{} truncation of realization #{s} with blocks {:?}", opts.degree, r.blocks()), rng.random()));
    }
    let ratios: Vec<Result<f64>> = family
        .par_iter()
        .map(|(p, _, seed)| {
            let mut local = ChaCha8Rng::seed_from_u64(*seed);
            let sup = torus_sup(p, grid, 9, &mut local);
            let norm = linalg::spectral_norm(&tuple.evaluate_function(p)?);
            Ok(if sup > 0.0 { norm / sup } else { 0.0 })
        })
        .collect();
    let mut report = VnReport { max_ratio: 0.0, worst_function: String::new(), samples: family.len(), grid_resolution: grid };
    for (r, (_, name, _)) in ratios.into_iter().zip(&family) {
        let r = r?;
        if r > report.max_ratio {
            report.max_ratio = r;
            report.worst_function = name.clone();
        }
    }
    Ok(report)
}

/// Output of [`violation_witness`].
#[derive(Debug, Clone)]
pub struct ViolationWitness {
    pub tuple: AndoTuple,
    pub kernel: DualKernel,
    /// `||f(T)||` for any `f` taking the prescribed values at the nodes.
    pub f_norm: f64,
    /// `1 + |violation| * lambda_min(K)`, a lower bound for `f_norm^2`.
    pub lower_bound_sq: f64,
    pub report: VnReport,
}

/// Extracts the dual kernel at level 1, builds the tuple and measures the
/// interpolating function on it.
pub fn violation_witness(data: &PolyPickData, f_values: &[Complex64], opts: &VnOptions) -> Result<ViolationWitness> {
    let data = data.with_targets(f_values.to_vec())?;
    let kernel = match agler_feasible(&data, 1.0)? {
        AglerOutcome::Infeasible(k) => k,
        AglerOutcome::Feasible(_) => {
            return Err(Error::Precondition("data admit an Agler decomposition at level 1".into()));
        }
    };
    let tuple = build_tuple_from_kernel(&kernel, data.nodes())?;
    tuple.check_invariants(TUPLE_TOL)?;
    let f_norm = linalg::spectral_norm(&tuple.evaluate_values(f_values)?);
    let lower_bound_sq = 1.0 + kernel.violation.abs() * linalg::min_eigenvalue(&kernel.k);
    if f_norm <= 1.0 {
        return Err(Error::ContractViolation(format!("||f(T)|| = {f_norm} does not exceed 1")));
    }
    if f_norm * f_norm < lower_bound_sq * (1.0 - 1e-9) {
        return Err(Error::ContractViolation(format!(
            "||f(T)||^2 = {} below the kernel bound {lower_bound_sq}",
            f_norm * f_norm
        )));
    }
    let report = von_neumann_check(&tuple, opts)?;
    Ok(ViolationWitness { tuple, kernel, f_norm, lower_bound_sq, report })
}
