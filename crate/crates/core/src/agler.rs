//! Pick interpolation on the polydisk through Agler decompositions.
//!
//! Data `lambda_i -> w_i` is solvable at level `t` in the Schur–Agler class
//! iff there are positive semidefinite `Gamma^1, ..., Gamma^d` with
//!
//! ```text
//! 1 - w_i conj(w_j) / t^2 = sum_r (1 - lambda_i^r conj(lambda_j^r)) Gamma^r_ij.
//! ```
//!
//! The dual cone consists of Hermitian `K` with `E_r ∘ K ⪰ 0` for every
//! `E_r = [1 - lambda_i^r conj(lambda_j^r)]`. Minimizing `sum_ij K_ij` over that
//! cone subject to `sum_ij w_i conj(w_j) K_ij = 1` gives `s*`, and the data is
//! solvable exactly when `t^2 >= 1 / s*`. The dual problem is solved by a
//! log-barrier interior-point method; its central path carries a primal
//! decomposition, and every iterate is a strictly feasible dual kernel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::disk::PolyPoint;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::realization::SchurAglerFunction;

/// Largest number of nodes accepted by the solver.
pub const MAX_NODES: usize = 64;
/// Reconstruction tolerance for primal certificates.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;
/// Eigenvalue tolerance for the positivity of each `Gamma^r`.
pub const GAMMA_PSD_TOL: f64 = 1e-9;
/// A dual certificate must push the tested form at least this far below zero.
pub const VIOLATION_TOL: f64 = 1e-8;
/// Caveat attached to norms computed in three or more variables.
pub const SCHUR_AGLER_CAVEAT: &str = "schur-agler-upper-bound";
/// Relative width allowed for the primal-dual bracket of the norm.
pub const NORM_TOL: f64 = 1e-5;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interpolation data on the polydisk.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPickData {
    d: usize,
    nodes: Vec<PolyPoint>,
    targets: Vec<Complex64>,
}

impl PolyPickData {
    pub fn new(nodes: Vec<PolyPoint>, targets: Vec<Complex64>) -> Result<Self> {
        let Some(first) = nodes.first() else {
            return Err(Error::Precondition("interpolation data needs at least one node".into()));
        };
        let d = first.dim();
        if nodes.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: targets.len() });
        }
        if let Some(p) = nodes.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                let gap = a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                if gap < 1e-12 {
                    return Err(Error::Precondition(format!("coincident nodes {:?}", a.coords())));
                }
            }
        }
        if targets.iter().any(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::Domain("non-finite target".into()));
        }
        Ok(Self { d, nodes, targets })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[PolyPoint] {
        &self.nodes
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn with_targets(&self, targets: Vec<Complex64>) -> Result<Self> {
        Self::new(self.nodes.clone(), targets)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { d: self.d, nodes: self.nodes.clone(), targets: self.targets.iter().map(|w| w * s).collect() }
    }

    /// `E_r = [1 - lambda_i^r conj(lambda_j^r)]`.
    pub fn coordinate_kernel(&self, r: usize) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| ONE - self.nodes[i].coord(r) * self.nodes[j].coord(r).conj())
    }

    /// `[1 - w_i conj(w_j) / t^2]`.
    pub fn target_kernel(&self, t: f64) -> CMatrix {
        let n = self.len();
        CMatrix::from_fn(n, n, |i, j| ONE - self.targets[i] * self.targets[j].conj() / (t * t))
    }
}

/// Primal certificate: positive semidefinite `Gamma^r` reproducing the
/// target kernel at level `t`.
#[derive(Debug, Clone)]
pub struct AglerDecomposition {
    pub gammas: Vec<CMatrix>,
    pub t: f64,
}

impl AglerDecomposition {
    /// Largest entrywise defect of the reconstruction identity.
    pub fn reconstruction_residual(&self, data: &PolyPickData) -> f64 {
        let mut sum = data.target_kernel(self.t);
        for (r, g) in self.gammas.iter().enumerate() {
            sum -= data.coordinate_kernel(r).component_mul(g);
        }
        linalg::max_abs_entry(&sum)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.gammas.iter().map(linalg::min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// Re-checks the certificate independently of the solver.
    pub fn verify(&self, data: &PolyPickData) -> Result<()> {
        if self.gammas.len() != data.dim() {
            return Err(Error::DimensionMismatch { expected: data.dim(), got: self.gammas.len() });
        }
        let res = self.reconstruction_residual(data);
        let lo = self.min_eigenvalue();
        if res > RECONSTRUCTION_TOL || lo < -GAMMA_PSD_TOL {
            return Err(Error::ContractViolation(format!(
                "decomposition residual {res:e}, smallest Gamma eigenvalue {lo:e}"
            )));
        }
        Ok(())
    }
}

/// Dual certificate: a positive definite kernel with unit diagonal.
#[derive(Debug, Clone)]
pub struct DualKernel {
    pub k: CMatrix,
    /// Smallest eigenvalue of `[(1 - w_i conj(w_j) / t^2) K_ij]` for the data it
    /// was extracted from.
    pub violation: f64,
}

impl DualKernel {
    /// Validates positivity and the unit diagonal; `violation` is supplied by
    /// the caller (see [`DualKernel::tested_form_min_eigenvalue`]).
    pub fn new(k: CMatrix, violation: f64) -> Result<Self> {
        if !k.is_square() || !linalg::is_hermitian(&k, 1e-12) {
            return Err(Error::Precondition("kernel must be a Hermitian square matrix".into()));
        }
        for i in 0..k.nrows() {
            if (k[(i, i)] - ONE).norm() > 1e-12 {
                return Err(Error::Precondition(format!("kernel diagonal entry {i} is {}", k[(i, i)])));
            }
        }
        linalg::cholesky(&k).map_err(|_| Error::Precondition("kernel is not positive definite".into()))?;
        Ok(Self { k, violation })
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    /// Smallest eigenvalue of `[(1 - w_i conj(w_j) / t^2) K_ij]`.
    pub fn tested_form_min_eigenvalue(&self, data: &PolyPickData, t: f64) -> f64 {
        linalg::min_eigenvalue(&data.target_kernel(t).component_mul(&self.k))
    }
}

#[derive(Debug, Clone)]
pub enum AglerOutcome {
    Feasible(AglerDecomposition),
    Infeasible(DualKernel),
}

/// Schur–Agler norm of the data with its two-sided bracket.
#[derive(Debug, Clone, Copy)]
pub struct SchurAglerNorm {
    /// Level at which a primal decomposition exists.
    pub value: f64,
    /// Level below which a dual kernel rules out solvability.
    pub lower: f64,
    /// Set in three or more variables, where the Schur–Agler class is smaller
    /// than the bounded analytic unit ball and `value` only bounds the
    /// minimal extension norm from above.
    pub upper_bound_only: bool,
}

impl SchurAglerNorm {
    pub fn caveat(&self) -> Option<&'static str> {
        self.upper_bound_only.then_some(SCHUR_AGLER_CAVEAT)
    }
}

/// Final state of the interior-point solve.
#[derive(Debug, Clone)]
struct BarrierSolution {
    /// Strictly dual-feasible kernel with `sum w_i conj(w_j) K_ij = 1`.
    kernel: CMatrix,
    /// `sum_ij K_ij`, an upper bound for `s*`.
    objective: f64,
    /// Primal matrices `Gamma^r` with `J - s W ≈ sum E_r ∘ Gamma^r`.
    gammas: Vec<CMatrix>,
    /// Least-squares `s` for the primal matrices, a lower bound for `s*`.
    level: f64,
}

/// Hermitian coordinates: diagonal entries, then real and imaginary parts of
/// the strict upper triangle.
struct HermitianBasis {
    n: usize,
    /// For each basis element: up to two `(row, col, coefficient)` entries.
    entries: Vec<Vec<(usize, usize, Complex64)>>,
}

impl HermitianBasis {
    fn new(n: usize) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            entries.push(vec![(i, i, ONE)]);
        }
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                entries.push(vec![(i, j, ONE), (j, i, ONE)]);
                entries.push(vec![(i, j, i_unit), (j, i, -i_unit)]);
            }
        }
        Self { n, entries }
    }

    fn len(&self) -> usize {
        self.entries.len()
    }

    fn matrix(&self, x: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (e, &xk) in self.entries.iter().zip(x) {
            for &(a, b, c) in e {
                m[(a, b)] += c * xk;
            }
        }
        m
    }

    fn coords(&self, m: &CMatrix) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len());
        for i in 0..self.n {
            x.push(m[(i, i)].re);
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                x.push(m[(i, j)].re);
                x.push(m[(i, j)].im);
            }
        }
        x
    }

    /// `sum_ab X_ab B_ab` for every basis element `B`.
    fn pair(&self, x: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.entries.iter().map(|e| e.iter().map(|&(a, b, c)| (x[(a, b)] * c).re).sum::<f64>()),
        )
    }
}

fn log_det_pd(m: &CMatrix) -> Option<f64> {
    let chol = nalgebra::Cholesky::new(linalg::hermitian_part(m))?;
    let l = chol.l();
    let mut s = 0.0;
    for i in 0..m.nrows() {
        let v = l[(i, i)].re;
        if !(v > 0.0) {
            return None;
        }
        s += 2.0 * v.ln();
    }
    Some(s)
}

fn inverse_pd(m: &CMatrix) -> Option<CMatrix> {
    nalgebra::Cholesky::new(linalg::hermitian_part(m)).map(|c| c.inverse())
}

struct Barrier<'a> {
    basis: HermitianBasis,
    e: Vec<CMatrix>,
    c: DVector<f64>,
    a: DVector<f64>,
    data: &'a PolyPickData,
}

impl<'a> Barrier<'a> {
    fn new(data: &'a PolyPickData) -> Self {
        let n = data.len();
        let basis = HermitianBasis::new(n);
        let e = (0..data.dim()).map(|r| data.coordinate_kernel(r)).collect();
        let c = basis.pair(&CMatrix::from_element(n, n, ONE));
        let w = CMatrix::from_fn(n, n, |i, j| data.targets[i] * data.targets[j].conj());
        let a = basis.pair(&w);
        Self { basis, e, c, a, data }
    }

    /// `t_b c.x - sum_r log det(E_r ∘ K)`, or `None` outside the cone.
    fn value(&self, x: &[f64], tb: f64) -> Option<f64> {
        let k = self.basis.matrix(x);
        let mut f = tb * self.c.dot(&DVector::from_column_slice(x));
        for e in &self.e {
            f -= log_det_pd(&e.component_mul(&k))?;
        }
        Some(f)
    }

    /// Gradient, Hessian and the inverses `P_r = (E_r ∘ K)^{-1}`.
    fn derivatives(&self, x: &[f64], tb: f64) -> Option<(DVector<f64>, DMatrix<f64>, Vec<CMatrix>)> {
        let k = self.basis.matrix(x);
        let nb = self.basis.len();
        let mut g = &self.c * tb;
        let mut h = DMatrix::<f64>::zeros(nb, nb);
        let mut ps = Vec::with_capacity(self.e.len());
        for e in &self.e {
            let p = inverse_pd(&e.component_mul(&k))?;
            // tr(P (E ∘ B)) = sum_ab E_ab P_ba B_ab.
            let xmat = e.component_mul(&p.transpose());
            g -= self.basis.pair(&xmat);
            let scaled: Vec<Vec<(usize, usize, Complex64)>> = self
                .basis
                .entries
                .iter()
                .map(|ent| ent.iter().map(|&(a, b, c)| (a, b, c * e[(a, b)])).collect())
                .collect();
            for (kk, ek) in scaled.iter().enumerate() {
                for (ll, el) in scaled.iter().enumerate().skip(kk) {
                    let mut v = ZERO;
                    for &(a, b, alpha) in ek {
                        for &(cc, dd, beta) in el {
                            v += alpha * beta * p[(b, cc)] * p[(dd, a)];
                        }
                    }
                    h[(kk, ll)] += v.re;
                    if ll != kk {
                        h[(ll, kk)] += v.re;
                    }
                }
            }
            ps.push(p);
        }
        Some((g, h, ps))
    }

    /// Primal matrices `(P - P (E ∘ dK) P)^T / t_b`, the first-order update of
    /// `P^T / t_b` along the Newton step, which satisfies the stationarity
    /// equations of the barrier problem exactly up to rounding.
    fn corrected_gammas(&self, ps: &[CMatrix], dx: &DVector<f64>, tb: f64) -> Vec<CMatrix> {
        let dk = self.basis.matrix(dx.as_slice());
        ps.iter()
            .zip(&self.e)
            .map(|(p, e)| {
                let corr = p - p * e.component_mul(&dk) * p;
                linalg::hermitian_part(&(corr.transpose() * Complex64::new(1.0 / tb, 0.0)))
            })
            .collect()
    }

    fn line_search(&self, x: &mut Vec<f64>, dx: &DVector<f64>, tb: f64, decrement: f64) -> bool {
        let Some(f0) = self.value(x, tb) else {
            return false;
        };
        let mut step = 1.0;
        while step > 1e-14 {
            let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + step * b).collect();
            if let Some(f1) = self.value(&xn, tb) {
                if f1 <= f0 - 0.25 * step * decrement {
                    *x = xn;
                    return true;
                }
            }
            step *= 0.5;
        }
        false
    }

    fn solve(&self) -> Result<BarrierSolution> {
        let n = self.data.len();
        let d = self.data.dim();
        let wsum: f64 = self.data.targets.iter().map(|w| w.norm_sqr()).sum();
        let mut x = self.basis.coords(&(CMatrix::identity(n, n) * Complex64::new(1.0 / wsum, 0.0)));
        let obj0 = self.c.dot(&DVector::from_column_slice(&x));
        let mut tb = (d * n) as f64 / obj0;
        let mut centered: Option<Vec<CMatrix>> = None;

        for _outer in 0..80 {
            let mut converged = false;
            let mut gammas_here = Vec::new();
            for _ in 0..100 {
                let Some((g, h, ps)) = self.derivatives(&x, tb) else {
                    return Err(Error::Undecided { t: f64::NAN, detail: "barrier iterate left the cone".into() });
                };
                let Some(dx) = newton_direction(&g, h, &self.a) else {
                    break;
                };
                let decrement = -g.dot(&dx);
                if !(decrement > 0.0) || decrement < 1e-18 {
                    gammas_here = self.corrected_gammas(&ps, &dx, tb);
                    converged = true;
                    break;
                }
                let accepted = if decrement < 0.25 {
                    // Quadratic region of the self-concordant barrier: the full
                    // step stays inside the cone.
                    let xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b).collect();
                    self.value(&xn, tb).map(|_| x = xn).is_some()
                } else {
                    self.line_search(&mut x, &dx, tb, decrement)
                };
                if !accepted || decrement < 1e-12 {
                    if decrement < 1e-6 {
                        gammas_here = self.corrected_gammas(&ps, &dx, tb);
                        converged = true;
                    }
                    if !accepted || decrement < 1e-12 {
                        break;
                    }
                }
            }
            if !converged {
                break;
            }
            centered = Some(gammas_here);
            let objective = self.c.dot(&DVector::from_column_slice(&x));
            if (d * n) as f64 / tb < 1e-12 * objective {
                break;
            }
            tb *= 8.0;
        }
        let Some(gammas) = centered else {
            return Err(Error::Undecided { t: f64::NAN, detail: "barrier centering never converged".into() });
        };

        let kernel = self.basis.matrix(&x);
        let objective = self.c.dot(&DVector::from_column_slice(&x));
        let mut resid = CMatrix::from_element(n, n, ONE);
        for (e, g) in self.e.iter().zip(&gammas) {
            resid -= e.component_mul(g);
        }
        let w = CMatrix::from_fn(n, n, |i, j| self.data.targets[i] * self.data.targets[j].conj());
        let level = resid.iter().zip(w.iter()).map(|(r, w)| (r * w.conj()).re).sum::<f64>()
            / w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(BarrierSolution { kernel, objective, gammas, level })
    }
}

/// Newton step for `min f` subject to `a . dx = 0`, from the gradient `g` and
/// Hessian `h`, solved on the orthogonal complement of `a`.
fn newton_direction(g: &DVector<f64>, h: DMatrix<f64>, a: &DVector<f64>) -> Option<DVector<f64>> {
    let nb = g.len();
    let mut basis = DMatrix::<f64>::identity(nb, nb);
    basis.set_column(0, &(a / a.norm()));
    let qr = basis.qr();
    let z = qr.q().columns(1, nb - 1).into_owned();
    let hr = z.transpose() * &h * &z;
    let gr = z.transpose() * g;
    let m = nb - 1;
    let scale: Vec<f64> = (0..m).map(|i| 1.0 / hr[(i, i)].max(f64::MIN_POSITIVE).sqrt()).collect();
    let hs = DMatrix::from_fn(m, m, |i, j| hr[(i, j)] * scale[i] * scale[j]);
    let gs = DVector::from_fn(m, |i, _| gr[i] * scale[i]);
    let ys = nalgebra::Cholesky::new(hs)?.solve(&gs);
    let dr = DVector::from_fn(m, |i, _| -ys[i] * scale[i]);
    Some(z * dr)
}

fn szego(data: &PolyPickData, r: usize) -> CMatrix {
    let e = data.coordinate_kernel(r);
    e.map(|z| ONE / z)
}

/// Distributes the entrywise reconstruction defect over the `Gamma^r` in the
/// least-squares sense.
fn polish(data: &PolyPickData, gammas: &mut [CMatrix], t: f64) {
    let e: Vec<CMatrix> = (0..data.dim()).map(|r| data.coordinate_kernel(r)).collect();
    let mut resid = data.target_kernel(t);
    for (er, g) in e.iter().zip(gammas.iter()) {
        resid -= er.component_mul(g);
    }
    let n = data.len();
    for i in 0..n {
        for j in 0..n {
            let weight: f64 = e.iter().map(|er| er[(i, j)].norm_sqr()).sum();
            for (er, g) in e.iter().zip(gammas.iter_mut()) {
                g[(i, j)] += er[(i, j)].conj() * resid[(i, j)] / weight;
            }
        }
    }
}

fn zero_data_decomposition(data: &PolyPickData, t: f64) -> AglerDecomposition {
    let d = data.dim() as f64;
    AglerDecomposition { gammas: (0..data.dim()).map(|r| szego(data, r) / Complex64::new(d, 0.0)).collect(), t }
}

fn check_size(data: &PolyPickData) -> Result<()> {
    if data.len() > MAX_NODES {
        return Err(Error::Precondition(format!("{} nodes exceed the limit of {MAX_NODES}", data.len())));
    }
    Ok(())
}

fn solve_barrier(data: &PolyPickData) -> Result<Option<BarrierSolution>> {
    check_size(data)?;
    if data.targets.iter().all(|w| *w == ZERO) {
        return Ok(None);
    }
    Barrier::new(data).solve().map(Some)
}

fn certify(data: &PolyPickData, t: f64, sol: Option<&BarrierSolution>) -> Result<AglerOutcome> {
    let Some(sol) = sol else {
        let mut dec = zero_data_decomposition(data, t);
        polish(data, &mut dec.gammas, t);
        return Ok(AglerOutcome::Feasible(dec));
    };
    let d = data.dim() as f64;
    let alpha = 1.0 / (t * t * sol.level);
    if alpha <= 1.0 + 1e-7 {
        let alpha = alpha.min(1.0);
        let mut gammas: Vec<CMatrix> = sol
            .gammas
            .iter()
            .enumerate()
            .map(|(r, g)| g * Complex64::new(alpha, 0.0) + szego(data, r) * Complex64::new((1.0 - alpha) / d, 0.0))
            .collect();
        polish(data, &mut gammas, t);
        let dec = AglerDecomposition { gammas, t };
        if dec.verify(data).is_ok() {
            return Ok(AglerOutcome::Feasible(dec));
        }
    }
    let diag: Vec<f64> = (0..data.len()).map(|i| sol.kernel[(i, i)].re).collect();
    if diag.iter().all(|&v| v > 0.0) {
        let k = CMatrix::from_fn(data.len(), data.len(), |i, j| sol.kernel[(i, j)] / (diag[i] * diag[j]).sqrt());
        let mut k = linalg::hermitian_part(&k);
        for i in 0..data.len() {
            k[(i, i)] = ONE;
        }
        if let Ok(kernel) = DualKernel::new(k, 0.0) {
            let violation = kernel.tested_form_min_eigenvalue(data, t);
            if violation <= -VIOLATION_TOL {
                return Ok(AglerOutcome::Infeasible(DualKernel { violation, ..kernel }));
            }
        }
    }
    Err(Error::Undecided {
        t,
        detail: format!(
            "primal level bracket [{:.3e}, {:.3e}] does not separate 1/t^2 = {:.3e}",
            sol.level,
            sol.objective,
            1.0 / (t * t)
        ),
    })
}

/// Decides solvability at level `t`, returning a verified primal decomposition
/// or a dual kernel whose tested form has an eigenvalue at most `-1e-8`.
pub fn agler_feasible(data: &PolyPickData, t: f64) -> Result<AglerOutcome> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("level t = {t} must be positive")));
    }
    let sol = solve_barrier(data)?;
    certify(data, t, sol.as_ref())
}

/// Smallest level with an Agler decomposition, bracketed by the primal and
/// dual values of the interior-point solve.
pub fn schur_agler_norm(data: &PolyPickData) -> Result<SchurAglerNorm> {
    let upper_bound_only = data.dim() >= 3;
    let Some(sol) = solve_barrier(data)? else {
        return Ok(SchurAglerNorm { value: 0.0, lower: 0.0, upper_bound_only });
    };
    if !(sol.level > 0.0 && sol.objective > 0.0) {
        return Err(Error::Undecided { t: f64::NAN, detail: format!("degenerate barrier levels {:e}, {:e}", sol.level, sol.objective) });
    }
    let value = 1.0 / sol.level.sqrt();
    let lower = 1.0 / sol.objective.sqrt();
    if (value - lower).abs() > NORM_TOL * value.max(1e-300) {
        return Err(Error::Undecided {
            t: value,
            detail: format!("norm bracket [{lower}, {value}] wider than tolerance"),
        });
    }
    Ok(SchurAglerNorm { value, lower, upper_bound_only })
}

/// Sampled evidence that a kernel lies in the dual cone: the minimum over
/// random Schur–Agler functions of the smallest eigenvalue of
/// `[(1 - phi(lambda_i) conj(phi(lambda_j))) K_ij]`.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub min_eigenvalue: f64,
    pub worst_function: String,
    pub samples: usize,
}

impl MembershipReport {
    pub fn is_evidence(&self) -> bool {
        self.min_eigenvalue >= -VIOLATION_TOL
    }
}

pub fn dual_kernel_membership_evidence(
    kernel: &DualKernel,
    nodes: &[PolyPoint],
    samples: usize,
    seed: u64,
) -> Result<MembershipReport> {
    DualKernel::new(kernel.k.clone(), kernel.violation)?;
    if nodes.len() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: nodes.len() });
    }
    let d = nodes.first().map_or(1, |p| p.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MembershipReport { min_eigenvalue: f64::INFINITY, worst_function: String::new(), samples };
    for _ in 0..samples {
        let f = SchurAglerFunction::random(&mut rng, d);
        let w: Vec<Complex64> = nodes.iter().map(|p| f.eval(p.coords())).collect();
        let n = nodes.len();
        let m = CMatrix::from_fn(n, n, |i, j| (ONE - w[i] * w[j].conj()) * kernel.k[(i, j)]);
        let lo = linalg::min_eigenvalue(&m);
        if lo < report.min_eigenvalue {
            report.min_eigenvalue = lo;
            report.worst_function = f.describe();
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diagonal_data(w: f64) -> PolyPickData {
        PolyPickData::new(
            vec![PolyPoint::origin(2), PolyPoint::from_reals(&[0.5, 0.5]).unwrap()],
            vec![ZERO, c(w, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn average_of_coordinates_is_feasible() {
        match agler_feasible(&diagonal_data(0.5), 1.0).unwrap() {
            AglerOutcome::Feasible(dec) => dec.verify(&diagonal_data(0.5)).unwrap(),
            AglerOutcome::Infeasible(_) => panic!("expected a decomposition"),
        }
    }

    #[test]
    fn schwarz_violation_gives_dual_kernel() {
        match agler_feasible(&diagonal_data(0.7), 1.0).unwrap() {
            AglerOutcome::Infeasible(k) => {
                assert!(k.violation <= -VIOLATION_TOL);
                assert!((k.k[(0, 0)] - ONE).norm() < 1e-12);
            }
            AglerOutcome::Feasible(_) => panic!("expected a dual kernel"),
        }
    }

    #[test]
    fn diagonal_norm_matches_two_point_formula() {
        let norm = schur_agler_norm(&diagonal_data(0.7)).unwrap();
        assert!((norm.value - 1.4).abs() < 1e-6, "{norm:?}");
        assert!(!norm.upper_bound_only);
    }

    #[test]
    fn one_point_decomposition() {
        let node = PolyPoint::new(vec![c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        let data = PolyPickData::new(vec![node], vec![c(0.4, 0.0)]).unwrap();
        let norm = schur_agler_norm(&data).unwrap();
        assert!((norm.value - 0.4).abs() < 1e-8);
        assert!(matches!(agler_feasible(&data, 1.0).unwrap(), AglerOutcome::Feasible(_)));
    }

    #[test]
    fn zero_targets_have_zero_norm() {
        let data = PolyPickData::new(vec![PolyPoint::origin(3), PolyPoint::from_reals(&[0.1, 0.2, 0.3]).unwrap()], vec![ZERO, ZERO])
            .unwrap();
        let norm = schur_agler_norm(&data).unwrap();
        assert_eq!(norm.value, 0.0);
        assert_eq!(norm.caveat(), Some(SCHUR_AGLER_CAVEAT));
    }

    #[test]
    fn rank_one_kernel_rejected() {
        let k = CMatrix::from_element(2, 2, ONE);
        let nodes = vec![PolyPoint::origin(1), PolyPoint::from_reals(&[0.5]).unwrap()];
        assert!(dual_kernel_membership_evidence(&DualKernel { k, violation: -1.0 }, &nodes, 10, 0).is_err());
    }
}
