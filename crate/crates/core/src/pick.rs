//! One-variable Nevanlinna–Pick and Carathéodory–Pick interpolation.
//!
//! Value data `lambda_i -> w_i` may be extended by first-derivative data
//! `f'(lambda_k) = u_k`. The Pick matrix at level `t` is `A - B / t^2`, where
//! `A` is the Hermite-extended Szegő Gram matrix and `B` the matching Gram
//! matrix of `f(z) conj(f(zeta)) / (1 - z conj(zeta))`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::disk::{BlaschkeProduct, DiskPoint};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::poly::UniPoly;

/// Eigenvalue threshold for positive semidefiniteness.
pub const PSD_TOL: f64 = 1e-11;
/// Upper end of the smallest-eigenvalue window that counts as singular.
pub const SINGULAR_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interpolation data on the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskPickData {
    nodes: Vec<Complex64>,
    targets: Vec<Complex64>,
    derivatives: Vec<(usize, Complex64)>,
}

impl DiskPickData {
    pub fn new(nodes: Vec<Complex64>, targets: Vec<Complex64>) -> Result<Self> {
        Self::with_derivatives(nodes, targets, Vec::new())
    }

    /// `derivatives` holds `(node index, prescribed f'(node))` pairs.
    pub fn with_derivatives(
        nodes: Vec<Complex64>,
        targets: Vec<Complex64>,
        derivatives: Vec<(usize, Complex64)>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Precondition("interpolation data needs at least one node".into()));
        }
        if nodes.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: targets.len() });
        }
        for &z in &nodes {
            DiskPoint::new(z)?;
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if (a - b).norm() < 1e-12 {
                    return Err(Error::Precondition(format!("coincident nodes at {a}")));
                }
            }
        }
        if targets.iter().chain(derivatives.iter().map(|(_, u)| u)).any(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::Domain("non-finite interpolation value".into()));
        }
        let mut seen = vec![false; nodes.len()];
        for &(k, _) in &derivatives {
            if k >= nodes.len() || seen[k] {
                return Err(Error::Precondition(format!("invalid derivative constraint at node index {k}")));
            }
            seen[k] = true;
        }
        Ok(Self { nodes, targets, derivatives })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }

    pub fn derivatives(&self) -> &[(usize, Complex64)] {
        &self.derivatives
    }

    /// Number of scalar constraints (values plus derivatives).
    pub fn constraint_count(&self) -> usize {
        self.nodes.len() + self.derivatives.len()
    }

    /// The same data with all prescribed values and derivatives multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            targets: self.targets.iter().map(|w| w * s).collect(),
            derivatives: self.derivatives.iter().map(|&(k, u)| (k, u * s)).collect(),
        }
    }
}

/// A functional on functions of one variable: evaluation or derivative at a node.
#[derive(Clone, Copy)]
struct Functional {
    node: Complex64,
    value: Complex64,
    derivative: Option<Complex64>,
}

fn functionals(data: &DiskPickData) -> Vec<Functional> {
    let mut out: Vec<Functional> = data
        .nodes
        .iter()
        .zip(&data.targets)
        .map(|(&node, &value)| Functional { node, value, derivative: None })
        .collect();
    for &(k, u) in &data.derivatives {
        out.push(Functional { node: data.nodes[k], value: data.targets[k], derivative: Some(u) });
    }
    out
}

/// Entry of the Hermite-extended kernel `(1 - f(z) conj f(zeta)) / (1 - z conj zeta)`
/// with `f` replaced by `s f`: first functional acts in `z`, the second in `conj(zeta)`.
fn kernel_entry(p: &Functional, q: &Functional, s: f64) -> Complex64 {
    let (z, x) = (p.node, q.node);
    let (wz, wx) = (p.value * s, q.value * s);
    let d = ONE - z * x.conj();
    let n = ONE - wz * wx.conj();
    match (p.derivative, q.derivative) {
        (None, None) => n / d,
        (Some(uz), None) => {
            let uz = uz * s;
            (-uz * wx.conj() * d + n * x.conj()) / (d * d)
        }
        (None, Some(_)) => kernel_entry(q, p, s).conj(),
        (Some(uz), Some(ux)) => {
            let (uz, ux) = (uz * s, ux * s);
            let big_p = -wz * ux.conj() * d + n * z;
            let p_z = -uz * ux.conj() * d + wz * ux.conj() * x.conj() - uz * wx.conj() * z + n;
            (p_z * d + 2.0 * x.conj() * big_p) / (d * d * d)
        }
    }
}

fn gram(data: &DiskPickData, s: f64) -> CMatrix {
    let f = functionals(data);
    let m = CMatrix::from_fn(f.len(), f.len(), |i, j| kernel_entry(&f[i], &f[j], s));
    linalg::hermitian_part(&m)
}

/// The (Hermite-extended) Pick matrix `[(1 - w_i conj w_j) / (1 - lambda_i conj lambda_j)]`.
pub fn pick_matrix(data: &DiskPickData) -> CMatrix {
    gram(data, 1.0)
}

/// Pick matrix of the data scaled by `1/t`.
pub fn pick_matrix_at(data: &DiskPickData, t: f64) -> CMatrix {
    gram(data, 1.0 / t)
}

/// Whether some function of sup norm at most `t` interpolates the data.
pub fn solvable(data: &DiskPickData, t: f64) -> bool {
    t > 0.0 && linalg::min_eigenvalue(&pick_matrix_at(data, t)) >= -PSD_TOL
}

/// Smallest sup norm of an interpolant: `sqrt(lambda_max(A^{-1} B))` for the
/// Szegő part `A` and data part `B` of the Pick matrix.
pub fn minimal_norm(data: &DiskPickData) -> Result<f64> {
    let a = gram(data, 0.0);
    let b = &a - gram(data, 1.0);
    Ok(linalg::pencil_max_eigenvalue(&a, &b)?.max(0.0).sqrt())
}

/// True when the Pick matrix at level one is positive semidefinite and singular.
pub fn is_extremal(data: &DiskPickData) -> bool {
    let lo = linalg::min_eigenvalue(&pick_matrix(data));
    (-PSD_TOL..=SINGULAR_TOL).contains(&lo)
}

fn poly_add(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    UniPoly::new(
        (0..n)
            .map(|k| a.coeffs.get(k).copied().unwrap_or(ZERO) + b.coeffs.get(k).copied().unwrap_or(ZERO))
            .collect(),
    )
}

fn poly_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut out = vec![ZERO; a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    UniPoly::new(out)
}

fn poly_scale(a: &UniPoly, c: Complex64) -> UniPoly {
    UniPoly::new(a.coeffs.iter().map(|x| x * c).collect())
}

#[derive(Clone, Copy)]
struct SchurNode {
    node: Complex64,
    value: Complex64,
    derivative: Option<Complex64>,
}

/// Tolerance below which a scaled value counts as unimodular in the Schur recursion.
const UNIMODULAR_TOL: f64 = 1e-7;

/// Schur recursion on extremal data. Returns `(P, Q)` with `f = P / Q`.
fn schur_recursion(data: &[SchurNode]) -> Result<(UniPoly, UniPoly)> {
    // Peeling the smallest value first keeps each step well conditioned.
    let Some(pivot) = (0..data.len()).min_by(|&i, &j| data[i].value.norm().total_cmp(&data[j].value.norm())) else {
        return Ok((UniPoly::new(vec![ZERO]), UniPoly::new(vec![ONE])));
    };
    let first = &data[pivot];
    if let Some(top) = data.iter().find(|p| p.value.norm() >= 1.0 - UNIMODULAR_TOL) {
        let c = top.value / top.value.norm();
        for p in data {
            let off = (p.value - c).norm() + p.derivative.map_or(0.0, |u| u.norm());
            if off > 1e-5 {
                return Err(Error::Conditioning(format!(
                    "Schur step reached a unimodular value at {} but the remaining data deviates by {off:e}",
                    top.node
                )));
            }
        }
        return Ok((UniPoly::new(vec![c]), UniPoly::new(vec![ONE])));
    }
    if data.iter().any(|p| p.value.norm() > 1.0 + UNIMODULAR_TOL) {
        return Err(Error::Conditioning("Schur step produced a value outside the disk".into()));
    }

    let (l1, w1) = (first.node, first.value);
    let one_minus_w = 1.0 - w1.norm_sqr();
    let one_minus_l = 1.0 - l1.norm_sqr();
    let b = |z: Complex64| (z - l1) / (ONE - l1.conj() * z);
    let db = |z: Complex64| one_minus_l / ((ONE - l1.conj() * z) * (ONE - l1.conj() * z));
    let tmap = |w: Complex64| (w - w1) / (ONE - w1.conj() * w);
    let dtmap = |w: Complex64| one_minus_w / ((ONE - w1.conj() * w) * (ONE - w1.conj() * w));

    let mut next = Vec::with_capacity(data.len());
    if let Some(u1) = first.derivative {
        next.push(SchurNode { node: l1, value: u1 * one_minus_l / one_minus_w, derivative: None });
    }
    for p in data.iter().enumerate().filter(|(i, _)| *i != pivot).map(|(_, p)| p) {
        let bz = b(p.node);
        let tw = tmap(p.value);
        let value = tw / bz;
        let derivative = p.derivative.map(|u| (dtmap(p.value) * u * bz - tw * db(p.node)) / (bz * bz));
        next.push(SchurNode { node: p.node, value, derivative });
    }
    let (gp, gq) = schur_recursion(&next)?;

    // f = (w1 + b g) / (1 + conj(w1) b g) with b = (z - l1)/(1 - conj(l1) z).
    let num_b = UniPoly::new(vec![-l1, ONE]);
    let den_b = UniPoly::new(vec![ONE, -l1.conj()]);
    let p = poly_add(&poly_scale(&poly_mul(&den_b, &gq), w1), &poly_mul(&num_b, &gp));
    let q = poly_add(&poly_mul(&den_b, &gq), &poly_scale(&poly_mul(&num_b, &gp), w1.conj()));
    Ok((p, q))
}

/// The minimal-norm interpolant as a scaled finite Blaschke product, built by
/// the Schur algorithm on the data normalized to be extremal.
pub fn schur_construct(data: &DiskPickData) -> Result<BlaschkeProduct> {
    let t = minimal_norm(data)?;
    if t < 1e-14 {
        return BlaschkeProduct::new(Vec::new(), ONE, 0.0);
    }
    let scaled = data.scaled(1.0 / t);
    let mut nodes: Vec<SchurNode> = scaled
        .nodes
        .iter()
        .zip(&scaled.targets)
        .map(|(&node, &value)| SchurNode { node, value, derivative: None })
        .collect();
    for &(k, u) in &scaled.derivatives {
        nodes[k].derivative = Some(u);
    }
    let (p, q) = schur_recursion(&nodes)?;

    let zeros = p.roots();
    for a in &zeros {
        if a.norm() >= 1.0 - 1e-12 {
            return Err(Error::Conditioning(format!("reconstructed zero {a} is not inside the disk")));
        }
    }
    let probe = ONE;
    let f1 = p.eval(probe) / q.eval(probe);
    let bl = zeros.iter().fold(ONE, |acc, &a| acc * (probe - a) / (ONE - a.conj() * probe));
    let c = f1 / bl;
    if (c.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Conditioning(format!("boundary modulus {} of the reconstruction is not one", c.norm())));
    }
    let (zeros, c) = refine_blaschke(zeros, c / c.norm(), &scaled);
    let out = BlaschkeProduct::new(zeros, c, t)?;

    let residual = data
        .nodes
        .iter()
        .zip(&data.targets)
        .map(|(&z, &w)| (out.eval_unchecked(z) - w).norm())
        .fold(0.0_f64, f64::max);
    if residual > 1e-6 {
        return Err(Error::Conditioning(format!("Schur reconstruction misses the data by {residual:e}")));
    }
    Ok(out)
}

fn blaschke_residuals(zeros: &[Complex64], c: Complex64, data: &DiskPickData) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = data
        .nodes
        .iter()
        .zip(&data.targets)
        .map(|(&z, &w)| zeros.iter().fold(c, |acc, &a| acc * (z - a) / (ONE - a.conj() * z)) - w)
        .collect();
    for &(k, u) in &data.derivatives {
        let z = data.nodes[k];
        let val = zeros.iter().fold(c, |acc, &a| acc * (z - a) / (ONE - a.conj() * z));
        let logd: Complex64 = zeros
            .iter()
            .map(|&a| {
                let den = ONE - a.conj() * z;
                (1.0 - a.norm_sqr()) / (den * den) * den / (z - a)
            })
            .sum();
        out.push(val * logd - u);
    }
    out
}

/// Gauss–Newton polish of zeros and phase against the (extremal) data, with
/// a forward-difference Jacobian; steps that do not reduce the residual are
/// rejected.
fn refine_blaschke(mut zeros: Vec<Complex64>, mut c: Complex64, data: &DiskPickData) -> (Vec<Complex64>, Complex64) {
    if !data.derivatives.is_empty() || zeros.is_empty() {
        return (zeros, c);
    }
    let norm = |r: &[Complex64]| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let unpack = |x: &[f64]| -> (Vec<Complex64>, Complex64) {
        let k = (x.len() - 1) / 2;
        let zs = (0..k).map(|i| Complex64::new(x[2 * i], x[2 * i + 1])).collect();
        (zs, Complex64::from_polar(1.0, x[2 * k]))
    };
    let mut x: Vec<f64> = zeros.iter().flat_map(|a| [a.re, a.im]).collect();
    x.push(c.arg());
    let mut best = norm(&blaschke_residuals(&zeros, c, data));
    for _ in 0..8 {
        if best < 1e-15 {
            break;
        }
        let r0 = blaschke_residuals(&zeros, c, data);
        let rows = 2 * r0.len();
        let mut jac = nalgebra::DMatrix::<f64>::zeros(rows, x.len());
        for j in 0..x.len() {
            let h = 1e-7;
            let mut xp = x.clone();
            xp[j] += h;
            let (zp, cp) = unpack(&xp);
            let rp = blaschke_residuals(&zp, cp, data);
            for (i, (a, b)) in rp.iter().zip(&r0).enumerate() {
                let dv = (a - b) / h;
                jac[(2 * i, j)] = dv.re;
                jac[(2 * i + 1, j)] = dv.im;
            }
        }
        let rhs = nalgebra::DVector::from_iterator(rows, r0.iter().flat_map(|z| [-z.re, -z.im]));
        let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-12) else {
            break;
        };
        let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let (zn, cn) = unpack(&xn);
        if zn.iter().any(|a| a.norm() >= 1.0 - 1e-12) {
            break;
        }
        let val = norm(&blaschke_residuals(&zn, cn, data));
        if !(val < best) {
            break;
        }
        best = val;
        x = xn;
        zeros = zn;
        c = cn;
    }
    (zeros, c)
}

/// Derivative constraints `D psi(0) v^k = u^k` at the origin for maps
/// `psi` from the polydisk to the disk with `psi(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CpDataOrigin {
    vectors: Vec<Vec<Complex64>>,
    targets: Vec<Complex64>,
}

impl CpDataOrigin {
    pub fn new(vectors: Vec<Vec<Complex64>>, targets: Vec<Complex64>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Precondition("at least one tangent constraint is required".into()));
        }
        if vectors.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: vectors.len(), got: targets.len() });
        }
        let d = vectors[0].len();
        if d == 0 {
            return Err(Error::Precondition("tangent vectors must be nonempty".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
        Ok(Self { vectors, targets })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.targets
    }
}

/// Result of the minimum-`l1` test for derivative data at the origin.
#[derive(Debug, Clone)]
pub struct InfinitesimalReport {
    /// Minimal `||c||_1` over gradients `c` with `c . v^k = u^k`.
    pub norm_lower_bound: f64,
    pub extremal: bool,
    pub witness: Vec<Complex64>,
    /// Lower bound on the minimum from the dual multipliers.
    pub dual_bound: f64,
    /// `false` when the constraint vectors were linearly dependent.
    pub independent: bool,
}

/// Minimizes `||c||_1` subject to `c . v^k = u^k` by iteratively reweighted
/// least squares with an `epsilon` schedule from `1e-3` down to `1e-12`.
pub fn infinitesimal_extremal_origin(data: &CpDataOrigin) -> Result<InfinitesimalReport> {
    let k = data.vectors.len();
    let d = data.dim();
    let v = CMatrix::from_fn(k, d, |i, j| data.vectors[i][j]);
    let u = DVector::from_column_slice(&data.targets);

    let svd = v.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return Err(Error::Infeasible("all tangent vectors vanish".into()));
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-12 * smax)
        .collect();
    let uu = svd.u.as_ref().expect("requested U");
    let basis = CMatrix::from_fn(k, keep.len(), |i, j| uu[(i, keep[j])]);
    let projected = &basis * (basis.adjoint() * &u);
    let inconsistency = (&u - projected).norm();
    if inconsistency > 1e-9 * (1.0 + u.norm()) {
        return Err(Error::Infeasible(format!("constraints inconsistent, residual {inconsistency:e}")));
    }
    let vr = basis.adjoint() * &v;
    let ur = basis.adjoint() * &u;

    let mut c = vr
        .clone()
        .pseudo_inverse(1e-14)
        .map_err(|e| Error::Conditioning(e.to_string()))?
        * &ur;
    let mut mu = DVector::zeros(keep.len());
    let mut eps = 1e-3_f64;
    for _ in 0..=60 {
        for _ in 0..6 {
            let w: Vec<f64> = c.iter().map(|z| (z.norm_sqr() + eps * eps).sqrt()).collect();
            let vw = CMatrix::from_fn(vr.nrows(), d, |i, j| vr[(i, j)] * w[j]);
            let g = &vw * vr.adjoint();
            let chol = linalg::cholesky(&g)?;
            mu = chol.solve(&ur);
            c = vw.adjoint() * &mu;
        }
        eps = (eps * 0.5).max(1e-12);
    }
    let minimum: f64 = c.iter().map(|z| z.norm()).sum();
    let y = vr.adjoint() * &mu;
    let ymax = y.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let dual_bound = if ymax > 0.0 { (mu.adjoint() * &ur)[(0, 0)].norm() / ymax } else { 0.0 };
    Ok(InfinitesimalReport {
        norm_lower_bound: minimum,
        extremal: minimum >= 1.0 - 1e-9,
        witness: c.iter().copied().collect(),
        dual_bound,
        independent: keep.len() == k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn data(pairs: &[(f64, f64)]) -> DiskPickData {
        DiskPickData::new(pairs.iter().map(|p| c(p.0, 0.0)).collect(), pairs.iter().map(|p| c(p.1, 0.0)).collect())
            .unwrap()
    }

    #[test]
    fn single_origin_node_gives_unit_matrix() {
        let m = pick_matrix(&data(&[(0.0, 0.0)]));
        assert_eq!(m.nrows(), 1);
        assert!((m[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn two_point_determinant() {
        let m = pick_matrix(&data(&[(0.0, 0.0), (0.5, 0.25)]));
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        assert!((det - 0.25).abs() < 1e-14);
    }

    #[test]
    fn identity_data_is_extremal() {
        let d = data(&[(0.0, 0.0), (0.5, 0.5)]);
        assert!(is_extremal(&d));
        assert!((minimal_norm(&d).unwrap() - 1.0).abs() < 1e-12);
        let b = schur_construct(&d).unwrap();
        assert_eq!(b.degree(), 1);
        assert!(b.zeros[0].norm() < 1e-12);
    }

    #[test]
    fn schwarz_violation_is_unsolvable() {
        assert!(solvable(&data(&[(0.0, 0.0), (0.5, 0.25)]), 1.0));
        assert!(!solvable(&data(&[(0.0, 0.0), (0.5, 0.6)]), 1.0));
        assert!(solvable(&data(&[(0.0, 0.0), (0.5, 0.6)]), 1e6));
    }

    #[test]
    fn two_point_minimal_norm() {
        let d = data(&[(0.0, 0.0), (0.5, 0.25)]);
        assert!((minimal_norm(&d).unwrap() - 0.5).abs() < 1e-12);
        assert!(!is_extremal(&d));
    }

    #[test]
    fn single_node_constant() {
        let d = data(&[(0.0, 0.3)]);
        assert!((minimal_norm(&d).unwrap() - 0.3).abs() < 1e-14);
        let b = schur_construct(&d).unwrap();
        assert_eq!(b.degree(), 0);
        assert!((b.scale - 0.3).abs() < 1e-14);
    }

    #[test]
    fn derivative_entry_matches_szego_derivative() {
        // With f = 0 the Hermite entry is (1 + z conj x) / (1 - z conj x)^3.
        let d = DiskPickData::with_derivatives(vec![c(0.3, 0.2), c(-0.1, 0.4)], vec![ZERO, ZERO], vec![(0, ZERO), (1, ZERO)])
            .unwrap();
        let m = pick_matrix(&d);
        let (z, x) = (c(0.3, 0.2), c(-0.1, 0.4));
        let want = (ONE + z * x.conj()) / (ONE - z * x.conj()).powi(3);
        assert!((m[(2, 3)] - want).norm() < 1e-14);
    }

    #[test]
    fn coordinate_constraint_is_extremal() {
        let cp = CpDataOrigin::new(vec![vec![ONE, ZERO, ZERO]], vec![ONE]).unwrap();
        let rep = infinitesimal_extremal_origin(&cp).unwrap();
        assert!((rep.norm_lower_bound - 1.0).abs() < 1e-10);
        assert!(rep.extremal);
        assert!((rep.witness[0] - ONE).norm() < 1e-9);
    }

    #[test]
    fn inconsistent_constraints_are_infeasible() {
        let cp = CpDataOrigin::new(vec![vec![ONE, ZERO], vec![ONE, ZERO]], vec![ONE, ZERO]).unwrap();
        assert!(matches!(infinitesimal_extremal_origin(&cp), Err(Error::Infeasible(_))));
    }
}
