//! Algebraic subvarieties of the tridisk: sampling, graph extraction over
//! coordinate pairs, a grid test for being a retract, and the named families
//! `z_3 = z_1 + z_2`, the rational inner graphs
//! `z_3 = omega (A z_1 + B z_2 + z_1 z_2) / (1 + conj(B) z_1 + conj(A) z_2)`
//! and the uniqueness surfaces of three-point problems.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::disk::{DiskPoint, PolyPoint};
use crate::error::{Error, Result};
use crate::poly::MultiPoly;

/// Maximal total degree of a generator.
pub const MAX_DEGREE: u32 = 12;
/// Roots within this distance of the unit circle count as boundary roots.
pub const BOUNDARY_BAND: f64 = 1e-7;
/// Tolerance for a root of one generator to be a root of the others.
pub const INTERSECTION_TOL: f64 = 1e-8;
/// Residual bound for extracted points.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;
pub const DEFAULT_RESOLUTION: usize = 64;
pub const DEFAULT_MARGIN: f64 = 1e-3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
/// Roots closer than this are merged.
const ROOT_MERGE: f64 = 1e-6;

/// Common zero set of polynomial generators, intersected with the polydisk.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicVariety {
    d: usize,
    generators: Vec<MultiPoly>,
}

impl AlgebraicVariety {
    pub fn new(d: usize, generators: Vec<MultiPoly>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("a variety needs at least one generator".into()));
        }
        for g in &generators {
            if g.nvars() != d {
                return Err(Error::DimensionMismatch { expected: d, got: g.nvars() });
            }
            if g.is_zero() {
                return Err(Error::Precondition("generators must not vanish identically".into()));
            }
            if g.total_degree() > MAX_DEGREE {
                return Err(Error::Precondition(format!("generator degree {} exceeds {MAX_DEGREE}", g.total_degree())));
            }
        }
        Ok(Self { d, generators })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    /// Graph `z_k = h(z_i, z_j)` with `(i, j)` the two remaining coordinates
    /// in increasing order.
    pub fn graph_of(h: &MultiPoly, dependent: usize) -> Result<Self> {
        if h.nvars() != 2 || dependent > 2 {
            return Err(Error::Precondition("graphs are over two of three coordinates".into()));
        }
        let (i, j) = other_pair(dependent);
        let mut terms: Vec<(Vec<u32>, Complex64)> = h
            .terms()
            .iter()
            .map(|(e, c)| {
                let mut exp = vec![0; 3];
                exp[i] = e[0];
                exp[j] = e[1];
                (exp, -*c)
            })
            .collect();
        let mut zk = vec![0; 3];
        zk[dependent] = 1;
        terms.push((zk, ONE));
        Self::new(3, vec![MultiPoly::new(3, terms)?])
    }

    /// Renames coordinate `k` to `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: perm.len() });
        }
        let mut seen = vec![false; self.d];
        for &p in perm {
            if p >= self.d || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
            }
        }
        Self::new(self.d, self.generators.iter().map(|g| g.permute_variables(perm)).collect())
    }

    /// Largest generator modulus at `z`, each generator scaled by its
    /// coefficient magnitude.
    pub fn residual(&self, z: &[Complex64]) -> f64 {
        self.generators
            .iter()
            .map(|g| g.eval(z).norm() / g.coefficient_scale().max(1.0))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, z: &PolyPoint, tol: f64) -> Result<bool> {
        if z.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: z.dim() });
        }
        Ok(self.residual(z.coords()) <= tol)
    }

    fn require_tridisk(&self) -> Result<()> {
        if self.d != 3 {
            return Err(Error::Precondition(format!("operation needs d = 3, got {}", self.d)));
        }
        Ok(())
    }

    /// Roots in the dependent coordinate over one domain point, merged within
    /// `1e-6`. `None` if every generator vanishes identically on the fiber.
    pub(crate) fn fiber_roots(&self, k: usize, z: &[Complex64]) -> Option<Vec<Complex64>> {
        let restricted: Vec<_> = self.generators.iter().map(|g| g.restrict_to_variable(k, z)).collect();
        let primary = restricted
            .iter()
            .enumerate()
            .filter_map(|(i, u)| u.effective_degree(1e-13).map(|deg| (deg, i)))
            .min()?;
        let (deg, pi) = primary;
        if deg == 0 {
            return Some(Vec::new());
        }
        let mut roots: Vec<Complex64> = Vec::new();
        for r in restricted[pi].roots() {
            if let Some(m) = roots.iter_mut().find(|m| (**m - r).norm() < ROOT_MERGE) {
                *m = (*m + r) * 0.5;
            } else {
                roots.push(r);
            }
        }
        roots.retain(|&r| {
            restricted
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pi)
                .all(|(_, u)| u.eval(r).norm() <= INTERSECTION_TOL * u.scale_magnitude().max(1.0) * (1.0 + r.norm()).powi(u.coeffs.len() as i32))
        });
        Some(roots)
    }

    /// Points of the variety over an equal-area grid of the disk pair
    /// complementary to the coordinate of lowest degree, rotated by one
    /// seeded angle so the grid stays symmetric under swapping the pair.
    pub fn sample(&self, grid_resolution: usize, seed: u64) -> Result<Vec<PolyPoint>> {
        self.require_tridisk()?;
        let k = (0..3)
            .filter_map(|k| self.generators.iter().map(|g| g.degree_in(k)).filter(|&e| e > 0).min().map(|e| (e, k)))
            .min()
            .map(|(_, k)| k)
            .ok_or_else(|| Error::DegenerateDirection("all generators are constant".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rot = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
        let rot = [rot, rot];
        let ext = self.extract_with(other_pair(k), k, grid_resolution, rot)?;
        let points: Vec<PolyPoint> = ext
            .domain_samples
            .iter()
            .zip(&ext.values)
            .flat_map(|(&(a, b), roots)| {
                roots.iter().filter_map(move |&r| {
                    let mut z = [ZERO; 3];
                    z[ext.pair.0] = a;
                    z[ext.pair.1] = b;
                    z[k] = r;
                    PolyPoint::new(z.to_vec()).ok()
                })
            })
            .collect();
        if points.is_empty() {
            return Err(Error::NoSamples(format!("no points of the variety over a {grid_resolution}x{grid_resolution} grid")));
        }
        Ok(points)
    }

    /// Roots in `z_k` over the equal-area grid of the two other coordinates.
    pub fn extract_graph(&self, pair: (usize, usize), resolution: usize) -> Result<GraphExtraction> {
        self.require_tridisk()?;
        let (i, j) = pair;
        if i > 2 || j > 2 || i == j {
            return Err(Error::Precondition(format!("invalid coordinate pair {pair:?}")));
        }
        let k = 3 - i - j;
        self.extract_with((i, j), k, resolution, [ONE, ONE])
    }

    fn extract_with(&self, pair: (usize, usize), k: usize, resolution: usize, rot: [Complex64; 2]) -> Result<GraphExtraction> {
        if self.generators.iter().all(|g| g.degree_in(k) == 0) {
            return Err(Error::DegenerateDirection(format!("no generator depends on z{}", k + 1)));
        }
        if resolution == 0 {
            return Err(Error::Precondition("resolution must be positive".into()));
        }
        let disk: Vec<Complex64> = equal_area_disk(resolution);
        let domain: Vec<(Complex64, Complex64)> =
            disk.iter().flat_map(|&a| disk.iter().map(move |&b| (a * rot[0], b * rot[1]))).collect();
        let fibers: Vec<Fiber> = domain
            .par_iter()
            .map(|&(a, b)| {
                let mut z = [ZERO; 3];
                z[pair.0] = a;
                z[pair.1] = b;
                match self.fiber_roots(k, &z) {
                    None => Fiber { interior: Vec::new(), all: Vec::new(), vertical: true, residual: 0.0 },
                    Some(all) => {
                        let interior: Vec<Complex64> = all.iter().copied().filter(|r| r.norm() < 1.0 - BOUNDARY_BAND).collect();
                        let residual = interior
                            .iter()
                            .map(|&r| {
                                z[k] = r;
                                self.residual(&z)
                            })
                            .fold(0.0, f64::max);
                        Fiber { interior, all, vertical: false, residual }
                    }
                }
            })
            .collect();
        let max_residual = fibers.iter().map(|f| f.residual).fold(0.0, f64::max);
        if max_residual > ROOT_RESIDUAL_TOL {
            return Err(Error::ContractViolation(format!("extracted roots leave residual {max_residual:e}")));
        }
        let single_sheeted = fibers.iter().all(|f| !f.vertical && f.interior.len() <= 1);
        let sup_modulus = fibers.iter().flat_map(|f| f.interior.iter().map(|r| r.norm())).fold(0.0, f64::max);
        let boundary = fibers.iter().map(|f| f.all.iter().any(|r| (r.norm() - 1.0).abs() <= BOUNDARY_BAND)).collect();
        let vertical = fibers.iter().map(|f| f.vertical).collect();
        let (values, all_roots): (Vec<_>, Vec<_>) = fibers.into_iter().map(|f| (f.interior, f.all)).unzip();
        Ok(GraphExtraction {
            dependent: k,
            pair,
            domain_samples: domain,
            values,
            all_roots,
            boundary,
            vertical,
            single_sheeted,
            sup_modulus,
            max_residual,
        })
    }

    /// Grid test whether the variety is the graph of a map from two of the
    /// coordinates into the third, tried for all three choices.
    pub fn retract_check(&self, resolution: usize, margin: f64) -> Result<RetractVerdict> {
        self.require_tridisk()?;
        let directions: Vec<DirectionReport> = [(1, 2), (0, 2), (0, 1)]
            .into_iter()
            .map(|pair| {
                let k = 3 - pair.0 - pair.1;
                let outcome = match self.extract_graph(pair, resolution) {
                    Err(Error::DegenerateDirection(_)) => DirectionOutcome::Degenerate,
                    Err(e) => return Err(e),
                    Ok(ext) => ext.classify(margin),
                };
                Ok(DirectionReport { dependent: k, pair, outcome })
            })
            .collect::<Result<_>>()?;
        let status = if directions.iter().any(|d| matches!(d.outcome, DirectionOutcome::Graph { .. })) {
            RetractStatus::RetractGraph
        } else if directions.iter().all(|d| d.outcome.is_conclusive_failure()) {
            RetractStatus::NotRetract
        } else {
            RetractStatus::Inconclusive
        };
        Ok(RetractVerdict { status, directions, resolution, margin })
    }
}

fn other_pair(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// `n` points of the unit disk at radii `sqrt((m + 1/2) / n)` and golden-angle
/// arguments, each representing an equal area.
pub fn equal_area_disk(n: usize) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|m| Complex64::from_polar(((m as f64 + 0.5) / n as f64).sqrt(), golden * m as f64))
        .collect()
}

struct Fiber {
    interior: Vec<Complex64>,
    all: Vec<Complex64>,
    vertical: bool,
    residual: f64,
}

/// Roots of the dependent coordinate over a grid of the other two.
#[derive(Debug, Clone)]
pub struct GraphExtraction {
    pub dependent: usize,
    pub pair: (usize, usize),
    /// `(z_i, z_j)` grid points.
    pub domain_samples: Vec<(Complex64, Complex64)>,
    /// Roots in the open disk, at distance more than `1e-7` from the circle.
    pub values: Vec<Vec<Complex64>>,
    /// All finite roots of the fiber equation.
    pub all_roots: Vec<Vec<Complex64>>,
    /// Grid points with a root within `1e-7` of the circle.
    pub boundary: Vec<bool>,
    /// Grid points over which the whole fiber lies in the variety.
    pub vertical: Vec<bool>,
    pub single_sheeted: bool,
    pub sup_modulus: f64,
    pub max_residual: f64,
}

impl GraphExtraction {
    /// Grid points with at least one interior root.
    pub fn domain_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| !v.is_empty()).collect()
    }

    fn classify(&self, margin: f64) -> DirectionOutcome {
        if let Some(i) = (0..self.values.len()).find(|&i| self.vertical[i] || self.values[i].len() > 1) {
            return DirectionOutcome::MultiSheeted { point: self.domain_samples[i], roots: self.values[i].clone() };
        }
        // Strongest escape: the fiber whose roots stay farthest outside.
        let escape = (0..self.values.len())
            .filter(|&i| self.values[i].is_empty() && !self.boundary[i])
            .map(|i| (self.all_roots[i].iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min), i))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, i)) = escape {
            return DirectionOutcome::Escapes { point: self.domain_samples[i], roots: self.all_roots[i].clone() };
        }
        if self.boundary.iter().any(|&b| b) {
            return DirectionOutcome::Ambiguous { reason: "roots on the boundary band over some grid points".into() };
        }
        if self.sup_modulus > 1.0 - margin {
            return DirectionOutcome::Ambiguous { reason: format!("sup modulus {} exceeds 1 - margin", self.sup_modulus) };
        }
        DirectionOutcome::Graph { sup_modulus: self.sup_modulus }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetractStatus {
    RetractGraph,
    NotRetract,
    Inconclusive,
}

impl RetractStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RetractGraph => "retract_graph",
            Self::NotRetract => "not_retract",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DirectionOutcome {
    /// Single-sheeted over the whole grid with roots bounded by `sup_modulus`.
    Graph { sup_modulus: f64 },
    /// Two or more interior roots (or a vertical fiber) over `point`.
    MultiSheeted { point: (Complex64, Complex64), roots: Vec<Complex64> },
    /// Every root over `point` lies outside the closed disk.
    Escapes { point: (Complex64, Complex64), roots: Vec<Complex64> },
    /// No generator involves the dependent coordinate.
    Degenerate,
    Ambiguous { reason: String },
}

impl DirectionOutcome {
    fn is_conclusive_failure(&self) -> bool {
        matches!(self, Self::MultiSheeted { .. } | Self::Escapes { .. } | Self::Degenerate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub dependent: usize,
    pub pair: (usize, usize),
    pub outcome: DirectionOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetractVerdict {
    pub status: RetractStatus,
    pub directions: Vec<DirectionReport>,
    pub resolution: usize,
    pub margin: f64,
}

impl RetractVerdict {
    /// The deciding direction: a graph for `retract_graph`, otherwise the
    /// first direction with a counterexample point.
    pub fn witness(&self) -> Option<&DirectionReport> {
        match self.status {
            RetractStatus::RetractGraph => self.directions.iter().find(|d| matches!(d.outcome, DirectionOutcome::Graph { .. })),
            _ => self
                .directions
                .iter()
                .find(|d| matches!(d.outcome, DirectionOutcome::Escapes { .. }))
                .or_else(|| self.directions.iter().find(|d| matches!(d.outcome, DirectionOutcome::MultiSheeted { .. }))),
        }
    }
}

/// `z_3 = z_1 + z_2`.
pub fn builtin_v0() -> AlgebraicVariety {
    let g = MultiPoly::new(3, vec![(vec![0, 0, 1], ONE), (vec![1, 0, 0], -ONE), (vec![0, 1, 0], -ONE)]).expect("arity 3");
    AlgebraicVariety::new(3, vec![g]).expect("valid generator")
}

/// `z_1 + z_2 + z_3 = 0`.
pub fn builtin_sum() -> AlgebraicVariety {
    let g = MultiPoly::new(3, vec![(vec![1, 0, 0], ONE), (vec![0, 1, 0], ONE), (vec![0, 0, 1], ONE)]).expect("arity 3");
    AlgebraicVariety::new(3, vec![g]).expect("valid generator")
}

/// `z_3 (1 + conj(B) z_1 + conj(A) z_2) = omega (A z_1 + B z_2 + z_1 z_2)`.
pub fn builtin_rational_inner_graph(omega: Complex64, a: Complex64, b: Complex64) -> Result<AlgebraicVariety> {
    if (omega.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("omega = {omega} is not unimodular")));
    }
    if a.norm() > 1.0 || b.norm() > 1.0 {
        return Err(Error::Domain(format!("|A| = {}, |B| = {} must not exceed 1", a.norm(), b.norm())));
    }
    AlgebraicVariety::new(3, vec![rational_inner_generator(omega, a, b)])
}

fn rational_inner_generator(omega: Complex64, a: Complex64, b: Complex64) -> MultiPoly {
    MultiPoly::new(
        3,
        vec![
            (vec![0, 0, 1], ONE),
            (vec![1, 0, 1], b.conj()),
            (vec![0, 1, 1], a.conj()),
            (vec![1, 0, 0], -omega * a),
            (vec![0, 1, 0], -omega * b),
            (vec![1, 1, 0], -omega),
        ],
    )
    .expect("arity 3")
}

/// `((alpha t zeta - zeta^2) / (1 - conj(alpha) t zeta), ...)` for `alpha`,
/// `beta`, `gamma`.
pub fn uniqueness_variety_points(alpha: DiskPoint, beta: DiskPoint, gamma: DiskPoint, t: f64, zeta: DiskPoint) -> Result<PolyPoint> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} must lie in (0, 1)")));
    }
    let z = zeta.value();
    let coord = |a: Complex64| (a * t * z - z * z) / (ONE - a.conj() * t * z);
    let coords = vec![coord(alpha.value()), coord(beta.value()), coord(gamma.value())];
    PolyPoint::new(coords.clone()).map_err(|_| Error::Domain(format!("point {coords:?} leaves the tridisk")))
}

/// Least-squares rational inner graph through uniqueness-surface points.
#[derive(Debug, Clone, Copy)]
pub struct CoincidenceFit {
    pub omega: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    /// Largest generator modulus over the fitting samples.
    pub residual: f64,
    /// Largest generator modulus over 100 fresh samples.
    pub holdout_residual: f64,
}

impl CoincidenceFit {
    pub fn variety(&self) -> Result<AlgebraicVariety> {
        AlgebraicVariety::new(3, vec![rational_inner_generator(self.omega, self.a, self.b)])
    }
}

fn uniqueness_samples<R: Rng + ?Sized>(rng: &mut R, abc: [DiskPoint; 3], count: usize) -> Vec<PolyPoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = rng.random_range(0.05..0.95);
        let zeta = Complex64::from_polar(0.9 * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
        let zeta = DiskPoint::new(zeta).expect("radius below 0.9");
        if let Ok(p) = uniqueness_variety_points(abc[0], abc[1], abc[2], t, zeta) {
            out.push(p);
        }
    }
    out
}

/// Fits `(omega, A, B)` so that the uniqueness-surface points satisfy
/// `z_3 (1 + conj(B) z_1 + conj(A) z_2) = omega (A z_1 + B z_2 + z_1 z_2)`,
/// solving first for the five coefficients of the cleared equation.
pub fn uniqueness_coincidence_check(alpha: DiskPoint, beta: DiskPoint, gamma: DiskPoint, samples: usize, seed: u64) -> Result<CoincidenceFit> {
    let (a0, b0, g0) = (alpha.value(), beta.value(), gamma.value());
    let area = ((b0 - a0).conj() * (g0 - a0)).im;
    let scale = (b0 - a0).norm() * (g0 - a0).norm();
    if area.abs() <= 1e-9 * scale.max(1e-300) {
        return Err(Error::Precondition("alpha, beta, gamma are colinear".into()));
    }
    if samples < 5 {
        return Err(Error::Precondition("need at least 5 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = uniqueness_samples(&mut rng, [alpha, beta, gamma], samples);
    // z + p1 x z + p2 y z - p3 x - p4 y - p5 x y = 0.
    let m = DMatrix::from_fn(pts.len(), 5, |r, c| {
        let (x, y, z) = (pts[r].coord(0), pts[r].coord(1), pts[r].coord(2));
        [x * z, y * z, -x, -y, -x * y][c]
    });
    let rhs = DVector::from_fn(pts.len(), |r, _| -pts[r].coord(2));
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::Conditioning(format!("fit matrix singular values {smin:e} / {smax:e}")));
    }
    let p = svd.solve(&rhs, 0.0).map_err(|e| Error::Conditioning(e.to_string()))?;
    if p[4].norm() < 1e-12 {
        return Err(Error::Conditioning("fitted omega vanishes".into()));
    }
    let omega = p[4] / p[4].norm();
    let a = p[2] / p[4];
    let b = p[3] / p[4];
    let g = rational_inner_generator(omega, a, b);
    let worst = |ps: &[PolyPoint]| ps.iter().map(|q| g.eval(q.coords()).norm()).fold(0.0, f64::max);
    let residual = worst(&pts);
    let holdout = uniqueness_samples(&mut rng, [alpha, beta, gamma], 100);
    Ok(CoincidenceFit { omega, a, b, residual, holdout_residual: worst(&holdout) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn v0_membership() {
        let v = builtin_v0();
        assert!(v.contains(&PolyPoint::from_reals(&[0.2, 0.3, 0.5]).unwrap(), 1e-12).unwrap());
        assert!(!v.contains(&PolyPoint::from_reals(&[0.2, 0.3, 0.4]).unwrap(), 1e-12).unwrap());
        assert!(v.contains(&PolyPoint::from_reals(&[0.1, 0.1, 0.2]).unwrap(), 1e-12).unwrap());
    }

    #[test]
    fn zero_generator_rejected() {
        assert!(AlgebraicVariety::new(3, vec![MultiPoly::zero(3)]).is_err());
        assert!(AlgebraicVariety::new(3, vec![]).is_err());
    }

    #[test]
    fn equal_area_grid_stays_inside() {
        let g = equal_area_disk(64);
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|z| z.norm() < 1.0));
    }

    #[test]
    fn rational_inner_graph_with_zero_parameters_is_product() {
        let v = builtin_rational_inner_graph(ONE, ZERO, ZERO).unwrap();
        let z = [c(0.3, 0.1), c(-0.5, 0.2)];
        let p = PolyPoint::new(vec![z[0], z[1], z[0] * z[1]]).unwrap();
        assert!(v.contains(&p, 1e-14).unwrap());
        let off = PolyPoint::new(vec![ZERO, ZERO, c(0.3, 0.0)]).unwrap();
        assert!(!v.contains(&off, 1e-9).unwrap());
    }

    #[test]
    fn uniqueness_point_at_origin() {
        let a = DiskPoint::new(c(0.2, 0.0)).unwrap();
        let b = DiskPoint::new(c(0.0, 0.4)).unwrap();
        let g = DiskPoint::new(c(-0.3, 0.0)).unwrap();
        let p = uniqueness_variety_points(a, b, g, 0.5, DiskPoint::new(ZERO).unwrap()).unwrap();
        assert!(p.coords().iter().all(|z| z.norm() == 0.0));
        let zeta = c(0.3, 0.0);
        let p = uniqueness_variety_points(a, b, g, 1e-12, DiskPoint::new(zeta).unwrap()).unwrap();
        assert!(p.coords().iter().all(|z| (z + zeta * zeta).norm() < 1e-11));
    }

    #[test]
    fn colinear_parameters_rejected() {
        let p = |x: f64| DiskPoint::new(c(x, 0.0)).unwrap();
        assert!(matches!(uniqueness_coincidence_check(p(0.1), p(0.2), p(-0.3), 50, 0), Err(Error::Precondition(_))));
    }
}
