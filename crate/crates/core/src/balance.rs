//! Balanced pairs of polydisk points, the disks through them, and the
//! associated Carathéodory extremals.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::disk::{rho, DiskPoint, MobiusMap, PolyPoint, PolydiskAutomorphism};
use crate::error::{Error, Result};
use crate::poly::UniPoly;

/// Default relative tolerance for ties between coordinatewise distances.
pub const TIE_TOL: f64 = 1e-9;

/// Outcome of comparing the coordinatewise distances of two points.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    /// Number of coordinates whose distance ties with the largest one.
    pub n: usize,
    /// Zero-based coordinates by descending distance, ties in index order.
    pub permutation: Vec<usize>,
    /// Distances in `permutation` order.
    pub rho_values: Vec<f64>,
    pub tol: f64,
}

impl BalanceReport {
    /// The coordinates achieving the maximal distance.
    pub fn top_coordinates(&self) -> &[usize] {
        &self.permutation[..self.n]
    }
}

/// Classifies `(l, m)` as `n`-balanced. Distances tie when they agree with the
/// largest one to within `tol` relative.
pub fn classify_pair(l: &PolyPoint, m: &PolyPoint, tol: f64) -> Result<BalanceReport> {
    if l.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: m.dim() });
    }
    let rhos: Vec<f64> = l.coords().iter().zip(m.coords()).map(|(&a, &b)| rho(a, b)).collect();
    let mut permutation: Vec<usize> = (0..rhos.len()).collect();
    permutation.sort_by(|&i, &j| rhos[j].total_cmp(&rhos[i]).then(i.cmp(&j)));
    let rho_values: Vec<f64> = permutation.iter().map(|&j| rhos[j]).collect();
    let top = rho_values[0];
    if top == 0.0 {
        return Err(Error::Precondition("the two points coincide".into()));
    }
    let n = rho_values.iter().take_while(|&&r| top - r <= tol * top).count();
    Ok(BalanceReport { n, permutation, rho_values, tol })
}

/// A holomorphic disk `zeta -> (m_{m_j}(c_j zeta))_j` through `m` (at 0) and
/// `l` (at the positive real parameter `param_l`). The coefficients `c_j` are
/// unimodular on the balanced coordinates and of modulus below one elsewhere.
#[derive(Debug, Clone)]
pub struct BalancedDisk {
    /// Unimodular twists of the balanced coordinates relative to the first one.
    pub omegas: Vec<Complex64>,
    /// The balanced coordinates, in report order.
    pub coordinates: Vec<usize>,
    pub coefficients: Vec<Complex64>,
    pub base: PolyPoint,
    pub param_l: f64,
}

impl BalancedDisk {
    pub fn embed(&self, zeta: Complex64) -> Result<PolyPoint> {
        DiskPoint::new(zeta)?;
        let coords = self
            .base
            .coords()
            .iter()
            .zip(&self.coefficients)
            .map(|(&b, &c)| {
                let mb = MobiusMap::new(DiskPoint::new(b).expect("base is interior"), Complex64::new(1.0, 0.0))
                    .expect("unit prefactor");
                mb.apply(c * zeta)
            })
            .collect();
        PolyPoint::new(coords)
    }
}

/// Coordinates of `l` after moving `m` to the origin coordinatewise.
fn normalized(l: &PolyPoint, m: &PolyPoint) -> Vec<Complex64> {
    PolydiskAutomorphism::moving_to_origin(m)
        .apply(l)
        .expect("dimensions already checked")
        .coords()
        .to_vec()
}

pub fn balanced_disk_through(l: &PolyPoint, m: &PolyPoint, tol: f64) -> Result<BalancedDisk> {
    let report = classify_pair(l, m, tol)?;
    if report.n < 2 {
        return Err(Error::Precondition(format!(
            "pair is only {}-balanced; a balanced disk needs n >= 2",
            report.n
        )));
    }
    let lp = normalized(l, m);
    let coordinates = report.top_coordinates().to_vec();
    let r = lp[coordinates[0]].norm();
    let coefficients: Vec<Complex64> = lp
        .iter()
        .enumerate()
        .map(|(j, &z)| if coordinates.contains(&j) { z / z.norm() } else { z / r })
        .collect();
    let first = coefficients[coordinates[0]];
    let omegas = coordinates.iter().map(|&j| coefficients[j] / first).collect();
    Ok(BalancedDisk { omegas, coordinates, coefficients, base: m.clone(), param_l: r })
}

/// The map `z -> (1/n) sum_{j in J} Phi_j(z_j)` where `Phi` sends `m` to the
/// origin and `l` to nonnegative coordinates, and `J` holds the balanced
/// coordinates.
#[derive(Debug, Clone)]
pub struct CaratheodoryExtremal {
    pub normalizer: PolydiskAutomorphism,
    pub coordinates: Vec<usize>,
}

impl CaratheodoryExtremal {
    pub fn eval(&self, z: &PolyPoint) -> Result<Complex64> {
        let w = self.normalizer.apply(z)?;
        let n = self.coordinates.len() as f64;
        Ok(self.coordinates.iter().map(|&j| w.coord(j)).sum::<Complex64>() / n)
    }
}

pub fn caratheodory_extremal_for_pair(l: &PolyPoint, m: &PolyPoint, tol: f64) -> Result<CaratheodoryExtremal> {
    let report = classify_pair(l, m, tol)?;
    let lp = normalized(l, m);
    let factors = m
        .coords()
        .iter()
        .zip(&lp)
        .map(|(&mj, &lj)| {
            let phase = if lj.norm() > 0.0 { lj / lj.norm() } else { Complex64::new(1.0, 0.0) };
            let base = MobiusMap::new(DiskPoint::new(mj).expect("interior"), Complex64::new(1.0, 0.0))
                .expect("unit prefactor");
            MobiusMap::rotation(phase.conj()).expect("unimodular").compose(&base)
        })
        .collect();
    let normalizer = PolydiskAutomorphism::new((0..m.dim()).collect(), factors)?;
    Ok(CaratheodoryExtremal { normalizer, coordinates: report.top_coordinates().to_vec() })
}

/// Grid sizes for [`find_balanced_pair_on_graph`].
#[derive(Debug, Clone, Copy)]
pub struct GraphSearchGrid {
    pub angular: usize,
    pub radial: usize,
}

impl Default for GraphSearchGrid {
    fn default() -> Self {
        Self { angular: 512, radial: 256 }
    }
}

/// A parameter `z` on the graph of `g` with `rho(g(z), w1) <= rho(z, 0)`.
#[derive(Debug, Clone, Copy)]
pub struct GraphWitness {
    pub z: Complex64,
    pub gz: Complex64,
    /// `rho(z, 0) - rho(g(z), w1)`, nonnegative up to round-off.
    pub slack: f64,
}

/// Searches `|z| <= r` for a point where the graph of `g` comes at least as
/// close to `w1` as `z` is to the origin. Such a point always exists, so
/// failure is reported as resolution exhaustion.
pub fn find_balanced_pair_on_graph(
    g: &UniPoly,
    w1: DiskPoint,
    r: f64,
    grid: GraphSearchGrid,
) -> Result<GraphWitness> {
    let w1 = w1.value();
    if !(w1.norm() < r && r < 1.0) {
        return Err(Error::Precondition(format!("need |w1| < r < 1, got |w1| = {}, r = {r}", w1.norm())));
    }
    if g.coeffs.first().is_some_and(|c| c.norm() > 1e-12) {
        return Err(Error::Precondition("the graph map must vanish at the origin".into()));
    }
    let boundary_max = (0..4096)
        .map(|k| g.eval(Complex64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 4096.0)).norm())
        .fold(0.0_f64, f64::max);
    if boundary_max > 1.0 {
        return Err(Error::Precondition(format!(
            "graph map leaves the disk: boundary modulus reaches {boundary_max}"
        )));
    }

    let gap = |z: Complex64| rho(g.eval(z), w1) - z.norm();
    let mut best: Option<(f64, Complex64)> = None;
    for i in 1..=grid.radial {
        let rad = r * i as f64 / grid.radial as f64;
        for k in 0..grid.angular {
            let z = Complex64::from_polar(rad, k as f64 * std::f64::consts::TAU / grid.angular as f64);
            let v = gap(z);
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, z));
            }
        }
    }
    let (value, z) = best.expect("grid is nonempty");
    if value > 1e-9 {
        return Err(Error::ResolutionExhausted {
            resolution: grid.radial * grid.angular,
            detail: format!("smallest rho(g(z), w1) - |z| on the grid was {value:e} at z = {z}"),
        });
    }
    // Bisect along the ray towards the sign change nearest the origin side.
    let z = if value <= 0.0 && gap(Complex64::new(0.0, 0.0)) > 0.0 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if gap(z * mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        z * hi
    } else {
        z
    };
    let gz = g.eval(z);
    Ok(GraphWitness { z, gz, slack: z.norm() - rho(gz, w1) })
}

/// All pairs of sample points that are at least 2-balanced, sorted by `n`
/// descending and then by index pair.
pub fn scan_balanced_pairs(sample: &[PolyPoint], tol: f64) -> Vec<((usize, usize), BalanceReport)> {
    let mut found: Vec<((usize, usize), BalanceReport)> = (0..sample.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            ((i + 1)..sample.len()).filter_map(move |j| {
                classify_pair(&sample[i], &sample[j], tol)
                    .ok()
                    .filter(|rep| rep.n >= 2)
                    .map(|rep| ((i, j), rep))
            })
        })
        .collect();
    found.sort_by(|a, b| b.1.n.cmp(&a.1.n).then(a.0.cmp(&b.0)));
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_balanced_from_origin() {
        let rep = classify_pair(&PolyPoint::origin(3), &PolyPoint::from_reals(&[0.5, 0.5, 0.2]).unwrap(), TIE_TOL)
            .unwrap();
        assert_eq!(rep.n, 2);
        assert_eq!(rep.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn three_balanced_equal_moduli() {
        let m = PolyPoint::new(vec![c(0.3, 0.0), c(0.0, 0.3), c(-0.3, 0.0)]).unwrap();
        assert_eq!(classify_pair(&PolyPoint::origin(3), &m, TIE_TOL).unwrap().n, 3);
    }

    #[test]
    fn balanced_over_first_two_coordinates() {
        let l = PolyPoint::from_reals(&[0.5, 0.0, 0.0]).unwrap();
        let m = PolyPoint::from_reals(&[0.0, 0.5, 0.0]).unwrap();
        let rep = classify_pair(&l, &m, TIE_TOL).unwrap();
        assert_eq!(rep.n, 2);
        assert_eq!(rep.top_coordinates(), &[0, 1]);
    }

    #[test]
    fn equal_points_rejected() {
        let p = PolyPoint::from_reals(&[0.1, 0.2]).unwrap();
        assert!(classify_pair(&p, &p, TIE_TOL).is_err());
    }

    #[test]
    fn twisted_disk_reports_omega() {
        let omega = Complex64::from_polar(1.0, 0.7);
        let m = PolyPoint::new(vec![c(0.4, 0.0), omega * 0.4, c(0.1, 0.0)]).unwrap();
        let disk = balanced_disk_through(&PolyPoint::origin(3), &m, TIE_TOL).unwrap();
        assert!((disk.omegas[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((disk.omegas[1] - omega).norm() < 1e-12);
    }

    #[test]
    fn zero_graph_equality_case() {
        let g = UniPoly::new(vec![c(0.0, 0.0)]);
        let w = find_balanced_pair_on_graph(&g, DiskPoint::real(0.3).unwrap(), 0.6, GraphSearchGrid::default())
            .unwrap();
        assert!(w.slack >= -1e-9);
        assert!((w.z.norm() - 0.3).abs() < 1e-9);
    }
}
