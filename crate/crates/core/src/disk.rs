//! Hyperbolic geometry of the unit disk and automorphisms of the polydisk.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Points with `1 - |z|` below this are not accepted as interior points.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default comparison tolerance for callers that do not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || 1.0 - z.norm() < BOUNDARY_TOL {
            return Err(Error::Domain(format!("{z} is not an interior point of the disk")));
        }
        Ok(Self(z))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// A point of the open polydisk.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPoint {
    coords: Vec<Complex64>,
}

impl PolyPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("a polydisk point needs at least one coordinate".into()));
        }
        for (j, &z) in coords.iter().enumerate() {
            DiskPoint::new(z).map_err(|_| {
                Error::Domain(format!("coordinate {} = {z} is not inside the unit disk", j + 1))
            })?;
        }
        Ok(Self { coords })
    }

    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn origin(d: usize) -> Self {
        Self { coords: vec![Complex64::new(0.0, 0.0); d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> Complex64 {
        self.coords[j]
    }
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|` without validation.
pub fn rho(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    num / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()
}

pub fn pseudo_hyperbolic(z: DiskPoint, w: DiskPoint) -> f64 {
    rho(z.0, w.0)
}

/// The disk automorphism `z -> tau (a - z) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    tau: Complex64,
}

impl MobiusMap {
    pub fn new(a: DiskPoint, tau: Complex64) -> Result<Self> {
        if (tau.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("prefactor {tau} is not unimodular")));
        }
        Ok(Self { a: a.0, tau: tau / tau.norm() })
    }

    pub fn identity() -> Self {
        Self { a: Complex64::new(0.0, 0.0), tau: Complex64::new(-1.0, 0.0) }
    }

    /// The rotation `z -> omega z`.
    pub fn rotation(omega: Complex64) -> Result<Self> {
        Self::new(DiskPoint(Complex64::new(0.0, 0.0)), -omega)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.tau * (self.a - z) / (Complex64::new(1.0, 0.0) - self.a.conj() * z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        -self.tau * (1.0 - self.a.norm_sqr()) / (den * den)
    }

    /// Inverse map; `(tau m_a)^{-1} = conj(tau) m_{tau a}`.
    pub fn inverse(&self) -> Self {
        Self { a: self.tau * self.a, tau: self.tau.conj() }
    }

    /// The composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        // The composite vanishes at other^{-1}(self.a).
        let a = other.inverse().apply(self.a);
        let base = Self { a, tau: Complex64::new(1.0, 0.0) };
        let probe = [0.0, 0.5, -0.5, 0.5_f64.sqrt()]
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .max_by(|x, y| base.apply(*x).norm().total_cmp(&base.apply(*y).norm()))
            .expect("nonempty probes");
        let tau = self.apply(other.apply(probe)) / base.apply(probe);
        Self { a, tau: tau / tau.norm() }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> Self {
        let a = random_disk_value(rng, max_radius);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        Self { a, tau: Complex64::from_polar(1.0, theta) }
    }
}

/// The involution `m_a` exchanging `a` and `0`.
pub fn mobius_interchange(a: DiskPoint) -> MobiusMap {
    MobiusMap { a: a.0, tau: Complex64::new(1.0, 0.0) }
}

/// Uniformly distributed point of the disk of radius `max_radius`.
pub fn random_disk_value<R: Rng + ?Sized>(rng: &mut R, max_radius: f64) -> Complex64 {
    let r = max_radius * rng.random::<f64>().sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

pub fn random_poly_point<R: Rng + ?Sized>(rng: &mut R, d: usize, max_radius: f64) -> PolyPoint {
    PolyPoint { coords: (0..d).map(|_| random_disk_value(rng, max_radius)).collect() }
}

/// `scale * c * prod_k (z - a_k) / (1 - conj(a_k) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    pub zeros: Vec<Complex64>,
    pub unimodular_constant: Complex64,
    pub scale: f64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, unimodular_constant: Complex64, scale: f64) -> Result<Self> {
        for &a in &zeros {
            DiskPoint::new(a)?;
        }
        if (unimodular_constant.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("Blaschke constant must be unimodular".into()));
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("invalid Blaschke scale {scale}")));
        }
        Ok(Self { zeros, unimodular_constant, scale })
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluates on the closed disk.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + BOUNDARY_TOL {
            return Err(Error::Domain(format!("{z} lies outside the closed disk")));
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        self.zeros
            .iter()
            .fold(self.unimodular_constant * self.scale, |acc, &a| acc * (z - a) / (one - a.conj() * z))
    }
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: Complex64) -> Result<Complex64> {
    b.eval(z)
}

/// `z -> (factors[j](z[permutation[j]]))_j`; the permutation acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct PolydiskAutomorphism {
    permutation: Vec<usize>,
    factors: Vec<MobiusMap>,
}

impl PolydiskAutomorphism {
    /// `permutation` is zero-based: output coordinate `j` reads input
    /// coordinate `permutation[j]`.
    pub fn new(permutation: Vec<usize>, factors: Vec<MobiusMap>) -> Result<Self> {
        let d = permutation.len();
        if factors.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: factors.len() });
        }
        let mut seen = vec![false; d];
        for &p in &permutation {
            if p >= d || seen[p] {
                return Err(Error::Precondition(format!("{permutation:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self { permutation, factors })
    }

    pub fn identity(d: usize) -> Self {
        Self { permutation: (0..d).collect(), factors: vec![MobiusMap::identity(); d] }
    }

    /// Coordinatewise `m_{lambda_j}`, sending `lambda` to the origin.
    pub fn moving_to_origin(lambda: &PolyPoint) -> Self {
        Self {
            permutation: (0..lambda.dim()).collect(),
            factors: lambda.coords.iter().map(|&a| MobiusMap { a, tau: Complex64::new(1.0, 0.0) }).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn factors(&self) -> &[MobiusMap] {
        &self.factors
    }

    pub fn apply(&self, z: &PolyPoint) -> Result<PolyPoint> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.dim() });
        }
        Ok(PolyPoint { coords: self.apply_raw(&z.coords) })
    }

    pub(crate) fn apply_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.permutation
            .iter()
            .zip(&self.factors)
            .map(|(&p, f)| f.apply(z[p]))
            .collect()
    }

    /// The composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let permutation = self.permutation.iter().map(|&p| other.permutation[p]).collect();
        let factors = self
            .permutation
            .iter()
            .zip(&self.factors)
            .map(|(&p, f)| f.compose(&other.factors[p]))
            .collect();
        Ok(Self { permutation, factors })
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim();
        let mut permutation = vec![0; d];
        let mut factors = vec![MobiusMap::identity(); d];
        for (j, &p) in self.permutation.iter().enumerate() {
            permutation[p] = j;
            factors[p] = self.factors[j].inverse();
        }
        Self { permutation, factors }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, max_radius: f64) -> Self {
        let mut permutation: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            let j = rng.random_range(0..=i);
            permutation.swap(i, j);
        }
        let factors = (0..d).map(|_| MobiusMap::random(rng, max_radius)).collect();
        Self { permutation, factors }
    }
}

pub fn apply_automorphism(phi: &PolydiskAutomorphism, z: &PolyPoint) -> Result<PolyPoint> {
    phi.apply(z)
}

/// Kobayashi (and Carathéodory) distance of the polydisk in its
/// pseudo-hyperbolic normalization: the largest coordinatewise `rho`.
pub fn kobayashi_distance_polydisk(l: &PolyPoint, m: &PolyPoint) -> Result<f64> {
    if l.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: m.dim() });
    }
    Ok(l.coords.iter().zip(&m.coords).map(|(&a, &b)| rho(a, b)).fold(0.0, f64::max))
}
