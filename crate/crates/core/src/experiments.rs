//! End-to-end runs: the non-extension example for `z_3 = z_1 + z_2`, the
//! extension versus von Neumann dichotomy on finite data, and the circle-image
//! test for extremal functions on a variety.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agler::{agler_feasible, schur_agler_norm, AglerDecomposition, AglerOutcome, PolyPickData, SchurAglerNorm};
use crate::disk::{rho, PolyPoint};
use crate::error::{Error, Result};
use crate::operators::{torus_sup, violation_witness, ViolationWitness, VnOptions};
use crate::poly::MultiPoly;
use crate::variety::{builtin_v0, equal_area_disk, AlgebraicVariety};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Witnesses must satisfy the strict inequality with at least this slack.
pub const WITNESS_SLACK: f64 = 1e-6;
/// Tolerance for calling a norm equal to one.
pub const UNIT_NORM_TOL: f64 = 1e-3;
/// Norms up to `1 + EXTENSION_TOL` count as extensions without norm increase.
pub const EXTENSION_TOL: f64 = 1e-4;

/// Sampling of the closure of a variety near the torus.
#[derive(Debug, Clone, Copy)]
pub struct ClosureOptions {
    /// Shells at `|z| = 1 - 10^-k` for `k` in this range.
    pub shells: (u32, u32),
    /// Angular grid per shell coordinate.
    pub angular: usize,
    /// Equal-area points per disk for the interior grid.
    pub interior: usize,
    /// Number of directions `tau` on the circle.
    pub bins: usize,
    /// Grid starts refined per direction.
    pub starts: usize,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        Self { shells: (2, 6), angular: 256, interior: 64, bins: 720, starts: 2 }
    }
}

/// Omitted arc measured with the sample up to one shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellGap {
    pub k: u32,
    pub radius: f64,
    /// A direction `tau` counts as hit when `max Re(conj(tau) F) >= 1 - eta`.
    pub eta: f64,
    pub gap: f64,
    /// Argument of the midpoint of the longest omitted arc.
    pub midpoint: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Shell(f64),
    Fixed(Complex64),
}

#[derive(Debug, Clone, Copy)]
struct SamplePoint {
    slots: [Slot; 2],
    radius: f64,
    root: Complex64,
    value: Complex64,
}

struct ClosureSampler<'a> {
    variety: &'a AlgebraicVariety,
    pair: (usize, usize),
    dependent: usize,
    f: &'a (dyn Fn(&[Complex64]) -> Complex64 + Sync),
}

impl ClosureSampler<'_> {
    fn new<'a>(variety: &'a AlgebraicVariety, f: &'a (dyn Fn(&[Complex64]) -> Complex64 + Sync)) -> Result<ClosureSampler<'a>> {
        if variety.dim() != 3 {
            return Err(Error::Precondition("closure sampling needs d = 3".into()));
        }
        let dependent = (0..3)
            .rev()
            .find(|&k| variety.generators().iter().any(|g| g.degree_in(k) > 0))
            .ok_or_else(|| Error::DegenerateDirection("all generators are constant".into()))?;
        let pair = match dependent {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        Ok(ClosureSampler { variety, pair, dependent, f })
    }

    fn domain(slots: &[Slot; 2], radius: f64) -> [Complex64; 2] {
        slots.map(|s| match s {
            Slot::Shell(a) => Complex64::from_polar(radius, a),
            Slot::Fixed(w) => w,
        })
    }

    fn point(&self, dom: [Complex64; 2], root: Complex64) -> [Complex64; 3] {
        let mut z = [ZERO; 3];
        z[self.pair.0] = dom[0];
        z[self.pair.1] = dom[1];
        z[self.dependent] = root;
        z
    }

    /// Points of the closure over a domain point: roots in the closed disk.
    fn realize(&self, slots: [Slot; 2], radius: f64) -> Vec<SamplePoint> {
        let dom = Self::domain(&slots, radius);
        let z = self.point(dom, ZERO);
        let Some(roots) = self.variety.fiber_roots(self.dependent, &z) else {
            return Vec::new();
        };
        roots
            .into_iter()
            .filter(|r| r.norm() <= 1.0 + 1e-12)
            .map(|root| SamplePoint { slots, radius, root, value: (self.f)(&self.point(dom, root)) })
            .collect()
    }

    /// The same sheet after moving the shell angles, if it stays in the closed disk.
    fn track(&self, p: &SamplePoint, slots: [Slot; 2]) -> Option<SamplePoint> {
        let dom = Self::domain(&slots, p.radius);
        let roots = self.variety.fiber_roots(self.dependent, &self.point(dom, ZERO))?;
        let root = roots.into_iter().min_by(|a, b| (a - p.root).norm().total_cmp(&(b - p.root).norm()))?;
        if root.norm() > 1.0 + 1e-12 || (root - p.root).norm() > 0.1 {
            return None;
        }
        Some(SamplePoint { slots, radius: p.radius, root, value: (self.f)(&self.point(dom, root)) })
    }

    fn interior(&self, n: usize) -> Vec<SamplePoint> {
        let disk = equal_area_disk(n);
        disk.par_iter()
            .flat_map_iter(|&a| disk.iter().flat_map(move |&b| self.realize([Slot::Fixed(a), Slot::Fixed(b)], 0.0)))
            .collect()
    }

    /// Both domain coordinates on the circle of radius `r`, or one of them on
    /// it and the other on the interior grid.
    fn shell(&self, r: f64, angular: usize, interior: usize) -> Vec<SamplePoint> {
        let angles: Vec<f64> = (0..angular).map(|g| TAU * g as f64 / angular as f64).collect();
        let disk = equal_area_disk(interior);
        let mut slots: Vec<[Slot; 2]> = Vec::new();
        for &a in &angles {
            for &b in &angles {
                slots.push([Slot::Shell(a), Slot::Shell(b)]);
            }
            for &w in &disk {
                slots.push([Slot::Shell(a), Slot::Fixed(w)]);
                slots.push([Slot::Fixed(w), Slot::Shell(a)]);
            }
        }
        slots.par_iter().flat_map_iter(|&s| self.realize(s, r)).collect()
    }

    /// Pattern search on the shell angles for `max Re(conj(tau) F)`.
    fn refine(&self, start: &SamplePoint, tau: Complex64, h0: f64) -> f64 {
        let score = |p: &SamplePoint| (tau.conj() * p.value).re;
        let mut best = *start;
        let mut val = score(&best);
        let free: Vec<usize> = (0..2).filter(|&i| matches!(best.slots[i], Slot::Shell(_))).collect();
        if free.is_empty() {
            return val;
        }
        let mut h = h0;
        while h > 1e-10 {
            let mut moved = false;
            for &i in &free {
                for sign in [1.0, -1.0] {
                    let mut slots = best.slots;
                    if let Slot::Shell(a) = slots[i] {
                        slots[i] = Slot::Shell(a + sign * h);
                    }
                    if let Some(p) = self.track(&best, slots) {
                        let v = score(&p);
                        if v > val {
                            best = p;
                            val = v;
                            moved = true;
                        }
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        val
    }

    fn best_per_bin(&self, pts: &[SamplePoint], bins: usize, starts: usize, h0: f64) -> Vec<f64> {
        (0..bins)
            .into_par_iter()
            .map(|b| {
                let tau = bin_direction(b, bins);
                let mut top: Vec<(f64, usize)> = Vec::with_capacity(starts + 1);
                for (i, p) in pts.iter().enumerate() {
                    let v = (tau.conj() * p.value).re;
                    if top.len() < starts || v > top[top.len() - 1].0 {
                        top.push((v, i));
                        top.sort_by(|x, y| y.0.total_cmp(&x.0));
                        top.truncate(starts);
                    }
                }
                top.iter().map(|&(_, i)| self.refine(&pts[i], tau, h0)).fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

fn bin_direction(b: usize, bins: usize) -> Complex64 {
    Complex64::from_polar(1.0, -std::f64::consts::PI + TAU * (b as f64 + 0.5) / bins as f64)
}

/// Measure and midpoint of the omitted directions.
fn omitted(best: &[f64], eta: f64) -> (f64, Option<f64>) {
    let bins = best.len();
    let hit: Vec<bool> = best.iter().map(|&g| g >= 1.0 - eta).collect();
    let missing = hit.iter().filter(|&&h| !h).count();
    let gap = TAU * missing as f64 / bins as f64;
    if missing == 0 {
        return (0.0, None);
    }
    if missing == bins {
        return (gap, Some(0.0));
    }
    let start = hit.iter().position(|&h| h).expect("some bin is hit");
    let (mut longest, mut run, mut run_start, mut best_start) = (0usize, 0usize, 0usize, 0usize);
    for step in 1..=bins {
        let j = (start + step) % bins;
        if hit[j] {
            if run > longest {
                longest = run;
                best_start = run_start;
            }
            run = 0;
        } else {
            if run == 0 {
                run_start = j;
            }
            run += 1;
        }
    }
    let mid = best_start as f64 + (longest as f64 - 1.0) / 2.0;
    (gap, Some(bin_direction(0, bins).arg() + TAU * mid / bins as f64).map(|a| Complex64::from_polar(1.0, a).arg()))
}

/// Omitted arc of `F` on the closure of a variety, shell by shell.
fn closure_gaps(variety: &AlgebraicVariety, f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync), opts: &ClosureOptions) -> Result<Vec<ShellGap>> {
    let sampler = ClosureSampler::new(variety, f)?;
    let h0 = TAU / opts.angular as f64;
    let interior = sampler.interior(opts.interior);
    let mut best = if interior.is_empty() {
        vec![f64::NEG_INFINITY; opts.bins]
    } else {
        sampler.best_per_bin(&interior, opts.bins, opts.starts, h0)
    };
    let mut out = Vec::new();
    for k in opts.shells.0..=opts.shells.1 {
        let radius = 1.0 - 10f64.powi(-(k as i32));
        let pts = sampler.shell(radius, opts.angular, opts.interior);
        if !pts.is_empty() {
            let shell_best = sampler.best_per_bin(&pts, opts.bins, opts.starts, h0);
            for (b, s) in best.iter_mut().zip(shell_best) {
                *b = b.max(s);
            }
        }
        let eta = 10f64.powf(-(k as f64) / 2.0);
        let (gap, midpoint) = omitted(&best, eta);
        out.push(ShellGap { k, radius, eta, gap, midpoint });
    }
    if out.is_empty() {
        return Err(Error::Precondition("empty shell range".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exg1Verdict {
    ViolationDetected,
    /// The three-point problem did not certify as extremal.
    NotExtremal,
    /// No direction of the circle was missed.
    NoOmittedArc,
}

impl Exg1Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ViolationDetected => "violation_detected",
            Self::NotExtremal => "not_extremal",
            Self::NoOmittedArc => "no_omitted_arc",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Exg1Report {
    pub m: f64,
    pub zeta: f64,
    pub xi: f64,
    /// `rho(h(zeta, zeta phi_m(zeta)) / zeta, h(xi, xi phi_m(xi)) / xi)`.
    pub eq_ex_lhs: f64,
    /// `rho(zeta, xi)`.
    pub eq_ex_rhs: f64,
    pub search_resolution: usize,
    pub data: PolyPickData,
    pub sa_norm: SchurAglerNorm,
    /// Omitted arc at the outermost shell.
    pub circle_gap: f64,
    pub shells: Vec<ShellGap>,
    pub verdict: Exg1Verdict,
}

impl Exg1Report {
    pub fn slack(&self) -> f64 {
        self.eq_ex_rhs - self.eq_ex_lhs
    }
}

fn mobius_real(m: f64, z: Complex64) -> Complex64 {
    (m - z) / (1.0 - m * z)
}

/// The non-extension example with default closure sampling.
pub fn exg1_reproduce(m: f64, search_resolution: usize) -> Result<Exg1Report> {
    exg1_reproduce_with(m, search_resolution, &ClosureOptions::default())
}

/// Real witness pair and the three-point data on `z_3 = z_1 + z_2`.
#[derive(Debug, Clone)]
pub struct Exg1Witness {
    pub zeta: f64,
    pub xi: f64,
    pub eq_ex_lhs: f64,
    pub eq_ex_rhs: f64,
    /// `{0 -> 0, (x, x phi_m(x), x (1 + phi_m(x))) -> x phi_m(x)}` for `x = zeta, xi`.
    pub data: PolyPickData,
}

/// Max-slack pair on the grid `k / (N + 1)`.
pub fn exg1_witness(m: f64, search_resolution: usize) -> Result<Exg1Witness> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Precondition(format!("m = {m} must lie in (0, 1)")));
    }
    if search_resolution < 2 {
        return Err(Error::Precondition("search resolution must be at least 2".into()));
    }
    let phi = |x: f64| mobius_real(m, Complex64::new(x, 0.0)).re;
    // Grid x = k / (N + 1); admissible when 1 + phi_m(x) and x (1 + phi_m(x)) lie in the disk.
    let xs: Vec<f64> = (1..=search_resolution)
        .map(|k| k as f64 / (search_resolution + 1) as f64)
        .filter(|&x| (1.0 + phi(x)).abs() < 1.0 && (x * (1.0 + phi(x))).abs() < 1.0)
        .collect();
    let best = (0..xs.len())
        .into_par_iter()
        .filter_map(|i| {
            let z = xs[i];
            let pz = Complex64::new(1.0 + phi(z), 0.0);
            (i + 1..xs.len())
                .map(|j| {
                    let x = xs[j];
                    let px = Complex64::new(1.0 + phi(x), 0.0);
                    (rho(Complex64::new(z, 0.0), Complex64::new(x, 0.0)) - rho(pz, px), i, j)
                })
                .max_by(|a, b| a.0.total_cmp(&b.0))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let Some((slack, i, j)) = best.filter(|b| b.0 >= WITNESS_SLACK) else {
        return Err(Error::ResolutionExhausted {
            resolution: search_resolution,
            detail: format!(
                "no real pair with slack >= {WITNESS_SLACK:e} among {} admissible grid points (best {:e}); try m closer to 1 or a finer grid",
                xs.len(),
                best.map_or(f64::NEG_INFINITY, |b| b.0)
            ),
        });
    };
    let (zeta, xi) = (xs[i], xs[j]);
    let eq_ex_rhs = rho(Complex64::new(zeta, 0.0), Complex64::new(xi, 0.0));
    let eq_ex_lhs = rho(Complex64::new(1.0 + phi(zeta), 0.0), Complex64::new(1.0 + phi(xi), 0.0));
    debug_assert!((eq_ex_rhs - eq_ex_lhs - slack).abs() < 1e-12);

    let v0 = builtin_v0();
    let node = |x: f64| PolyPoint::from_reals(&[x, x * phi(x), x * (1.0 + phi(x))]);
    let nodes = vec![PolyPoint::origin(3), node(zeta)?, node(xi)?];
    for p in &nodes {
        if !v0.contains(p, 1e-12)? {
            return Err(Error::ContractViolation(format!("node {:?} is off the variety", p.coords())));
        }
    }
    let targets = vec![ZERO, Complex64::new(zeta * phi(zeta), 0.0), Complex64::new(xi * phi(xi), 0.0)];
    let data = PolyPickData::new(nodes, targets)?;
    Ok(Exg1Witness { zeta, xi, eq_ex_lhs, eq_ex_rhs, data })
}

pub fn exg1_reproduce_with(m: f64, search_resolution: usize, opts: &ClosureOptions) -> Result<Exg1Report> {
    let Exg1Witness { zeta, xi, eq_ex_lhs, eq_ex_rhs, data } = exg1_witness(m, search_resolution)?;
    let sa_norm = schur_agler_norm(&data)?;
    let v0 = builtin_v0();

    let f = move |z: &[Complex64]| (z[0] * mobius_real(m, z[0]) + z[1]) * 0.5;
    let shells = closure_gaps(&v0, &f, opts)?;
    let circle_gap = shells.last().expect("nonempty").gap;
    let verdict = if (sa_norm.value - 1.0).abs() > UNIT_NORM_TOL {
        Exg1Verdict::NotExtremal
    } else if circle_gap > 0.0 {
        Exg1Verdict::ViolationDetected
    } else {
        Exg1Verdict::NoOmittedArc
    };
    Ok(Exg1Report {
        m,
        zeta,
        xi,
        eq_ex_lhs,
        eq_ex_rhs,
        search_resolution,
        data,
        sa_norm,
        circle_gap,
        shells,
        verdict,
    })
}

#[derive(Debug, Clone)]
pub enum ExtensionOutcome {
    /// Norm at most `1 + 1e-4`; a decomposition at the reported level.
    ExtensionConsistent(AglerDecomposition),
    /// Norm above `1 + 1e-4`; a commuting tuple on which the interpolant
    /// exceeds norm one.
    VonNeumannViolation(Box<ViolationWitness>),
}

#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub sa_norm: SchurAglerNorm,
    pub outcome: ExtensionOutcome,
}

/// Runs the norm computation on data from a variety and follows whichever
/// branch it lands in.
pub fn extension_vs_vn(variety: &AlgebraicVariety, data: &PolyPickData, f_values: &[Complex64], vn: &VnOptions) -> Result<ExtensionReport> {
    for p in data.nodes() {
        if !variety.contains(p, 1e-8)? {
            return Err(Error::Precondition(format!("node {:?} is not on the variety", p.coords())));
        }
    }
    let data = data.with_targets(f_values.to_vec())?;
    let sa_norm = schur_agler_norm(&data)?;
    let outcome = if sa_norm.value <= 1.0 + EXTENSION_TOL {
        let t = if sa_norm.value <= 1.0 - 1e-5 { 1.0 } else { sa_norm.value * (1.0 + 1e-5) };
        match agler_feasible(&data, t)? {
            AglerOutcome::Feasible(dec) => ExtensionOutcome::ExtensionConsistent(dec),
            AglerOutcome::Infeasible(_) => {
                return Err(Error::Undecided { t, detail: "norm computation and feasibility disagree".into() });
            }
        }
    } else {
        ExtensionOutcome::VonNeumannViolation(Box::new(violation_witness(&data, f_values, vn)?))
    };
    Ok(ExtensionReport { sa_norm, outcome })
}

#[derive(Debug, Clone)]
pub struct CircleImageReport {
    pub sa_norm: SchurAglerNorm,
    pub is_extremal_evidence: bool,
    pub omitted_arc: f64,
    pub shells: Vec<ShellGap>,
    pub implication: String,
}

/// Extremality evidence for `phi` on the nodes of `data`, and the arc of the
/// circle missed by `phi` on the closure of `variety`.
pub fn circle_image_test(variety: &AlgebraicVariety, phi: &MultiPoly, data: &PolyPickData, opts: &ClosureOptions) -> Result<CircleImageReport> {
    if phi.nvars() != 3 || variety.dim() != 3 || data.dim() != 3 {
        return Err(Error::Precondition("circle-image test works on the tridisk".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let sup = torus_sup(phi, 24, 9, &mut rng);
    if sup > 1.0 + 1e-9 {
        return Err(Error::Precondition(format!("phi reaches modulus {sup} on the torus")));
    }
    let values: Vec<Complex64> = data.nodes().iter().map(|p| phi.eval(p.coords())).collect();
    let interpolates = values.iter().zip(data.targets()).all(|(a, b)| (a - b).norm() <= 1e-9);
    let sa_norm = schur_agler_norm(&data.with_targets(values)?)?;
    let is_extremal_evidence = interpolates && (sa_norm.value - 1.0).abs() <= UNIT_NORM_TOL;
    let f = |z: &[Complex64]| phi.eval(z);
    let shells = closure_gaps(variety, &f, opts)?;
    let omitted_arc = shells.last().expect("nonempty").gap;
    let implication = match (is_extremal_evidence, omitted_arc > 0.0) {
        (true, true) => "phi is numerically extremal and misses an arc of the circle on the sampled closure; if the variety is relatively polynomially convex, it fails the extension property".to_string(),
        (true, false) => "phi is numerically extremal and its image on the sampled closure meets every direction of the circle; no conclusion".to_string(),
        (false, _) => "phi is not extremal for the data; the circle-image criterion does not apply".to_string(),
    };
    Ok(CircleImageReport { sa_norm, is_extremal_evidence, omitted_arc, shells, implication })
}
