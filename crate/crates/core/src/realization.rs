//! Random members of the Schur–Agler class of the polydisk.
//!
//! Transfer-function realizations `A + B Delta(z) (I - D Delta(z))^{-1} C` of
//! a unitary colligation `[[A, B], [C, D]]` with `Delta(z)` block diagonal in
//! the coordinates, plus products and averages of coordinate Möbius factors.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::disk::MobiusMap;
use crate::linalg::{self, CMatrix};
use crate::poly::MultiPoly;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Transfer function of a unitary colligation of size `1 + sum(blocks)`.
#[derive(Debug, Clone)]
pub struct TransferRealization {
    unitary: CMatrix,
    /// Block size attached to each coordinate.
    blocks: Vec<usize>,
}

impl TransferRealization {
    /// Random colligation with block sizes in `0..=max_block` (at least one
    /// nonzero block).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, max_block: usize) -> Self {
        let mut blocks: Vec<usize> = (0..d).map(|_| rng.random_range(0..=max_block)).collect();
        if blocks.iter().all(|&b| b == 0) {
            let j = rng.random_range(0..d);
            blocks[j] = 1;
        }
        let m: usize = blocks.iter().sum();
        Self { unitary: linalg::random_unitary(m + 1, rng), blocks }
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn state_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    fn delta(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(r, &b)| std::iter::repeat_n(z[r], b))
            .collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        let m = self.state_dim();
        let u = &self.unitary;
        let delta = self.delta(z);
        let lhs = CMatrix::from_fn(m, m, |i, j| {
            let id = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
            id - u[(1 + i, 1 + j)] * delta[j]
        });
        let rhs = DVector::from_fn(m, |i, _| u[(1 + i, 0)]);
        let x = lhs.lu().solve(&rhs).expect("I - D Delta is invertible inside the polydisk");
        u[(0, 0)] + (0..m).map(|j| u[(0, 1 + j)] * delta[j] * x[j]).sum::<Complex64>()
    }

    /// Taylor polynomial of total degree at most `degree`.
    pub fn truncate(&self, degree: u32) -> MultiPoly {
        let d = self.dim();
        let m = self.state_dim();
        let u = &self.unitary;
        let offsets: Vec<usize> = self
            .blocks
            .iter()
            .scan(0, |acc, &b| {
                let start = *acc;
                *acc += b;
                Some(start)
            })
            .collect();
        let project = |r: usize, y: &DVector<Complex64>| {
            let mut out = DVector::zeros(m);
            for i in offsets[r]..offsets[r] + self.blocks[r] {
                out[i] = y[i];
            }
            out
        };
        let dmat = CMatrix::from_fn(m, m, |i, j| u[(1 + i, 1 + j)]);
        let bvec = DVector::from_fn(m, |j, _| u[(0, 1 + j)]);

        let mut y: BTreeMap<Vec<u32>, DVector<Complex64>> = BTreeMap::new();
        y.insert(vec![0; d], DVector::from_fn(m, |i, _| u[(1 + i, 0)]));
        let mut terms = vec![(vec![0; d], u[(0, 0)])];
        let mut frontier: Vec<Vec<u32>> = vec![vec![0; d]];
        for _ in 0..degree {
            let mut next: BTreeMap<Vec<u32>, DVector<Complex64>> = BTreeMap::new();
            let mut coeff: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            for alpha in &frontier {
                let ya = &y[alpha];
                for r in 0..d {
                    let mut beta = alpha.clone();
                    beta[r] += 1;
                    let py = project(r, ya);
                    *coeff.entry(beta.clone()).or_insert(Complex64::new(0.0, 0.0)) += bvec.dot(&py);
                    let entry = next.entry(beta).or_insert_with(|| DVector::zeros(m));
                    *entry += &dmat * &py;
                }
            }
            terms.extend(coeff);
            frontier = next.keys().cloned().collect();
            y.extend(next);
        }
        MultiPoly::new(d, terms).expect("exponents have length d")
    }
}

/// A randomly drawn function in the closed Schur–Agler unit ball.
#[derive(Debug, Clone)]
pub enum SchurAglerFunction {
    /// `tau * prod m_k(z_{coord_k})`.
    MobiusProduct { tau: Complex64, factors: Vec<(usize, MobiusMap)> },
    /// Convex combination `s f + (1 - s) g`.
    Average { s: f64, f: Box<SchurAglerFunction>, g: Box<SchurAglerFunction> },
    Realization(TransferRealization),
}

impl SchurAglerFunction {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        match rng.random_range(0..3) {
            0 => Self::random_product(rng, d),
            1 => Self::Average {
                s: rng.random(),
                f: Box::new(Self::random_product(rng, d)),
                g: Box::new(Self::Realization(TransferRealization::random(rng, d, 3))),
            },
            _ => Self::Realization(TransferRealization::random(rng, d, 3)),
        }
    }

    fn random_product<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let count = rng.random_range(1..=3);
        let factors = (0..count)
            .map(|_| (rng.random_range(0..d), MobiusMap::random(rng, 0.95)))
            .collect();
        let tau = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        Self::MobiusProduct { tau, factors }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Self::MobiusProduct { tau, factors } => factors.iter().fold(*tau, |acc, (j, m)| acc * m.apply(z[*j])),
            Self::Average { s, f, g } => f.eval(z) * *s + g.eval(z) * (1.0 - s),
            Self::Realization(r) => r.eval(z),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::MobiusProduct { factors, .. } => format!("product of {} coordinate Mobius factors", factors.len()),
            Self::Average { s, f, g } => format!("average ({s:.3}) of [{}] and [{}]", f.describe(), g.describe()),
            Self::Realization(r) => format!("unitary colligation realization with blocks {:?}", r.blocks()),
        }
    }
}
