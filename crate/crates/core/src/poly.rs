//! Sparse multivariate and dense univariate complex polynomials.

use nalgebra::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Polynomial in `nvars` complex variables stored as sorted
/// `(exponent tuple, coefficient)` terms with no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl MultiPoly {
    /// Builds a polynomial, merging repeated exponents and dropping exact zeros.
    pub fn new(nvars: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Result<Self> {
        for (exp, _) in &terms {
            if exp.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: exp.len() });
            }
        }
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u32>, Complex64)> = Vec::with_capacity(terms.len());
        for (exp, c) in terms {
            match merged.last_mut() {
                Some((e, acc)) if *e == exp => *acc += c,
                _ => merged.push((exp, c)),
            }
        }
        merged.retain(|(_, c)| *c != ZERO);
        Ok(Self { nvars, terms: merged })
    }

    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::new(nvars, vec![(vec![0; nvars], c)]).expect("exponent length matches")
    }

    /// The coordinate function `z_k` (zero-based `k`).
    pub fn variable(nvars: usize, k: usize) -> Self {
        assert!(k < nvars, "variable index out of range");
        let mut exp = vec![0; nvars];
        exp[k] = 1;
        Self { nvars, terms: vec![(exp, ONE)] }
    }

    pub fn monomial(exp: Vec<u32>, c: Complex64) -> Self {
        let nvars = exp.len();
        Self::new(nvars, vec![(exp, c)]).expect("exponent length matches")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[k]).max().unwrap_or(0)
    }

    /// Largest coefficient modulus, used to scale residual tolerances.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.iter().fold(0.0_f64, |acc, (_, c)| acc.max(c.norm()))
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.nvars);
        let powers = self.power_table(z);
        self.terms
            .iter()
            .map(|(exp, c)| {
                exp.iter()
                    .enumerate()
                    .fold(*c, |acc, (k, &e)| acc * powers[k][e as usize])
            })
            .sum()
    }

    fn power_table(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.nvars)
            .map(|k| {
                let deg = self.degree_in(k) as usize;
                let mut p = Vec::with_capacity(deg + 1);
                p.push(ONE);
                for i in 0..deg {
                    p.push(p[i] * z[k]);
                }
                p
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.nvars, terms).expect("same arity")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect();
        Self::new(self.nvars, terms).expect("same arity")
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((exp, c1 * c2));
            }
        }
        Self::new(self.nvars, terms).expect("same arity")
    }

    /// Renames variables: variable `k` of `self` becomes variable `perm[k]`.
    pub fn permute_variables(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut exp = vec![0; self.nvars];
                for (k, &pk) in perm.iter().enumerate() {
                    exp[pk] = e[k];
                }
                (exp, *c)
            })
            .collect();
        Self::new(self.nvars, terms).expect("same arity")
    }

    /// Substitutes every coordinate except `k` from `z` and returns the
    /// resulting polynomial in `z_k`. The entry `z[k]` is ignored.
    pub fn restrict_to_variable(&self, k: usize, z: &[Complex64]) -> UniPoly {
        let mut coeffs = vec![ZERO; self.degree_in(k) as usize + 1];
        let powers = self.power_table(z);
        for (exp, c) in &self.terms {
            let v = exp
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .fold(*c, |acc, (j, &e)| acc * powers[j][e as usize]);
            coeffs[exp[k] as usize] += v;
        }
        UniPoly::new(coeffs)
    }
}

/// Dense univariate polynomial, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Self { coeffs }
    }

    pub fn scale_magnitude(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()))
    }

    /// Degree after discarding leading coefficients below `rel_tol` times the
    /// largest coefficient. `None` for the zero polynomial.
    pub fn effective_degree(&self, rel_tol: f64) -> Option<usize> {
        let scale = self.scale_magnitude();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > rel_tol * scale)
    }

    /// All complex roots, from the eigenvalues of the companion matrix of the
    /// trimmed polynomial followed by a few Newton polishing steps. Leading
    /// coefficients below `1e-13` relative are treated as zero, so roots
    /// escaping to infinity are dropped.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.effective_degree(1e-13) else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[deg];
        let monic: Vec<Complex64> = self.coeffs[..=deg].iter().map(|c| c / lead).collect();
        let raw = if deg == 1 {
            vec![-monic[0]]
        } else {
            let mut comp = CMatrix::zeros(deg, deg);
            for i in 1..deg {
                comp[(i, i - 1)] = ONE;
            }
            for i in 0..deg {
                comp[(i, deg - 1)] = -monic[i];
            }
            match Schur::try_new(comp, 1e-15, 10_000).and_then(|s| s.eigenvalues()) {
                Some(ev) => ev.iter().copied().collect(),
                None => return Vec::new(),
            }
        };
        let p = UniPoly::new(monic);
        let dp = p.derivative();
        raw.into_iter().map(|r| polish(&p, &dp, r)).collect()
    }
}

fn polish(p: &UniPoly, dp: &UniPoly, mut r: Complex64) -> Complex64 {
    let mut best = p.eval(r).norm();
    for _ in 0..4 {
        let d = dp.eval(r);
        if d.norm() == 0.0 {
            break;
        }
        let cand = r - p.eval(r) / d;
        let val = p.eval(cand).norm();
        if !(val < best) {
            break;
        }
        best = val;
        r = cand;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let p = MultiPoly::new(
            2,
            vec![(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(2.0, 0.0)), (vec![1, 0], c(-1.0, 0.0))],
        )
        .unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].0, vec![0, 1]);
    }

    #[test]
    fn eval_product_of_variables() {
        let p = MultiPoly::variable(3, 0).mul(&MultiPoly::variable(3, 2));
        let z = [c(0.5, 0.0), c(9.0, 0.0), c(0.0, 0.5)];
        assert!((p.eval(&z) - c(0.0, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn restriction_collects_powers() {
        // z3^2 - z1 z2 restricted at z1 = 0.5, z2 = 0.5 is z3^2 - 0.25.
        let p = MultiPoly::new(3, vec![(vec![0, 0, 2], c(1.0, 0.0)), (vec![1, 1, 0], c(-1.0, 0.0))])
            .unwrap();
        let u = p.restrict_to_variable(2, &[c(0.5, 0.0), c(0.5, 0.0), c(7.0, 0.0)]);
        assert_eq!(u.coeffs, vec![c(-0.25, 0.0), ZERO, c(1.0, 0.0)]);
    }

    #[test]
    fn roots_of_known_cubic() {
        let targets = [c(0.3, 0.1), c(-0.5, 0.2), c(0.0, -0.9)];
        let mut p = UniPoly::new(vec![ONE]);
        for r in targets {
            let mut next = vec![ZERO; p.coeffs.len() + 1];
            for (k, a) in p.coeffs.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            p = UniPoly::new(next);
        }
        let roots = p.roots();
        assert_eq!(roots.len(), 3);
        for t in targets {
            let best = roots.iter().map(|r| (r - t).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-13, "missing root {t}");
        }
    }

    #[test]
    fn vanishing_leading_coefficient_drops_root() {
        let p = UniPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-20, 0.0)]);
        let roots = p.roots();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] + c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn permutation_relabels() {
        let p = MultiPoly::variable(3, 0);
        let q = p.permute_variables(&[2, 0, 1]);
        assert_eq!(q, MultiPoly::variable(3, 2));
    }
}
