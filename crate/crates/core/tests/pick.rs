use nalgebra::DMatrix;
use num_complex::Complex64;
use polyext::disk::{random_disk_value, DiskPoint, MobiusMap};
use polyext::pick::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Smallest `t` with `[(1 - w_i conj(w_j) / t^2) / (1 - z_i conj(z_j))]` positive
/// semidefinite, by bisection with a Cholesky test.
fn bisection_norm(z: &[Complex64], w: &[Complex64]) -> f64 {
    let n = z.len();
    let psd = |t: f64| {
        let h = |i: usize, j: usize| (ONE - w[i] * w[j].conj() / (t * t)) / (ONE - z[i] * z[j].conj());
        // Real symmetric embedding [[A, -B], [B, A]] of H = A + iB.
        let m = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let v = h(i % n, j % n);
            match (i < n, j < n) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        (m + DMatrix::<f64>::identity(2 * n, 2 * n) * 1e-13).cholesky().is_some()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while !psd(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn random_data(seed: u64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = (0..n).map(|_| random_disk_value(&mut rng, 0.9)).collect();
    let w = (0..n).map(|_| random_disk_value(&mut rng, 1.0)).collect();
    (z, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_point_norm(r in 0.01..0.99f64, t in 0.0..std::f64::consts::TAU, w in 0.0..2.0f64, s in 0.0..std::f64::consts::TAU) {
        let l = Complex64::from_polar(r, t);
        let d = DiskPickData::new(vec![Complex64::new(0.0, 0.0), l], vec![Complex64::new(0.0, 0.0), Complex64::from_polar(w, s)]).unwrap();
        prop_assert!((minimal_norm(&d).unwrap() - w / r).abs() < 1e-9 * (1.0 + w / r));
    }

    #[test]
    fn norm_matches_bisection(seed in 0u64..10_000, n in 2usize..6) {
        let (z, w) = random_data(seed, n);
        let d = DiskPickData::new(z.clone(), w.clone()).unwrap();
        let t = minimal_norm(&d).unwrap();
        let oracle = bisection_norm(&z, &w);
        prop_assert!((t - oracle).abs() < 1e-5 * (1.0 + oracle), "{} vs {}", t, oracle);
    }

    #[test]
    fn norm_is_invariant_under_domain_automorphisms(seed in 0u64..10_000, n in 2usize..5) {
        let (z, w) = random_data(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let m = MobiusMap::random(&mut rng, 0.7);
        let moved = DiskPickData::new(z.iter().map(|&x| m.apply(x)).collect(), w.clone()).unwrap();
        let a = minimal_norm(&DiskPickData::new(z, w).unwrap()).unwrap();
        let b = minimal_norm(&moved).unwrap();
        prop_assert!((a - b).abs() < 1e-7 * (1.0 + a));
    }

    #[test]
    fn norm_is_homogeneous(seed in 0u64..10_000, s in 0.1..5.0f64) {
        let (z, w) = random_data(seed, 3);
        let d = DiskPickData::new(z, w).unwrap();
        let a = minimal_norm(&d).unwrap();
        prop_assert!((minimal_norm(&d.scaled(s)).unwrap() - s * a).abs() < 1e-8 * (1.0 + s * a));
    }

    #[test]
    fn constructed_interpolant_fits_the_data(seed in 0u64..10_000, n in 1usize..5) {
        let (z, w) = random_data(seed, n);
        let d = DiskPickData::new(z.clone(), w.clone()).unwrap();
        let b = schur_construct(&d).unwrap();
        prop_assert!(b.degree() < n);
        prop_assert!((b.scale - minimal_norm(&d).unwrap()).abs() < 1e-7 * (1.0 + b.scale));
        for (x, y) in z.iter().zip(&w) {
            prop_assert!((b.eval(*x).unwrap() - y).norm() < 1e-6 * (1.0 + b.scale));
        }
    }
}

#[test]
fn blaschke_data_are_extremal() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for deg in 1..=3 {
        let zeros: Vec<Complex64> = (0..deg).map(|_| random_disk_value(&mut rng, 0.8)).collect();
        let b = polyext::disk::BlaschkeProduct::new(zeros, ONE, 1.0).unwrap();
        let z: Vec<Complex64> = (0..=deg).map(|_| random_disk_value(&mut rng, 0.8)).collect();
        let w = z.iter().map(|&x| b.eval(x).unwrap()).collect();
        let d = DiskPickData::new(z, w).unwrap();
        assert!((minimal_norm(&d).unwrap() - 1.0).abs() < 1e-7);
        assert!(is_extremal(&d));
        assert!(!is_extremal(&d.scaled(0.5)));
    }
}

#[test]
fn schwarz_lemma_with_derivative() {
    // f(0) = 0, f'(0) = a forces norm |a|; f(0) = 0, f'(0) = 0.5, f(0.5) = 0.25 is met by z/2.
    let d = DiskPickData::with_derivatives(vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 0.0)], vec![(0, Complex64::new(0.0, 0.7))]).unwrap();
    assert!((minimal_norm(&d).unwrap() - 0.7).abs() < 1e-9);
    let d = DiskPickData::with_derivatives(
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.25, 0.0)],
        vec![(0, Complex64::new(0.5, 0.0))],
    )
    .unwrap();
    assert!((minimal_norm(&d).unwrap() - 0.5).abs() < 1e-8);
    let _ = DiskPoint::real(0.0);
}
