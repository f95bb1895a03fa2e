use num_complex::Complex64;
use polyext::agler::*;
use polyext::disk::{random_disk_value, random_poly_point, PolyPoint, PolydiskAutomorphism};
use polyext::pick::{minimal_norm, DiskPickData};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn one_variable(seed: u64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<Complex64> = (0..n).map(|_| random_disk_value(&mut rng, 0.9)).collect();
    let w: Vec<Complex64> = (0..n).map(|_| random_disk_value(&mut rng, 1.0)).collect();
    (z, w)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_variable_norm_is_the_pick_norm(seed in 0u64..10_000, n in 2usize..5) {
        let (z, w) = one_variable(seed, n);
        let pick = minimal_norm(&DiskPickData::new(z.clone(), w.clone()).unwrap()).unwrap();
        let nodes = z.iter().map(|&x| PolyPoint::new(vec![x]).unwrap()).collect();
        let sa = schur_agler_norm(&PolyPickData::new(nodes, w).unwrap()).unwrap();
        prop_assert!(rel(sa.value, pick) < 1e-4, "{} vs {}", sa.value, pick);
        prop_assert!(!sa.upper_bound_only);
    }

    #[test]
    fn diagonal_data_reduce_to_one_variable(seed in 0u64..10_000, n in 2usize..5) {
        let (z, w) = one_variable(seed, n);
        let pick = minimal_norm(&DiskPickData::new(z.clone(), w.clone()).unwrap()).unwrap();
        let nodes = z.iter().map(|&x| PolyPoint::new(vec![x, x]).unwrap()).collect();
        let sa = schur_agler_norm(&PolyPickData::new(nodes, w).unwrap()).unwrap();
        prop_assert!(rel(sa.value, pick) < 1e-4, "{} vs {}", sa.value, pick);
    }

    #[test]
    fn norm_is_invariant_under_automorphisms(seed in 0u64..10_000, d in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<PolyPoint> = (0..3).map(|_| random_poly_point(&mut rng, d, 0.8)).collect();
        let w: Vec<Complex64> = (0..3).map(|_| random_disk_value(&mut rng, 0.8)).collect();
        let phi = PolydiskAutomorphism::random(&mut rng, d, 0.5);
        let moved: Vec<PolyPoint> = nodes.iter().map(|p| phi.apply(p).unwrap()).collect();
        let a = schur_agler_norm(&PolyPickData::new(nodes, w.clone()).unwrap()).unwrap();
        let b = schur_agler_norm(&PolyPickData::new(moved, w).unwrap()).unwrap();
        prop_assert!(rel(a.value, b.value) < 1e-4, "{} vs {}", a.value, b.value);
        prop_assert_eq!(a.upper_bound_only, d >= 3);
    }

    #[test]
    fn certificates_on_both_sides(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<PolyPoint> = (0..4).map(|_| random_poly_point(&mut rng, 2, 0.9)).collect();
        let w: Vec<Complex64> = (0..4).map(|_| random_disk_value(&mut rng, 0.9)).collect();
        let data = PolyPickData::new(nodes, w).unwrap();
        let sa = schur_agler_norm(&data).unwrap();
        prop_assert!(sa.lower <= sa.value * (1.0 + 1e-12));
        prop_assert!(sa.value - sa.lower <= NORM_TOL * sa.value);
        match agler_feasible(&data, sa.value * 1.01).unwrap() {
            AglerOutcome::Feasible(dec) => {
                dec.verify(&data).unwrap();
                prop_assert!(dec.min_eigenvalue() >= -1e-9);
            }
            AglerOutcome::Infeasible(_) => prop_assert!(false, "infeasible above the norm"),
        }
        match agler_feasible(&data, sa.value * 0.99).unwrap() {
            AglerOutcome::Infeasible(k) => {
                prop_assert!(k.tested_form_min_eigenvalue(&data, sa.value * 0.99) < 0.0);
                for i in 0..k.dim() {
                    prop_assert!((k.k[(i, i)].re - 1.0).abs() < 1e-12);
                }
            }
            AglerOutcome::Feasible(_) => prop_assert!(false, "feasible below the norm"),
        }
    }
}

#[test]
fn diagonal_closed_form() {
    for (r, w) in [(0.5, 0.7), (0.3, 0.2), (0.9, 0.95)] {
        let data = PolyPickData::new(vec![PolyPoint::origin(2), PolyPoint::from_reals(&[r, r]).unwrap()], vec![Complex64::new(0.0, 0.0), Complex64::new(w, 0.0)]).unwrap();
        let sa = schur_agler_norm(&data).unwrap();
        assert!((sa.value - w / r).abs() < 1e-4 * (w / r), "{} vs {}", sa.value, w / r);
    }
}

#[test]
fn zero_targets_have_zero_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nodes: Vec<PolyPoint> = (0..3).map(|_| random_poly_point(&mut rng, 2, 0.9)).collect();
    let data = PolyPickData::new(nodes, vec![Complex64::new(0.0, 0.0); 3]).unwrap();
    assert!(schur_agler_norm(&data).unwrap().value < 1e-9);
}

#[test]
fn membership_evidence_for_an_extracted_kernel() {
    let data = PolyPickData::new(vec![PolyPoint::origin(2), PolyPoint::from_reals(&[0.5, 0.5]).unwrap()], vec![Complex64::new(0.0, 0.0), Complex64::new(0.7, 0.0)]).unwrap();
    let AglerOutcome::Infeasible(k) = agler_feasible(&data, 1.0).unwrap() else {
        panic!("expected a dual kernel");
    };
    let ev = dual_kernel_membership_evidence(&k, data.nodes(), 500, 1).unwrap();
    assert!(ev.is_evidence(), "{} {}", ev.min_eigenvalue, ev.worst_function);
}
