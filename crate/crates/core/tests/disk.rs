use num_complex::Complex64;
use polyext::disk::*;
use proptest::prelude::*;

fn disk_value(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t): (f64, f64)| Complex64::from_polar(r, t))
}

fn unimodular() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(|t| Complex64::from_polar(1.0, t))
}

/// `rho^2 = 1 - (1 - |z|^2)(1 - |w|^2) / |1 - conj(z) w|^2`.
fn rho_oracle(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - z.conj() * w).norm_sqr();
    (1.0 - (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()) / den).max(0.0).sqrt()
}

proptest! {
    #[test]
    fn rho_matches_the_product_form(z in disk_value(0.99), w in disk_value(0.99)) {
        prop_assert!((rho(z, w) - rho_oracle(z, w)).abs() < 1e-10);
        prop_assert!((rho(z, w) - rho(w, z)).abs() < 1e-15);
        prop_assert!(rho(z, w) < 1.0);
    }

    #[test]
    fn mobius_maps_preserve_rho(a in disk_value(0.95), tau in unimodular(), z in disk_value(0.95), w in disk_value(0.95)) {
        let m = MobiusMap::new(DiskPoint::new(a).unwrap(), tau).unwrap();
        prop_assert!((rho(m.apply(z), m.apply(w)) - rho(z, w)).abs() < 1e-12);
        prop_assert!((m.inverse().apply(m.apply(z)) - z).norm() < 1e-10);
        prop_assert!(m.apply(a).norm() < 1e-15);
    }

    #[test]
    fn composition_agrees_with_application(
        a in disk_value(0.9), s in unimodular(), b in disk_value(0.9), t in unimodular(), z in disk_value(0.95)
    ) {
        let f = MobiusMap::new(DiskPoint::new(a).unwrap(), s).unwrap();
        let g = MobiusMap::new(DiskPoint::new(b).unwrap(), t).unwrap();
        prop_assert!((f.compose(&g).apply(z) - f.apply(g.apply(z))).norm() < 1e-9);
    }

    #[test]
    fn derivative_matches_difference_quotient(a in disk_value(0.9), tau in unimodular(), z in disk_value(0.9)) {
        let m = MobiusMap::new(DiskPoint::new(a).unwrap(), tau).unwrap();
        let h = 1e-6;
        let fd = (m.apply(z + h) - m.apply(z - h)) / (2.0 * h);
        prop_assert!((fd - m.derivative(z)).norm() < 1e-6 * (1.0 + fd.norm()));
    }

    #[test]
    fn rho_triangle_inequality(x in disk_value(0.99), y in disk_value(0.99), z in disk_value(0.99)) {
        prop_assert!(rho(x, z) <= rho(x, y) + rho(y, z) + 1e-12);
    }

    #[test]
    fn blaschke_products_are_unimodular_on_the_circle(
        zeros in prop::collection::vec(disk_value(0.95), 0..5), c in unimodular(), theta in 0.0..std::f64::consts::TAU
    ) {
        let b = BlaschkeProduct::new(zeros.clone(), c, 1.0).unwrap();
        prop_assert!((b.eval(Complex64::from_polar(1.0, theta)).unwrap().norm() - 1.0).abs() < 1e-9);
        for a in zeros {
            prop_assert!(b.eval(a).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn automorphisms_preserve_the_kobayashi_distance(seed in 0u64..1_000, d in 1usize..4) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let phi = PolydiskAutomorphism::random(&mut rng, d, 0.9);
        let l = random_poly_point(&mut rng, d, 0.95);
        let m = random_poly_point(&mut rng, d, 0.95);
        let before = kobayashi_distance_polydisk(&l, &m).unwrap();
        let after = kobayashi_distance_polydisk(&phi.apply(&l).unwrap(), &phi.apply(&m).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-12);
        let back = phi.inverse().apply(&phi.apply(&l).unwrap()).unwrap();
        for j in 0..d {
            prop_assert!((back.coord(j) - l.coord(j)).norm() < 1e-10);
        }
        let origin = PolydiskAutomorphism::moving_to_origin(&l).apply(&l).unwrap();
        prop_assert!(origin.coords().iter().all(|z| z.norm() < 1e-15));
    }
}

#[test]
fn points_outside_the_disk_are_rejected() {
    assert!(DiskPoint::new(Complex64::new(1.0, 0.0)).is_err());
    assert!(DiskPoint::new(Complex64::new(f64::NAN, 0.0)).is_err());
    assert!(PolyPoint::from_reals(&[0.2, -1.0]).is_err());
    assert!(MobiusMap::new(DiskPoint::real(0.3).unwrap(), Complex64::new(2.0, 0.0)).is_err());
}
