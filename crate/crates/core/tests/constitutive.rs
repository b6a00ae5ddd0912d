use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screwmech::continuum::*;
use screwmech::motion::RotationMatrix;
use screwmech::sample;
use screwmech::screw::Mat3;
use screwmech::MechError;

fn sym2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let m: Mat3<f64> = sample::symmetric(rng, 1.0);
    m.fixed_view::<2, 2>(0, 0).into_owned()
}

fn rheology(rng: &mut ChaCha8Rng) -> Rheology<f64> {
    let mut s = || sample::scalar::<f64, _>(rng, 2.0);
    Rheology::new(s(), s(), s(), s())
}

fn planar_rotation(a: f64) -> Mat2<f64> {
    Mat2::new(a.cos(), -a.sin(), a.sin(), a.cos())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn spatial_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rheology(&mut rng);
        prop_assume!(r.r2.abs() > 0.3 && (3.0 * r.r1 + r.r2).abs() > 0.3);
        let u: Mat3<f64> = sample::symmetric(&mut rng, 1.0);
        let t = isotropic_map_3d(&r, &u);
        let back = inverse_map_3d(&r, &t).unwrap();
        prop_assert!((back - u).amax() <= 1e-12);
        prop_assert!((t - t.transpose()).amax() < 1e-14);
    }

    #[test]
    fn planar_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rheology(&mut rng);
        prop_assume!((2.0 * r.r1 + r.r2).abs() > 0.3 && r.r2.hypot(2.0 * r.r3) > 0.3);
        let u = sym2(&mut rng);
        let t = isotropic_map_2d(&r, &u);
        let back = inverse_map_2d(&r, &t).unwrap();
        prop_assert!((back - u).amax() <= 1e-12);
        prop_assert!((t - t.transpose()).amax() < 1e-14);
    }

    #[test]
    fn spatial_map_is_isotropic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rheology(&mut rng);
        let u: Mat3<f64> = sample::symmetric(&mut rng, 1.0);
        let q = sample::rotation::<f64, _>(&mut rng).into_inner();
        let lhs = isotropic_map_3d(&r, &(q * u * q.transpose()));
        let rhs = q * isotropic_map_3d(&r, &u) * q.transpose();
        prop_assert!((lhs - rhs).amax() < 1e-12);
        // reflections too
        let p = Mat3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0)) * q;
        let lhs = isotropic_map_3d(&r, &(p * u * p.transpose()));
        prop_assert!((lhs - p * isotropic_map_3d(&r, &u) * p.transpose()).amax() < 1e-12);
    }

    #[test]
    fn planar_map_is_rotation_invariant(seed in any::<u64>(), angle in -3.2f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rheology(&mut rng);
        let u = sym2(&mut rng);
        let q = planar_rotation(angle);
        let lhs = isotropic_map_2d(&r, &(q * u * q.transpose()));
        prop_assert!((lhs - q * isotropic_map_2d(&r, &u) * q.transpose()).amax() < 1e-12);
        let c = PlanarLinear {
            trace: r.r0, trace_turned: r.r1, direct: r.r2, transposed: r.r3, turned: 0.3, transposed_turned: -0.7,
        };
        let g: Mat3<f64> = sample::mat3(&mut rng, 1.0);
        let w = g.fixed_view::<2, 2>(0, 0).into_owned();
        let lhs = isotropic_linear_2d(&c, &(q * w * q.transpose()));
        prop_assert!((lhs - q * isotropic_linear_2d(&c, &w) * q.transpose()).amax() < 1e-12);
    }

    #[test]
    fn maps_are_affine(seed in any::<u64>(), a in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rheology(&mut rng);
        let (u, w): (Mat3<f64>, Mat3<f64>) = (sample::symmetric(&mut rng, 1.0), sample::symmetric(&mut rng, 1.0));
        let f = |x: &Mat3<f64>| isotropic_map_3d(&r, x) - Mat3::identity() * r.r0;
        prop_assert!((f(&(u * a + w)) - (f(&u) * a + f(&w))).amax() < 1e-12);
        let (u2, w2) = (sym2(&mut rng), sym2(&mut rng));
        let g = |x: &Mat2<f64>| isotropic_map_2d(&r, x) - Mat2::identity() * r.r0;
        prop_assert!((g(&(u2 * a + w2)) - (g(&u2) * a + g(&w2))).amax() < 1e-12);
    }
}

#[test]
fn planar_map_with_turn_term_is_not_reflection_invariant() {
    let r = Rheology::new(0.0, 1.0, 2.0, 0.5);
    let u = Mat2::new(1.0, 0.3, 0.3, -0.4);
    let flip = Mat2::new(1.0, 0.0, 0.0, -1.0);
    let lhs = isotropic_map_2d(&r, &(flip * u * flip));
    let rhs = flip * isotropic_map_2d(&r, &u) * flip;
    assert!((lhs - rhs).amax() > 1e-3);
    // without the turn term reflections commute with the map
    let r0 = Rheology { r3: 0.0, ..r };
    assert!((isotropic_map_2d(&r0, &(flip * u * flip)) - flip * isotropic_map_2d(&r0, &u) * flip).amax() < 1e-15);
}

#[test]
fn general_spatial_linear_form_is_isotropic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g: Mat3<f64> = sample::mat3(&mut rng, 1.0);
    let q: RotationMatrix<f64> = sample::rotation(&mut rng);
    let q = q.into_inner();
    let lhs = isotropic_linear_3d(0.3, 1.1, -0.4, &(q * g * q.transpose()));
    assert!((lhs - q * isotropic_linear_3d(0.3, 1.1, -0.4, &g) * q.transpose()).amax() < 1e-12);
}

#[test]
fn degenerate_rheologies_are_rejected() {
    let t = Mat3::identity();
    for r in [Rheology::new(1.0, 1.0, 0.0, 0.0), Rheology::new(1.0, -1.0, 3.0, 0.0)] {
        assert!(matches!(inverse_map_3d(&r, &t), Err(MechError::IncorrectContinuum { .. })));
    }
    for r in [Rheology::new(1.0, -1.0, 2.0, 0.0), Rheology::new(1.0, 1.0, 0.0, 0.0)] {
        assert!(matches!(inverse_map_2d(&r, &Mat2::identity()), Err(MechError::IncorrectContinuum { .. })));
    }
    // a vanishing r2 is tolerated in the plane when r3 is present
    assert!(inverse_map_2d(&Rheology::new(1.0, 1.0, 0.0, 1.0), &Mat2::identity()).is_ok());
}

#[test]
fn spatial_offset_needs_a_negative_sign() {
    let r = Rheology::new(0.7f64, 0.4, 1.3, 0.0);
    let u = Mat3::new(0.2, 0.1, 0.0, 0.1, -0.3, 0.05, 0.0, 0.05, 0.4);
    let t = isotropic_map_3d(&r, &u);
    let (n0, n1, n2) = inverse_coefficients_3d(&r).unwrap();
    assert!((n0 + r.r0 / (3.0 * r.r1 + r.r2)).abs() < 1e-15);
    let flipped = Mat3::identity() * (-n0 + n1 * t.trace()) + t * n2;
    assert!((flipped - u).amax() > 0.1);
}

#[test]
fn strain_accumulates_only_the_symmetric_rate() {
    let g = Mat3::new(0.1, 0.4, 0.0, -0.2, 0.0, 0.3, 0.5, -0.1, -0.2);
    let (rate, spin) = velocity_gradient_split(&g);
    assert!((rate + spin - g).amax() < 1e-15);
    let s = strain_evolve(&StrainState::default(), &g, 0.1);
    assert!((s.strain - s.strain.transpose()).amax() < 1e-15);
    assert!((s.strain - (Mat3::identity() + rate * 0.1)).amax() < 1e-15);
}

#[test]
fn classification() {
    use ArgumentKind::*;
    let c = classify_continuum(&Rheology::new(0.0, 1.0, 1.0, 0.2), Strain, Dimension::Two);
    assert_eq!(c, Classification { kind: ContinuumKind::Elastic, correct: true });
    let c = classify_continuum(&Rheology::new(1.0, 0.0, 0.0, 0.0), StrainRate, Dimension::Two);
    assert_eq!(c.kind, ContinuumKind::IdealFluid);
    assert!(!c.correct);
    let c = classify_continuum(&Rheology::new(1.0, 0.2, 0.5, 0.0), StrainRate, Dimension::Three);
    assert_eq!(c, Classification { kind: ContinuumKind::ViscousFluid, correct: true });
    let c = classify_continuum(&Rheology::new(-1.0, 0.2, 0.5, 0.0), StrainRate, Dimension::Three);
    assert_eq!(c.kind, ContinuumKind::Unclassified);
}

#[test]
fn single_precision_round_trip() {
    let r = Rheology::new(0.5f32, 0.3, 1.2, 0.4);
    let u = Mat2::new(0.2f32, -0.1, -0.1, 0.7);
    let back = inverse_map_2d(&r, &isotropic_map_2d(&r, &u)).unwrap();
    assert!((back - u).amax() < 1e-5);
}
