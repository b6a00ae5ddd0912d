use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screwmech::motion::{angular_velocity_from_rotation, RotationMatrix};
use screwmech::rotation::*;
use screwmech::sample;
use screwmech::screw::Vec3;
use screwmech::MechError;

fn rotation(seed: u64) -> RotationMatrix<f64> {
    sample::rotation(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn in_domain(kind: ParamKind, c: &RotationMatrix<f64>) -> bool {
    match kind {
        ParamKind::Euler => c.matrix()[(0, 2)].abs() < 0.99,
        ParamKind::Fedorov => 1.0 + c.matrix().trace() > 0.05,
        ParamKind::Quaternion => true,
    }
}

const KINDS: [ParamKind; 3] = [ParamKind::Euler, ParamKind::Fedorov, ParamKind::Quaternion];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trips(seed in any::<u64>()) {
        let c = rotation(seed);
        for kind in KINDS {
            if in_domain(kind, &c) {
                let o = Orientation::from_rotation(kind, &c).unwrap();
                prop_assert!((o.to_rotation().matrix() - c.matrix()).amax() < 1e-10, "{kind:?}");
            }
        }
    }

    #[test]
    fn rate_maps_match_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: RotationMatrix<f64> = sample::rotation(&mut rng);
        let w: Vec3<f64> = sample::vec3(&mut rng, 1.0);
        let h = 1e-6;
        for kind in KINDS {
            if !in_domain(kind, &c) {
                continue;
            }
            let o = Orientation::from_rotation(kind, &c).unwrap();
            let q = o.coords();
            let qd = o.rate(&w).unwrap();
            let at = |s: f64| {
                let x: Vec<f64> = q.iter().zip(&qd).map(|(a, b)| a + s * b).collect();
                Orientation::from_coords(kind, &x).to_rotation().into_inner()
            };
            let wfd = angular_velocity_from_rotation(&c, &((at(h) - at(-h)) / (2.0 * h))).unwrap();
            prop_assert!((wfd - w).amax() < 1e-6, "{kind:?}");
        }
    }

    #[test]
    fn fedorov_vector_is_the_rotation_axis(seed in any::<u64>()) {
        let c = rotation(seed);
        prop_assume!(in_domain(ParamKind::Fedorov, &c));
        let f = FedorovParam::from_rotation(&c).unwrap();
        prop_assert!((c.matrix() * f.f - f.f).amax() < 1e-12);
        let q = UnitQuaternion::from_rotation(&c);
        prop_assert!((f.to_rotation().matrix() - q.to_rotation().matrix()).amax() < 1e-10);
        // the Cayley and closed forms coincide
        prop_assert!((f.to_rotation_cayley().matrix() - f.to_rotation().matrix()).amax() < 1e-10);
    }

    #[test]
    fn fedorov_rates_in_both_frames(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: RotationMatrix<f64> = sample::rotation_within(&mut rng, 2.8);
        let w: Vec3<f64> = sample::vec3(&mut rng, 1.0);
        let f = FedorovParam::from_rotation(&c).unwrap();
        let h = 1e-6;
        let body = f.rate(&w, RateFrame::Body);
        let at = |s: f64| FedorovParam::new(f.f + body * s).to_rotation().into_inner();
        let wfd = angular_velocity_from_rotation(&c, &((at(h) - at(-h)) / (2.0 * h))).unwrap();
        prop_assert!((wfd - w).amax() < 1e-6);
        // the same ω expressed in the parent frame gives the same rate
        let parent = f.rate(&(c.matrix() * w), RateFrame::Parent);
        prop_assert!((parent - body).amax() < 1e-10);
    }
}

#[test]
fn printed_fedorov_rate_disagrees_with_both_frames() {
    let f = FedorovParam::new(Vec3::new(0.3, -0.4, 0.2));
    let w = Vec3::new(0.5, 1.0, -0.7);
    let printed = f.printed_rate(&w);
    assert!((printed - f.rate(&w, RateFrame::Body)).amax() > 1e-2);
    assert!((printed - f.rate(&w, RateFrame::Parent)).amax() > 1e-2);
}

#[test]
fn singular_configurations_are_reported() {
    let half_turn = RotationMatrix::from_axis_angle(&Vec3::new(0.0, 0.0, 1.0), std::f64::consts::PI);
    assert!(matches!(FedorovParam::from_rotation(&half_turn), Err(MechError::FedorovSingular { .. })));
    let lock = EulerAngles::new(0.2, std::f64::consts::FRAC_PI_2, -0.3);
    assert!(matches!(lock.rates(&Vec3::new(1.0, 0.0, 0.0)), Err(MechError::GimbalLock { .. })));
    assert!(EulerAngles::from_rotation(&lock.to_rotation()).is_err());
    let big = FedorovParam::new(Vec3::new(1e6, 0.0, 0.0));
    assert!(big.check_regular().is_err());
}

#[test]
fn quaternion_sign_and_renormalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let q: UnitQuaternion<f64> = sample::unit_quaternion(&mut rng);
        let c = q.to_rotation();
        let back = UnitQuaternion::from_rotation(&c);
        assert!(back.w() >= 0.0);
        let dot = back.quaternion().dot(q.quaternion()).abs();
        assert!((dot - 1.0).abs() < 1e-12);
    }
    let drifted = UnitQuaternion::<f64>::new_normalize(1.001, Vec3::new(0.0, 0.002, 0.0));
    assert!((drifted.quaternion().norm() - 1.0).abs() < 1e-15);
}

#[test]
fn single_precision_parameterizations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let c: RotationMatrix<f32> = sample::rotation_within(&mut rng, 1.2);
        for kind in KINDS {
            let o = Orientation::from_rotation(kind, &c).unwrap();
            assert!((o.to_rotation().matrix() - c.matrix()).amax() < 1e-4);
        }
    }
}
