use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screwmech::motion::{point_velocity, FramePose, RotationMatrix};
use screwmech::rigid_body::*;
use screwmech::rotation::{Orientation, ParamKind};
use screwmech::sample;
use screwmech::screw::{Mat3, Vec3, Vec6};
use screwmech::MechError;

fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
    Vec3::new(x, y, z)
}

fn twist(lin: Vec3<f64>, ang: Vec3<f64>) -> Vec6<f64> {
    Vec6::new(lin.x, lin.y, lin.z, ang.x, ang.y, ang.z)
}

/// Lopsided body whose centre of mass is away from its origin.
fn lumpy() -> Vec<MassAtom<f64>> {
    [
        (v(0.3, 0.1, 0.0), 1.0),
        (v(-0.2, 0.4, 0.1), 2.0),
        (v(0.1, -0.3, 0.5), 1.5),
        (v(0.6, 0.2, -0.4), 0.5),
        (v(0.0, 0.0, 0.2), 3.0),
    ]
    .into_iter()
    .map(|(p, m)| MassAtom::new(p, m).unwrap())
    .collect()
}

#[test]
fn mass_properties_agree_with_atoms() {
    let atoms = lumpy();
    let ins = assemble_inertia(&atoms).unwrap();
    let m: f64 = atoms.iter().map(|a| a.mass).sum();
    let c = atoms.iter().fold(Vec3::zeros(), |s, a| s + a.position * a.mass) / m;
    let mut jc = Mat3::zeros();
    for a in &atoms {
        let r = a.position - c;
        jc += (Mat3::identity() * r.norm_squared() - r * r.transpose()) * a.mass;
    }
    let other = InertiaScrew::from_mass_properties(m, &c, &jc);
    assert!((other.theta - ins.theta).amax() < 1e-12);
    assert!((ins.mass() - m).abs() < 1e-14);
    assert!((ins.center_of_mass() - c).amax() < 1e-14);
    assert!((ins.theta - ins.theta.transpose()).amax() == 0.0);
}

#[test]
fn atomwise_energy_and_momentum_match_the_inertia_screw() {
    let atoms = lumpy();
    let ins = assemble_inertia(&atoms).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let pose: FramePose<f64> = sample::pose(&mut rng, 1.0);
        let tw = twist(sample::vec3(&mut rng, 1.0), sample::vec3(&mut rng, 1.0));
        let st = BodyState::new(pose, tw);
        let (k, p) = body_motion_measures(&atoms, &st);
        assert!((k - ins.kinetic_energy(&tw)).abs() < 1e-12);
        let h = ins.momentum(&tw);
        assert!((p.resultant - h.fixed_rows::<3>(0)).amax() < 1e-12);
        assert!((p.moment - h.fixed_rows::<3>(3)).amax() < 1e-12);
        let vel = st.velocity();
        let direct: f64 = atoms.iter().map(|a| 0.5 * a.mass * point_velocity(&vel, &a.position).norm_squared()).sum();
        assert!((direct - k).abs() < 1e-12);
    }
}

#[test]
fn collinear_atoms_are_singular() {
    let atoms: Vec<_> = (0..4).map(|i| MassAtom::new(v(i as f64, 0.0, 0.0), 1.0).unwrap()).collect();
    let ins = assemble_inertia(&atoms).unwrap();
    assert!(matches!(ins.check_invertible(), Err(MechError::SingularInertia { .. })));
    assert!(newton_euler_accel(&ins, &Vec6::zeros(), &Vec6::zeros()).is_err());
    assert!(matches!(assemble_inertia::<f64>(&[]), Err(MechError::EmptyBody)));
    assert!(MassAtom::new(v(0.0, 0.0, 0.0), 0.0).is_err());
}

#[test]
fn torque_free_top_conserves_momentum_and_energy() {
    let ins = assemble_inertia(&lumpy()).unwrap();
    let tw = twist(v(0.2, -0.1, 0.3), v(0.4, 1.5, -0.8));
    let mut st = FreeBodyState::new(Orientation::identity(ParamKind::Quaternion), Vec3::zeros(), tw);
    let h0 = inertial_momentum(&ins, &st.body_state()).unwrap();
    let k0 = ins.kinetic_energy(&tw);
    let dt = 1e-3;
    for i in 0..10_000 {
        st = free_body_step(&ins, &st, i as f64 * dt, dt, |_, _| Ok(Vec6::zeros())).unwrap();
    }
    let h1 = inertial_momentum(&ins, &st.body_state()).unwrap();
    assert!((h1 - h0).norm() / h0.norm() < 1e-8, "{}", (h1 - h0).norm());
    assert!((ins.kinetic_energy(&st.twist) - k0).abs() / k0 < 1e-8);
}

#[test]
fn parameterizations_give_the_same_short_motion() {
    let ins = assemble_inertia(&lumpy()).unwrap();
    let tw = twist(v(0.2, -0.1, 0.3), v(0.4, 0.5, -0.3));
    let c0 = RotationMatrix::from_axis_angle(&v(0.0, 0.6, 0.8), 0.4);
    let run = |kind| {
        let mut st = FreeBodyState::new(Orientation::from_rotation(kind, &c0).unwrap(), v(1.0, 2.0, 3.0), tw);
        for i in 0..1000 {
            st = free_body_step(&ins, &st, i as f64 * 1e-3, 1e-3, |_, _| Ok(Vec6::zeros())).unwrap();
        }
        st
    };
    let q = run(ParamKind::Quaternion);
    for kind in [ParamKind::Euler, ParamKind::Fedorov] {
        let s = run(kind);
        assert!((s.pose().c() - q.pose().c()).amax() < 1e-9, "{kind:?}");
        assert!((s.position - q.position).amax() < 1e-9);
        assert!((s.twist - q.twist).amax() < 1e-9);
    }
}

#[test]
fn centre_of_mass_falls_freely() {
    let ins = assemble_inertia(&lumpy()).unwrap();
    let g = v(0.0, 0.0, -9.81);
    let tw = twist(Vec3::zeros(), v(0.3, -0.2, 0.9));
    let mut st = FreeBodyState::new(Orientation::identity(ParamKind::Quaternion), Vec3::zeros(), tw);
    let com = |s: &FreeBodyState<f64>| s.pose().apply_point(&ins.center_of_mass());
    let (x0, v0) = {
        let vel = st.body_state().velocity();
        (com(&st), st.pose().c() * point_velocity(&vel, &ins.center_of_mass()))
    };
    let dt = 1e-3;
    for i in 0..2000 {
        st = free_body_step(&ins, &st, i as f64 * dt, dt, |_, b| Ok(gravity_wrench(&ins, &b.pose, &g))).unwrap();
    }
    let t = 2.0;
    let expect = x0 + v0 * t + g * (0.5 * t * t);
    assert!((com(&st) - expect).amax() < 1e-9);
}

#[test]
fn shedding_mass_at_zero_relative_speed_keeps_velocity() {
    // every atom loses mass at its own velocity, so no thrust arises
    let atoms: Vec<_> = lumpy().iter().map(|a| MassAtom::with_rate(a.position, a.mass, -0.1 * a.mass).unwrap()).collect();
    let ins = assemble_inertia(&atoms).unwrap();
    let tw = twist(v(1.0, -0.5, 0.25), Vec3::zeros());
    let mut st = FreeBodyState::new(Orientation::identity(ParamKind::Quaternion), Vec3::zeros(), tw);
    let dt = 1e-3;
    for i in 0..1000 {
        st = free_body_step(&ins, &st, i as f64 * dt, dt, |_, b| {
            let vel = b.velocity();
            let xi: Vec<_> = atoms.iter().map(|a| point_velocity(&vel, &a.position) * a.mass_rate).collect();
            Ok(increment_wrench(&atoms, &xi))
        })
        .unwrap();
    }
    assert!((st.twist - tw).amax() < 1e-12);
    assert!((st.position - tw.fixed_rows::<3>(0) * 1.0).amax() < 1e-12);
}

#[test]
fn inertial_wrench_entry_point_agrees_with_body_frame() {
    let ins = assemble_inertia(&lumpy()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let pose: FramePose<f64> = sample::pose(&mut rng, 1.0);
        let tw = twist(sample::vec3(&mut rng, 1.0), sample::vec3(&mut rng, 1.0));
        let st = BodyState::new(pose, tw);
        let g = v(0.0, 0.0, -9.81);
        let body = newton_euler_accel(&ins, &tw, &gravity_wrench(&ins, &pose, &g)).unwrap();
        // the same gravity wrench written in the parent frame about the parent origin
        let m = ins.mass();
        let c = pose.apply_point(&ins.center_of_mass());
        let f = g * m;
        let parent = twist(f, c.cross(&f));
        let inertial = newton_euler_accel_inertial(&ins, &st, &parent).unwrap();
        assert!((body - inertial).amax() < 1e-11);
    }
}
