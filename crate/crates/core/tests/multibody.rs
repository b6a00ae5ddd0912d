use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screwmech::motion::FramePose;
use screwmech::multibody::*;
use screwmech::rigid_body::{free_body_step, BodyState, FreeBodyState, MassAtom};
use screwmech::rotation::{Orientation, ParamKind};
use screwmech::sample;
use screwmech::screw::{Vec3, Vec6};

const G: f64 = 9.81;
const L1: f64 = 1.0;
const L2: f64 = 0.8;
const M1: f64 = 1.0;
const M2: f64 = 1.5;

/// Rod of length `l` and mass `m` as two equal atoms along −e₂.
fn rod(l: f64, m: f64) -> Vec<MassAtom<f64>> {
    vec![
        MassAtom::new(Vec3::new(0.0, -0.5 * l, 0.0), 0.5 * m).unwrap(),
        MassAtom::new(Vec3::new(0.0, -l, 0.0), 0.5 * m).unwrap(),
    ]
}

fn pendulum() -> MultibodyTree<f64> {
    let e3 = Vec3::new(0.0, 0.0, 1.0);
    MultibodyTree::new(
        vec![
            Body::from_atoms("upper", rod(L1, M1), 0, Joint::revolute(e3, FramePose::identity()).unwrap()).unwrap(),
            Body::from_atoms(
                "lower",
                rod(L2, M2),
                1,
                Joint::revolute(e3, FramePose::from_translation(Vec3::new(0.0, -L1, 0.0))).unwrap(),
            )
            .unwrap(),
        ],
        Vec3::new(0.0, -G, 0.0),
    )
    .unwrap()
}

/// Textbook double pendulum in absolute angles `(φ₁, φ₂, φ̇₁, φ̇₂)`.
fn oracle_rhs(y: [f64; 4]) -> [f64; 4] {
    let (c1, c2) = (0.75 * L1, 0.75 * L2);
    let (i1, i2) = (0.5 * M1 * (0.25 + 1.0) * L1 * L1, 0.5 * M2 * (0.25 + 1.0) * L2 * L2);
    let d = y[0] - y[1];
    let m11 = i1 + M2 * L1 * L1;
    let m12 = M2 * L1 * c2 * d.cos();
    let m22 = i2;
    let r1 = -M2 * L1 * c2 * d.sin() * y[3] * y[3] - G * (M1 * c1 + M2 * L1) * y[0].sin();
    let r2 = M2 * L1 * c2 * d.sin() * y[2] * y[2] - G * M2 * c2 * y[1].sin();
    let det = m11 * m22 - m12 * m12;
    [y[2], y[3], (m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det]
}

fn oracle_step(y: [f64; 4], h: f64) -> [f64; 4] {
    let add = |a: [f64; 4], b: [f64; 4], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
    let k1 = oracle_rhs(y);
    let k2 = oracle_rhs(add(y, k1, h / 2.0));
    let k3 = oracle_rhs(add(y, k2, h / 2.0));
    let k4 = oracle_rhs(add(y, k3, h));
    let mut out = y;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn relative_angles(st: &SystemState<f64>) -> (f64, f64) {
    match (st.positions[0], st.positions[1]) {
        (JointPosition::Scalar(a), JointPosition::Scalar(b)) => (a, b),
        _ => unreachable!(),
    }
}

#[test]
fn double_pendulum_matches_oracle_in_both_formulations() {
    let tree = pendulum();
    let (q1, q2, u1, u2) = (0.9, -0.4, 0.3, -1.1);
    let init = SystemState::new(
        vec![JointPosition::Scalar(q1), JointPosition::Scalar(q2)],
        DVector::from_vec(vec![u1, u2]),
    );
    let dt = 1e-4;
    let mut ne = init.clone();
    let mut lg = init.clone();
    let mut or = [q1, q1 + q2, u1, u1 + u2];
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let t = i as f64 * dt;
        ne = newton_euler_step(&tree, &ne, t, dt, &mut NoWrench).unwrap();
        lg = lagrange_step(&tree, &lg, t, dt, &mut NoWrench).unwrap();
        or = oracle_step(or, dt);
        let (a, b) = relative_angles(&ne);
        let (c, d) = relative_angles(&lg);
        worst = worst
            .max((a - or[0]).abs())
            .max((a + b - or[1]).abs())
            .max((c - or[0]).abs())
            .max((c + d - or[1]).abs())
            .max((ne.velocities[0] - or[2]).abs())
            .max((ne.velocities[0] + ne.velocities[1] - or[3]).abs())
            .max((&lg.velocities - &ne.velocities).amax());
    }
    assert!(worst < 1e-6, "max deviation {worst:e}");
}

#[test]
fn double_pendulum_energy_drift() {
    let tree = pendulum();
    let mut st = SystemState::new(
        vec![JointPosition::Scalar(1.2), JointPosition::Scalar(0.5)],
        DVector::from_vec(vec![0.0, 0.7]),
    );
    let e0 = mechanical_energy(&tree, &st, 0.0).unwrap().total();
    let dt = 1e-4;
    let mut drift: f64 = 0.0;
    for i in 0..100_000 {
        st = newton_euler_step(&tree, &st, i as f64 * dt, dt, &mut NoWrench).unwrap();
        if i % 100 == 99 {
            drift = drift.max((mechanical_energy(&tree, &st, 0.0).unwrap().total() - e0).abs());
        }
    }
    assert!(drift < 1e-5, "energy drift {drift:e}");
}

#[test]
fn joint_wrenches_do_no_work() {
    let tree = pendulum();
    let st = SystemState::new(
        vec![JointPosition::Scalar(0.3), JointPosition::Scalar(-1.0)],
        DVector::from_vec(vec![2.0, -0.5]),
    );
    let sys = assemble_system(&tree, &st, 0.0, &mut NoWrench).unwrap();
    let ud = joint_project(&sys, &st.velocities).accelerations().unwrap();
    assert!(sys.constraint_power(&st.velocities, &ud).amax() < 1e-12);
    // the bodies do exchange wrenches
    assert!(sys.constraint_wrenches(&st.velocities, &ud).amax() > 1e-3);
}

fn box_atoms(a: f64, b: f64, c: f64) -> Vec<MassAtom<f64>> {
    let mut out = Vec::new();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                out.push(MassAtom::new(Vec3::new(0.2 + sx * a, sy * b, -0.1 + sz * c), 0.25).unwrap());
            }
        }
    }
    out
}

/// A free body carrying a revolute pendulum, with gravity.
fn floating(kind: ParamKind, rng: &mut ChaCha8Rng) -> (MultibodyTree<f64>, SystemState<f64>) {
    let axis = Vec3::new(0.3, -0.2, 1.0).normalize();
    let tree = MultibodyTree::new(
        vec![
            Body::from_atoms("base", box_atoms(0.5, 0.3, 0.2), 0, Joint::free(FramePose::identity())).unwrap(),
            Body::from_atoms(
                "arm",
                box_atoms(0.3, 0.1, 0.1),
                1,
                Joint::revolute(axis, FramePose::from_translation(Vec3::new(0.6, 0.0, 0.0))).unwrap(),
            )
            .unwrap(),
        ],
        Vec3::new(0.0, 0.0, -G),
    )
    .unwrap();
    let rot = sample::rotation_within::<f64, _>(rng, 1.0);
    let orientation = Orientation::from_rotation(kind, &rot).unwrap();
    let st = SystemState::new(
        vec![
            JointPosition::Free { orientation, translation: Vec3::new(0.1, -0.3, 0.5) },
            JointPosition::Scalar(0.4),
        ],
        DVector::from_vec(vec![0.2, -0.1, 0.3, 0.5, -0.4, 0.3, 1.0]),
    );
    (tree, st)
}

#[test]
fn floating_base_formulations_agree_for_every_parameterization() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for kind in [ParamKind::Quaternion, ParamKind::Euler, ParamKind::Fedorov] {
        let (tree, init) = floating(kind, &mut rng);
        let dt = 1e-3;
        let (mut ne, mut lg) = (init.clone(), init.clone());
        let e0 = mechanical_energy(&tree, &init, 0.0).unwrap().total();
        for i in 0..500 {
            let t = i as f64 * dt;
            ne = newton_euler_step(&tree, &ne, t, dt, &mut NoWrench).unwrap();
            lg = lagrange_step(&tree, &lg, t, dt, &mut NoWrench).unwrap();
        }
        let kn = TreeKinematics::compute(&tree, &ne).unwrap();
        let kl = TreeKinematics::compute(&tree, &lg).unwrap();
        for p in 0..2 {
            assert!(kn.absolute[p].distance(&kl.absolute[p]) < 1e-8, "{kind:?}");
            assert!((kn.absolute_twists[p] - kl.absolute_twists[p]).amax() < 1e-8, "{kind:?}");
        }
        let e1 = mechanical_energy(&tree, &ne, 0.0).unwrap().total();
        assert!((e1 - e0).abs() < 1e-8, "{kind:?}: {e0} -> {e1}");
    }
}

#[test]
fn quaternion_lagrange_mass_is_singular() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (tree, st) = floating(ParamKind::Quaternion, &mut rng);
    let q_dot = DVector::zeros(8);
    let sys = lagrange_assemble(&tree, &st.positions, &q_dot, 0.0, &mut NoWrench).unwrap();
    assert!(matches!(sys.accelerations(&q_dot), Err(screwmech::MechError::SingularLagrangeMass { .. })));
}

#[test]
fn single_free_body_matches_rigid_body_integrator() {
    let atoms = box_atoms(0.4, 0.25, 0.1);
    let tree = MultibodyTree::new(
        vec![Body::from_atoms("b", atoms.clone(), 0, Joint::free(FramePose::identity())).unwrap()],
        Vec3::zeros(),
    )
    .unwrap();
    let twist = Vec6::new(0.3, 0.0, -0.2, 1.0, 2.0, -0.5);
    let mut st = SystemState::new(
        vec![JointPosition::Free {
            orientation: Orientation::identity(ParamKind::Quaternion),
            translation: Vec3::zeros(),
        }],
        DVector::from_iterator(6, twist.iter().copied()),
    );
    let ins = tree.body(0).inertia;
    let mut fb = FreeBodyState::new(Orientation::identity(ParamKind::Quaternion), Vec3::zeros(), twist);
    let dt = 1e-3;
    for i in 0..1000 {
        let t = i as f64 * dt;
        st = newton_euler_step(&tree, &st, t, dt, &mut NoWrench).unwrap();
        fb = free_body_step(&ins, &fb, t, dt, |_, _: &BodyState<f64>| Ok(Vec6::zeros())).unwrap();
    }
    let kin = TreeKinematics::compute(&tree, &st).unwrap();
    assert!(kin.absolute[0].distance(&fb.pose()) < 1e-9);
    assert!((kin.absolute_twists[0] - fb.twist).amax() < 1e-9);
}

#[test]
fn momentum_is_conserved_without_gravity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut tree, mut st) = floating(ParamKind::Quaternion, &mut rng);
    tree.gravity = Vec3::zeros();
    let h0 = total_momentum(&tree, &st, 0.0).unwrap();
    for i in 0..1000 {
        st = newton_euler_step(&tree, &st, i as f64 * 1e-3, 1e-3, &mut NoWrench).unwrap();
    }
    assert!((total_momentum(&tree, &st, 0.0).unwrap() - h0).amax() < 1e-9);
}

#[test]
fn singular_reduced_mass_is_reported() {
    // a single massless-about-its-axis rod spinning about its own line
    let tree = MultibodyTree::new(
        vec![Body::from_atoms(
            "needle",
            rod(1.0, 1.0),
            0,
            Joint::revolute(Vec3::new(0.0, 1.0, 0.0), FramePose::identity()).unwrap(),
        )
        .unwrap()],
        Vec3::zeros(),
    )
    .unwrap();
    let st = SystemState::at_rest(vec![JointPosition::Scalar(0.0)], 1);
    let err = joint_accelerations(&tree, &st, 0.0, &mut NoWrench).unwrap_err();
    assert!(matches!(err, screwmech::MechError::SingularReducedMass { .. }));
}

#[test]
fn velocity_dependent_wrench_damps_motion() {
    let tree = pendulum();
    let mut st = SystemState::new(
        vec![JointPosition::Scalar(0.5), JointPosition::Scalar(0.0)],
        DVector::from_vec(vec![0.0, 0.0]),
    );
    let mut damping = |_: f64, kin: &TreeKinematics<f64>| Ok(-kin.stacked_absolute() * 0.5);
    let e0 = mechanical_energy(&tree, &st, 0.0).unwrap().total();
    for i in 0..2000 {
        st = newton_euler_step(&tree, &st, i as f64 * 1e-3, 1e-3, &mut damping).unwrap();
    }
    assert!(mechanical_energy(&tree, &st, 0.0).unwrap().total() < e0 - 1e-3);
}
