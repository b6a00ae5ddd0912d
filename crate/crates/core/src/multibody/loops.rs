use super::kinematics::TreeKinematics;
use crate::error::{MechError, Result};
use crate::motion::FramePose;
use crate::scalar::Real;
use crate::screw::{Mat3, Vec3};

/// A closure joint between two bodies of a tree.
///
/// `frame_a` and `frame_b` are closure frames fixed in bodies `body_a` and
/// `body_b` (numbers as in the tree, 0 for the ground). `closing` is the
/// prescribed pose of frame `b` relative to frame `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopClosure<T: Real> {
    pub body_a: usize,
    pub frame_a: FramePose<T>,
    pub body_b: usize,
    pub frame_b: FramePose<T>,
    pub closing: FramePose<T>,
}

/// Deviation of the loop product `X_ab X_ba` from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopResidual<T: Real> {
    /// `d_ab + C_ab d_ba`.
    pub translation: Vec3<T>,
    /// `C_ab C_ba − I`.
    pub rotation: Mat3<T>,
}

impl<T: Real> LoopResidual<T> {
    pub fn norm(&self) -> T {
        self.translation.norm().max(self.rotation.norm())
    }
}

fn body_pose<T: Real>(kin: &TreeKinematics<T>, body: usize) -> Result<FramePose<T>> {
    match body {
        0 => Ok(FramePose::identity()),
        b if b <= kin.absolute.len() => Ok(kin.absolute[b - 1]),
        b => Err(MechError::InvalidTree(format!("loop closure refers to unknown body {b}"))),
    }
}

/// Residual of a closure: the pose of frame `a` relative to frame `b` as
/// reached through the tree, composed with the prescribed closing pose.
pub fn loop_residual<T: Real>(kin: &TreeKinematics<T>, closure: &LoopClosure<T>) -> Result<LoopResidual<T>> {
    let xa = body_pose(kin, closure.body_a)?.compose(&closure.frame_a);
    let xb = body_pose(kin, closure.body_b)?.compose(&closure.frame_b);
    let ab = xb.inverse().compose(&xa);
    Ok(pair_residual(&ab, &closure.closing))
}

/// `X_ab X_ba − I` split into translation and rotation parts.
pub fn pair_residual<T: Real>(ab: &FramePose<T>, ba: &FramePose<T>) -> LoopResidual<T> {
    LoopResidual {
        translation: ab.translation + ab.c() * ba.translation,
        rotation: ab.c() * ba.c() - Mat3::identity(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multibody::{Body, Joint, JointPosition, MultibodyTree, SystemState};
    use crate::rigid_body::MassAtom;

    /// Planar four-bar: two cranks on the ground and a coupler hinged to crank 1.
    #[test]
    fn four_bar_closes_in_parallelogram_configuration() {
        let e3 = Vec3::new(0.0, 0.0, 1.0);
        let atoms = || {
            vec![
                MassAtom::new(Vec3::new(0.5, 0.0, 0.0), 1.0).unwrap(),
                MassAtom::new(Vec3::new(0.0, 0.1, 0.0), 1.0).unwrap(),
                MassAtom::new(Vec3::new(0.0, 0.0, 0.1), 1.0).unwrap(),
            ]
        };
        let hinge = |x: f64| Joint::revolute(e3, FramePose::from_translation(Vec3::new(x, 0.0, 0.0))).unwrap();
        let tree = MultibodyTree::new(
            vec![
                Body::from_atoms("crank1", atoms(), 0, hinge(0.0)).unwrap(),
                Body::from_atoms("crank2", atoms(), 0, hinge(2.0)).unwrap(),
                Body::from_atoms("coupler", atoms(), 1, hinge(1.0)).unwrap(),
            ],
            Vec3::zeros(),
        )
        .unwrap();
        let closure = LoopClosure {
            body_a: 3,
            frame_a: FramePose::from_translation(Vec3::new(2.0, 0.0, 0.0)),
            body_b: 2,
            frame_b: FramePose::from_translation(Vec3::new(1.0, 0.0, 0.0)),
            closing: FramePose::identity(),
        };
        for angle in [0.0, 0.3, 1.2, -2.0] {
            // parallelogram: the coupler keeps the ground orientation
            let st = SystemState::at_rest(
                vec![JointPosition::Scalar(angle), JointPosition::Scalar(angle), JointPosition::Scalar(-angle)],
                3,
            );
            let kin = TreeKinematics::compute(&tree, &st).unwrap();
            let r = loop_residual(&kin, &closure).unwrap();
            // hinge closure: points coincide and the hinge axes stay aligned
            assert!(r.translation.norm() < 1e-12, "{angle}: {}", r.translation.norm());
            assert!((r.rotation * e3).norm() < 1e-12);
        }
        let st = SystemState::at_rest(
            vec![JointPosition::Scalar(0.3), JointPosition::Scalar(0.5), JointPosition::Scalar(-0.3)],
            3,
        );
        let kin = TreeKinematics::compute(&tree, &st).unwrap();
        assert!(loop_residual(&kin, &closure).unwrap().translation.norm() > 1e-2);
    }

    #[test]
    fn pose_and_inverse_close() {
        let ab = FramePose::new(
            crate::motion::RotationMatrix::from_axis_angle(&Vec3::new(0.0, 1.0, 0.0), 0.7),
            Vec3::new(1.0, -2.0, 0.5),
        );
        assert!(pair_residual(&ab, &ab.inverse()).norm() < 1e-14);
    }
}
