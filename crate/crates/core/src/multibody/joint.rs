use nalgebra::DMatrix;

use crate::error::{MechError, Result};
use crate::motion::{FramePose, RotationMatrix};
use crate::rotation::{Orientation, ParamKind};
use crate::scalar::Real;
use crate::screw::{skew, Mat3, Vec3};

/// Joint type of a tree edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointKind<T: Real> {
    /// Rotation about a unit axis of the child frame.
    Revolute { axis: Vec3<T> },
    /// Translation along a unit axis of the child frame.
    Prismatic { axis: Vec3<T> },
    /// Unconstrained relative motion.
    Free,
}

/// Joint of the edge parent → child: a fixed mounting `offset` (pose of the
/// joint frame in the parent) followed by the joint motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint<T: Real> {
    pub kind: JointKind<T>,
    pub offset: FramePose<T>,
}

fn check_axis<T: Real>(axis: &Vec3<T>) -> Result<()> {
    let n = axis.norm();
    if (n - T::one()).abs() > T::ALGEBRA_TOL {
        return Err(MechError::InvalidJoint(format!("axis must have unit norm, got {}", n.as_f64())));
    }
    Ok(())
}

impl<T: Real> Joint<T> {
    pub fn revolute(axis: Vec3<T>, offset: FramePose<T>) -> Result<Self> {
        check_axis(&axis)?;
        Ok(Self { kind: JointKind::Revolute { axis }, offset })
    }

    pub fn prismatic(axis: Vec3<T>, offset: FramePose<T>) -> Result<Self> {
        check_axis(&axis)?;
        Ok(Self { kind: JointKind::Prismatic { axis }, offset })
    }

    pub fn free(offset: FramePose<T>) -> Self {
        Self { kind: JointKind::Free, offset }
    }

    /// Number of velocity degrees of freedom.
    pub fn dof(&self) -> usize {
        match self.kind {
            JointKind::Free => 6,
            _ => 1,
        }
    }

    /// Motion subspace `S` (6 × dof) with relative twist `V_r = S u`.
    pub fn motion_subspace(&self) -> DMatrix<T> {
        match self.kind {
            JointKind::Revolute { axis } => {
                let mut s = DMatrix::zeros(6, 1);
                s.fixed_view_mut::<3, 1>(3, 0).copy_from(&axis);
                s
            }
            JointKind::Prismatic { axis } => {
                let mut s = DMatrix::zeros(6, 1);
                s.fixed_view_mut::<3, 1>(0, 0).copy_from(&axis);
                s
            }
            JointKind::Free => DMatrix::identity(6, 6),
        }
    }

    /// Rejects a position of the wrong variant.
    pub fn check_position(&self, pos: &JointPosition<T>) -> Result<()> {
        match (&self.kind, pos) {
            (JointKind::Free, JointPosition::Free { .. }) => Ok(()),
            (JointKind::Free, _) => Err(MechError::InvalidState("free joint needs an orientation and translation".into())),
            (_, JointPosition::Scalar(_)) => Ok(()),
            _ => Err(MechError::InvalidState("one-degree-of-freedom joint needs a scalar position".into())),
        }
    }

    /// Pose of the child frame relative to the parent frame.
    pub fn relative_pose(&self, pos: &JointPosition<T>) -> FramePose<T> {
        self.offset.compose(&self.motion_pose(pos))
    }

    /// Pose of the child frame relative to the joint frame.
    pub fn motion_pose(&self, pos: &JointPosition<T>) -> FramePose<T> {
        match (&self.kind, pos) {
            (JointKind::Revolute { axis }, JointPosition::Scalar(q)) => {
                FramePose::from_rotation(RotationMatrix::from_axis_angle(axis, *q))
            }
            (JointKind::Prismatic { axis }, JointPosition::Scalar(q)) => FramePose::from_translation(axis * *q),
            (JointKind::Free, JointPosition::Free { orientation, translation }) => {
                FramePose::from_child_translation(orientation.to_rotation(), *translation)
            }
            _ => panic!("joint position does not match joint kind"),
        }
    }

    /// Length of the generalized coordinate block.
    pub fn coord_len(&self, pos: &JointPosition<T>) -> usize {
        match pos {
            JointPosition::Scalar(_) => 1,
            JointPosition::Free { orientation, .. } => 3 + orientation.kind().dim(),
        }
    }
}

/// Position of one joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointPosition<T: Real> {
    /// Angle (revolute, rad) or displacement (prismatic, m).
    Scalar(T),
    /// Orientation of the child and its origin offset `dᵖ` in child coordinates.
    Free { orientation: Orientation<T>, translation: Vec3<T> },
}

impl<T: Real> JointPosition<T> {
    pub fn coords(&self) -> Vec<T> {
        match self {
            JointPosition::Scalar(q) => vec![*q],
            JointPosition::Free { orientation, translation } => {
                let mut v: Vec<T> = translation.iter().copied().collect();
                v.extend(orientation.coords());
                v
            }
        }
    }

    /// Rebuilds a position of the same shape from raw coordinates.
    pub fn with_coords(&self, c: &[T]) -> Self {
        match self {
            JointPosition::Scalar(_) => JointPosition::Scalar(c[0]),
            JointPosition::Free { orientation, .. } => JointPosition::Free {
                translation: Vec3::new(c[0], c[1], c[2]),
                orientation: Orientation::from_coords(orientation.kind(), &c[3..]),
            },
        }
    }

    pub fn normalized(&self) -> Self {
        match self {
            JointPosition::Free { orientation, translation } => {
                JointPosition::Free { orientation: orientation.normalized(), translation: *translation }
            }
            s => *s,
        }
    }

    pub fn check_regular(&self) -> Result<()> {
        match self {
            JointPosition::Free { orientation, .. } => orientation.check_regular(),
            _ => Ok(()),
        }
    }

    pub fn param_kind(&self) -> Option<ParamKind> {
        match self {
            JointPosition::Free { orientation, .. } => Some(orientation.kind()),
            _ => None,
        }
    }

    /// Coordinate rates from the joint velocity `u`:
    /// `q̇ = u` for scalar joints; `ḋᵖ = v + dᵖ × ω`, `λ̇ = G ω` for free ones.
    pub fn rates(&self, u: &[T]) -> Result<Vec<T>> {
        match self {
            JointPosition::Scalar(_) => Ok(vec![u[0]]),
            JointPosition::Free { orientation, translation } => {
                let v = Vec3::new(u[0], u[1], u[2]);
                let w = Vec3::new(u[3], u[4], u[5]);
                let dd = v + translation.cross(&w);
                let mut out: Vec<T> = dd.iter().copied().collect();
                out.extend(orientation.rate(&w)?);
                Ok(out)
            }
        }
    }

    /// `M` with `V_r = M q̇` (6 × coord_len), given the joint subspace `s`.
    pub fn rate_matrix(&self, s: &DMatrix<T>) -> DMatrix<T> {
        match self {
            JointPosition::Scalar(_) => s.clone(),
            JointPosition::Free { orientation, translation } => {
                let d = orientation.rate_map();
                let n = d.ncols();
                let mut m = DMatrix::zeros(6, 3 + n);
                m.view_mut((0, 0), (3, 3)).copy_from(&Mat3::<T>::identity());
                let dx = dmat3(&skew(translation));
                m.view_mut((0, 3), (3, n)).copy_from(&(-(&dx * &d)));
                m.view_mut((3, 3), (3, n)).copy_from(&d);
                m
            }
        }
    }

    /// `Ṁ` along coordinate rates `q_dot`.
    pub fn rate_matrix_dot(&self, s: &DMatrix<T>, q_dot: &[T]) -> DMatrix<T> {
        match self {
            JointPosition::Scalar(_) => DMatrix::zeros(s.nrows(), s.ncols()),
            JointPosition::Free { orientation, translation } => {
                let d = orientation.rate_map();
                let dd = orientation.rate_map_dot(&q_dot[3..]);
                let n = d.ncols();
                let tdot = Vec3::new(q_dot[0], q_dot[1], q_dot[2]);
                let mut m = DMatrix::zeros(6, 3 + n);
                let top = -(dmat3(&skew(&tdot)) * &d + dmat3(&skew(translation)) * &dd);
                m.view_mut((0, 3), (3, n)).copy_from(&top);
                m.view_mut((3, 3), (3, n)).copy_from(&dd);
                m
            }
        }
    }

    /// `N` with `q̇ = N u` (coord_len × dof): `[[I, dᵖ×], [0, G]]` for free joints.
    pub fn velocity_to_rates(&self, dof: usize) -> Result<DMatrix<T>> {
        match self {
            JointPosition::Scalar(_) => Ok(DMatrix::identity(1, dof)),
            JointPosition::Free { orientation, translation } => {
                let g = orientation.rate_inverse()?;
                let n = g.nrows();
                let mut m = DMatrix::zeros(3 + n, 6);
                m.view_mut((0, 0), (3, 3)).copy_from(&Mat3::<T>::identity());
                m.view_mut((0, 3), (3, 3)).copy_from(&skew(translation));
                m.view_mut((3, 3), (n, 3)).copy_from(&g);
                Ok(m)
            }
        }
    }

    /// `Ṅ` along coordinate rates `q_dot`.
    pub fn velocity_to_rates_dot(&self, dof: usize, q_dot: &[T]) -> Result<DMatrix<T>> {
        match self {
            JointPosition::Scalar(_) => Ok(DMatrix::zeros(1, dof)),
            JointPosition::Free { orientation, .. } => {
                let n = orientation.kind().dim();
                let gd = match orientation {
                    Orientation::Quaternion(_) => {
                        let l = Vec3::new(q_dot[4], q_dot[5], q_dot[6]);
                        let mut g = DMatrix::zeros(4, 3);
                        g.view_mut((0, 0), (1, 3)).copy_from(&(-l.transpose()));
                        g.view_mut((1, 0), (3, 3)).copy_from(&(Mat3::identity() * q_dot[3] + skew(&l)));
                        g * T::lit(0.5)
                    }
                    _ => {
                        let g = orientation.rate_inverse()?;
                        let dd = orientation.rate_map_dot(&q_dot[3..]);
                        -(&g * dd * &g)
                    }
                };
                let tdot = Vec3::new(q_dot[0], q_dot[1], q_dot[2]);
                let mut m = DMatrix::zeros(3 + n, 6);
                m.view_mut((0, 3), (3, 3)).copy_from(&skew(&tdot));
                m.view_mut((3, 3), (n, 3)).copy_from(&gd);
                Ok(m)
            }
        }
    }
}

fn dmat3<T: Real>(m: &Mat3<T>) -> DMatrix<T> {
    DMatrix::from_iterator(3, 3, m.iter().copied())
}
