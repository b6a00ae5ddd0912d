//! Frame poses and the 6×6 wrench/twist transform groups.
//!
//! A [`FramePose`] places a child frame `p` in a parent frame `0` through the
//! rotation `C` (child coordinates to parent coordinates) and the translation
//! `d⁰` of the child origin, written in parent coordinates.
//!
//! Both transforms map child coordinates to parent coordinates:
//!
//! ```text
//! wrench  col{f, m}:  π⁰ = L_wr π^p,  L_wr = [[C, 0], [d⁰× C, C]]
//! twist   col{v, ω}:  π⁰ = L_tw π^p,  L_tw = [[C, d⁰× C], [0, C]]
//! ```
//!
//! The parent-to-child direction is obtained through [`WrenchTransform::inverse`]
//! or by building the transform of [`FramePose::inverse`].

use crate::error::{MechError, Result};
use crate::scalar::Real;
use crate::screw::{block, block6, skew, stack, vee, Mat3, Mat6, SixColumn, SixOrder, Vec3, Vec6};

/// Proper orthonormal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T: Real>(Mat3<T>);

impl<T: Real> RotationMatrix<T> {
    /// Validates `CᵀC = I` and `det C = 1` within [`Real::ORTHONORMAL_TOL`].
    pub fn new(m: Mat3<T>) -> Result<Self> {
        let dev = orthonormal_deviation(&m);
        if dev > T::ORTHONORMAL_TOL {
            return Err(MechError::NotOrthonormal { deviation: dev.as_f64() });
        }
        Ok(Self(m))
    }

    /// Skips validation. The caller guarantees orthonormality.
    pub fn new_unchecked(m: Mat3<T>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Rotation by `angle` about the (normalized) `axis`.
    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        if n == T::zero() {
            return Self::identity();
        }
        let k = axis / n;
        let kx = skew(&k);
        let (s, c) = angle.sin_cos();
        Self(Mat3::identity() + kx * s + kx * kx * (T::one() - c))
    }

    /// Nearest rotation in the Frobenius sense, via SVD.
    pub fn project(m: &Mat3<T>) -> Self {
        let svd = m.svd(true, true);
        let u = svd.u.expect("svd u");
        let vt = svd.v_t.expect("svd v_t");
        let mut r = u * vt;
        if r.determinant() < T::zero() {
            let mut uf = u;
            uf.column_mut(2).neg_mut();
            r = uf * vt;
        }
        Self(r)
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    pub fn into_inner(self) -> Mat3<T> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> T {
        let c = (self.0.trace() - T::one()) * T::lit(0.5);
        c.clamp(-T::one(), T::one()).acos()
    }
}

/// Largest of `‖CᵀC − I‖_max` and `|det C − 1|`.
pub fn orthonormal_deviation<T: Real>(m: &Mat3<T>) -> T {
    let g = m.transpose() * m - Mat3::identity();
    g.amax().max((m.determinant() - T::one()).abs())
}

/// Placement of a child frame in its parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePose<T: Real> {
    pub rotation: RotationMatrix<T>,
    /// Child origin in parent coordinates.
    pub translation: Vec3<T>,
}

impl<T: Real> FramePose<T> {
    pub fn new(rotation: RotationMatrix<T>, translation: Vec3<T>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(RotationMatrix::identity(), Vec3::zeros())
    }

    pub fn from_translation(d: Vec3<T>) -> Self {
        Self::new(RotationMatrix::identity(), d)
    }

    pub fn from_rotation(c: RotationMatrix<T>) -> Self {
        Self::new(c, Vec3::zeros())
    }

    /// Builds a pose from the translation in child coordinates, `dᵖ = Cᵀ d⁰`.
    pub fn from_child_translation(rotation: RotationMatrix<T>, d_child: Vec3<T>) -> Self {
        let translation = rotation.matrix() * d_child;
        Self::new(rotation, translation)
    }

    pub fn c(&self) -> &Mat3<T> {
        self.rotation.matrix()
    }

    /// `dᵖ = Cᵀ d⁰`.
    pub fn translation_child(&self) -> Vec3<T> {
        self.c().tr_mul(&self.translation)
    }

    /// Pose of the parent relative to the child.
    pub fn inverse(&self) -> Self {
        let ct = self.rotation.transpose();
        Self::new(ct, -(ct.matrix() * self.translation))
    }

    /// Composition `0→p` then `p→k` giving `0→k`.
    pub fn compose(&self, next: &Self) -> Self {
        pose_compose(self, next)
    }

    /// Parent coordinates of a point given in child coordinates.
    pub fn apply_point(&self, x: &Vec3<T>) -> Vec3<T> {
        self.c() * x + self.translation
    }

    /// Largest deviation in rotation or translation.
    pub fn distance(&self, other: &Self) -> T {
        (self.c() - other.c()).amax().max((self.translation - other.translation).amax())
    }
}

/// `(C_a C_b, d_a + C_a d_b)`.
pub fn pose_compose<T: Real>(a: &FramePose<T>, b: &FramePose<T>) -> FramePose<T> {
    FramePose::new(a.rotation.mul(&b.rotation), a.translation + a.c() * b.translation)
}

/// Body-frame quasi-velocities of a frame: translation `v` and rotation `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityState<T: Real> {
    pub v: Vec3<T>,
    pub w: Vec3<T>,
}

impl<T: Real> VelocityState<T> {
    pub fn new(v: Vec3<T>, w: Vec3<T>) -> Self {
        Self { v, w }
    }

    pub fn zero() -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros())
    }

    /// Twist coordinates `col{v, ω}`.
    pub fn twist(&self) -> SixColumn<T> {
        SixColumn::new(stack(&self.v, &self.w), SixOrder::Twist)
    }

    pub fn from_twist(t: &Vec6<T>) -> Self {
        Self::new(Vec3::new(t[0], t[1], t[2]), Vec3::new(t[3], t[4], t[5]))
    }
}

/// Wrench transform of a pose; maps child wrench coordinates to parent ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrenchTransform<T: Real> {
    matrix: Mat6<T>,
    pose: FramePose<T>,
}

impl<T: Real> WrenchTransform<T> {
    pub fn matrix(&self) -> &Mat6<T> {
        &self.matrix
    }

    pub fn pose(&self) -> &FramePose<T> {
        &self.pose
    }

    /// `D⁰ · diag(C, C)`.
    pub fn parent_factorization(&self) -> Mat6<T> {
        translation_block(&self.pose.translation) * rotation_block(self.pose.c())
    }

    /// `diag(C, C) · Dᵖ`.
    pub fn child_factorization(&self) -> Mat6<T> {
        rotation_block(self.pose.c()) * translation_block(&self.pose.translation_child())
    }

    /// Transform of the inverse pose, i.e. parent-to-child.
    pub fn inverse(&self) -> Self {
        build_wrench(self.pose.inverse())
    }

    /// Maps child wrench coordinates `col{f, m}` to parent ones.
    pub fn apply(&self, w: &SixColumn<T>) -> SixColumn<T> {
        let c = match w.order {
            SixOrder::Wrench => *w,
            SixOrder::Twist => w.reorder(),
        };
        SixColumn::new(self.matrix * c.coords, SixOrder::Wrench)
    }

    pub fn twist(&self) -> TwistTransform<T> {
        TwistTransform { matrix: conjugate_swap(&self.matrix), pose: self.pose }
    }
}

/// Twist transform of a pose; maps child twist coordinates to parent ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistTransform<T: Real> {
    matrix: Mat6<T>,
    pose: FramePose<T>,
}

impl<T: Real> TwistTransform<T> {
    pub fn matrix(&self) -> &Mat6<T> {
        &self.matrix
    }

    pub fn pose(&self) -> &FramePose<T> {
        &self.pose
    }

    pub fn inverse(&self) -> Self {
        build_wrench(self.pose.inverse()).twist()
    }

    /// Maps child twist coordinates `col{v, ω}` to parent ones.
    pub fn apply(&self, t: &SixColumn<T>) -> SixColumn<T> {
        let c = match t.order {
            SixOrder::Twist => *t,
            SixOrder::Wrench => t.reorder(),
        };
        SixColumn::new(self.matrix * c.coords, SixOrder::Twist)
    }
}

fn rotation_block<T: Real>(c: &Mat3<T>) -> Mat6<T> {
    let z = Mat3::zeros();
    block6(c, &z, &z, c)
}

fn translation_block<T: Real>(d: &Vec3<T>) -> Mat6<T> {
    let i = Mat3::identity();
    block6(&i, &Mat3::zeros(), &skew(d), &i)
}

/// `S M S` with `S` the half-swap permutation.
pub(crate) fn conjugate_swap<T: Real>(m: &Mat6<T>) -> Mat6<T> {
    block6(&block(m, 1, 1), &block(m, 1, 0), &block(m, 0, 1), &block(m, 0, 0))
}

fn build_wrench<T: Real>(pose: FramePose<T>) -> WrenchTransform<T> {
    let c = pose.c();
    let matrix = block6(c, &Mat3::zeros(), &(skew(&pose.translation) * c), c);
    WrenchTransform { matrix, pose }
}

/// Wrench transform of `pose`, after re-validating its rotation.
pub fn wrench_transform<T: Real>(pose: &FramePose<T>) -> Result<WrenchTransform<T>> {
    RotationMatrix::new(*pose.c())?;
    Ok(build_wrench(*pose))
}

/// Twist transform of `pose`: the half-swap conjugate of the wrench transform.
pub fn twist_transform<T: Real>(pose: &FramePose<T>) -> Result<TwistTransform<T>> {
    Ok(wrench_transform(pose)?.twist())
}

/// Unvalidated twist transform matrix `[[C, d×C], [0, C]]`.
pub(crate) fn twist_matrix<T: Real>(pose: &FramePose<T>) -> Mat6<T> {
    let c = pose.c();
    block6(c, &(skew(&pose.translation) * c), &Mat3::zeros(), c)
}

/// Factors with `L̇_wr = L_wr Φ_wr = Ψ_wr L_wr` along a motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeFactors<T: Real> {
    /// `[[ω×, 0], [v×, ω×]]` from body-frame quasi-velocities.
    pub phi_wr: Mat6<T>,
    /// Same structure from parent-frame velocities `ω⁰ = Cω`, `v⁰ = Cv + d⁰ × ω⁰`.
    pub psi_wr: Mat6<T>,
}

impl<T: Real> DerivativeFactors<T> {
    pub fn phi_tw(&self) -> Mat6<T> {
        -self.phi_wr.transpose()
    }

    pub fn psi_tw(&self) -> Mat6<T> {
        -self.psi_wr.transpose()
    }
}

/// `[[ω×, 0], [v×, ω×]]`.
pub fn phi_wrench<T: Real>(v: &Vec3<T>, w: &Vec3<T>) -> Mat6<T> {
    let wx = skew(w);
    block6(&wx, &Mat3::zeros(), &skew(v), &wx)
}

/// `[[ω×, v×], [0, ω×]]`, the twist counterpart of [`phi_wrench`].
pub fn phi_twist<T: Real>(v: &Vec3<T>, w: &Vec3<T>) -> Mat6<T> {
    let wx = skew(w);
    block6(&wx, &skew(v), &Mat3::zeros(), &wx)
}

pub fn derivative_factors<T: Real>(vel: &VelocityState<T>, pose: &FramePose<T>) -> DerivativeFactors<T> {
    let c = pose.c();
    let w0 = c * vel.w;
    let v0 = c * vel.v + pose.translation.cross(&w0);
    DerivativeFactors { phi_wr: phi_wrench(&vel.v, &vel.w), psi_wr: phi_wrench(&v0, &w0) }
}

/// Body angular velocity from `ω× = CᵀĊ`.
pub fn angular_velocity_from_rotation<T: Real>(c: &RotationMatrix<T>, c_dot: &Mat3<T>) -> Result<Vec3<T>> {
    let m = c.matrix().tr_mul(c_dot);
    let asym = (m + m.transpose()).amax();
    if asym > T::ANTISYMMETRY_TOL {
        return Err(MechError::InconsistentRotationRate { asymmetry: asym.as_f64() });
    }
    Ok(vee(&m))
}

/// Velocity of the body point with body coordinates `r`, in body coordinates.
pub fn point_velocity<T: Real>(vel: &VelocityState<T>, r: &Vec3<T>) -> Vec3<T> {
    vel.v + vel.w.cross(r)
}
