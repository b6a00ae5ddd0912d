//! Seeded random generators for poses, rotations and states.
//!
//! Used by the property tests and the built-in validation suites.

use rand::Rng;

use crate::motion::{FramePose, RotationMatrix};
use crate::rotation::UnitQuaternion;
use crate::scalar::Real;
use crate::screw::{Mat3, Vec3};

pub fn scalar<T: Real, R: Rng>(rng: &mut R, scale: f64) -> T {
    T::lit(rng.gen_range(-scale..=scale))
}

pub fn vec3<T: Real, R: Rng>(rng: &mut R, scale: f64) -> Vec3<T> {
    Vec3::new(scalar(rng, scale), scalar(rng, scale), scalar(rng, scale))
}

pub fn mat3<T: Real, R: Rng>(rng: &mut R, scale: f64) -> Mat3<T> {
    Mat3::from_fn(|_, _| scalar(rng, scale))
}

pub fn symmetric<T: Real, R: Rng>(rng: &mut R, scale: f64) -> Mat3<T> {
    let m: Mat3<T> = mat3(rng, scale);
    (m + m.transpose()) * T::lit(0.5)
}

/// Uniformly distributed unit quaternion (Shoemake).
pub fn unit_quaternion<T: Real, R: Rng>(rng: &mut R) -> UnitQuaternion<T> {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let u3: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuaternion::new_normalize(
        T::lit(b * u3.cos()),
        Vec3::new(T::lit(a * u2.sin()), T::lit(a * u2.cos()), T::lit(b * u3.sin())),
    )
}

pub fn rotation<T: Real, R: Rng>(rng: &mut R) -> RotationMatrix<T> {
    unit_quaternion(rng).to_rotation()
}

/// Rotation whose angle stays below `max_angle`.
pub fn rotation_within<T: Real, R: Rng>(rng: &mut R, max_angle: f64) -> RotationMatrix<T> {
    let axis: Vec3<T> = vec3(rng, 1.0);
    let angle = T::lit(rng.gen_range(0.0..max_angle));
    RotationMatrix::from_axis_angle(&axis, angle)
}

pub fn pose<T: Real, R: Rng>(rng: &mut R, scale: f64) -> FramePose<T> {
    FramePose::new(rotation(rng), vec3(rng, scale))
}
