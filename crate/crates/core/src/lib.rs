//! Screw-calculus mechanics.
//!
//! Sliders and screw measures, the wrench/twist transform groups, rotation
//! parameterizations, rigid-body and tree multibody dynamics, mass-point
//! dynamics and isotropic constitutive maps. Everything is generic over the
//! scalar type ([`Real`], implemented for `f32` and `f64`).
//!
//! Twists are ordered `col{v, ω}` and wrenches `col{f, m}`.

pub mod continuum;
pub mod error;
pub mod integrate;
pub mod motion;
pub mod multibody;
pub mod point;
pub mod rigid_body;
pub mod rotation;
pub mod sample;
pub mod scalar;
pub mod screw;
pub mod validate;

pub use error::{MechError, Result};
pub use scalar::Real;

/// Double-precision aliases.
pub mod f64 {
    pub type Vec3 = crate::screw::Vec3<f64>;
    pub type Vec6 = crate::screw::Vec6<f64>;
    pub type Mat3 = crate::screw::Mat3<f64>;
    pub type Mat6 = crate::screw::Mat6<f64>;
    pub type Pose = crate::motion::FramePose<f64>;
    pub type Rotation = crate::motion::RotationMatrix<f64>;
    pub type Orientation = crate::rotation::Orientation<f64>;
    pub type InertiaScrew = crate::rigid_body::InertiaScrew<f64>;
    pub type MultibodyTree = crate::multibody::MultibodyTree<f64>;
    pub type SystemState = crate::multibody::SystemState<f64>;
}

/// Single-precision aliases.
pub mod f32 {
    pub type Vec3 = crate::screw::Vec3<f32>;
    pub type Vec6 = crate::screw::Vec6<f32>;
    pub type Mat3 = crate::screw::Mat3<f32>;
    pub type Mat6 = crate::screw::Mat6<f32>;
    pub type Pose = crate::motion::FramePose<f32>;
    pub type Rotation = crate::motion::RotationMatrix<f32>;
    pub type Orientation = crate::rotation::Orientation<f32>;
    pub type InertiaScrew = crate::rigid_body::InertiaScrew<f32>;
    pub type MultibodyTree = crate::multibody::MultibodyTree<f32>;
    pub type SystemState = crate::multibody::SystemState<f32>;
}
