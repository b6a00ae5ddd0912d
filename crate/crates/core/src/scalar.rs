//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the mechanics is generic over (`f32` or `f64`).
///
/// The associated tolerances are the thresholds used by validity checks
/// (orthonormality, unit norm, singular configurations). They are chosen per
/// precision: the `f64` values are the defaults documented throughout the
/// crate, `f32` gets correspondingly looser ones.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug {
    /// Maximum deviation of `CᵀC` from `I` (and of `det C` from 1) for a rotation.
    const ORTHONORMAL_TOL: Self;
    /// Maximum deviation of a unit quaternion's norm from 1.
    const UNIT_NORM_TOL: Self;
    /// Threshold below which `1 + tr C` or `det D` count as singular.
    const SINGULAR_TOL: Self;
    /// Maximum asymmetry of `CᵀĊ + (CᵀĊ)ᵀ` accepted when extracting ω.
    const ANTISYMMETRY_TOL: Self;
    /// Minimal separation of two gravitating points.
    const COINCIDENCE_TOL: Self;
    /// Margin for the invertibility conditions of constitutive maps.
    const RHEOLOGY_MARGIN: Self;
    /// Largest condition number accepted for mass matrices.
    const MAX_CONDITION: Self;
    /// Default comparison tolerance for pure algebra.
    const ALGEBRA_TOL: Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const ORTHONORMAL_TOL: f64 = 1e-9;
    const UNIT_NORM_TOL: f64 = 1e-9;
    const SINGULAR_TOL: f64 = 1e-10;
    const ANTISYMMETRY_TOL: f64 = 1e-8;
    const COINCIDENCE_TOL: f64 = 1e-12;
    const RHEOLOGY_MARGIN: f64 = 1e-12;
    const MAX_CONDITION: f64 = 1e12;
    const ALGEBRA_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const ORTHONORMAL_TOL: f32 = 1e-4;
    const UNIT_NORM_TOL: f32 = 1e-4;
    const SINGULAR_TOL: f32 = 1e-5;
    const ANTISYMMETRY_TOL: f32 = 1e-3;
    const COINCIDENCE_TOL: f32 = 1e-6;
    const RHEOLOGY_MARGIN: f32 = 1e-6;
    const MAX_CONDITION: f32 = 1e6;
    const ALGEBRA_TOL: f32 = 1e-5;
}
