//! Pointwise continuum kinematics and isotropic constitutive maps.

use nalgebra::Matrix2;

use crate::error::{MechError, Result};
use crate::scalar::Real;
use crate::screw::Mat3;

pub type Mat2<T> = Matrix2<T>;

/// Symmetric and antisymmetric parts of a velocity gradient: strain rate and spin.
pub fn velocity_gradient_split<T: Real>(g: &Mat3<T>) -> (Mat3<T>, Mat3<T>) {
    let half = T::lit(0.5);
    let gt = g.transpose();
    ((g + gt) * half, (g - gt) * half)
}

/// Strain tensor, the identity in the reference state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainState<T: Real> {
    pub strain: Mat3<T>,
}

impl<T: Real> Default for StrainState<T> {
    fn default() -> Self {
        Self { strain: Mat3::identity() }
    }
}

/// Advances the strain by `dt` under a velocity gradient held constant over
/// the step; only its symmetric part contributes.
pub fn strain_evolve<T: Real>(s: &StrainState<T>, velocity_gradient: &Mat3<T>, dt: T) -> StrainState<T> {
    let (rate, _) = velocity_gradient_split(velocity_gradient);
    StrainState { strain: s.strain + rate * dt }
}

/// Rheological coefficients; `r3` only enters the planar map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rheology<T: Real> {
    pub r0: T,
    pub r1: T,
    pub r2: T,
    pub r3: T,
}

impl<T: Real> Rheology<T> {
    pub fn new(r0: T, r1: T, r2: T, r3: T) -> Self {
        Self { r0, r1, r2, r3 }
    }

    /// Invertibility determinant of the spatial map, `(3r₁ + r₂) r₂`.
    pub fn condition_3d(&self) -> T {
        (T::lit(3.0) * self.r1 + self.r2) * self.r2
    }

    /// Invertibility determinant of the planar map, `(2r₁ + r₂)(r₂² + 4r₃²)`.
    pub fn condition_2d(&self) -> T {
        (T::lit(2.0) * self.r1 + self.r2) * (self.r2 * self.r2 + T::lit(4.0) * self.r3 * self.r3)
    }
}

/// Rotation of the plane by a right angle, `[[0, −1], [1, 0]]`.
pub fn quarter_turn<T: Real>() -> Mat2<T> {
    Mat2::new(T::zero(), -T::one(), T::one(), T::zero())
}

fn commutator<T: Real>(u: &Mat2<T>) -> Mat2<T> {
    let j = quarter_turn::<T>();
    j * u - u * j
}

/// `T = r₀ I + r₁ tr(U) I + r₂ U`.
pub fn isotropic_map_3d<T: Real>(r: &Rheology<T>, u: &Mat3<T>) -> Mat3<T> {
    Mat3::identity() * (r.r0 + r.r1 * u.trace()) + u * r.r2
}

/// General isotropic linear form `a tr(U) I + b U + c Uᵀ`.
pub fn isotropic_linear_3d<T: Real>(a: T, b: T, c: T, u: &Mat3<T>) -> Mat3<T> {
    Mat3::identity() * (a * u.trace()) + u * b + u.transpose() * c
}

/// `T = r₀ I + r₁ tr(U) I + r₂ U + r₃ (ĨU − UĨ)`.
pub fn isotropic_map_2d<T: Real>(r: &Rheology<T>, u: &Mat2<T>) -> Mat2<T> {
    Mat2::identity() * (r.r0 + r.r1 * u.trace()) + u * r.r2 + commutator(u) * r.r3
}

/// Coefficients of the general rotation-invariant planar linear form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarLinear<T: Real> {
    /// Weight of `tr(U) I`.
    pub trace: T,
    /// Weight of `tr(ĨU) Ĩ`.
    pub trace_turned: T,
    /// Weight of `U`.
    pub direct: T,
    /// Weight of `Uᵀ`.
    pub transposed: T,
    /// Weight of `ĨU`.
    pub turned: T,
    /// Weight of `UᵀĨ`.
    pub transposed_turned: T,
}

pub fn isotropic_linear_2d<T: Real>(c: &PlanarLinear<T>, u: &Mat2<T>) -> Mat2<T> {
    let j = quarter_turn::<T>();
    let ut = u.transpose();
    Mat2::identity() * (c.trace * u.trace())
        + j * (c.trace_turned * (j * u).trace())
        + u * c.direct
        + ut * c.transposed
        + j * u * c.turned
        + ut * j * c.transposed_turned
}

fn check<T: Real>(value: T, name: &'static str) -> Result<()> {
    if !(value.abs() > T::RHEOLOGY_MARGIN) {
        return Err(MechError::IncorrectContinuum { condition: name, value: value.as_f64() });
    }
    Ok(())
}

/// Coefficients `(n₀, n₁, n₂)` of the inverse spatial map.
pub fn inverse_coefficients_3d<T: Real>(r: &Rheology<T>) -> Result<(T, T, T)> {
    check(r.condition_3d(), "(3r1 + r2) r2")?;
    let s = T::lit(3.0) * r.r1 + r.r2;
    Ok((-r.r0 / s, -r.r1 / (r.r2 * s), T::one() / r.r2))
}

/// `U = n₀ I + n₁ tr(T) I + n₂ T`.
pub fn inverse_map_3d<T: Real>(r: &Rheology<T>, t: &Mat3<T>) -> Result<Mat3<T>> {
    let (n0, n1, n2) = inverse_coefficients_3d(r)?;
    Ok(Mat3::identity() * (n0 + n1 * t.trace()) + t * n2)
}

/// Coefficients `(n₀, n₁, n₂, n₃)` of the inverse planar map.
pub fn inverse_coefficients_2d<T: Real>(r: &Rheology<T>) -> Result<(T, T, T, T)> {
    check(r.condition_2d(), "(2r1 + r2)(r2^2 + 4 r3^2)")?;
    let two = T::lit(2.0);
    let s = two * r.r1 + r.r2;
    let q = r.r2 * r.r2 + T::lit(4.0) * r.r3 * r.r3;
    Ok((-r.r0 / s, (two * r.r3 * r.r3 - r.r1 * r.r2) / (s * q), r.r2 / q, -r.r3 / q))
}

/// `U = n₀ I + n₁ tr(T) I + n₂ T + n₃ (ĨT − TĨ)`; inverts [`isotropic_map_2d`]
/// on symmetric arguments.
pub fn inverse_map_2d<T: Real>(r: &Rheology<T>, t: &Mat2<T>) -> Result<Mat2<T>> {
    let (n0, n1, n2, n3) = inverse_coefficients_2d(r)?;
    Ok(Mat2::identity() * (n0 + n1 * t.trace()) + t * n2 + commutator(t) * n3)
}

/// What the constitutive argument `U` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgumentKind {
    Strain,
    StrainRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuumKind {
    Elastic,
    ViscousFluid,
    IdealFluid,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub kind: ContinuumKind,
    /// Whether the constitutive map is invertible.
    pub correct: bool,
}

pub fn classify_continuum<T: Real>(r: &Rheology<T>, arg: ArgumentKind, dim: Dimension) -> Classification {
    let z = T::zero();
    let r3_active = dim == Dimension::Two && r.r3 != z;
    let kind = if r.r0 > z && r.r1 == z && r.r2 == z && !r3_active {
        ContinuumKind::IdealFluid
    } else if arg == ArgumentKind::Strain && r.r0 == z {
        ContinuumKind::Elastic
    } else if arg == ArgumentKind::StrainRate && r.r0 > z {
        ContinuumKind::ViscousFluid
    } else {
        ContinuumKind::Unclassified
    };
    let cond = match dim {
        Dimension::Three => r.condition_3d(),
        Dimension::Two => r.condition_2d(),
    };
    Classification { kind, correct: cond.abs() > T::RHEOLOGY_MARGIN }
}
