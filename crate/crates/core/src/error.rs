use thiserror::Error;

/// Errors raised by the mechanics layer.
///
/// Every message starts with the relation that failed (for instance
/// `newton-euler:`), so that a failure deep inside an integration can be
/// traced back to the formula that rejected it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechError {
    #[error("rotation matrix: not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("unit quaternion: norm {norm} deviates from 1")]
    NotUnitQuaternion { norm: f64 },

    #[error("angular velocity: CᵀĊ is not antisymmetric (asymmetry {asymmetry:.3e}); inconsistent (C, Ċ) pair")]
    InconsistentRotationRate { asymmetry: f64 },

    #[error("euler angles: rate matrix singular (det D = {det:.3e}, gimbal lock); switch to quaternion or fedorov parameterization")]
    GimbalLock { det: f64 },

    #[error("fedorov parameter: rotation angle at pi (1 + tr C = {trace_margin:.3e}); switch to quaternion parameterization")]
    FedorovSingular { trace_margin: f64 },

    #[error("newton-euler: singular inertia screw ({reason})")]
    SingularInertia { reason: String },

    #[error("joint projection: reduced mass matrix not positive definite or ill-conditioned ({reason})")]
    SingularReducedMass { reason: String },

    #[error("lagrange: generalized mass matrix singular ({reason})")]
    SingularLagrangeMass { reason: String },

    #[error("inertia assembly: empty atom list")]
    EmptyBody,

    #[error("mass atom: nonpositive mass {mass}")]
    NonPositiveMass { mass: f64 },

    #[error("continuity: mass exhausted ({mass} <= 0 after step)")]
    MassExhausted { mass: f64 },

    #[error("gravitation: coincident points (distance {distance:.3e})")]
    CoincidentPoints { distance: f64 },

    #[error("point-body inertia: kinetic energy density not positive definite")]
    IndefinitePointBodyInertia,

    #[error("constitutive inverse: incorrect continuum, {condition} = {value:.3e}")]
    IncorrectContinuum { condition: &'static str, value: f64 },

    #[error("joint: {0}")]
    InvalidJoint(String),

    #[error("tree: {0}")]
    InvalidTree(String),

    #[error("state: {0}")]
    InvalidState(String),
}

pub type Result<T, E = MechError> = std::result::Result<T, E>;
