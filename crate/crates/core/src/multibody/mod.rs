//! Tree-structured systems of rigid bodies.
//!
//! Each body hangs from its parent (or the ground) through a revolute,
//! prismatic or free joint. Absolute twists follow from relative ones through
//! the block lower-triangular map `L`; the equations of motion are the body
//! Newton–Euler blocks projected onto the joint velocities, or their
//! Lagrange form in generalized coordinates.

mod dynamics;
mod joint;
mod kinematics;
mod lagrange;
mod loops;
mod tree;

pub use dynamics::{
    assemble_system, joint_accelerations, joint_project, mechanical_energy, newton_euler_step, orientation_step,
    total_momentum, AssembledSystem, Energy, ExternalWrench, NoWrench, ReducedDynamics,
};
pub use joint::{Joint, JointKind, JointPosition};
pub use kinematics::{compose_velocities, kinematics_matrix, TreeKinematics};
pub use lagrange::{lagrange_assemble, lagrange_step, rate_matrices, velocities_from_rates, velocity_to_rates, LagrangeSystem};
pub use loops::{loop_residual, pair_residual, LoopClosure, LoopResidual};
pub use tree::{Body, MultibodyTree, SystemState};

/// Which form of the equations an integrator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    NewtonEuler,
    Lagrange,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::NewtonEuler => "newton-euler",
            Formulation::Lagrange => "lagrange",
        }
    }
}

impl std::str::FromStr for Formulation {
    type Err = crate::MechError;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "newton-euler" | "newton_euler" | "ne" => Ok(Formulation::NewtonEuler),
            "lagrange" => Ok(Formulation::Lagrange),
            other => Err(crate::MechError::InvalidState(format!("unknown formulation '{other}'"))),
        }
    }
}

/// One RK4 step with the chosen formulation.
pub fn step<T: crate::Real, W: ExternalWrench<T> + ?Sized>(
    formulation: Formulation,
    tree: &MultibodyTree<T>,
    state: &SystemState<T>,
    t: T,
    dt: T,
    wrench: &mut W,
) -> crate::Result<SystemState<T>> {
    match formulation {
        Formulation::NewtonEuler => newton_euler_step(tree, state, t, dt, wrench),
        Formulation::Lagrange => lagrange_step(tree, state, t, dt, wrench),
    }
}
