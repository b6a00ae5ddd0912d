use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::kinematics::{kinematics_matrix_from, TreeKinematics};
use super::tree::{MultibodyTree, SystemState};
use crate::error::{MechError, Result};
use crate::integrate::rk4_step;
use crate::motion::phi_wrench;
use crate::rigid_body::gravity_wrench;
use crate::scalar::Real;
use crate::screw::{lower, skew, stack, upper, Vec6};

/// Source of applied wrenches (stacked, body coordinates, 6 per body).
/// May depend on time, poses and twists.
pub trait ExternalWrench<T: Real> {
    fn wrenches(&mut self, t: T, kin: &TreeKinematics<T>) -> Result<DVector<T>>;
}

impl<T: Real, F> ExternalWrench<T> for F
where
    F: FnMut(T, &TreeKinematics<T>) -> Result<DVector<T>>,
{
    fn wrenches(&mut self, t: T, kin: &TreeKinematics<T>) -> Result<DVector<T>> {
        self(t, kin)
    }
}

/// No applied wrenches beyond gravity.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoWrench;

impl<T: Real> ExternalWrench<T> for NoWrench {
    fn wrenches(&mut self, _: T, kin: &TreeKinematics<T>) -> Result<DVector<T>> {
        Ok(DVector::zeros(6 * kin.absolute.len()))
    }
}

/// Block equations of the free bodies, `A V̇_a + B V_a = F_a`, together with
/// the kinematic map `V_a = L V_r`.
#[derive(Debug, Clone)]
pub struct AssembledSystem<T: Real> {
    pub kinematics: TreeKinematics<T>,
    /// `blockdiag Θₚ(t)`.
    pub a: DMatrix<T>,
    /// `blockdiag (Qₚ + Φ_wr(V_a,ₚ) Θₚ(t))`.
    pub b: DMatrix<T>,
    /// Gravity plus applied wrenches.
    pub f_a: DVector<T>,
    pub l: DMatrix<T>,
    pub l_dot: DMatrix<T>,
    /// `blockdiag Sₚ`.
    pub s: DMatrix<T>,
}

impl<T: Real> AssembledSystem<T> {
    /// `L S`, the map from joint velocities to absolute twists.
    pub fn ls(&self) -> DMatrix<T> {
        &self.l * &self.s
    }

    /// Wrench each body needs from its joints: `A V̇_a + B V_a − F_a`.
    pub fn constraint_wrenches(&self, u: &DVector<T>, u_dot: &DVector<T>) -> DVector<T> {
        let ls = self.ls();
        let va = &ls * u;
        let va_dot = &ls * u_dot + &self.l_dot * (&self.s * u);
        &self.a * va_dot + &self.b * va - &self.f_a
    }

    /// Power of the joint wrenches on every admissible motion, `(L S)ᵀ R`.
    pub fn constraint_power(&self, u: &DVector<T>, u_dot: &DVector<T>) -> DVector<T> {
        self.ls().transpose() * self.constraint_wrenches(u, u_dot)
    }
}

pub fn assemble_system<T: Real, W: ExternalWrench<T> + ?Sized>(
    tree: &MultibodyTree<T>,
    state: &SystemState<T>,
    t: T,
    wrench: &mut W,
) -> Result<AssembledSystem<T>> {
    let kin = TreeKinematics::compute(tree, state)?;
    let (l, l_dot) = kinematics_matrix_from(tree, &kin);
    let k = tree.len();
    let mut a = DMatrix::zeros(6 * k, 6 * k);
    let mut b = DMatrix::zeros(6 * k, 6 * k);
    let mut f_a = wrench.wrenches(t, &kin)?;
    if f_a.len() != 6 * k {
        return Err(MechError::InvalidState(format!("expected {} wrench components, got {}", 6 * k, f_a.len())));
    }
    for (i, body) in tree.bodies().iter().enumerate() {
        let ins = body.inertia.advanced(t);
        let va = kin.absolute_twists[i];
        let bi = ins.source + phi_wrench(&upper(&va), &lower(&va)) * ins.theta;
        a.view_mut((6 * i, 6 * i), (6, 6)).copy_from(&ins.theta);
        b.view_mut((6 * i, 6 * i), (6, 6)).copy_from(&bi);
        let g = gravity_wrench(&ins, &kin.absolute[i], &tree.gravity);
        let mut fi = f_a.rows_mut(6 * i, 6);
        fi += g;
    }
    Ok(AssembledSystem { kinematics: kin, a, b, f_a, l, l_dot, s: tree.subspace_matrix() })
}

/// Joint-space equations `mass u̇ + bias = force`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDynamics<T: Real> {
    pub mass: DMatrix<T>,
    pub bias: DVector<T>,
    pub force: DVector<T>,
}

impl<T: Real> ReducedDynamics<T> {
    pub fn accelerations(&self) -> Result<DVector<T>> {
        spd_solve(&self.mass, &(&self.force - &self.bias)).map_err(|reason| MechError::SingularReducedMass { reason })
    }
}

/// Projects the block equations onto the joint velocities with `(L S)ᵀ`.
pub fn joint_project<T: Real>(sys: &AssembledSystem<T>, u: &DVector<T>) -> ReducedDynamics<T> {
    let ls = sys.ls();
    let lst = ls.transpose();
    let mass = &lst * &sys.a * &ls;
    let mass = (&mass + mass.transpose()) * T::lit(0.5);
    let bias = &lst * ((&sys.a * &sys.l_dot + &sys.b * &sys.l) * (&sys.s * u));
    let force = &lst * &sys.f_a;
    ReducedDynamics { mass, bias, force }
}

/// Solves `m x = rhs` for a symmetric positive definite `m` whose condition
/// number is below [`Real::MAX_CONDITION`].
pub(crate) fn spd_solve<T: Real>(m: &DMatrix<T>, rhs: &DVector<T>) -> std::result::Result<DVector<T>, String> {
    let eig = SymmetricEigen::new(m.clone());
    let lo = eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), T::min);
    let hi = eig.eigenvalues.iter().copied().fold(T::zero(), T::max);
    if !(lo > T::zero()) || hi / lo > T::MAX_CONDITION {
        return Err(format!("eigenvalues in [{:.3e}, {:.3e}]", lo.as_f64(), hi.as_f64()));
    }
    let ch = m.clone().cholesky().ok_or_else(|| "cholesky failed".to_string())?;
    Ok(ch.solve(rhs))
}

/// Joint accelerations from the projected Newton–Euler equations.
pub fn joint_accelerations<T: Real, W: ExternalWrench<T> + ?Sized>(
    tree: &MultibodyTree<T>,
    state: &SystemState<T>,
    t: T,
    wrench: &mut W,
) -> Result<DVector<T>> {
    let sys = assemble_system(tree, state, t, wrench)?;
    joint_project(&sys, &state.velocities).accelerations()
}

pub(crate) fn position_rates<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, p) in state.positions.iter().enumerate() {
        let r = tree.dof_range(i);
        out.extend(p.rates(&state.velocities.as_slice()[r])?);
    }
    Ok(out)
}

pub(crate) fn split<T: Real>(y: &DVector<T>, n: usize) -> (&[T], &[T]) {
    y.as_slice().split_at(n)
}

pub(crate) fn finish_positions<T: Real>(template: &SystemState<T>, coords: &[T]) -> Result<Vec<super::JointPosition<T>>> {
    let positions: Vec<_> = template.with_position_coords(coords).iter().map(|p| p.normalized()).collect();
    for p in &positions {
        p.check_regular()?;
    }
    Ok(positions)
}

/// Advances joint positions by one RK4 step at constant joint velocities,
/// then renormalizes quaternions and checks parameter regularity.
pub fn orientation_step<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>, dt: T) -> Result<SystemState<T>> {
    tree.check_state(state)?;
    let y0 = DVector::from_vec(state.position_coords());
    let y1 = rk4_step(T::zero(), &y0, dt, |_, y| {
        let st = SystemState::new(state.with_position_coords(y.as_slice()), state.velocities.clone());
        st.positions.iter().try_for_each(|p| p.check_regular())?;
        Ok(DVector::from_vec(position_rates(tree, &st)?))
    })?;
    Ok(SystemState::new(finish_positions(state, y1.as_slice())?, state.velocities.clone()))
}

/// One RK4 step of the projected Newton–Euler equations.
pub fn newton_euler_step<T: Real, W: ExternalWrench<T> + ?Sized>(
    tree: &MultibodyTree<T>,
    state: &SystemState<T>,
    t: T,
    dt: T,
    wrench: &mut W,
) -> Result<SystemState<T>> {
    tree.check_state(state)?;
    let mut y0 = state.position_coords();
    let nq = y0.len();
    y0.extend(state.velocities.iter());
    let y1 = rk4_step(t, &DVector::from_vec(y0), dt, |s, y| {
        let (q, u) = split(y, nq);
        let st = SystemState::new(state.with_position_coords(q), DVector::from_column_slice(u));
        st.positions.iter().try_for_each(|p| p.check_regular())?;
        let mut dy = position_rates(tree, &st)?;
        dy.extend(joint_accelerations(tree, &st, s, wrench)?.iter());
        Ok(DVector::from_vec(dy))
    })?;
    let (q, u) = split(&y1, nq);
    Ok(SystemState::new(finish_positions(state, q)?, DVector::from_column_slice(u)))
}

/// Kinetic and gravitational potential energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy<T: Real> {
    pub kinetic: T,
    pub potential: T,
}

impl<T: Real> Energy<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.potential
    }
}

pub fn mechanical_energy<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>, t: T) -> Result<Energy<T>> {
    let kin = TreeKinematics::compute(tree, state)?;
    let mut kinetic = T::zero();
    let mut potential = T::zero();
    for (i, body) in tree.bodies().iter().enumerate() {
        let ins = body.inertia.advanced(t);
        kinetic += ins.kinetic_energy(&kin.absolute_twists[i]);
        let com = kin.absolute[i].apply_point(&ins.center_of_mass());
        potential -= ins.mass() * tree.gravity.dot(&com);
    }
    Ok(Energy { kinetic, potential })
}

/// Total momentum wrench `col{p, h}` in ground coordinates, about the ground origin.
pub fn total_momentum<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>, t: T) -> Result<Vec6<T>> {
    let kin = TreeKinematics::compute(tree, state)?;
    let mut total = Vec6::zeros();
    for (i, body) in tree.bodies().iter().enumerate() {
        let mb = body.inertia.advanced(t).momentum(&kin.absolute_twists[i]);
        let x = &kin.absolute[i];
        let f = x.c() * upper(&mb);
        let m = x.c() * lower(&mb) + skew(&x.translation) * f;
        total += stack(&f, &m);
    }
    Ok(total)
}
