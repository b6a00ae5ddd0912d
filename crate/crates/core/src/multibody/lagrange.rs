use nalgebra::{DMatrix, DVector};

use super::dynamics::{assemble_system, finish_positions, split, spd_solve, ExternalWrench};
use super::joint::JointPosition;
use super::tree::{MultibodyTree, SystemState};
use crate::error::{MechError, Result};
use crate::integrate::rk4_step;
use crate::rotation::ParamKind;
use crate::scalar::Real;

/// Generalized-coordinate equations `mass q̈ + bias q̇ = force`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeSystem<T: Real> {
    pub mass: DMatrix<T>,
    pub bias: DMatrix<T>,
    pub force: DVector<T>,
    /// `blockdiag Mₚ` with `V_r = M q̇`.
    pub rate_matrix: DMatrix<T>,
    pub rate_matrix_dot: DMatrix<T>,
}

impl<T: Real> LagrangeSystem<T> {
    pub fn accelerations(&self, q_dot: &DVector<T>) -> Result<DVector<T>> {
        spd_solve(&self.mass, &(&self.force - &self.bias * q_dot)).map_err(|reason| MechError::SingularLagrangeMass { reason })
    }
}

fn coord_offsets<T: Real>(positions: &[JointPosition<T>]) -> Vec<usize> {
    let mut out = vec![0];
    for p in positions {
        out.push(out.last().unwrap() + p.coords().len());
    }
    out
}

/// `blockdiag Mₚ` and `blockdiag Ṁₚ` along `q_dot`.
pub fn rate_matrices<T: Real>(
    tree: &MultibodyTree<T>,
    positions: &[JointPosition<T>],
    q_dot: &DVector<T>,
) -> (DMatrix<T>, DMatrix<T>) {
    let off = coord_offsets(positions);
    let k = tree.len();
    let mut m = DMatrix::zeros(6 * k, off[k]);
    let mut md = DMatrix::zeros(6 * k, off[k]);
    for (i, p) in positions.iter().enumerate() {
        let s = tree.body(i).joint.motion_subspace();
        let n = off[i + 1] - off[i];
        let qd = &q_dot.as_slice()[off[i]..off[i + 1]];
        m.view_mut((6 * i, off[i]), (6, n)).copy_from(&p.rate_matrix(&s));
        md.view_mut((6 * i, off[i]), (6, n)).copy_from(&p.rate_matrix_dot(&s, qd));
    }
    (m, md)
}

/// `blockdiag Nₚ` (`q̇ = N u`) and its derivative along `q_dot`.
pub fn velocity_to_rates<T: Real>(
    tree: &MultibodyTree<T>,
    positions: &[JointPosition<T>],
    q_dot: &DVector<T>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let off = coord_offsets(positions);
    let k = tree.len();
    let mut n = DMatrix::zeros(off[k], tree.dof());
    let mut nd = DMatrix::zeros(off[k], tree.dof());
    for (i, p) in positions.iter().enumerate() {
        let r = tree.dof_range(i);
        let rows = off[i + 1] - off[i];
        let qd = &q_dot.as_slice()[off[i]..off[i + 1]];
        n.view_mut((off[i], r.start), (rows, r.len())).copy_from(&p.velocity_to_rates(r.len())?);
        nd.view_mut((off[i], r.start), (rows, r.len())).copy_from(&p.velocity_to_rates_dot(r.len(), qd)?);
    }
    Ok((n, nd))
}

/// Joint velocities `u` from coordinate rates (`u = Mₚ q̇` per free joint).
pub fn velocities_from_rates<T: Real>(tree: &MultibodyTree<T>, positions: &[JointPosition<T>], q_dot: &DVector<T>) -> DVector<T> {
    let (m, _) = rate_matrices(tree, positions, q_dot);
    // V_r = S u and S has full column rank, so u = (SᵀS)⁻¹ Sᵀ M q̇; S columns are orthonormal.
    tree.subspace_matrix().transpose() * (m * q_dot)
}

/// Assembles `𝒜 = MᵀLᵀALM`, `ℬ = MᵀLᵀ(ALṀ + (AL̇ + BL)M)`, `𝓕 = MᵀLᵀF_a`.
pub fn lagrange_assemble<T: Real, W: ExternalWrench<T> + ?Sized>(
    tree: &MultibodyTree<T>,
    positions: &[JointPosition<T>],
    q_dot: &DVector<T>,
    t: T,
    wrench: &mut W,
) -> Result<LagrangeSystem<T>> {
    let u = velocities_from_rates(tree, positions, q_dot);
    let state = SystemState::new(positions.to_vec(), u);
    let sys = assemble_system(tree, &state, t, wrench)?;
    let (m, md) = rate_matrices(tree, positions, q_dot);
    let lm = &sys.l * &m;
    let proj = lm.transpose();
    let mass = &proj * &sys.a * &lm;
    let mass = (&mass + mass.transpose()) * T::lit(0.5);
    let bias = &proj * (&sys.a * &sys.l * &md + (&sys.a * &sys.l_dot + &sys.b * &sys.l) * &m);
    let force = &proj * &sys.f_a;
    Ok(LagrangeSystem { mass, bias, force, rate_matrix: m, rate_matrix_dot: md })
}

fn has_quaternion<T: Real>(positions: &[JointPosition<T>]) -> bool {
    positions.iter().any(|p| p.param_kind() == Some(ParamKind::Quaternion))
}

/// One RK4 step of the Lagrange equations.
///
/// With only minimal coordinates (scalar joints, Euler angles, Fedorov
/// parameters) the state `(q, q̇)` is integrated directly. Quaternion
/// coordinates carry one redundant component and leave `𝒜` singular, so the
/// equations are projected with `N` (`q̇ = N u`) and `(q, u)` is integrated.
pub fn lagrange_step<T: Real, W: ExternalWrench<T> + ?Sized>(
    tree: &MultibodyTree<T>,
    state: &SystemState<T>,
    t: T,
    dt: T,
    wrench: &mut W,
) -> Result<SystemState<T>> {
    tree.check_state(state)?;
    let q0 = state.position_coords();
    let nq = q0.len();
    let zero = DVector::zeros(nq);
    let (n0, _) = velocity_to_rates(tree, &state.positions, &zero)?;
    let q_dot0 = &n0 * &state.velocities;
    let reduced = has_quaternion(&state.positions);
    let mut y0 = q0;
    if reduced {
        y0.extend(state.velocities.iter());
    } else {
        y0.extend(q_dot0.iter());
    }
    let y1 = rk4_step(t, &DVector::from_vec(y0), dt, |s, y| {
        let (q, v) = split(y, nq);
        let positions = state.with_position_coords(q);
        positions.iter().try_for_each(|p| p.check_regular())?;
        let v = DVector::from_column_slice(v);
        let mut dy: Vec<T>;
        if reduced {
            let (n, _) = velocity_to_rates(tree, &positions, &zero)?;
            let q_dot = &n * &v;
            let (_, nd) = velocity_to_rates(tree, &positions, &q_dot)?;
            let ls = lagrange_assemble(tree, &positions, &q_dot, s, wrench)?;
            let nt = n.transpose();
            let mass = &nt * &ls.mass * &n;
            let mass = (&mass + mass.transpose()) * T::lit(0.5);
            let rhs = &nt * (&ls.force - (&ls.mass * &nd + &ls.bias * &n) * &v);
            let u_dot = spd_solve(&mass, &rhs).map_err(|reason| MechError::SingularReducedMass { reason })?;
            dy = q_dot.iter().copied().collect();
            dy.extend(u_dot.iter());
        } else {
            let ls = lagrange_assemble(tree, &positions, &v, s, wrench)?;
            let q_ddot = ls.accelerations(&v)?;
            dy = v.iter().copied().collect();
            dy.extend(q_ddot.iter());
        }
        Ok(DVector::from_vec(dy))
    })?;
    let (q, v) = split(&y1, nq);
    let positions = finish_positions(state, q)?;
    let v = DVector::from_column_slice(v);
    let u = if reduced { v } else { velocities_from_rates(tree, &positions, &v) };
    Ok(SystemState::new(positions, u))
}
