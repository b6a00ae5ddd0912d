//! Inertia screws assembled from mass atoms, and the single-body
//! Newton–Euler equation
//!
//! ```text
//! Θ V̇ + (Q + Φ_wr Θ) V = F + F_i
//! ```
//!
//! with `V = col{v, ω}` the body twist, `Θ` the inertia screw, `Q` its source
//! counterpart (mass rates) and all wrenches in body coordinates about the
//! body origin.

use nalgebra::{Cholesky, DVector, SymmetricEigen, U6};

use crate::error::{MechError, Result};
use crate::integrate::rk4_step;
use crate::motion::{phi_wrench, wrench_transform, FramePose, VelocityState};
use crate::rotation::{Orientation, ParamKind};
use crate::scalar::Real;
use crate::screw::{block, block6, lower, skew, stack, upper, Mat3, Mat6, SliderReduction, Vec3, Vec6};

/// A lumped (or quadrature) mass in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassAtom<T: Real> {
    pub position: Vec3<T>,
    /// Mass `ρμ` (kg).
    pub mass: T,
    /// Mass rate `νμ` (kg/s).
    pub mass_rate: T,
}

impl<T: Real> MassAtom<T> {
    pub fn new(position: Vec3<T>, mass: T) -> Result<Self> {
        Self::with_rate(position, mass, T::zero())
    }

    pub fn with_rate(position: Vec3<T>, mass: T, mass_rate: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(MechError::NonPositiveMass { mass: mass.as_f64() });
        }
        Ok(Self { position, mass, mass_rate })
    }
}

/// `[[I, −r×], [r×, −(r×)²]]`: maps a body twist to the velocity wrench of the point `r`.
pub fn theta_point<T: Real>(r: &Vec3<T>) -> Mat6<T> {
    let rx = skew(r);
    block6(&Mat3::identity(), &(-rx), &rx, &(-(rx * rx)))
}

/// Inertia screw `Θ` and source matrix `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaScrew<T: Real> {
    pub theta: Mat6<T>,
    pub source: Mat6<T>,
}

impl<T: Real> InertiaScrew<T> {
    pub fn new(theta: Mat6<T>, source: Mat6<T>) -> Self {
        Self { theta, source }
    }

    /// From mass, centre of mass and inertia about the centre of mass.
    pub fn from_mass_properties(mass: T, com: &Vec3<T>, inertia_com: &Mat3<T>) -> Self {
        let cx = skew(com);
        let theta = block6(
            &(Mat3::identity() * mass),
            &(-cx * mass),
            &(cx * mass),
            &(inertia_com - cx * cx * mass),
        );
        Self::new(theta, Mat6::zeros())
    }

    pub fn mass(&self) -> T {
        self.theta[(0, 0)]
    }

    /// Centre of mass, from the `m c×` block.
    pub fn center_of_mass(&self) -> Vec3<T> {
        let m = self.mass();
        let b = block(&self.theta, 1, 0);
        Vec3::new(b[(2, 1)], b[(0, 2)], b[(1, 0)]) / m
    }

    /// Inertia tensor about the body origin (lower-right block).
    pub fn rotational(&self) -> Mat3<T> {
        block(&self.theta, 1, 1)
    }

    /// `Θ + Q dt`, the inertia after a time `dt` at constant mass rates.
    pub fn advanced(&self, dt: T) -> Self {
        Self::new(self.theta + self.source * dt, self.source)
    }

    /// Fails unless `Θ` is positive definite with condition number below
    /// [`Real::MAX_CONDITION`].
    pub fn check_invertible(&self) -> Result<()> {
        let eig = SymmetricEigen::new(self.theta);
        let (lo, hi) = eig.eigenvalues.iter().fold((T::max_value().unwrap(), T::zero()), |(lo, hi), e| {
            (lo.min(*e), hi.max(*e))
        });
        if !(lo > T::zero()) || hi / lo > T::MAX_CONDITION {
            return Err(MechError::SingularInertia {
                reason: format!(
                    "eigenvalues in [{:.3e}, {:.3e}]; the atoms are collinear or fewer than three are non-collinear",
                    lo.as_f64(),
                    hi.as_f64()
                ),
            });
        }
        Ok(())
    }

    pub fn cholesky(&self) -> Result<Cholesky<T, U6>> {
        self.check_invertible()?;
        Cholesky::new(self.theta).ok_or_else(|| MechError::SingularInertia { reason: "cholesky failed".into() })
    }

    /// `½ Vᵀ Θ V`.
    pub fn kinetic_energy(&self, twist: &Vec6<T>) -> T {
        (twist.transpose() * self.theta * twist)[0] * T::lit(0.5)
    }

    /// Momentum wrench `Θ V` (body coordinates, about the body origin).
    pub fn momentum(&self, twist: &Vec6<T>) -> Vec6<T> {
        self.theta * twist
    }
}

/// `Θ = Σ θ(rᵢ) mᵢ`, `Q = Σ θ(rᵢ) ṁᵢ`.
pub fn assemble_inertia<T: Real>(atoms: &[MassAtom<T>]) -> Result<InertiaScrew<T>> {
    if atoms.is_empty() {
        return Err(MechError::EmptyBody);
    }
    let (theta, source) = atoms.iter().fold((Mat6::zeros(), Mat6::zeros()), |(t, q), a| {
        let th = theta_point(&a.position);
        (t + th * a.mass, q + th * a.mass_rate)
    });
    Ok(InertiaScrew::new(theta, source))
}

/// Pose and body twist `col{v, ω}` of a rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState<T: Real> {
    pub pose: FramePose<T>,
    pub twist: Vec6<T>,
}

impl<T: Real> BodyState<T> {
    pub fn new(pose: FramePose<T>, twist: Vec6<T>) -> Self {
        Self { pose, twist }
    }

    pub fn velocity(&self) -> VelocityState<T> {
        VelocityState::from_twist(&self.twist)
    }
}

/// `V̇ = Θ⁻¹ (F − (Q + Φ_wr Θ) V)` with `F` in body coordinates.
pub fn newton_euler_accel<T: Real>(ins: &InertiaScrew<T>, twist: &Vec6<T>, wrench: &Vec6<T>) -> Result<Vec6<T>> {
    let chol = ins.cholesky()?;
    Ok(chol.solve(&(wrench - newton_euler_bias(ins, twist))))
}

/// `(Q + Φ_wr Θ) V`.
pub fn newton_euler_bias<T: Real>(ins: &InertiaScrew<T>, twist: &Vec6<T>) -> Vec6<T> {
    let phi = phi_wrench(&upper(twist), &lower(twist));
    (ins.source + phi * ins.theta) * twist
}

/// As [`newton_euler_accel`] with the wrench given in parent coordinates
/// about the parent origin; it is mapped to the body by the inverse wrench
/// transform of the current pose.
pub fn newton_euler_accel_inertial<T: Real>(
    ins: &InertiaScrew<T>,
    state: &BodyState<T>,
    wrench_parent: &Vec6<T>,
) -> Result<Vec6<T>> {
    let to_body = wrench_transform(&state.pose)?.inverse();
    newton_euler_accel(ins, &state.twist, &(to_body.matrix() * wrench_parent))
}

/// Kinetic energy `Σ ½ m ‖v_x‖²` and momentum screw `Σ m v_x` reduced at the
/// body origin (body coordinates), computed atom by atom.
pub fn body_motion_measures<T: Real>(atoms: &[MassAtom<T>], state: &BodyState<T>) -> (T, SliderReduction<T>) {
    let vel = state.velocity();
    let half = T::lit(0.5);
    atoms.iter().fold((T::zero(), SliderReduction::zero(Vec3::zeros())), |(k, acc), a| {
        let vx = crate::motion::point_velocity(&vel, &a.position);
        let p = vx * a.mass;
        let r = SliderReduction::new(p, Vec3::zeros(), a.position).transport(&Vec3::zeros());
        (k + vx.norm_squared() * a.mass * half, acc.add(&r))
    })
}

/// Momentum screw in parent coordinates about the parent origin, `L_wr Θ V`.
pub fn inertial_momentum<T: Real>(ins: &InertiaScrew<T>, state: &BodyState<T>) -> Result<Vec6<T>> {
    Ok(wrench_transform(&state.pose)?.matrix() * ins.momentum(&state.twist))
}

/// Increment-velocity wrench `Σ (ξ, r × ξ)` from per-atom increments `ξ`
/// (body coordinates, already multiplied by the atom measure).
pub fn increment_wrench<T: Real>(atoms: &[MassAtom<T>], xi: &[Vec3<T>]) -> Vec6<T> {
    atoms.iter().zip(xi).fold(Vec6::zeros(), |acc, (a, x)| acc + stack(x, &a.position.cross(x)))
}

/// Wrench of uniform gravity `g` (parent coordinates) in body coordinates.
pub fn gravity_wrench<T: Real>(ins: &InertiaScrew<T>, pose: &FramePose<T>, g: &Vec3<T>) -> Vec6<T> {
    let m = ins.mass();
    let gb = pose.c().tr_mul(g) * m;
    stack(&gb, &ins.center_of_mass().cross(&gb))
}

/// Integrated state of a free body: orientation coordinates, origin position
/// (parent coordinates) and body twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeBodyState<T: Real> {
    pub orientation: Orientation<T>,
    pub position: Vec3<T>,
    pub twist: Vec6<T>,
}

impl<T: Real> FreeBodyState<T> {
    pub fn new(orientation: Orientation<T>, position: Vec3<T>, twist: Vec6<T>) -> Self {
        Self { orientation, position, twist }
    }

    pub fn pose(&self) -> FramePose<T> {
        FramePose::new(self.orientation.to_rotation(), self.position)
    }

    pub fn body_state(&self) -> BodyState<T> {
        BodyState::new(self.pose(), self.twist)
    }

    fn to_vector(&self) -> DVector<T> {
        let mut v = self.orientation.coords();
        v.extend(self.position.iter());
        v.extend(self.twist.iter());
        DVector::from_vec(v)
    }

    fn from_vector(kind: ParamKind, y: &DVector<T>) -> Self {
        let n = kind.dim();
        let o = Orientation::from_coords(kind, &y.as_slice()[..n]);
        let p = Vec3::new(y[n], y[n + 1], y[n + 2]);
        let t = Vec6::from_iterator(y.iter().skip(n + 3).copied());
        Self::new(o, p, t)
    }
}

/// One RK4 step of a free body; `wrench(t, state)` returns the body-frame
/// wrench `F + F_i`. The inertia drifts as `Θ(t) = Θ(t₀) + Q (t − t₀)`.
pub fn free_body_step<T, W>(
    ins: &InertiaScrew<T>,
    state: &FreeBodyState<T>,
    t: T,
    dt: T,
    mut wrench: W,
) -> Result<FreeBodyState<T>>
where
    T: Real,
    W: FnMut(T, &BodyState<T>) -> Result<Vec6<T>>,
{
    let kind = state.orientation.kind();
    let n = kind.dim();
    let y0 = state.to_vector();
    let y1 = rk4_step(t, &y0, dt, |s, y| {
        let st = FreeBodyState::from_vector(kind, y);
        st.orientation.check_regular()?;
        let ins_s = ins.advanced(s - t);
        let bs = st.body_state();
        let f = wrench(s, &bs)?;
        let acc = newton_euler_accel(&ins_s, &st.twist, &f)?;
        let mut dy = st.orientation.rate(&lower(&st.twist))?;
        let dp = bs.pose.c() * upper(&st.twist);
        dy.extend(dp.iter());
        dy.extend(acc.iter());
        debug_assert_eq!(dy.len(), n + 9);
        Ok(DVector::from_vec(dy))
    })?;
    let out = FreeBodyState::from_vector(kind, &y1);
    let out = FreeBodyState { orientation: out.orientation.normalized(), ..out };
    out.orientation.check_regular()?;
    Ok(out)
}
