//! Mass-points with variable mass, pairwise gravitation and point-body
//! momentum densities.

use nalgebra::{Cholesky, DVector};

use crate::error::{MechError, Result};
use crate::integrate::rk4_step;
use crate::scalar::Real;
use crate::screw::{block6, Mat3, ScrewAtom, ScrewMeasure, SliderReduction, Vec3};

/// Velocity of the mass a point gains or sheds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowVelocity<T: Real> {
    /// Fixed velocity in the inertial frame.
    Absolute(Vec3<T>),
    /// Velocity relative to the point (rocket exhaust).
    Relative(Vec3<T>),
}

impl<T: Real> FlowVelocity<T> {
    pub fn absolute(&self, v: &Vec3<T>) -> Vec3<T> {
        match self {
            FlowVelocity::Absolute(u) => *u,
            FlowVelocity::Relative(w) => v + w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPoint<T: Real> {
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub mass: T,
    /// `ν`, positive for accretion.
    pub mass_rate: T,
    pub flow: FlowVelocity<T>,
}

impl<T: Real> MassPoint<T> {
    pub fn new(position: Vec3<T>, velocity: Vec3<T>, mass: T) -> Result<Self> {
        Self::with_flow(position, velocity, mass, T::zero(), FlowVelocity::Relative(Vec3::zeros()))
    }

    pub fn with_flow(position: Vec3<T>, velocity: Vec3<T>, mass: T, mass_rate: T, flow: FlowVelocity<T>) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(MechError::NonPositiveMass { mass: mass.as_f64() });
        }
        Ok(Self { position, velocity, mass, mass_rate, flow })
    }

    /// Reactive force `ξ = ν u` of this point's mass flow.
    pub fn reactive_force(&self) -> Vec3<T> {
        meshchersky_force(self.mass_rate, &self.flow.absolute(&self.velocity))
    }

    pub fn momentum(&self) -> Vec3<T> {
        self.velocity * self.mass
    }
}

/// `ξ = ν u`.
pub fn meshchersky_force<T: Real>(nu: T, u: &Vec3<T>) -> Vec3<T> {
    u * nu
}

/// `v̇ = (f + ξ − ν v) / ρ`.
pub fn masspoint_accel<T: Real>(p: &MassPoint<T>, f: &Vec3<T>, xi: &Vec3<T>) -> Result<Vec3<T>> {
    if !(p.mass > T::zero()) {
        return Err(MechError::NonPositiveMass { mass: p.mass.as_f64() });
    }
    Ok((f + xi - p.velocity * p.mass_rate) / p.mass)
}

/// Advances the mass by `ν dt` (exact for constant `ν`).
pub fn mass_rate_step<T: Real>(p: &MassPoint<T>, dt: T) -> Result<MassPoint<T>> {
    let mass = p.mass + p.mass_rate * dt;
    if !(mass > T::zero()) {
        return Err(MechError::MassExhausted { mass: mass.as_f64() });
    }
    Ok(MassPoint { mass, ..*p })
}

/// Gravitational action of a set of points on another.
#[derive(Debug, Clone, PartialEq)]
pub struct GravityAction<T: Real> {
    /// Force on each target.
    pub forces: Vec<Vec3<T>>,
    /// The forces as homogeneous sliders based at the targets.
    pub measure: ScrewMeasure<T>,
}

impl<T: Real> GravityAction<T> {
    /// Total force and moment about `at`.
    pub fn total(&self, at: &Vec3<T>) -> SliderReduction<T> {
        self.measure.resultant_at(at)
    }
}

fn pair_force<T: Real>(x: &Vec3<T>, mx: T, y: &Vec3<T>, my: T, gamma: T) -> Result<Vec3<T>> {
    let d = y - x;
    let r = d.norm();
    if r < T::COINCIDENCE_TOL {
        return Err(MechError::CoincidentPoints { distance: r.as_f64() });
    }
    Ok(d * (gamma * mx * my / (r * r * r)))
}

/// Attraction of the `tgt` points by the `src` points: the force on `x` is
/// `γ ρ_x Σ ρ_y (y − x)/|y − x|³`.
pub fn gravity_screws<T: Real>(src: &[MassPoint<T>], tgt: &[MassPoint<T>], gamma: T) -> Result<GravityAction<T>> {
    let mut forces = Vec::with_capacity(tgt.len());
    for x in tgt {
        let mut f = Vec3::zeros();
        for y in src {
            f += pair_force(&x.position, x.mass, &y.position, y.mass, gamma)?;
        }
        forces.push(f);
    }
    Ok(action(tgt, forces))
}

/// Mutual attraction within one set (self-pairs excluded).
pub fn mutual_gravity<T: Real>(points: &[MassPoint<T>], gamma: T) -> Result<GravityAction<T>> {
    let n = points.len();
    let mut forces = vec![Vec3::zeros(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let f = pair_force(&points[i].position, points[i].mass, &points[j].position, points[j].mass, gamma)?;
            forces[i] += f;
            forces[j] -= f;
        }
    }
    Ok(action(points, forces))
}

fn action<T: Real>(tgt: &[MassPoint<T>], forces: Vec<Vec3<T>>) -> GravityAction<T> {
    let measure = ScrewMeasure::new(
        tgt.iter().zip(&forces).map(|(p, f)| ScrewAtom::homogeneous(p.position, *f, T::one())).collect(),
    );
    GravityAction { forces, measure }
}

/// Environment of a set of mass-points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSystem<T: Real> {
    /// Gravitational constant of the mutual attraction (0 disables it).
    pub gamma: T,
    /// Uniform field acting on every point.
    pub uniform_gravity: Vec3<T>,
}

impl<T: Real> PointSystem<T> {
    pub fn accelerations(&self, points: &[MassPoint<T>]) -> Result<Vec<Vec3<T>>> {
        self.accelerations_with(points, &[])
    }

    /// As [`Self::accelerations`] with extra applied forces, one per point
    /// (missing entries count as zero).
    pub fn accelerations_with(&self, points: &[MassPoint<T>], applied: &[Vec3<T>]) -> Result<Vec<Vec3<T>>> {
        let mutual = if self.gamma == T::zero() {
            vec![Vec3::zeros(); points.len()]
        } else {
            mutual_gravity(points, self.gamma)?.forces
        };
        points
            .iter()
            .zip(&mutual)
            .enumerate()
            .map(|(i, (p, g))| {
                let f = applied.get(i).copied().unwrap_or_else(Vec3::zeros);
                masspoint_accel(p, &(g + f + self.uniform_gravity * p.mass), &p.reactive_force())
            })
            .collect()
    }

    /// One RK4 step of positions, velocities and masses.
    pub fn step(&self, points: &[MassPoint<T>], dt: T) -> Result<Vec<MassPoint<T>>> {
        self.step_with(points, &[], dt)
    }

    /// One RK4 step with constant applied forces.
    pub fn step_with(&self, points: &[MassPoint<T>], applied: &[Vec3<T>], dt: T) -> Result<Vec<MassPoint<T>>> {
        let pack = |ps: &[MassPoint<T>]| {
            DVector::from_iterator(
                7 * ps.len(),
                ps.iter().flat_map(|p| p.position.iter().chain(p.velocity.iter()).copied().chain([p.mass])),
            )
        };
        let unpack = |y: &DVector<T>| -> Result<Vec<MassPoint<T>>> {
            points
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let s = &y.as_slice()[7 * i..7 * i + 7];
                    if !(s[6] > T::zero()) {
                        return Err(MechError::MassExhausted { mass: s[6].as_f64() });
                    }
                    Ok(MassPoint {
                        position: Vec3::new(s[0], s[1], s[2]),
                        velocity: Vec3::new(s[3], s[4], s[5]),
                        mass: s[6],
                        ..*p
                    })
                })
                .collect()
        };
        let y1 = rk4_step(T::zero(), &pack(points), dt, |_, y| {
            let ps = unpack(y)?;
            let acc = self.accelerations_with(&ps, applied)?;
            Ok(DVector::from_iterator(
                7 * ps.len(),
                ps.iter().zip(&acc).flat_map(|(p, a)| p.velocity.iter().chain(a.iter()).copied().chain([p.mass_rate])),
            ))
        })?;
        unpack(&y1)
    }

    /// Kinetic plus mutual gravitational and uniform-field potential energy.
    pub fn energy(&self, points: &[MassPoint<T>]) -> T {
        let half = T::lit(0.5);
        let mut e = T::zero();
        for (i, p) in points.iter().enumerate() {
            e += half * p.mass * p.velocity.norm_squared() - p.mass * self.uniform_gravity.dot(&p.position);
            for q in &points[i + 1..] {
                e -= self.gamma * p.mass * q.mass / (p.position - q.position).norm();
            }
        }
        e
    }
}

/// Total momentum screw `Σ (ρ v, x × ρ v)` reduced at the origin.
pub fn momentum_screw<T: Real>(points: &[MassPoint<T>]) -> SliderReduction<T> {
    points.iter().fold(SliderReduction::zero(Vec3::zeros()), |acc, p| {
        let m = p.momentum();
        SliderReduction::new(acc.resultant + m, acc.moment + p.position.cross(&m), acc.at)
    })
}

/// Inertia densities of a point-body: translational `A`, coupling `B`,
/// rotational `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointBodyInertia<T: Real> {
    pub a: Mat3<T>,
    pub b: Mat3<T>,
    pub c: Mat3<T>,
}

/// Momentum `p`, spin `q` and kinetic energy `k` densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointBodyMomentum<T: Real> {
    pub p: Vec3<T>,
    pub q: Vec3<T>,
    pub k: T,
}

impl<T: Real> PointBodyInertia<T> {
    /// Fails unless `[[A, B], [Bᵀ, C]]` is positive definite.
    pub fn new(a: Mat3<T>, b: Mat3<T>, c: Mat3<T>) -> Result<Self> {
        let sym = |m: &Mat3<T>| (m - m.transpose()).amax() <= T::ALGEBRA_TOL * (T::one() + m.amax());
        if !sym(&a) || !sym(&c) || Cholesky::new(block6(&a, &b, &b.transpose(), &c)).is_none() {
            return Err(MechError::IndefinitePointBodyInertia);
        }
        Ok(Self { a, b, c })
    }

    /// Rigid point of mass `m` and rotational inertia `j`.
    pub fn rigid(m: T, j: Mat3<T>) -> Result<Self> {
        Self::new(Mat3::identity() * m, Mat3::zeros(), j)
    }

    pub fn momentum(&self, v: &Vec3<T>, w: &Vec3<T>) -> PointBodyMomentum<T> {
        let half = T::lit(0.5);
        let p = self.a * v + self.b * w;
        let q = self.b.tr_mul(v) + self.c * w;
        let k = half * v.dot(&(self.a * v)) + v.dot(&(self.b * w)) + half * w.dot(&(self.c * w));
        PointBodyMomentum { p, q, k }
    }
}

pub fn pointbody_momentum<T: Real>(ins: &PointBodyInertia<T>, v: &Vec3<T>, w: &Vec3<T>) -> PointBodyMomentum<T> {
    ins.momentum(v, w)
}
