//! Rotation parameterizations: Euler angles, Fedorov (Cayley/Gibbs) vector
//! parameter, and Euler–Rodrigues unit quaternions.
//!
//! Every rate map below relates parameter rates to the *body* angular velocity
//! `ω` defined by `ω× = CᵀĊ`. The Fedorov parameter additionally exposes the
//! parent-frame map, which is where the `(I + f×)` form lives.

use nalgebra::{DMatrix, Matrix3x4, Matrix4, Matrix4x3, Vector4};

use crate::error::{MechError, Result};
use crate::motion::RotationMatrix;
use crate::scalar::Real;
use crate::screw::{skew, vee, Mat3, Vec3};

/// Angles of the sequence `C = C₁(φ) C₂(θ) C₃(ψ)` about axes 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles<T: Real> {
    pub phi: T,
    pub theta: T,
    pub psi: T,
}

/// Matrix `D` with `ω = D λ̇`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateMap<T: Real> {
    pub d: Mat3<T>,
}

impl<T: Real> RateMap<T> {
    pub fn apply(&self, rates: &Vec3<T>) -> Vec3<T> {
        self.d * rates
    }

    pub fn det(&self) -> T {
        self.d.determinant()
    }

    pub fn inverse(&self) -> Result<Mat3<T>> {
        let det = self.det();
        if det.abs() < T::SINGULAR_TOL {
            return Err(MechError::GimbalLock { det: det.as_f64() });
        }
        self.d.try_inverse().ok_or(MechError::GimbalLock { det: det.as_f64() })
    }
}

fn rot1<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Mat3::new(o, z, z, z, c, -s, z, s, c)
}

fn rot2<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Mat3::new(c, z, s, z, o, z, -s, z, c)
}

fn rot3<T: Real>(a: T) -> Mat3<T> {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    Mat3::new(c, -s, z, s, c, z, z, z, o)
}

impl<T: Real> EulerAngles<T> {
    pub fn new(phi: T, theta: T, psi: T) -> Self {
        Self { phi, theta, psi }
    }

    pub fn to_rotation(&self) -> RotationMatrix<T> {
        euler_to_rotation(self)
    }

    /// Inverse of [`euler_to_rotation`] with `θ ∈ [−π/2, π/2]`.
    ///
    /// Fails when `cos θ` is below the singular threshold, where `φ` and `ψ`
    /// are not separately determined.
    pub fn from_rotation(c: &RotationMatrix<T>) -> Result<Self> {
        let m = c.matrix();
        let s = m[(0, 2)].clamp(-T::one(), T::one());
        let theta = s.asin();
        let ct = theta.cos();
        if ct < T::SINGULAR_TOL {
            return Err(MechError::GimbalLock { det: ct.as_f64() });
        }
        Ok(Self::new((-m[(1, 2)]).atan2(m[(2, 2)]), theta, (-m[(0, 1)]).atan2(m[(0, 0)])))
    }

    pub fn rate_map(&self) -> RateMap<T> {
        euler_rate_map(self)
    }

    /// `(φ̇, θ̇, ψ̇)` from body `ω`.
    pub fn rates(&self, w: &Vec3<T>) -> Result<Vec3<T>> {
        let (st, ct) = self.theta.sin_cos();
        if ct.abs() < T::SINGULAR_TOL {
            return Err(MechError::GimbalLock { det: ct.as_f64() });
        }
        let (sp, cp) = self.psi.sin_cos();
        let phi_dot = (w.x * cp - w.y * sp) / ct;
        let theta_dot = w.x * sp + w.y * cp;
        Ok(Vec3::new(phi_dot, theta_dot, w.z - st * phi_dot))
    }

    /// Time derivative of `D` along `rates`.
    pub fn rate_map_dot(&self, rates: &Vec3<T>) -> Mat3<T> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        let z = T::zero();
        let d_theta = Mat3::new(-st * cp, z, z, st * sp, z, z, ct, z, z);
        let d_psi = Mat3::new(-ct * sp, cp, z, -ct * cp, -sp, z, z, z, z);
        d_theta * rates.y + d_psi * rates.z
    }

    pub fn as_vec(&self) -> Vec3<T> {
        Vec3::new(self.phi, self.theta, self.psi)
    }
}

pub fn euler_to_rotation<T: Real>(a: &EulerAngles<T>) -> RotationMatrix<T> {
    RotationMatrix::new_unchecked(rot1(a.phi) * rot2(a.theta) * rot3(a.psi))
}

/// `D = [[cθ cψ, sψ, 0], [−cθ sψ, cψ, 0], [sθ, 0, 1]]`, `det D = cos θ`.
pub fn euler_rate_map<T: Real>(a: &EulerAngles<T>) -> RateMap<T> {
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.psi.sin_cos();
    let (o, z) = (T::one(), T::zero());
    RateMap { d: Mat3::new(ct * cp, sp, z, -ct * sp, cp, z, st, z, o) }
}

/// Cayley image `f` of a rotation, `f× = (C − I)(C + I)⁻¹`; `‖f‖ = tan(angle/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FedorovParam<T: Real> {
    pub f: Vec3<T>,
}

/// Frame in which an angular velocity is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateFrame {
    Body,
    Parent,
}

impl<T: Real> FedorovParam<T> {
    pub fn new(f: Vec3<T>) -> Self {
        Self { f }
    }

    /// Closed form `f× = (C − Cᵀ) / (1 + tr C)`.
    pub fn from_rotation(c: &RotationMatrix<T>) -> Result<Self> {
        fedorov_from_rotation(c)
    }

    /// Cayley form `f× = (C − I)(C + I)⁻¹`.
    pub fn from_rotation_cayley(c: &RotationMatrix<T>) -> Result<Self> {
        let m = c.matrix();
        check_fedorov_margin(m)?;
        let i = Mat3::identity();
        let inv = (m + i).try_inverse().ok_or(MechError::FedorovSingular { trace_margin: 0.0 })?;
        Ok(Self::new(vee(&((m - i) * inv))))
    }

    pub fn to_rotation(&self) -> RotationMatrix<T> {
        rotation_from_fedorov(self)
    }

    /// Cayley inverse `C = (I + f×)(I − f×)⁻¹`.
    pub fn to_rotation_cayley(&self) -> RotationMatrix<T> {
        let fx = skew(&self.f);
        let i = Mat3::identity();
        let inv = (i - fx).try_inverse().expect("I - f× is always invertible");
        RotationMatrix::new_unchecked((i + fx) * inv)
    }

    /// `1 + tr C = 4 / (1 + ‖f‖²)`; fails when it drops below the singular threshold.
    pub fn check_regular(&self) -> Result<()> {
        let margin = T::lit(4.0) / (T::one() + self.f.norm_squared());
        if margin < T::SINGULAR_TOL {
            return Err(MechError::FedorovSingular { trace_margin: margin.as_f64() });
        }
        Ok(())
    }

    /// `ω = D ḟ`. Body: `2/(1+‖f‖²)(I − f×)`; parent: `2/(1+‖f‖²)(I + f×)`.
    pub fn rate_map(&self, frame: RateFrame) -> RateMap<T> {
        let k = T::lit(2.0) / (T::one() + self.f.norm_squared());
        let fx = skew(&self.f);
        let d = match frame {
            RateFrame::Body => (Mat3::identity() - fx) * k,
            RateFrame::Parent => (Mat3::identity() + fx) * k,
        };
        RateMap { d }
    }

    /// `ḟ = D⁻¹ ω = ½ (I ± f× + f fᵀ) ω`.
    pub fn rate(&self, w: &Vec3<T>, frame: RateFrame) -> Vec3<T> {
        fedorov_rate(self, w, frame)
    }

    /// The explicit rate formula `½ (1 + ‖f‖²)(I − f×)²(I + f×) ω` as printed in
    /// the literature. It does not invert either rate map for `f ≠ 0` and is
    /// kept only for comparison.
    pub fn printed_rate(&self, w: &Vec3<T>) -> Vec3<T> {
        let fx = skew(&self.f);
        let i = Mat3::identity();
        let a = i - fx;
        (a * a * (i + fx) * w) * (T::lit(0.5) * (T::one() + self.f.norm_squared()))
    }

    /// Time derivative of the body rate map along `f_dot`.
    pub fn rate_map_dot(&self, f_dot: &Vec3<T>) -> Mat3<T> {
        let n = T::one() + self.f.norm_squared();
        let two = T::lit(2.0);
        let dk = -two * two * self.f.dot(f_dot) / (n * n);
        (Mat3::identity() - skew(&self.f)) * dk - skew(f_dot) * (two / n)
    }
}

fn check_fedorov_margin<T: Real>(m: &Mat3<T>) -> Result<T> {
    let margin = T::one() + m.trace();
    if margin < T::SINGULAR_TOL {
        return Err(MechError::FedorovSingular { trace_margin: margin.as_f64() });
    }
    Ok(margin)
}

pub fn fedorov_from_rotation<T: Real>(c: &RotationMatrix<T>) -> Result<FedorovParam<T>> {
    let m = c.matrix();
    let margin = check_fedorov_margin(m)?;
    Ok(FedorovParam::new(vee(&(m - m.transpose())) / margin))
}

/// `C = ((1 − ‖f‖²) I + 2 f fᵀ + 2 f×) / (1 + ‖f‖²)`.
pub fn rotation_from_fedorov<T: Real>(p: &FedorovParam<T>) -> RotationMatrix<T> {
    let f = &p.f;
    let n2 = f.norm_squared();
    let two = T::lit(2.0);
    let m = Mat3::identity() * (T::one() - n2) + f * f.transpose() * two + skew(f) * two;
    RotationMatrix::new_unchecked(m / (T::one() + n2))
}

pub fn fedorov_rate<T: Real>(p: &FedorovParam<T>, w: &Vec3<T>, frame: RateFrame) -> Vec3<T> {
    let f = &p.f;
    let fx = skew(f);
    let m = match frame {
        RateFrame::Body => Mat3::identity() + fx,
        RateFrame::Parent => Mat3::identity() - fx,
    } + f * f.transpose();
    m * w * T::lit(0.5)
}

/// Quaternion `{λ₀, λ}` with scalar part `λ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T: Real> {
    pub w: T,
    pub v: Vec3<T>,
}

impl<T: Real> Quaternion<T> {
    pub fn new(w: T, v: Vec3<T>) -> Self {
        Self { w, v }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), Vec3::zeros())
    }

    pub fn pure(v: Vec3<T>) -> Self {
        Self::new(T::zero(), v)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.v)
    }

    pub fn norm(&self) -> T {
        self.as_vector().norm()
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.w * k, self.v * k)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.w + o.w, self.v + o.v)
    }

    pub fn dot(&self, o: &Self) -> T {
        self.w * o.w + self.v.dot(&o.v)
    }

    /// `{λ₀μ₀ − ⟨λ, μ⟩, λ₀μ + μ₀λ + λ × μ}`.
    pub fn mul(&self, o: &Self) -> Self {
        quat_product(self, o)
    }

    pub fn as_vector(&self) -> Vector4<T> {
        Vector4::new(self.w, self.v.x, self.v.y, self.v.z)
    }

    pub fn from_vector(x: &Vector4<T>) -> Self {
        Self::new(x[0], Vec3::new(x[1], x[2], x[3]))
    }
}

pub fn quat_product<T: Real>(a: &Quaternion<T>, b: &Quaternion<T>) -> Quaternion<T> {
    Quaternion::new(a.w * b.w - a.v.dot(&b.v), b.v * a.w + a.v * b.w + a.v.cross(&b.v))
}

/// Quaternion of unit norm (Euler–Rodrigues parameters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion<T: Real>(Quaternion<T>);

impl<T: Real> UnitQuaternion<T> {
    pub fn new(q: Quaternion<T>) -> Result<Self> {
        let n = q.norm();
        if (n - T::one()).abs() > T::UNIT_NORM_TOL {
            return Err(MechError::NotUnitQuaternion { norm: n.as_f64() });
        }
        Ok(Self(q))
    }

    pub fn new_normalize(w: T, v: Vec3<T>) -> Self {
        let q = Quaternion::new(w, v);
        Self(q.scale(T::one() / q.norm()))
    }

    pub fn new_unchecked(q: Quaternion<T>) -> Self {
        Self(q)
    }

    pub fn identity() -> Self {
        Self(Quaternion::identity())
    }

    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let h = angle * T::lit(0.5);
        let n = axis.norm();
        if n == T::zero() {
            return Self::identity();
        }
        Self(Quaternion::new(h.cos(), axis * (h.sin() / n)))
    }

    pub fn quaternion(&self) -> &Quaternion<T> {
        &self.0
    }

    pub fn w(&self) -> T {
        self.0.w
    }

    pub fn v(&self) -> Vec3<T> {
        self.0.v
    }

    pub fn renormalize(&self) -> Self {
        Self(self.0.scale(T::one() / self.0.norm()))
    }

    /// Representative with `λ₀ ≥ 0`.
    pub fn canonical(&self) -> Self {
        if self.0.w < T::zero() {
            Self(self.0.scale(-T::one()))
        } else {
            *self
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self(self.0.mul(&o.0))
    }

    pub fn to_rotation(&self) -> RotationMatrix<T> {
        rotation_matrix_of(&self.0)
    }

    /// Shepperd's method; returns the `λ₀ ≥ 0` representative.
    pub fn from_rotation(c: &RotationMatrix<T>) -> Self {
        let m = c.matrix();
        let one = T::one();
        let quarter = T::lit(0.25);
        let tr = m.trace();
        let candidates = [tr, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        let mut k = 0;
        for i in 1..4 {
            if candidates[i] > candidates[k] {
                k = i;
            }
        }
        let q = match k {
            0 => {
                let s = (one + tr).sqrt() * T::lit(2.0);
                Quaternion::new(
                    quarter * s,
                    Vec3::new((m[(2, 1)] - m[(1, 2)]) / s, (m[(0, 2)] - m[(2, 0)]) / s, (m[(1, 0)] - m[(0, 1)]) / s),
                )
            }
            1 => {
                let s = (one + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[(2, 1)] - m[(1, 2)]) / s,
                    Vec3::new(quarter * s, (m[(0, 1)] + m[(1, 0)]) / s, (m[(0, 2)] + m[(2, 0)]) / s),
                )
            }
            2 => {
                let s = (one + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[(0, 2)] - m[(2, 0)]) / s,
                    Vec3::new((m[(0, 1)] + m[(1, 0)]) / s, quarter * s, (m[(1, 2)] + m[(2, 1)]) / s),
                )
            }
            _ => {
                let s = (one + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * T::lit(2.0);
                Quaternion::new(
                    (m[(1, 0)] - m[(0, 1)]) / s,
                    Vec3::new((m[(0, 2)] + m[(2, 0)]) / s, (m[(1, 2)] + m[(2, 1)]) / s, quarter * s),
                )
            }
        };
        Self(q).renormalize().canonical()
    }

    /// `Λ̇ = ½ Λ ∘ ω` for body `ω`.
    pub fn rate(&self, w: &Vec3<T>) -> Quaternion<T> {
        quat_rate(self, w)
    }

    /// `Λ̇ = ½ ω⁰ ∘ Λ` for `ω⁰ = C ω` in parent coordinates.
    pub fn rate_parent(&self, w_parent: &Vec3<T>) -> Quaternion<T> {
        Quaternion::pure(*w_parent).mul(&self.0).scale(T::lit(0.5))
    }

    /// The 4×4 generator `Ω(ω)` with `Λ̇ = ½ Ω Λ`.
    pub fn rate_generator(w: &Vec3<T>) -> Matrix4<T> {
        let z = T::zero();
        Matrix4::new(
            z, -w.x, -w.y, -w.z,
            w.x, z, w.z, -w.y,
            w.y, -w.z, z, w.x,
            w.z, w.y, -w.x, z,
        )
    }

    /// `D = 2 [−λ | λ₀ I − λ×]`, so that `ω = D Λ̇`.
    pub fn rate_map(&self) -> Matrix3x4<T> {
        quat_rate_map(&self.0)
    }

    /// `G = ½ [[−λᵀ], [λ₀ I + λ×]]`, so that `Λ̇ = G ω` and `D G = I`.
    pub fn rate_inverse(&self) -> Matrix4x3<T> {
        let h = T::lit(0.5);
        let l = self.0.v;
        let b = Mat3::identity() * self.0.w + skew(&l);
        let mut g = Matrix4x3::zeros();
        g.fixed_view_mut::<1, 3>(0, 0).copy_from(&(-l.transpose()));
        g.fixed_view_mut::<3, 3>(1, 0).copy_from(&b);
        g * h
    }
}

pub(crate) fn quat_rate_map<T: Real>(q: &Quaternion<T>) -> Matrix3x4<T> {
    let two = T::lit(2.0);
    let mut d = Matrix3x4::zeros();
    d.fixed_view_mut::<3, 1>(0, 0).copy_from(&(-q.v));
    d.fixed_view_mut::<3, 3>(0, 1).copy_from(&(Mat3::identity() * q.w - skew(&q.v)));
    d * two
}

/// Matrix of a (not necessarily normalized) quaternion.
fn rotation_matrix_of<T: Real>(q: &Quaternion<T>) -> RotationMatrix<T> {
    let (l0, l1, l2, l3) = (q.w, q.v.x, q.v.y, q.v.z);
    let two = T::lit(2.0);
    RotationMatrix::new_unchecked(Mat3::new(
        l0 * l0 + l1 * l1 - l2 * l2 - l3 * l3,
        two * (l1 * l2 - l0 * l3),
        two * (l1 * l3 + l0 * l2),
        two * (l1 * l2 + l0 * l3),
        l0 * l0 - l1 * l1 + l2 * l2 - l3 * l3,
        two * (l2 * l3 - l0 * l1),
        two * (l1 * l3 - l0 * l2),
        two * (l2 * l3 + l0 * l1),
        l0 * l0 - l1 * l1 - l2 * l2 + l3 * l3,
    ))
}

pub fn rotation_from_quat<T: Real>(q: &Quaternion<T>) -> Result<RotationMatrix<T>> {
    let u = UnitQuaternion::new(*q)?;
    Ok(u.to_rotation())
}

pub fn quat_rate<T: Real>(q: &UnitQuaternion<T>, w: &Vec3<T>) -> Quaternion<T> {
    q.0.mul(&Quaternion::pure(*w)).scale(T::lit(0.5))
}

/// Which parameterization a state uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Quaternion,
    Euler,
    Fedorov,
}

impl ParamKind {
    pub fn dim(self) -> usize {
        match self {
            ParamKind::Quaternion => 4,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Quaternion => "quaternion",
            ParamKind::Euler => "euler",
            ParamKind::Fedorov => "fedorov",
        }
    }
}

impl std::str::FromStr for ParamKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quaternion" => Ok(ParamKind::Quaternion),
            "euler" => Ok(ParamKind::Euler),
            "fedorov" => Ok(ParamKind::Fedorov),
            _ => Err(format!("unknown parameterization '{s}' (expected quaternion, euler or fedorov)")),
        }
    }
}

/// A rotation in one of the three parameterizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orientation<T: Real> {
    Quaternion(UnitQuaternion<T>),
    Euler(EulerAngles<T>),
    Fedorov(FedorovParam<T>),
}

impl<T: Real> Orientation<T> {
    pub fn identity(kind: ParamKind) -> Self {
        match kind {
            ParamKind::Quaternion => Orientation::Quaternion(UnitQuaternion::identity()),
            ParamKind::Euler => Orientation::Euler(EulerAngles::new(T::zero(), T::zero(), T::zero())),
            ParamKind::Fedorov => Orientation::Fedorov(FedorovParam::new(Vec3::zeros())),
        }
    }

    pub fn kind(&self) -> ParamKind {
        match self {
            Orientation::Quaternion(_) => ParamKind::Quaternion,
            Orientation::Euler(_) => ParamKind::Euler,
            Orientation::Fedorov(_) => ParamKind::Fedorov,
        }
    }

    pub fn from_rotation(kind: ParamKind, c: &RotationMatrix<T>) -> Result<Self> {
        Ok(match kind {
            ParamKind::Quaternion => Orientation::Quaternion(UnitQuaternion::from_rotation(c)),
            ParamKind::Euler => Orientation::Euler(EulerAngles::from_rotation(c)?),
            ParamKind::Fedorov => Orientation::Fedorov(FedorovParam::from_rotation(c)?),
        })
    }

    pub fn to_rotation(&self) -> RotationMatrix<T> {
        match self {
            Orientation::Quaternion(q) => q.to_rotation(),
            Orientation::Euler(e) => e.to_rotation(),
            Orientation::Fedorov(f) => f.to_rotation(),
        }
    }

    pub fn coords(&self) -> Vec<T> {
        match self {
            Orientation::Quaternion(q) => vec![q.w(), q.v().x, q.v().y, q.v().z],
            Orientation::Euler(e) => vec![e.phi, e.theta, e.psi],
            Orientation::Fedorov(f) => vec![f.f.x, f.f.y, f.f.z],
        }
    }

    /// Rebuilds from raw coordinates; quaternions are normalized.
    pub fn from_coords(kind: ParamKind, c: &[T]) -> Self {
        match kind {
            ParamKind::Quaternion => {
                Orientation::Quaternion(UnitQuaternion::new_normalize(c[0], Vec3::new(c[1], c[2], c[3])))
            }
            ParamKind::Euler => Orientation::Euler(EulerAngles::new(c[0], c[1], c[2])),
            ParamKind::Fedorov => Orientation::Fedorov(FedorovParam::new(Vec3::new(c[0], c[1], c[2]))),
        }
    }

    /// Fails at a singular configuration of the parameterization.
    pub fn check_regular(&self) -> Result<()> {
        match self {
            Orientation::Quaternion(_) => Ok(()),
            Orientation::Euler(e) => {
                let det = e.theta.cos();
                if det.abs() < T::SINGULAR_TOL {
                    Err(MechError::GimbalLock { det: det.as_f64() })
                } else {
                    Ok(())
                }
            }
            Orientation::Fedorov(f) => f.check_regular(),
        }
    }

    /// Coordinate rates from body `ω`.
    pub fn rate(&self, w: &Vec3<T>) -> Result<Vec<T>> {
        Ok(match self {
            Orientation::Quaternion(q) => {
                let d = q.rate(w);
                vec![d.w, d.v.x, d.v.y, d.v.z]
            }
            Orientation::Euler(e) => e.rates(w)?.iter().copied().collect(),
            Orientation::Fedorov(f) => {
                f.check_regular()?;
                f.rate(w, RateFrame::Body).iter().copied().collect()
            }
        })
    }

    /// `D` (3 × dim) with body `ω = D q̇`.
    pub fn rate_map(&self) -> DMatrix<T> {
        match self {
            Orientation::Quaternion(q) => DMatrix::from_iterator(3, 4, q.rate_map().iter().copied()),
            Orientation::Euler(e) => DMatrix::from_iterator(3, 3, e.rate_map().d.iter().copied()),
            Orientation::Fedorov(f) => DMatrix::from_iterator(3, 3, f.rate_map(RateFrame::Body).d.iter().copied()),
        }
    }

    /// `Ḋ` along coordinate rates `q_dot`.
    pub fn rate_map_dot(&self, q_dot: &[T]) -> DMatrix<T> {
        match self {
            Orientation::Quaternion(_) => {
                let d = Quaternion::new(q_dot[0], Vec3::new(q_dot[1], q_dot[2], q_dot[3]));
                DMatrix::from_iterator(3, 4, quat_rate_map(&d).iter().copied())
            }
            Orientation::Euler(e) => {
                let m = e.rate_map_dot(&Vec3::new(q_dot[0], q_dot[1], q_dot[2]));
                DMatrix::from_iterator(3, 3, m.iter().copied())
            }
            Orientation::Fedorov(f) => {
                let m = f.rate_map_dot(&Vec3::new(q_dot[0], q_dot[1], q_dot[2]));
                DMatrix::from_iterator(3, 3, m.iter().copied())
            }
        }
    }

    /// `G` (dim × 3) with `q̇ = G ω`.
    pub fn rate_inverse(&self) -> Result<DMatrix<T>> {
        Ok(match self {
            Orientation::Quaternion(q) => DMatrix::from_iterator(4, 3, q.rate_inverse().iter().copied()),
            Orientation::Euler(e) => {
                let inv = e.rate_map().inverse()?;
                DMatrix::from_iterator(3, 3, inv.iter().copied())
            }
            Orientation::Fedorov(f) => {
                f.check_regular()?;
                let fx = skew(&f.f);
                let m = (Mat3::identity() + fx + f.f * f.f.transpose()) * T::lit(0.5);
                DMatrix::from_iterator(3, 3, m.iter().copied())
            }
        })
    }

    /// Projects back onto the parameter manifold (quaternions only).
    pub fn normalized(&self) -> Self {
        match self {
            Orientation::Quaternion(q) => Orientation::Quaternion(q.renormalize()),
            other => *other,
        }
    }

    /// Re-expresses in another parameterization.
    pub fn convert(&self, kind: ParamKind) -> Result<Self> {
        Self::from_rotation(kind, &self.to_rotation())
    }
}
