//! Sliders, reductions, wrench/twist coordinates and discrete screw measures.
//!
//! A slider assigns to every point `y` a pair `(p, q_y)` where `p` (the
//! resultant) is constant and the moment obeys the transport rule
//!
//! ```text
//! q_y = q_x + (x − y) × p
//! ```
//!
//! i.e. the moment about `y` of the resultant `p` applied at `x`. Measures are
//! finite lists of weighted atoms: pure points carry their own weight, and an
//! absolutely continuous part is supplied as quadrature nodes and weights.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::scalar::Real;

pub type Vec3<T> = Vector3<T>;
pub type Vec6<T> = Vector6<T>;
pub type Mat3<T> = Matrix3<T>;
pub type Mat6<T> = Matrix6<T>;

/// Antisymmetric 3×3 matrix `f×` with `f× g = f × g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMatrix<T: Real>(Mat3<T>);

impl<T: Real> SpinMatrix<T> {
    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    pub fn into_inner(self) -> Mat3<T> {
        self.0
    }

    /// The vector `f` this matrix was built from.
    pub fn axial(&self) -> Vec3<T> {
        Vec3::new(self.0[(2, 1)], self.0[(0, 2)], self.0[(1, 0)])
    }

    pub fn apply(&self, g: &Vec3<T>) -> Vec3<T> {
        self.0 * g
    }
}

/// Cross-product matrix of `f`.
pub fn cross_matrix<T: Real>(f: &Vec3<T>) -> SpinMatrix<T> {
    SpinMatrix(skew(f))
}

/// Raw cross-product matrix, for internal block assembly.
#[inline]
pub(crate) fn skew<T: Real>(f: &Vec3<T>) -> Mat3<T> {
    let z = T::zero();
    Mat3::new(z, -f.z, f.y, f.z, z, -f.x, -f.y, f.x, z)
}

/// Axial vector of the antisymmetric part of `m`.
#[inline]
pub(crate) fn vee<T: Real>(m: &Mat3<T>) -> Vec3<T> {
    let h = T::lit(0.5);
    Vec3::new(
        (m[(2, 1)] - m[(1, 2)]) * h,
        (m[(0, 2)] - m[(2, 0)]) * h,
        (m[(1, 0)] - m[(0, 1)]) * h,
    )
}

/// Value of a slider at a reduction point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliderReduction<T: Real> {
    pub resultant: Vec3<T>,
    pub moment: Vec3<T>,
    pub at: Vec3<T>,
}

impl<T: Real> SliderReduction<T> {
    pub fn new(resultant: Vec3<T>, moment: Vec3<T>, at: Vec3<T>) -> Self {
        Self { resultant, moment, at }
    }

    pub fn zero(at: Vec3<T>) -> Self {
        Self::new(Vec3::zeros(), Vec3::zeros(), at)
    }

    /// Re-reduces at `y`.
    pub fn transport(&self, y: &Vec3<T>) -> Self {
        let moment = self.moment + (self.at - y).cross(&self.resultant);
        Self::new(self.resultant, moment, *y)
    }

    pub fn scaled(&self, w: T) -> Self {
        Self::new(self.resultant * w, self.moment * w, self.at)
    }

    /// Sum of two reductions, expressed at `self.at`.
    pub fn add(&self, other: &Self) -> Self {
        let o = other.transport(&self.at);
        Self::new(self.resultant + o.resultant, self.moment + o.moment, self.at)
    }

    /// Largest component difference after bringing `other` to `self.at`.
    pub fn distance(&self, other: &Self) -> T {
        let o = other.transport(&self.at);
        (self.resultant - o.resultant).amax().max((self.moment - o.moment).amax())
    }

    pub fn coords(&self, order: SixOrder) -> SixColumn<T> {
        six_coords(self, order)
    }
}

/// A slider field defined by its value at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slider<T: Real> {
    pub base_point: Vec3<T>,
    pub resultant: Vec3<T>,
    pub moment: Vec3<T>,
}

impl<T: Real> Slider<T> {
    pub fn new(base_point: Vec3<T>, resultant: Vec3<T>, moment: Vec3<T>) -> Self {
        Self { base_point, resultant, moment }
    }

    /// Slider whose moment vanishes at its base point.
    pub fn homogeneous(base_point: Vec3<T>, resultant: Vec3<T>) -> Self {
        Self::new(base_point, resultant, Vec3::zeros())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.moment.iter().all(|c| *c == T::zero())
    }

    pub fn reduce(&self, y: &Vec3<T>) -> SliderReduction<T> {
        slider_reduce(self, y)
    }
}

/// Reduction of `s` at `y`.
pub fn slider_reduce<T: Real>(s: &Slider<T>, y: &Vec3<T>) -> SliderReduction<T> {
    SliderReduction::new(s.resultant, s.moment, s.base_point).transport(y)
}

/// Column ordering of six-dimensional coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SixOrder {
    /// `col{p, q}`
    Wrench,
    /// `col{q, p}`
    Twist,
}

impl SixOrder {
    pub fn other(self) -> Self {
        match self {
            SixOrder::Wrench => SixOrder::Twist,
            SixOrder::Twist => SixOrder::Wrench,
        }
    }
}

/// Six coordinates tagged with their ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixColumn<T: Real> {
    pub coords: Vec6<T>,
    pub order: SixOrder,
}

impl<T: Real> SixColumn<T> {
    pub fn new(coords: Vec6<T>, order: SixOrder) -> Self {
        Self { coords, order }
    }

    /// Swaps the halves and flips the tag.
    pub fn reorder(&self) -> Self {
        Self::new(swap_halves(&self.coords), self.order.other())
    }

    pub fn resultant(&self) -> Vec3<T> {
        match self.order {
            SixOrder::Wrench => self.coords.fixed_rows::<3>(0).into_owned(),
            SixOrder::Twist => self.coords.fixed_rows::<3>(3).into_owned(),
        }
    }

    pub fn moment(&self) -> Vec3<T> {
        match self.order {
            SixOrder::Wrench => self.coords.fixed_rows::<3>(3).into_owned(),
            SixOrder::Twist => self.coords.fixed_rows::<3>(0).into_owned(),
        }
    }

    pub fn to_reduction(&self, at: Vec3<T>) -> SliderReduction<T> {
        SliderReduction::new(self.resultant(), self.moment(), at)
    }
}

pub(crate) fn stack<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec6<T> {
    Vec6::new(a.x, a.y, a.z, b.x, b.y, b.z)
}

pub(crate) fn upper<T: Real>(v: &Vec6<T>) -> Vec3<T> {
    Vec3::new(v[0], v[1], v[2])
}

pub(crate) fn lower<T: Real>(v: &Vec6<T>) -> Vec3<T> {
    Vec3::new(v[3], v[4], v[5])
}

/// Assembles `[[a, b], [c, d]]`.
pub(crate) fn block6<T: Real>(a: &Mat3<T>, b: &Mat3<T>, c: &Mat3<T>, d: &Mat3<T>) -> Mat6<T> {
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(a);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(b);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(c);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(d);
    m
}

pub(crate) fn block<T: Real>(m: &Mat6<T>, i: usize, j: usize) -> Mat3<T> {
    m.fixed_view::<3, 3>(3 * i, 3 * j).into_owned()
}

pub(crate) fn swap_halves<T: Real>(v: &Vec6<T>) -> Vec6<T> {
    stack(&lower(v), &upper(v))
}

/// Wrench `col{p, q}` or twist `col{q, p}` coordinates of a reduction.
pub fn six_coords<T: Real>(r: &SliderReduction<T>, order: SixOrder) -> SixColumn<T> {
    let coords = match order {
        SixOrder::Wrench => stack(&r.resultant, &r.moment),
        SixOrder::Twist => stack(&r.moment, &r.resultant),
    };
    SixColumn::new(coords, order)
}

/// One weighted atom of a screw measure; its density slider is based at `point`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewAtom<T: Real> {
    pub point: Vec3<T>,
    pub resultant: Vec3<T>,
    pub moment: Vec3<T>,
    pub weight: T,
}

impl<T: Real> ScrewAtom<T> {
    pub fn new(point: Vec3<T>, resultant: Vec3<T>, moment: Vec3<T>, weight: T) -> Self {
        debug_assert!(weight >= T::zero(), "atom weight must be nonnegative");
        Self { point, resultant, moment, weight }
    }

    pub fn homogeneous(point: Vec3<T>, resultant: Vec3<T>, weight: T) -> Self {
        Self::new(point, resultant, Vec3::zeros(), weight)
    }

    pub fn density(&self) -> Slider<T> {
        Slider::new(self.point, self.resultant, self.moment)
    }

    /// Pure atoms carry strictly positive weight.
    pub fn is_pure(&self) -> bool {
        self.weight > T::zero()
    }
}

/// Finite atom realization of a screw measure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScrewMeasure<T: Real> {
    pub atoms: Vec<ScrewAtom<T>>,
}

impl<T: Real> ScrewMeasure<T> {
    pub fn new(atoms: Vec<ScrewAtom<T>>) -> Self {
        Self { atoms }
    }

    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn push(&mut self, atom: ScrewAtom<T>) {
        self.atoms.push(atom);
    }

    /// Disjoint union of two atom lists.
    pub fn union(&self, other: &Self) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self { atoms }
    }

    pub fn scaled(&self, w: T) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| ScrewAtom { weight: a.weight * w, ..*a }).collect(),
        }
    }

    pub fn resultant_at(&self, at: &Vec3<T>) -> SliderReduction<T> {
        screw_resultant(self, at)
    }
}

/// Weighted sum of the atom sliders, each reduced at `at`.
pub fn screw_resultant<T: Real>(m: &ScrewMeasure<T>, at: &Vec3<T>) -> SliderReduction<T> {
    m.atoms.iter().fold(SliderReduction::zero(*at), |acc, a| {
        let r = a.density().reduce(at);
        SliderReduction::new(
            acc.resultant + r.resultant * a.weight,
            acc.moment + r.moment * a.weight,
            *at,
        )
    })
}

/// The six unit screws, reduced at the origin: `e₁..e₃` with unit resultants
/// and `e₄..e₆` with unit moments.
pub fn screw_basis<T: Real>() -> [ScrewMeasure<T>; 6] {
    std::array::from_fn(|i| {
        let mut p = Vec3::zeros();
        let mut q = Vec3::zeros();
        if i < 3 {
            p[i] = T::one();
        } else {
            q[i - 3] = T::one();
        }
        ScrewMeasure::new(vec![ScrewAtom::new(Vec3::zeros(), p, q, T::one())])
    })
}

/// Coefficients of `r` in the unit-screw basis (after transport to the origin).
pub fn decompose<T: Real>(r: &SliderReduction<T>) -> [T; 6] {
    let o = r.transport(&Vec3::zeros());
    [o.resultant.x, o.resultant.y, o.resultant.z, o.moment.x, o.moment.y, o.moment.z]
}

/// Inverse of [`decompose`]: the origin reduction of `Σ cᵢ eᵢ`.
pub fn compose_basis<T: Real>(c: &[T; 6]) -> SliderReduction<T> {
    let basis = screw_basis::<T>();
    let origin = Vec3::zeros();
    basis
        .iter()
        .zip(c.iter())
        .fold(SliderReduction::zero(origin), |acc, (e, ci)| acc.add(&e.resultant_at(&origin).scaled(*ci)))
}

/// Tensor-valued slider: the vector pair replaced by second-rank tensors.
/// Transport acts column-wise, `Q_y = Q_x + (x − y)× P_x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorSlider<T: Real> {
    pub base_point: Vec3<T>,
    pub resultant: Mat3<T>,
    pub moment: Mat3<T>,
}

impl<T: Real> TensorSlider<T> {
    pub fn new(base_point: Vec3<T>, resultant: Mat3<T>, moment: Mat3<T>) -> Self {
        Self { base_point, resultant, moment }
    }

    /// `(P, Q_y)` at `y`.
    pub fn reduce(&self, y: &Vec3<T>) -> (Mat3<T>, Mat3<T>) {
        let r = skew(&(self.base_point - y));
        (self.resultant, self.moment + r * self.resultant)
    }

    /// The vector slider obtained by contracting with a fixed direction `n`
    /// (e.g. a surface normal): `(P n, Q n)`.
    pub fn contract(&self, n: &Vec3<T>) -> Slider<T> {
        Slider::new(self.base_point, self.resultant * n, self.moment * n)
    }
}

/// Weighted atom list with tensor densities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorScrewMeasure<T: Real> {
    pub atoms: Vec<(TensorSlider<T>, T)>,
}

impl<T: Real> TensorScrewMeasure<T> {
    pub fn resultant_at(&self, at: &Vec3<T>) -> (Mat3<T>, Mat3<T>) {
        self.atoms.iter().fold((Mat3::zeros(), Mat3::zeros()), |(p, q), (s, w)| {
            let (sp, sq) = s.reduce(at);
            (p + sp * *w, q + sq * *w)
        })
    }
}
