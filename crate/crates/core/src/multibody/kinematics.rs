use nalgebra::{DMatrix, DVector};

use super::tree::{MultibodyTree, SystemState};
use crate::error::Result;
use crate::motion::{phi_twist, twist_matrix, FramePose};
use crate::scalar::Real;
use crate::screw::{lower, upper, Mat6, Vec6};

/// Poses and twists of every body for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeKinematics<T: Real> {
    /// Pose of each body relative to its parent.
    pub relative: Vec<FramePose<T>>,
    /// Pose of each body relative to the ground.
    pub absolute: Vec<FramePose<T>>,
    /// Relative twists `V_r` (child coordinates).
    pub relative_twists: Vec<Vec6<T>>,
    /// Absolute twists `V_a` (body coordinates).
    pub absolute_twists: Vec<Vec6<T>>,
}

impl<T: Real> TreeKinematics<T> {
    pub fn compute(tree: &MultibodyTree<T>, state: &SystemState<T>) -> Result<Self> {
        tree.check_state(state)?;
        let k = tree.len();
        let relative: Vec<_> =
            tree.bodies().iter().zip(&state.positions).map(|(b, p)| b.joint.relative_pose(p)).collect();
        let s = tree.subspace_matrix();
        let vr = &s * &state.velocities;
        let relative_twists: Vec<Vec6<T>> =
            (0..k).map(|i| Vec6::from_iterator(vr.rows(6 * i, 6).iter().copied())).collect();
        let mut absolute = vec![FramePose::identity(); k];
        let mut absolute_twists = vec![Vec6::zeros(); k];
        for &i in tree.order() {
            match tree.parent_index(i) {
                None => {
                    absolute[i] = relative[i];
                    absolute_twists[i] = relative_twists[i];
                }
                Some(p) => {
                    absolute[i] = absolute[p].compose(&relative[i]);
                    let lpi = twist_matrix(&relative[i].inverse());
                    absolute_twists[i] = lpi * absolute_twists[p] + relative_twists[i];
                }
            }
        }
        Ok(Self { relative, absolute, relative_twists, absolute_twists })
    }

    /// `L_{p,s}`: twist transform from frame `s` to frame `p`.
    pub fn transfer(&self, p: usize, s: usize) -> Mat6<T> {
        twist_matrix(&self.absolute[p].inverse().compose(&self.absolute[s]))
    }

    pub fn stacked_relative(&self) -> DVector<T> {
        stack(&self.relative_twists)
    }

    pub fn stacked_absolute(&self) -> DVector<T> {
        stack(&self.absolute_twists)
    }
}

fn stack<T: Real>(v: &[Vec6<T>]) -> DVector<T> {
    DVector::from_iterator(6 * v.len(), v.iter().flat_map(|x| x.iter().copied()))
}

/// Absolute twists as explicit path sums `V_a[p] = Σ_{s on path(p)} L_{p,s} V_r[s]`.
pub fn compose_velocities<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>) -> Result<Vec<Vec6<T>>> {
    let kin = TreeKinematics::compute(tree, state)?;
    Ok((0..tree.len())
        .map(|p| tree.path(p).iter().fold(Vec6::zeros(), |acc, &s| acc + kin.transfer(p, s) * kin.relative_twists[s]))
        .collect())
}

/// Block lower-triangular (in traversal order) `L` with `V_a = L V_r`, and its
/// derivative `L̇` with blocks `L̇_{p,s} = L_{p,s} Φ_tw(V_{p,s})`, where
/// `V_{p,s}` is the twist of frame `s` relative to frame `p` (in `s` coordinates).
pub fn kinematics_matrix<T: Real>(tree: &MultibodyTree<T>, state: &SystemState<T>) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let kin = TreeKinematics::compute(tree, state)?;
    Ok(kinematics_matrix_from(tree, &kin))
}

pub(crate) fn kinematics_matrix_from<T: Real>(tree: &MultibodyTree<T>, kin: &TreeKinematics<T>) -> (DMatrix<T>, DMatrix<T>) {
    let k = tree.len();
    let mut l = DMatrix::zeros(6 * k, 6 * k);
    let mut ld = DMatrix::zeros(6 * k, 6 * k);
    for p in 0..k {
        for &s in tree.path(p) {
            let lps = kin.transfer(p, s);
            let rel = kin.absolute_twists[s] - kin.transfer(s, p) * kin.absolute_twists[p];
            let lds = lps * phi_twist(&upper(&rel), &lower(&rel));
            l.view_mut((6 * p, 6 * s), (6, 6)).copy_from(&lps);
            ld.view_mut((6 * p, 6 * s), (6, 6)).copy_from(&lds);
        }
    }
    (l, ld)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{angular_velocity_from_rotation, FramePose, RotationMatrix};
    use crate::multibody::joint::{Joint, JointPosition};
    use crate::multibody::tree::Body;
    use crate::rigid_body::MassAtom;
    use crate::rotation::{Orientation, ParamKind};
    use crate::sample;
    use crate::screw::Vec3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn atoms() -> Vec<MassAtom<f64>> {
        vec![
            MassAtom::new(Vec3::new(0.5, 0.0, 0.0), 1.0).unwrap(),
            MassAtom::new(Vec3::new(0.0, 0.5, 0.0), 1.0).unwrap(),
            MassAtom::new(Vec3::new(0.0, 0.0, 0.5), 1.0).unwrap(),
        ]
    }

    /// Mixed tree: 1 (free, ground), 2 (revolute on 1), 3 (prismatic on 1), 4 (revolute on 2).
    fn mixed(rng: &mut ChaCha8Rng) -> (MultibodyTree<f64>, SystemState<f64>) {
        let axis = |r: &mut ChaCha8Rng| sample::vec3::<f64, _>(r, 1.0).normalize();
        let off = |r: &mut ChaCha8Rng| sample::pose::<f64, _>(r, 1.0);
        let bodies = vec![
            Body::from_atoms("a", atoms(), 0, Joint::free(off(rng))).unwrap(),
            Body::from_atoms("b", atoms(), 1, Joint::revolute(axis(rng), off(rng)).unwrap()).unwrap(),
            Body::from_atoms("c", atoms(), 1, Joint::prismatic(axis(rng), off(rng)).unwrap()).unwrap(),
            Body::from_atoms("d", atoms(), 2, Joint::revolute(axis(rng), off(rng)).unwrap()).unwrap(),
        ];
        let tree = MultibodyTree::new(bodies, Vec3::zeros()).unwrap();
        let positions = vec![
            JointPosition::Free {
                orientation: Orientation::from_rotation(ParamKind::Quaternion, &sample::rotation(rng)).unwrap(),
                translation: sample::vec3(rng, 1.0),
            },
            JointPosition::Scalar(sample::scalar(rng, 3.0)),
            JointPosition::Scalar(sample::scalar(rng, 1.0)),
            JointPosition::Scalar(sample::scalar(rng, 3.0)),
        ];
        let u = DVector::from_iterator(tree.dof(), (0..tree.dof()).map(|_| sample::scalar::<f64, _>(rng, 1.0)));
        (tree, SystemState::new(positions, u))
    }

    fn advance(state: &SystemState<f64>, h: f64) -> SystemState<f64> {
        let mut rates = Vec::new();
        let mut at = 0;
        for p in &state.positions {
            let dof = match p {
                JointPosition::Scalar(_) => 1,
                _ => 6,
            };
            rates.extend(p.rates(&state.velocities.as_slice()[at..at + dof]).unwrap());
            at += dof;
        }
        let c: Vec<f64> = state.position_coords().iter().zip(&rates).map(|(a, b)| a + b * h).collect();
        SystemState::new(state.with_position_coords(&c), state.velocities.clone())
    }

    #[test]
    fn single_body_is_identity() {
        let tree = MultibodyTree::new(
            vec![Body::from_atoms("a", atoms(), 0, Joint::free(FramePose::identity())).unwrap()],
            Vec3::zeros(),
        )
        .unwrap();
        let st = SystemState::new(
            vec![JointPosition::Free {
                orientation: Orientation::identity(ParamKind::Quaternion),
                translation: Vec3::new(1.0, 2.0, 3.0),
            }],
            DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        );
        let (l, _) = kinematics_matrix(&tree, &st).unwrap();
        assert_eq!(l, DMatrix::identity(6, 6));
        assert_eq!(compose_velocities(&tree, &st).unwrap()[0], Vec6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0));
    }

    #[test]
    fn chain_at_zero_displacement() {
        let e3 = Vec3::new(0.0, 0.0, 1.0);
        let bodies: Vec<_> = (0..3)
            .map(|i| Body::from_atoms("r", atoms(), i, Joint::revolute(e3, FramePose::identity()).unwrap()).unwrap())
            .collect();
        let tree = MultibodyTree::new(bodies, Vec3::zeros()).unwrap();
        let st = SystemState::at_rest(vec![JointPosition::Scalar(0.0); 3], 3);
        let (l, _) = kinematics_matrix(&tree, &st).unwrap();
        for p in 0..3 {
            for s in 0..3 {
                let blk = l.view((6 * p, 6 * s), (6, 6)).into_owned();
                let expect = if s <= p { DMatrix::identity(6, 6) } else { DMatrix::zeros(6, 6) };
                assert_eq!(blk, expect);
            }
        }
    }

    #[test]
    fn two_link_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (tree, st) = mixed(&mut rng);
        let kin = TreeKinematics::compute(&tree, &st).unwrap();
        let expect = kin.transfer(1, 0) * kin.absolute_twists[0] + kin.relative_twists[1];
        assert!((kin.absolute_twists[1] - expect).amax() < 1e-12);
    }

    #[test]
    fn path_sum_equals_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let (tree, st) = mixed(&mut rng);
            let va = compose_velocities(&tree, &st).unwrap();
            let kin = TreeKinematics::compute(&tree, &st).unwrap();
            let (l, _) = kinematics_matrix_from(&tree, &kin);
            let lv = l * kin.stacked_relative();
            for p in 0..tree.len() {
                let blk = Vec6::from_iterator(lv.rows(6 * p, 6).iter().copied());
                assert!((blk - va[p]).amax() < 1e-12);
                assert!((kin.absolute_twists[p] - va[p]).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn absolute_twists_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..10 {
            let (tree, st) = mixed(&mut rng);
            let kin = TreeKinematics::compute(&tree, &st).unwrap();
            let kp = TreeKinematics::compute(&tree, &advance(&st, h)).unwrap();
            let km = TreeKinematics::compute(&tree, &advance(&st, -h)).unwrap();
            for p in 0..tree.len() {
                let x = &kin.absolute[p];
                let cd = (kp.absolute[p].c() - km.absolute[p].c()) / (2.0 * h);
                let w = angular_velocity_from_rotation(&RotationMatrix::new(*x.c()).unwrap(), &cd).unwrap();
                let v = x.c().transpose() * (kp.absolute[p].translation - km.absolute[p].translation) / (2.0 * h);
                assert!((w - lower(&kin.absolute_twists[p])).amax() < 1e-6);
                assert!((v - upper(&kin.absolute_twists[p])).amax() < 1e-6);
            }
            let (lp, _) = kinematics_matrix_from(&tree, &kp);
            let (lm, _) = kinematics_matrix_from(&tree, &km);
            let (_, ld) = kinematics_matrix_from(&tree, &kin);
            assert!(((lp - lm) / (2.0 * h) - ld).amax() < 1e-6);
        }
    }
}
