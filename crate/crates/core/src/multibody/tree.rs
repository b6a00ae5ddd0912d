use nalgebra::DVector;

use super::joint::{Joint, JointPosition};
use crate::error::{MechError, Result};
use crate::rigid_body::{assemble_inertia, InertiaScrew, MassAtom};
use crate::scalar::Real;
use crate::screw::Vec3;

/// One body of a tree and the joint connecting it to its parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Body<T: Real> {
    pub name: String,
    pub inertia: InertiaScrew<T>,
    /// Atoms the inertia was assembled from (empty for an explicit inertia).
    pub atoms: Vec<MassAtom<T>>,
    /// Parent body number; 0 is the immobile ground.
    pub parent: usize,
    pub joint: Joint<T>,
}

impl<T: Real> Body<T> {
    pub fn from_atoms(name: impl Into<String>, atoms: Vec<MassAtom<T>>, parent: usize, joint: Joint<T>) -> Result<Self> {
        let inertia = assemble_inertia(&atoms)?;
        Ok(Self { name: name.into(), inertia, atoms, parent, joint })
    }

    pub fn with_inertia(name: impl Into<String>, inertia: InertiaScrew<T>, parent: usize, joint: Joint<T>) -> Self {
        Self { name: name.into(), inertia, atoms: Vec::new(), parent, joint }
    }
}

/// Tree-structured system. Bodies are numbered `1..=k` in the order given;
/// body `p` is stored at index `p − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibodyTree<T: Real> {
    bodies: Vec<Body<T>>,
    /// Parent-before-child traversal (0-based indices).
    order: Vec<usize>,
    /// Root-to-body paths (0-based indices, inclusive).
    paths: Vec<Vec<usize>>,
    dof_offsets: Vec<usize>,
    pub gravity: Vec3<T>,
}

impl<T: Real> MultibodyTree<T> {
    pub fn new(bodies: Vec<Body<T>>, gravity: Vec3<T>) -> Result<Self> {
        let k = bodies.len();
        if k == 0 {
            return Err(MechError::InvalidTree("no bodies".into()));
        }
        for (i, b) in bodies.iter().enumerate() {
            if b.parent > k {
                return Err(MechError::InvalidTree(format!("body {} has unknown parent {}", i + 1, b.parent)));
            }
            if b.parent == i + 1 {
                return Err(MechError::InvalidTree(format!("body {} is its own parent", i + 1)));
            }
        }
        // Kahn's algorithm, smallest ready index first
        let mut placed = vec![false; k];
        let mut order = Vec::with_capacity(k);
        while order.len() < k {
            let next = (0..k).find(|&i| !placed[i] && (bodies[i].parent == 0 || placed[bodies[i].parent - 1]));
            match next {
                Some(i) => {
                    placed[i] = true;
                    order.push(i);
                }
                None => return Err(MechError::InvalidTree("parent links contain a cycle".into())),
            }
        }
        let mut paths: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &i in &order {
            let mut p = match bodies[i].parent {
                0 => Vec::new(),
                q => paths[q - 1].clone(),
            };
            p.push(i);
            paths[i] = p;
        }
        let mut dof_offsets = Vec::with_capacity(k + 1);
        let mut acc = 0;
        for b in &bodies {
            dof_offsets.push(acc);
            acc += b.joint.dof();
        }
        dof_offsets.push(acc);
        Ok(Self { bodies, order, paths, dof_offsets, gravity })
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    pub fn bodies(&self) -> &[Body<T>] {
        &self.bodies
    }

    pub fn body(&self, i: usize) -> &Body<T> {
        &self.bodies[i]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Root-to-`i` path of 0-based indices.
    pub fn path(&self, i: usize) -> &[usize] {
        &self.paths[i]
    }

    /// 0-based parent index, `None` for children of the ground.
    pub fn parent_index(&self, i: usize) -> Option<usize> {
        self.bodies[i].parent.checked_sub(1)
    }

    pub fn dof(&self) -> usize {
        self.dof_offsets[self.len()]
    }

    pub fn dof_range(&self, i: usize) -> std::ops::Range<usize> {
        self.dof_offsets[i]..self.dof_offsets[i + 1]
    }

    /// `blockdiag(Sₚ)` (6k × dof).
    pub fn subspace_matrix(&self) -> nalgebra::DMatrix<T> {
        let mut s = nalgebra::DMatrix::zeros(6 * self.len(), self.dof());
        for (i, b) in self.bodies.iter().enumerate() {
            let r = self.dof_range(i);
            s.view_mut((6 * i, r.start), (6, r.len())).copy_from(&b.joint.motion_subspace());
        }
        s
    }

    pub fn check_state(&self, state: &SystemState<T>) -> Result<()> {
        if state.positions.len() != self.len() || state.velocities.len() != self.dof() {
            return Err(MechError::InvalidState(format!(
                "expected {} joint positions and {} velocities, got {} and {}",
                self.len(),
                self.dof(),
                state.positions.len(),
                state.velocities.len()
            )));
        }
        for (b, p) in self.bodies.iter().zip(&state.positions) {
            b.joint.check_position(p)?;
        }
        Ok(())
    }
}

/// Joint positions and joint velocities `u` (relative twists are `V_r = S u`).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState<T: Real> {
    pub positions: Vec<JointPosition<T>>,
    pub velocities: DVector<T>,
}

impl<T: Real> SystemState<T> {
    pub fn new(positions: Vec<JointPosition<T>>, velocities: DVector<T>) -> Self {
        Self { positions, velocities }
    }

    /// All joints at rest.
    pub fn at_rest(positions: Vec<JointPosition<T>>, dof: usize) -> Self {
        Self::new(positions, DVector::zeros(dof))
    }

    /// Flattened position coordinates.
    pub fn position_coords(&self) -> Vec<T> {
        self.positions.iter().flat_map(|p| p.coords()).collect()
    }

    /// Inverse of [`Self::position_coords`] using `self` as the shape template.
    pub fn with_position_coords(&self, c: &[T]) -> Vec<JointPosition<T>> {
        let mut at = 0;
        self.positions
            .iter()
            .map(|p| {
                let n = p.coords().len();
                let out = p.with_coords(&c[at..at + n]);
                at += n;
                out
            })
            .collect()
    }
}
