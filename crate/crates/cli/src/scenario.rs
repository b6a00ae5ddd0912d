//! Builds core objects from a model file and integrates them.

use nalgebra::DVector;
use screwmech::integrate::step_count;
use screwmech::motion::{wrench_transform, FramePose, RotationMatrix};
use screwmech::multibody::{
    self, mechanical_energy, total_momentum, Body, Formulation, Joint, JointPosition, MultibodyTree, SystemState,
    TreeKinematics,
};
use screwmech::point::{momentum_screw, FlowVelocity, MassPoint, PointSystem};
use screwmech::rigid_body::{
    assemble_inertia, free_body_step, gravity_wrench, increment_wrench, inertial_momentum, InertiaScrew, MassAtom,
};
use screwmech::rotation::{EulerAngles, FedorovParam, Orientation, ParamKind, Quaternion, UnitQuaternion};
use screwmech::screw::{Mat6, Vec3, Vec6};
use screwmech::MechError;

use crate::model::*;
use crate::CliError;

/// Command-line overrides of the integrator block.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub param: Option<ParamKind>,
    pub formulation: Option<Formulation>,
}

/// Effective integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub dt: f64,
    pub t_end: f64,
    pub param: ParamKind,
    pub formulation: Formulation,
    pub output_every: usize,
}

impl Settings {
    pub fn resolve(model: &ModelFile, o: &Overrides) -> Result<Self, CliError> {
        let it = &model.integrator;
        let param = match (o.param, &it.param) {
            (Some(p), _) => p,
            (None, Some(s)) => s.parse().map_err(|e| CliError::Model(format!("integrator.param: {e}")))?,
            (None, None) => ParamKind::Quaternion,
        };
        let formulation = match (o.formulation, &it.formulation) {
            (Some(f), _) => f,
            (None, Some(s)) => s.parse().map_err(|e| CliError::Model(format!("integrator.formulation: {e}")))?,
            (None, None) => Formulation::NewtonEuler,
        };
        let dt = o.dt.unwrap_or(it.dt);
        let t_end = o.t_end.unwrap_or(it.t_end);
        if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(CliError::Model(format!("integrator: invalid dt {dt} or t_end {t_end}")));
        }
        Ok(Self { dt, t_end, param, formulation, output_every: it.output_every })
    }
}

/// Time series with a fixed column schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn v3(a: &[f64; 3]) -> Vec3<f64> {
    Vec3::new(a[0], a[1], a[2])
}

fn numerical(t: f64, source: MechError, snapshot: String) -> CliError {
    CliError::Numerical { t, source, snapshot }
}

fn snapshot(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

pub fn rotation_from_spec(spec: &OrientationSpec) -> Result<RotationMatrix<f64>, CliError> {
    let v = &spec.values;
    let need = |n: usize| {
        if v.len() == n {
            Ok(())
        } else {
            Err(CliError::Model(format!("orientation.values: '{}' needs {n} values, got {}", spec.param, v.len())))
        }
    };
    match spec.param.as_str() {
        "axis_angle" => {
            need(4)?;
            let axis = Vec3::new(v[0], v[1], v[2]);
            if axis.norm() == 0.0 {
                return Err(CliError::Model("orientation.values: zero rotation axis".into()));
            }
            Ok(RotationMatrix::from_axis_angle(&axis, v[3]))
        }
        _ => Ok(orientation_from_spec(spec, None)?.to_rotation()),
    }
}

/// The orientation described by `spec`, expressed in `kind` (or in the
/// parameterization of the spec itself when `kind` is `None`).
pub fn orientation_from_spec(spec: &OrientationSpec, kind: Option<ParamKind>) -> Result<Orientation<f64>, CliError> {
    let v = &spec.values;
    let own = match spec.param.as_str() {
        "quaternion" if v.len() == 4 => {
            let q = UnitQuaternion::new(Quaternion::new(v[0], Vec3::new(v[1], v[2], v[3])))
                .map_err(|e| CliError::Model(format!("orientation.values: {e}")))?;
            Some(Orientation::Quaternion(q))
        }
        "euler" if v.len() == 3 => Some(Orientation::Euler(EulerAngles::new(v[0], v[1], v[2]))),
        "fedorov" if v.len() == 3 => Some(Orientation::Fedorov(FedorovParam::new(Vec3::new(v[0], v[1], v[2])))),
        "quaternion" | "euler" | "fedorov" => {
            return Err(CliError::Model(format!("orientation.values: wrong count {} for '{}'", v.len(), spec.param)))
        }
        "axis_angle" => None,
        other => {
            return Err(CliError::Model(format!(
                "orientation.param: unknown '{other}' (expected quaternion, euler, fedorov or axis_angle)"
            )))
        }
    };
    match (own, kind) {
        (Some(o), None) => Ok(o),
        (Some(o), Some(k)) if o.kind() == k => Ok(o),
        (own, k) => {
            let c = match own {
                Some(o) => o.to_rotation(),
                None => rotation_from_spec(spec)?,
            };
            let k = k.unwrap_or(ParamKind::Quaternion);
            Orientation::from_rotation(k, &c).map_err(|e| numerical(0.0, e, "initial orientation".into()))
        }
    }
}

fn flow_of(f: &Option<FlowSpec>) -> FlowVelocity<f64> {
    match f {
        Some(FlowSpec::Absolute(u)) => FlowVelocity::Absolute(v3(u)),
        Some(FlowSpec::Relative(w)) => FlowVelocity::Relative(v3(w)),
        // mass leaves or joins with the local velocity
        None => FlowVelocity::Relative(Vec3::zeros()),
    }
}

/// Mass model of one body: its inertia screw and, for atom bodies, the atoms
/// and their mass flows.
pub struct BodyMass {
    pub inertia: InertiaScrew<f64>,
    pub atoms: Vec<MassAtom<f64>>,
    pub flows: Vec<FlowVelocity<f64>>,
}

impl BodyMass {
    pub fn from_spec(b: &BodySpec) -> Result<Self, CliError> {
        let model = |e: MechError| CliError::Model(format!("body '{}': {e}", b.name));
        if let Some(rows) = &b.inertia {
            let theta = Mat6::from_fn(|i, j| rows[i][j]);
            let asym = (theta - theta.transpose()).amax();
            if asym > 1e-12 * (1.0 + theta.amax()) {
                return Err(CliError::Model(format!("body '{}'.inertia: not symmetric ({asym:.3e})", b.name)));
            }
            let inertia = InertiaScrew::new(theta, Mat6::zeros());
            inertia.check_invertible().map_err(model)?;
            return Ok(Self { inertia, atoms: vec![], flows: vec![] });
        }
        let specs = b.atoms.as_deref().unwrap_or(&[]);
        let atoms = specs
            .iter()
            .map(|a| MassAtom::with_rate(v3(&a.position), a.mass, a.mass_rate))
            .collect::<Result<Vec<_>, _>>()
            .map_err(model)?;
        let inertia = assemble_inertia(&atoms).map_err(model)?;
        Ok(Self { inertia, atoms, flows: specs.iter().map(|a| flow_of(&a.flow)).collect() })
    }

    /// Wrench of the mass exchanged by the atoms, body coordinates.
    pub fn increment(&self, pose: &FramePose<f64>, twist: &Vec6<f64>) -> Vec6<f64> {
        if self.atoms.iter().all(|a| a.mass_rate == 0.0) {
            return Vec6::zeros();
        }
        let v = twist.fixed_rows::<3>(0).into_owned();
        let w = twist.fixed_rows::<3>(3).into_owned();
        let xi: Vec<Vec3<f64>> = self
            .atoms
            .iter()
            .zip(&self.flows)
            .map(|(a, f)| {
                let u = match f {
                    FlowVelocity::Relative(rel) => v + w.cross(&a.position) + rel,
                    FlowVelocity::Absolute(abs) => pose.c().tr_mul(abs),
                };
                u * a.mass_rate
            })
            .collect();
        increment_wrench(&self.atoms, &xi)
    }
}

/// Applied wrench on `body` at time `t`, body coordinates.
fn applied(wrenches: &[WrenchSpec], body: &str, t: f64, pose: &FramePose<f64>) -> Result<Vec6<f64>, MechError> {
    let mut total = Vec6::zeros();
    for w in wrenches.iter().filter(|w| w.body == body) {
        let value = Vec6::from_column_slice(&w.at(t));
        total += match w.frame {
            WrenchFrame::Body => value,
            WrenchFrame::World => wrench_transform(pose)?.inverse().matrix() * value,
        };
    }
    Ok(total)
}

fn pose_columns(name: &str, out: &mut Vec<String>) {
    for c in ["qw", "qx", "qy", "qz", "x", "y", "z", "vx", "vy", "vz", "wx", "wy", "wz"] {
        out.push(format!("{name}.{c}"));
    }
}

fn pose_values(pose: &FramePose<f64>, twist: &Vec6<f64>, out: &mut Vec<f64>) {
    let q = UnitQuaternion::from_rotation(&RotationMatrix::new_unchecked(*pose.c()));
    out.extend([q.w(), q.v().x, q.v().y, q.v().z]);
    out.extend(pose.translation.iter());
    out.extend(twist.iter());
}

const DERIVED: [&str; 9] = ["kinetic", "potential", "energy", "px", "py", "pz", "lx", "ly", "lz"];

fn derived_columns(out: &mut Vec<String>) {
    out.extend(DERIVED.iter().map(|s| s.to_string()));
}

/// Runs the model from `t = 0` to `t_end` with fixed RK4 steps.
pub fn run(model: &ModelFile, settings: &Settings) -> Result<Trajectory, CliError> {
    match model.kind {
        ScenarioKind::Masspoints => run_points(model, settings),
        ScenarioKind::RigidBody => run_rigid(model, settings),
        ScenarioKind::Multibody => run_multibody(model, settings),
    }
}

/// Drives `advance` over the time grid, recording every `output_every`-th
/// state and the final one.
fn integrate<S>(
    settings: &Settings,
    mut state: S,
    mut record: impl FnMut(f64, &S) -> Result<Vec<f64>, CliError>,
    mut advance: impl FnMut(f64, f64, &S) -> Result<S, CliError>,
) -> Result<Vec<Vec<f64>>, CliError> {
    let n = step_count(settings.dt, settings.t_end);
    let mut rows = vec![record(0.0, &state)?];
    for k in 0..n {
        let t = k as f64 * settings.dt;
        let h = settings.dt.min(settings.t_end - t);
        state = advance(t, h, &state)?;
        if (k + 1) % settings.output_every == 0 || k + 1 == n {
            let t1 = if k + 1 == n { settings.t_end } else { (k + 1) as f64 * settings.dt };
            rows.push(record(t1, &state)?);
        }
    }
    Ok(rows)
}

fn run_points(model: &ModelFile, settings: &Settings) -> Result<Trajectory, CliError> {
    let points = model
        .points
        .iter()
        .map(|p| MassPoint::with_flow(v3(&p.position), v3(&p.velocity), p.mass, p.mass_rate, flow_of(&p.flow)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Model(format!("points: {e}")))?;
    let forces: Vec<Vec3<f64>> = model.points.iter().map(|p| v3(&p.force)).collect();
    let sys = PointSystem { gamma: model.gamma, uniform_gravity: v3(&model.gravity) };
    let mut columns = vec!["t".to_string()];
    for (i, p) in model.points.iter().enumerate() {
        let name = p.name.clone().unwrap_or_else(|| format!("p{i}"));
        for c in ["x", "y", "z", "vx", "vy", "vz", "m"] {
            columns.push(format!("{name}.{c}"));
        }
    }
    derived_columns(&mut columns);
    let state_values = |ps: &[MassPoint<f64>]| -> Vec<f64> {
        ps.iter().flat_map(|p| p.position.iter().chain(p.velocity.iter()).copied().chain([p.mass])).collect()
    };
    let rows = integrate(
        settings,
        points,
        |t, ps| {
            let mut row = vec![t];
            row.extend(state_values(ps));
            let kinetic: f64 = ps.iter().map(|p| 0.5 * p.mass * p.velocity.norm_squared()).sum();
            let energy = sys.energy(ps);
            let h = momentum_screw(ps);
            row.extend([kinetic, energy - kinetic, energy]);
            row.extend(h.resultant.iter().chain(h.moment.iter()));
            Ok(row)
        },
        |t, h, ps| sys.step_with(ps, &forces, h).map_err(|e| numerical(t, e, snapshot(&state_values(ps)))),
    )?;
    Ok(Trajectory { columns, rows })
}

fn run_rigid(model: &ModelFile, settings: &Settings) -> Result<Trajectory, CliError> {
    use screwmech::rigid_body::FreeBodyState;
    let spec = &model.bodies[0];
    let mass = BodyMass::from_spec(spec)?;
    let init = &spec.initial;
    let orientation = match &init.orientation {
        Some(o) => orientation_from_spec(o, Some(settings.param))?,
        None => Orientation::identity(settings.param),
    };
    orientation.check_regular().map_err(|e| numerical(0.0, e, "initial orientation".into()))?;
    let state = FreeBodyState::new(orientation, v3(&init.position), Vec6::from_column_slice(&init.twist));
    let g = v3(&model.gravity);
    let mut columns = vec!["t".to_string()];
    pose_columns(&spec.name, &mut columns);
    derived_columns(&mut columns);
    let values = |s: &FreeBodyState<f64>| -> Vec<f64> {
        let mut v = s.orientation.coords();
        v.extend(s.position.iter().chain(s.twist.iter()));
        v
    };
    let rows = integrate(
        settings,
        state,
        |t, s| {
            let ins = mass.inertia.advanced(t);
            let pose = s.pose();
            let mut row = vec![t];
            pose_values(&pose, &s.twist, &mut row);
            let kinetic = ins.kinetic_energy(&s.twist);
            let potential = -ins.mass() * g.dot(&pose.apply_point(&ins.center_of_mass()));
            let h = inertial_momentum(&ins, &s.body_state()).map_err(|e| numerical(t, e, snapshot(&values(s))))?;
            row.extend([kinetic, potential, kinetic + potential]);
            row.extend(h.iter());
            Ok(row)
        },
        |t, h, s| {
            let ins = mass.inertia.advanced(t);
            free_body_step(&ins, s, t, h, |time, b| {
                let ins_now = mass.inertia.advanced(time);
                Ok(gravity_wrench(&ins_now, &b.pose, &g)
                    + applied(&model.wrenches, &spec.name, time, &b.pose)?
                    + mass.increment(&b.pose, &b.twist))
            })
            .map_err(|e| numerical(t, e, snapshot(&values(s))))
        },
    )?;
    Ok(Trajectory { columns, rows })
}

/// A multibody model resolved into core objects.
pub struct MultibodySetup {
    pub tree: MultibodyTree<f64>,
    pub state: SystemState<f64>,
    pub masses: Vec<BodyMass>,
    pub names: Vec<String>,
}

fn offset_pose(o: &Option<OffsetSpec>) -> Result<FramePose<f64>, CliError> {
    let Some(o) = o else { return Ok(FramePose::identity()) };
    let rot = match &o.rotation {
        Some(r) => rotation_from_spec(r)?,
        None => RotationMatrix::identity(),
    };
    Ok(FramePose::new(rot, v3(&o.translation)))
}

pub fn build_multibody(model: &ModelFile, param: ParamKind) -> Result<MultibodySetup, CliError> {
    let index = |name: &Option<String>| -> usize {
        match name.as_deref() {
            None | Some("ground") => 0,
            Some(n) => 1 + model.bodies.iter().position(|b| b.name == n).expect("checked parent"),
        }
    };
    let mut bodies = Vec::new();
    let mut masses = Vec::new();
    let mut positions = Vec::new();
    let mut velocities = Vec::new();
    for b in &model.bodies {
        let model_err = |e: MechError| CliError::Model(format!("body '{}': {e}", b.name));
        let spec = b.joint.as_ref().expect("checked joint");
        let offset = offset_pose(&spec.offset)?;
        let axis = spec.axis.map(|a| v3(&a)).unwrap_or_else(Vec3::zeros);
        let joint = match spec.kind {
            JointType::Revolute => Joint::revolute(axis, offset).map_err(model_err)?,
            JointType::Prismatic => Joint::prismatic(axis, offset).map_err(model_err)?,
            JointType::Free => Joint::free(offset),
        };
        let init = &b.initial;
        match spec.kind {
            JointType::Free => {
                let orientation = match &init.orientation {
                    Some(o) => orientation_from_spec(o, Some(param))?,
                    None => Orientation::identity(param),
                };
                positions.push(JointPosition::Free { orientation, translation: v3(&init.position) });
                velocities.extend(init.twist);
            }
            _ => {
                positions.push(JointPosition::Scalar(init.q));
                velocities.push(init.u);
            }
        }
        let mass = BodyMass::from_spec(b)?;
        bodies.push(Body::with_inertia(b.name.clone(), mass.inertia, index(&b.parent), joint));
        masses.push(mass);
    }
    let tree = MultibodyTree::new(bodies, v3(&model.gravity)).map_err(|e| CliError::Model(e.to_string()))?;
    let state = SystemState::new(positions, DVector::from_vec(velocities));
    for p in &state.positions {
        p.check_regular().map_err(|e| numerical(0.0, e, "initial joint positions".into()))?;
    }
    Ok(MultibodySetup { tree, state, masses, names: model.bodies.iter().map(|b| b.name.clone()).collect() })
}

fn run_multibody(model: &ModelFile, settings: &Settings) -> Result<Trajectory, CliError> {
    let setup = build_multibody(model, settings.param)?;
    let MultibodySetup { tree, state, masses, names } = &setup;
    let mut columns = vec!["t".to_string()];
    for n in names {
        pose_columns(n, &mut columns);
    }
    derived_columns(&mut columns);
    let values = |s: &SystemState<f64>| -> Vec<f64> {
        let mut v = s.position_coords();
        v.extend(s.velocities.iter());
        v
    };
    let mut wrench = |t: f64, kin: &TreeKinematics<f64>| -> Result<DVector<f64>, MechError> {
        let mut out = DVector::zeros(6 * names.len());
        for (i, n) in names.iter().enumerate() {
            let pose = &kin.absolute[i];
            let w = applied(&model.wrenches, n, t, pose)? + masses[i].increment(pose, &kin.absolute_twists[i]);
            out.fixed_rows_mut::<6>(6 * i).copy_from(&w);
        }
        Ok(out)
    };
    let rows = integrate(
        settings,
        state.clone(),
        |t, s| {
            let err = |e| numerical(t, e, snapshot(&values(s)));
            let kin = TreeKinematics::compute(tree, s).map_err(err)?;
            let mut row = vec![t];
            for i in 0..names.len() {
                pose_values(&kin.absolute[i], &kin.absolute_twists[i], &mut row);
            }
            let e = mechanical_energy(tree, s, t).map_err(err)?;
            let h = total_momentum(tree, s, t).map_err(err)?;
            row.extend([e.kinetic, e.potential, e.total()]);
            row.extend(h.iter());
            Ok(row)
        },
        |t, h, s| {
            multibody::step(settings.formulation, tree, s, t, h, &mut wrench).map_err(|e| numerical(t, e, snapshot(&values(s))))
        },
    )?;
    Ok(Trajectory { columns, rows })
}
