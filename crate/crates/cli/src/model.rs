//! Declarative model files (JSON, SI units).
//!
//! Unknown fields are rejected everywhere; cross references (body parents,
//! wrench targets) are resolved by [`ModelFile::check`].

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Masspoints,
    RigidBody,
    Multibody,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub name: Option<String>,
    /// Uniform gravity (m/s²).
    #[serde(default)]
    pub gravity: [f64; 3],
    /// Mutual attraction constant between mass points.
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub points: Vec<PointSpec>,
    #[serde(default)]
    pub bodies: Vec<BodySpec>,
    #[serde(default)]
    pub wrenches: Vec<WrenchSpec>,
    pub integrator: IntegratorSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub method: Method,
    /// Orientation parameterization used for integration.
    #[serde(default)]
    pub param: Option<String>,
    #[serde(default)]
    pub formulation: Option<String>,
    /// Write every n-th step.
    #[serde(default = "one")]
    pub output_every: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowSpec {
    /// Velocity of the exchanged mass in the inertial frame.
    Absolute([f64; 3]),
    /// Velocity relative to the carrier (body coordinates for bodies).
    Relative([f64; 3]),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub position: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    pub mass: f64,
    #[serde(default)]
    pub mass_rate: f64,
    #[serde(default)]
    pub flow: Option<FlowSpec>,
    /// Constant applied force (N).
    #[serde(default)]
    pub force: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub position: [f64; 3],
    pub mass: f64,
    #[serde(default)]
    pub mass_rate: f64,
    #[serde(default)]
    pub flow: Option<FlowSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub name: String,
    #[serde(default)]
    pub atoms: Option<Vec<AtomSpec>>,
    /// Explicit inertia screw, rows of `[[m I, −m c×], [m c×, J]]`.
    #[serde(default)]
    pub inertia: Option<[[f64; 6]; 6]>,
    /// Parent body name; the ground when absent.
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub joint: Option<JointSpec>,
    #[serde(default)]
    pub initial: InitialSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointType {
    Revolute,
    Prismatic,
    Free,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointSpec {
    #[serde(rename = "type")]
    pub kind: JointType,
    #[serde(default)]
    pub axis: Option<[f64; 3]>,
    #[serde(default)]
    pub offset: Option<OffsetSpec>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetSpec {
    #[serde(default)]
    pub translation: [f64; 3],
    #[serde(default)]
    pub rotation: Option<OrientationSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationSpec {
    /// `quaternion` (w, x, y, z), `euler` (three angles), `fedorov` (vector)
    /// or `axis_angle` (x, y, z, angle).
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Joint angle or displacement of a one-dof joint.
    #[serde(default)]
    pub q: f64,
    /// Its rate.
    #[serde(default)]
    pub u: f64,
    #[serde(default)]
    pub orientation: Option<OrientationSpec>,
    #[serde(default)]
    pub position: [f64; 3],
    /// Body twist `(v, ω)` in body coordinates.
    #[serde(default)]
    pub twist: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrenchFrame {
    /// Body coordinates about the body origin.
    #[default]
    Body,
    /// Inertial coordinates about the inertial origin.
    World,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrenchSpec {
    pub body: String,
    #[serde(default)]
    pub frame: WrenchFrame,
    /// Constant wrench `(f, m)`.
    #[serde(default)]
    pub value: Option<[f64; 6]>,
    /// Rows `(t, f, m)`, interpolated linearly and held beyond the ends.
    #[serde(default)]
    pub table: Option<Vec<[f64; 7]>>,
}

impl WrenchSpec {
    pub fn at(&self, t: f64) -> [f64; 6] {
        if let Some(v) = self.value {
            return v;
        }
        let rows = self.table.as_deref().unwrap_or(&[]);
        let pick = |r: &[f64; 7]| std::array::from_fn(|k| r[k + 1]);
        match rows.iter().position(|r| r[0] > t) {
            None => rows.last().map(pick).unwrap_or([0.0; 6]),
            Some(0) => pick(&rows[0]),
            Some(i) => {
                let (a, b) = (&rows[i - 1], &rows[i]);
                let s = (t - a[0]) / (b[0] - a[0]);
                std::array::from_fn(|k| a[k + 1] + s * (b[k + 1] - a[k + 1]))
            }
        }
    }
}

fn model_error(msg: impl Into<String>) -> CliError {
    CliError::Model(msg.into())
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let m: ModelFile = serde_json::from_str(text).map_err(|e| model_error(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| model_error(format!("{}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| model_error(format!("{}: {e}", path.display())))?;
        let m = Self::parse(text).map_err(|e| match e {
            CliError::Model(msg) => model_error(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok((m, bytes))
    }

    /// Resolves cross references and checks the values serde cannot.
    pub fn check(&self) -> Result<(), CliError> {
        let it = &self.integrator;
        if !(it.dt > 0.0 && it.dt.is_finite()) {
            return Err(model_error(format!("integrator.dt: must be positive, got {}", it.dt)));
        }
        if !(it.t_end >= 0.0 && it.t_end.is_finite()) {
            return Err(model_error(format!("integrator.t_end: must be nonnegative, got {}", it.t_end)));
        }
        if it.output_every == 0 {
            return Err(model_error("integrator.output_every: must be at least 1"));
        }
        match self.kind {
            ScenarioKind::Masspoints => {
                if self.points.is_empty() {
                    return Err(model_error("points: a masspoints model needs at least one point"));
                }
                if !self.bodies.is_empty() || !self.wrenches.is_empty() {
                    return Err(model_error("bodies/wrenches: not allowed in a masspoints model"));
                }
                for (i, p) in self.points.iter().enumerate() {
                    if !(p.mass > 0.0) {
                        return Err(model_error(format!("points[{i}].mass: must be positive, got {}", p.mass)));
                    }
                }
            }
            ScenarioKind::RigidBody | ScenarioKind::Multibody => {
                if !self.points.is_empty() {
                    return Err(model_error("points: only allowed in a masspoints model"));
                }
                if self.bodies.is_empty() {
                    return Err(model_error("bodies: at least one body is required"));
                }
                if self.kind == ScenarioKind::RigidBody && self.bodies.len() != 1 {
                    return Err(model_error("bodies: a rigid_body model has exactly one body"));
                }
                self.check_bodies()?;
            }
        }
        Ok(())
    }

    fn check_bodies(&self) -> Result<(), CliError> {
        let mut names = HashSet::new();
        for (i, b) in self.bodies.iter().enumerate() {
            let at = format!("bodies[{i}] ({})", b.name);
            if b.name == "ground" || !names.insert(b.name.as_str()) {
                return Err(model_error(format!("{at}.name: duplicate or reserved name")));
            }
            match (&b.atoms, &b.inertia) {
                (Some(_), Some(_)) => return Err(model_error(format!("{at}: give either atoms or inertia, not both"))),
                (None, None) => return Err(model_error(format!("{at}: missing atoms or inertia"))),
                (Some(a), None) if a.is_empty() => return Err(model_error(format!("{at}.atoms: empty"))),
                _ => {}
            }
            if self.kind == ScenarioKind::RigidBody {
                if b.joint.is_some() || b.parent.is_some() {
                    return Err(model_error(format!("{at}: a rigid_body model takes no joint or parent")));
                }
                continue;
            }
            if let Some(p) = &b.parent {
                if p != "ground" && !self.bodies.iter().any(|o| &o.name == p) {
                    return Err(model_error(format!("{at}.parent: unknown body '{p}'")));
                }
            }
            let j = b.joint.as_ref().ok_or_else(|| model_error(format!("{at}.joint: missing")))?;
            match (j.kind, j.axis) {
                (JointType::Revolute | JointType::Prismatic, None) => {
                    return Err(model_error(format!("{at}.joint.axis: required for a {:?} joint", j.kind).to_lowercase()))
                }
                (JointType::Free, Some(_)) => return Err(model_error(format!("{at}.joint.axis: a free joint has no axis"))),
                _ => {}
            }
        }
        for (i, w) in self.wrenches.iter().enumerate() {
            if !self.bodies.iter().any(|b| b.name == w.body) {
                return Err(model_error(format!("wrenches[{i}].body: unknown body '{}'", w.body)));
            }
            match (&w.value, &w.table) {
                (Some(_), None) => {}
                (None, Some(rows)) if !rows.is_empty() => {
                    if rows.windows(2).any(|p| !(p[1][0] > p[0][0])) {
                        return Err(model_error(format!("wrenches[{i}].table: times must increase")));
                    }
                }
                _ => return Err(model_error(format!("wrenches[{i}]: give exactly one of value or a nonempty table"))),
            }
        }
        Ok(())
    }
}
