//! Command-line front end: model loading, simulation, validation and
//! inspection.

pub mod model;
pub mod output;
pub mod scenario;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use screwmech::multibody::{kinematics_matrix, lagrange_assemble, velocity_to_rates, NoWrench};
use screwmech::validate::{run_all, run_suite, Check, Mutation, Options, Suite};
use screwmech::MechError;
use thiserror::Error;

use model::{ModelFile, ScenarioKind};
use scenario::{Overrides, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("model error: {0}")]
    Model(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("numerical failure at t = {t:.6e}: {source}; state {snapshot}")]
    Numerical { t: f64, source: MechError, snapshot: String },
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(_) | CliError::Io(_) => 1,
            CliError::Numerical { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

fn kind_name(k: ScenarioKind) -> &'static str {
    match k {
        ScenarioKind::Masspoints => "masspoints",
        ScenarioKind::RigidBody => "rigid_body",
        ScenarioKind::Multibody => "multibody",
    }
}

fn model_label(path: &Path, m: &ModelFile) -> String {
    m.name.clone().unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
}

/// Loads, runs and writes one scenario.
pub fn simulate_one(model_path: &Path, out: &Path, overrides: &Overrides) -> Result<(), CliError> {
    let (model, bytes) = ModelFile::load(model_path)?;
    let settings = Settings::resolve(&model, overrides)?;
    let traj = scenario::run(&model, &settings)?;
    output::write(out, &traj, &model_label(model_path, &model), kind_name(model.kind), &bytes, &settings)
}

/// Runs every model; with several models `out` is a directory receiving
/// `<stem>.csv` per model. Returns the first failure in input order.
pub fn simulate(models: &[PathBuf], out: &Path, overrides: &Overrides, jobs: usize) -> Result<(), CliError> {
    if models.len() == 1 {
        return simulate_one(&models[0], out, overrides);
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let targets: Vec<PathBuf> = models
        .iter()
        .map(|m| out.join(format!("{}.csv", m.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default())))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let results: Vec<Result<(), CliError>> =
        pool.install(|| models.par_iter().zip(&targets).map(|(m, o)| simulate_one(m, o, overrides)).collect());
    results.into_iter().collect()
}

/// Report of a validation run.
pub struct Report {
    pub checks: Vec<Check>,
    pub text: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn validate_suites(suite: Option<Suite>, mutation: Option<Mutation>) -> Report {
    let opts = Options { mutation, ..Options::default() };
    let checks = match suite {
        Some(s) => run_suite(s, &opts),
        None => run_all(&opts),
    };
    let mut text = String::new();
    for c in &checks {
        writeln!(text, "{c}").expect("writing to a string");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(text, "{} checks, {} failed", checks.len(), failed).expect("writing to a string");
    Report { checks, text }
}

/// Checks a model can be built and advanced by one step.
pub fn validate_model(path: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let (model, _) = ModelFile::load(path)?;
    let settings = Settings::resolve(&model, overrides)?;
    let one_step = Settings { t_end: settings.dt, output_every: 1, ..settings };
    scenario::run(&model, &one_step)?;
    Ok(format!("PASS model/{}: loads and advances one step\n", model_label(path, &model)))
}

fn matrix_text(title: &str, m: &DMatrix<f64>) -> String {
    let mut s = format!("{title} ({}x{})\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:>12.5e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Assembled inertia screws, and for trees the kinematic matrix `L` and the
/// generalized mass `𝒜` at the initial state.
pub fn info(path: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let (model, _) = ModelFile::load(path)?;
    let settings = Settings::resolve(&model, overrides)?;
    let mut s = format!("model {} ({})\n", model_label(path, &model), kind_name(model.kind));
    match model.kind {
        ScenarioKind::Masspoints => {
            for (i, p) in model.points.iter().enumerate() {
                writeln!(s, "point {i}: mass {:.6e}, mass rate {:.6e}", p.mass, p.mass_rate).expect("string");
            }
        }
        ScenarioKind::RigidBody => {
            let b = scenario::BodyMass::from_spec(&model.bodies[0])?;
            let theta = DMatrix::from_column_slice(6, 6, b.inertia.theta.as_slice());
            s.push_str(&matrix_text(&format!("Theta[{}]", model.bodies[0].name), &theta));
        }
        ScenarioKind::Multibody => {
            let setup = scenario::build_multibody(&model, settings.param)?;
            let num = |e| CliError::Numerical { t: 0.0, source: e, snapshot: "initial state".into() };
            for (i, b) in setup.tree.bodies().iter().enumerate() {
                let theta = DMatrix::from_column_slice(6, 6, b.inertia.theta.as_slice());
                s.push_str(&matrix_text(&format!("Theta[{}]", setup.names[i]), &theta));
            }
            let (l, _) = kinematics_matrix(&setup.tree, &setup.state).map_err(num)?;
            s.push_str(&matrix_text("L", &l));
            let zeros = nalgebra::DVector::zeros(setup.state.position_coords().len());
            let (n, _) = velocity_to_rates(&setup.tree, &setup.state.positions, &zeros).map_err(num)?;
            let q_dot = n * &setup.state.velocities;
            let lg = lagrange_assemble(&setup.tree, &setup.state.positions, &q_dot, 0.0, &mut NoWrench).map_err(num)?;
            s.push_str(&matrix_text("A (generalized mass)", &lg.mass));
        }
    }
    Ok(s)
}
