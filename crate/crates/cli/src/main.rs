use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use screwmech::multibody::Formulation;
use screwmech::rotation::ParamKind;
use screwmech::validate::{Mutation, Suite};
use screwmech_cli::scenario::Overrides;
use screwmech_cli::{info, simulate, validate_model, validate_suites, CliError};

#[derive(Parser)]
#[command(name = "screwmech", version, about = "Rigid, multibody and mass-point simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inject {
    PhiSign,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one or more models and write CSV trajectories.
    Simulate {
        /// Model file; repeat to run several scenarios (then --out is a directory).
        #[arg(long, required = true)]
        model: Vec<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// quaternion | euler | fedorov
        #[arg(long)]
        param: Option<ParamKind>,
        /// newton-euler | lagrange
        #[arg(long)]
        formulation: Option<Formulation>,
        #[arg(long)]
        out: PathBuf,
        /// Scenarios integrated concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in invariant suites, or check that a model is usable.
    Validate {
        /// group | param | rigid | multibody | point | constitutive
        #[arg(long)]
        suite: Option<Suite>,
        #[arg(long, conflicts_with = "suite")]
        model: Option<PathBuf>,
        #[arg(long)]
        param: Option<ParamKind>,
        #[arg(long, hide = true)]
        inject: Option<Inject>,
    },
    /// Print the assembled inertia, kinematic and generalized mass matrices.
    Info {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        param: Option<ParamKind>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { model, dt, t_end, param, formulation, out, jobs } => {
            simulate(&model, &out, &Overrides { dt, t_end, param, formulation }, jobs)
        }
        Command::Validate { model: Some(path), param, .. } => {
            print!("{}", validate_model(&path, &Overrides { param, ..Overrides::default() })?);
            Ok(())
        }
        Command::Validate { suite, model: None, inject, .. } => {
            let mutation = inject.map(|Inject::PhiSign| Mutation::PhiSign);
            let report = validate_suites(suite, mutation);
            print!("{}", report.text);
            if report.passed() {
                Ok(())
            } else {
                let failed = report.checks.iter().filter(|c| !c.passed()).count();
                Err(CliError::Invariant(format!("{failed} check(s) failed")))
            }
        }
        Command::Info { model, param } => {
            print!("{}", info(&model, &Overrides { param, ..Overrides::default() })?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
