//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use screwmech::validate::{run_suite, Check, Options, Suite};

struct Outcome {
    name: &'static str,
    failures: Vec<String>,
    detail: String,
}

fn suite_outcome(name: &'static str, suite: Suite) -> Outcome {
    let checks: Vec<Check> = run_suite(suite, &Options::default());
    let failures = checks.iter().filter(|c| !c.passed()).map(|c| c.to_string()).collect();
    let measured = checks.iter().map(|c| format!("{}={:.1e}", c.name, c.measured)).collect::<Vec<_>>().join(" ");
    Outcome { name, failures, detail: format!("{} checks: {measured}", checks.len()) }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_screwmech"))
}

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn read_column(path: &Path, column: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap_or_default();
    let mut lines = text.lines();
    let Some(header) = lines.next() else { return vec![] };
    let Some(k) = header.split(',').position(|c| c == column) else { return vec![] };
    lines.filter_map(|l| l.split(',').nth(k)?.parse().ok()).collect()
}

fn cli_outcome() -> Outcome {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().expect("temporary directory");
    let model = models().join("double_pendulum.json");

    // byte-identical reruns of the full ten-second sample
    let outs: Vec<PathBuf> = ["a.csv", "b.csv"].iter().map(|n| dir.path().join(n)).collect();
    for out in &outs {
        let status = bin().args(["simulate", "--model"]).arg(&model).arg("--out").arg(out).status();
        if !matches!(status, Ok(s) if s.success()) {
            failures.push(format!("simulate {} failed", model.display()));
        }
    }
    let identical = std::fs::read(&outs[0]).ok().is_some_and(|a| std::fs::read(&outs[1]).ok() == Some(a));
    if !identical {
        failures.push("reruns differ".into());
    }
    let energy = read_column(&outs[0], "energy");
    let drift = energy.iter().map(|e| (e - energy[0]).abs()).fold(0.0, f64::max);
    if energy.is_empty() || drift > 1e-5 {
        failures.push(format!("sample energy drift {drift:.3e} > 1e-5"));
    }

    // validate runs every suite and fails loudly on a defect
    let start = Instant::now();
    let full = bin().arg("validate").output();
    let elapsed = start.elapsed().as_secs_f64();
    match &full {
        Ok(o) if o.status.success() => {
            let text = String::from_utf8_lossy(&o.stdout);
            for s in Suite::ALL {
                if !text.contains(&format!("PASS {}/", s.name())) {
                    failures.push(format!("validate output lacks suite {}", s.name()));
                }
            }
        }
        _ => failures.push("validate did not pass".into()),
    }
    if elapsed > 120.0 {
        failures.push(format!("validate took {elapsed:.1}s > 120s"));
    }
    let injected = bin().args(["validate", "--inject", "phi-sign"]).output();
    if !matches!(&injected, Ok(o) if o.status.code() == Some(3)) {
        failures.push("injected defect not reported with exit code 3".into());
    }
    Outcome {
        name: "cli",
        failures,
        detail: format!("identical reruns {identical}, energy drift {drift:.1e}, validate {elapsed:.1}s"),
    }
}

fn main() {
    let outcomes = vec![
        suite_outcome("group", Suite::Group),
        suite_outcome("param", Suite::Param),
        suite_outcome("rigid", Suite::Rigid),
        suite_outcome("multibody", Suite::Multibody),
        suite_outcome("point", Suite::Point),
        suite_outcome("constitutive", Suite::Constitutive),
        cli_outcome(),
    ];
    let mut failed = 0;
    for o in &outcomes {
        if o.failures.is_empty() {
            println!("PASS {}: {}", o.name, o.detail);
        } else {
            failed += 1;
            println!("FAIL {}: {}", o.name, o.failures.join("; "));
        }
    }
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
