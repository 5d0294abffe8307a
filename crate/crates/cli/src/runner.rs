//! Experiment execution: problem lookup, the driver call, CSV history, and
//! the optional identity-check block.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mwgfem::adapt::{run_cycle, AdaptConfig, AdaptRecord, CycleRun};
use mwgfem::verify::{lemma_suite, LemmaReport, Problem};

use crate::config::RunConfig;
use crate::meshio;

#[derive(Debug)]
pub enum CliError {
    UnknownProblem(String),
    UnreadableMesh { path: PathBuf, error: std::io::Error },
    MeshFormat(meshio::MeshIoError),
    Solver(mwgfem::adapt::AdaptError),
    Output { path: PathBuf, error: std::io::Error },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::UnknownProblem(name) => write!(
                f,
                "unknown problem: {name} (expected square_sine, lshape, checkerboard, or a mesh file path)"
            ),
            CliError::UnreadableMesh { path, error } => {
                write!(f, "cannot read mesh file {}: {error}", path.display())
            }
            CliError::MeshFormat(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Output { path, error } => {
                write!(f, "cannot write {}: {error}", path.display())
            }
        }
    }
}

impl std::error::Error for CliError {}

/// Everything a finished run leaves behind.
pub struct RunArtifacts {
    pub problem: Problem,
    pub run: CycleRun,
}

fn resolve_problem(config: &RunConfig) -> Result<Problem, CliError> {
    if let Some(problem) = Problem::builtin(&config.problem, config.coefficient_k) {
        return Ok(problem);
    }
    let path = Path::new(&config.problem);
    if !path.exists() {
        return Err(CliError::UnknownProblem(config.problem.clone()));
    }
    let text = fs::read_to_string(path).map_err(|error| CliError::UnreadableMesh {
        path: path.to_path_buf(),
        error,
    })?;
    let mesh = meshio::parse_mesh(&text).map_err(CliError::MeshFormat)?;
    let constant = config.source_constant;
    Ok(Problem::new(
        config.problem.clone(),
        mesh,
        move |_| constant,
        None,
    ))
}

/// Resolves the problem and runs the adaptive cycle.
pub fn execute(config: &RunConfig) -> Result<RunArtifacts, CliError> {
    let problem = resolve_problem(config)?;
    let cfg = AdaptConfig {
        theta: config.theta,
        tol: config.tol,
        max_iterations: config.max_iterations,
        mode: config.mode,
        ..AdaptConfig::default()
    };
    let run = run_cycle(&problem, &cfg).map_err(CliError::Solver)?;
    Ok(RunArtifacts { problem, run })
}

/// Writes the convergence history as CSV with 17 significant digits;
/// `err_energy` is empty when the problem has no exact solution.
pub fn write_history_csv(path: &Path, records: &[AdaptRecord]) -> Result<(), CliError> {
    let mut out = String::from("iter,nelem,ndofs,eta2,F,jump2,err_energy,marked\n");
    for r in records {
        let err = r
            .energy_error
            .map(|e| format!("{e:.16e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{},{}\n",
            r.iteration, r.n_elements, r.n_dofs, r.eta_sq, r.f_term, r.jump_sq, err, r.marked
        ));
    }
    write_file(path, out.as_bytes())
}

/// Writes the final mesh of a run into `dir/final_mesh.txt`.
pub fn write_final_mesh(dir: &Path, artifacts: &RunArtifacts) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|error| CliError::Output {
        path: dir.to_path_buf(),
        error,
    })?;
    let path = dir.join("final_mesh.txt");
    let text = meshio::write_mesh(artifacts.run.final_mesh());
    write_file(&path, text.as_bytes())?;
    Ok(path)
}

/// Runs the identity-check suite on the finished run.
pub fn verify_run(artifacts: &RunArtifacts) -> LemmaReport {
    lemma_suite(&artifacts.run, &artifacts.problem)
}

/// Formats the PASS/FAIL block appended to standard output by `--verify`.
pub fn format_verify_block(report: &LemmaReport) -> String {
    let mut out = String::from("verification:\n");
    for check in &report.checks {
        out.push_str(&format!(
            "  {}: {} (observed {:.3e}, bound {:.1e})\n",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.observed,
            check.bound
        ));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.all_passed() { "PASS" } else { "FAIL" }
    ));
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut file = fs::File::create(path).map_err(|error| CliError::Output {
        path: path.to_path_buf(),
        error,
    })?;
    file.write_all(bytes).map_err(|error| CliError::Output {
        path: path.to_path_buf(),
        error,
    })
}
