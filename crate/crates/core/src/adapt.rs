//! Bulk marking and the solve–estimate–mark–refine driver.

use alloc::vec::Vec;

use crate::estimator::estimate;
use crate::linsolve::{cg_solve, CgConfig, CgError};
use crate::mesh::{Mesh, MeshError};
use crate::mwg::{assemble_load, assemble_system, weak_gradient, BoundaryMode, DgFunction};
use crate::verify::{self, Problem};

/// Marking strategy of the driver loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdaptMode {
    /// Dörfler marking with parameter `theta`.
    #[default]
    Adaptive,
    /// Refine every element every iteration (two bisection levels, so mesh
    /// size halves per pass).
    Uniform,
}

/// Driver configuration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptConfig {
    /// Dörfler bulk fraction, strictly inside `(0, 1)`.
    pub theta: f64,
    /// Termination threshold on the estimator `eta` (not squared).
    pub tol: f64,
    pub max_iterations: usize,
    pub mode: AdaptMode,
    pub solver: CgConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            theta: 0.3,
            tol: 1e-3,
            max_iterations: 40,
            mode: AdaptMode::Adaptive,
            solver: CgConfig::default(),
        }
    }
}

/// One row of adaptive history, recorded after each estimate.
#[derive(Debug, Clone)]
pub struct AdaptRecord {
    pub iteration: usize,
    pub n_elements: usize,
    pub n_dofs: usize,
    pub eta_sq: f64,
    pub f_term: f64,
    pub jump_sq: f64,
    /// `||A^(1/2)(grad u - grad_w u_T)||` when the problem has an exact
    /// solution.
    pub energy_error: Option<f64>,
    /// Number of elements marked this iteration (0 on the terminal row).
    pub marked: usize,
    pub cg_iterations: usize,
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleOutcome {
    TolReached,
    MaxIterations,
}

/// Mesh, solution and refinement data of one iteration, retained so that
/// structural checks can replay the history.
#[derive(Debug, Clone)]
pub struct CycleStep {
    pub mesh: Mesh,
    pub solution: DgFunction,
    /// Elements refined to produce the next iteration's mesh; `None` on the
    /// final step.
    pub refined_set: Option<Vec<usize>>,
}

/// Full output of [`run_cycle`].
#[derive(Debug, Clone)]
pub struct CycleRun {
    pub records: Vec<AdaptRecord>,
    pub steps: Vec<CycleStep>,
    pub outcome: CycleOutcome,
}

impl CycleRun {
    pub fn final_mesh(&self) -> &Mesh {
        &self.steps.last().expect("cycle retains at least one step").mesh
    }

    pub fn final_solution(&self) -> &DgFunction {
        &self.steps.last().expect("cycle retains at least one step").solution
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdaptError {
    InvalidTheta,
    Solver(CgError),
    Mesh(MeshError),
}

impl core::fmt::Display for AdaptError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AdaptError::InvalidTheta => write!(f, "theta must be in (0,1)"),
            AdaptError::Solver(e) => write!(f, "solver failure: {e}"),
            AdaptError::Mesh(e) => write!(f, "mesh failure: {e}"),
        }
    }
}

impl core::error::Error for AdaptError {}

impl From<CgError> for AdaptError {
    fn from(e: CgError) -> Self {
        AdaptError::Solver(e)
    }
}

impl From<MeshError> for AdaptError {
    fn from(e: MeshError) -> Self {
        AdaptError::Mesh(e)
    }
}

/// Selects a minimum-cardinality set of elements whose squared indicators
/// carry at least the fraction `theta` of the total.
///
/// Elements are taken in descending indicator order, ties broken by element
/// id, which makes the selected set unique. An all-zero indicator vector
/// yields the empty set. The returned ids are sorted ascending.
pub fn dorfler_mark(indicators: &[f64], theta: f64) -> Result<Vec<usize>, AdaptError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(AdaptError::InvalidTheta);
    }
    debug_assert!(indicators.iter().all(|&v| v >= 0.0));
    let total: f64 = indicators.iter().sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| {
        indicators[b]
            .partial_cmp(&indicators[a])
            .expect("indicators must not be NaN")
            .then(a.cmp(&b))
    });
    let target = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for id in order {
        marked.push(id);
        acc += indicators[id];
        if acc >= target {
            break;
        }
    }
    marked.sort_unstable();
    Ok(marked)
}

/// Runs the adaptive (or uniform) loop on a problem: solve, estimate, record,
/// then mark and refine until `eta < tol` or the iteration cap.
///
/// The history keeps every intermediate mesh and solution; termination by the
/// cap is reported in [`CycleRun::outcome`], not as an error.
pub fn run_cycle(problem: &Problem, cfg: &AdaptConfig) -> Result<CycleRun, AdaptError> {
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(AdaptError::InvalidTheta);
    }
    let mode = BoundaryMode::HomogeneousDirichlet;
    let mut mesh = problem.mesh.clone();
    let mut records = Vec::new();
    let mut steps = Vec::new();
    let outcome;
    let mut k = 0usize;
    loop {
        let matrix = assemble_system(&mesh, mode);
        let load = assemble_load(&mesh, |x| (problem.source)(x));
        let sol = cg_solve(&matrix, &load, &cfg.solver)?;
        let u = DgFunction::from_values(&mesh, sol.x);
        let g = weak_gradient(&mesh, &u, mode);
        let breakdown = estimate(&mesh, &g, &|x| (problem.source)(x));
        let energy_error = problem
            .exact
            .as_ref()
            .map(|_| verify::energy_error(&mesh, &u, problem).expect("exact present").energy_error);
        records.push(AdaptRecord {
            iteration: k,
            n_elements: mesh.n_triangles(),
            n_dofs: 3 * mesh.n_triangles(),
            eta_sq: breakdown.total_eta_sq,
            f_term: breakdown.total_f,
            jump_sq: breakdown.total_jump_sq,
            energy_error,
            marked: 0,
            cg_iterations: sol.iterations,
        });

        let eta = breakdown.eta();
        if eta < cfg.tol {
            steps.push(CycleStep {
                mesh,
                solution: u,
                refined_set: None,
            });
            outcome = CycleOutcome::TolReached;
            break;
        }
        if k + 1 >= cfg.max_iterations {
            steps.push(CycleStep {
                mesh,
                solution: u,
                refined_set: None,
            });
            outcome = CycleOutcome::MaxIterations;
            break;
        }

        let refinement = match cfg.mode {
            AdaptMode::Adaptive => {
                let marked = dorfler_mark(&breakdown.eta_sq, cfg.theta)?;
                records.last_mut().unwrap().marked = marked.len();
                mesh.bisect(&marked)?
            }
            AdaptMode::Uniform => {
                records.last_mut().unwrap().marked = mesh.n_triangles();
                mesh.uniform_refine()
            }
        };
        steps.push(CycleStep {
            mesh,
            solution: u,
            refined_set: Some(refinement.refined_set),
        });
        mesh = refinement.fine_mesh;
        k += 1;
    }
    Ok(CycleRun {
        records,
        steps,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dorfler_examples() {
        // {4,3,2,1}, theta = 0.5, total 10: the two largest are needed.
        let marked = dorfler_mark(&[4.0, 3.0, 2.0, 1.0], 0.5).unwrap();
        assert_eq!(marked, vec![0, 1]);

        // Tiny theta: a single largest element suffices.
        let marked = dorfler_mark(&[0.5, 4.0, 3.0], 1e-9).unwrap();
        assert_eq!(marked, vec![1]);

        // Theta near one: everything with nonzero indicator.
        let marked = dorfler_mark(&[4.0, 0.0, 3.0, 2.0, 1.0], 0.999999).unwrap();
        assert_eq!(marked, vec![0, 2, 3, 4]);

        // All-zero indicators mark nothing.
        assert!(dorfler_mark(&[0.0, 0.0], 0.5).unwrap().is_empty());

        assert_eq!(dorfler_mark(&[1.0], 1.5).unwrap_err(), AdaptError::InvalidTheta);
        assert_eq!(dorfler_mark(&[1.0], 0.0).unwrap_err(), AdaptError::InvalidTheta);
    }

    #[test]
    fn dorfler_minimality_on_random_vectors() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::SmallRng::seed_from_u64(41);
        for _ in 0..500 {
            let n = rng.gen_range(1..40);
            let indicators: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        0.0
                    } else {
                        rng.gen_range(0.0..5.0)
                    }
                })
                .collect();
            let theta = rng.gen_range(0.05..0.95);
            let total: f64 = indicators.iter().sum();
            let marked = dorfler_mark(&indicators, theta).unwrap();
            if total == 0.0 {
                assert!(marked.is_empty());
                continue;
            }
            let sum: f64 = marked.iter().map(|&i| indicators[i]).sum();
            assert!(sum >= theta * total);
            // Dropping the smallest selected indicator must break it.
            let min = marked
                .iter()
                .map(|&i| indicators[i])
                .fold(f64::INFINITY, f64::min);
            assert!(sum - min < theta * total);
        }
    }

    #[test]
    fn zero_source_terminates_immediately() {
        let problem = Problem::square_sine().with_source(|_| 0.0);
        let cfg = AdaptConfig::default();
        let run = run_cycle(&problem, &cfg).unwrap();
        assert_eq!(run.records.len(), 1);
        assert_eq!(run.outcome, CycleOutcome::TolReached);
        assert_eq!(run.records[0].eta_sq, 0.0);
        assert!(run.final_solution().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_mode_quadruples_elements() {
        let problem = Problem::square_sine();
        let cfg = AdaptConfig {
            mode: AdaptMode::Uniform,
            tol: 1e-12,
            max_iterations: 4,
            ..AdaptConfig::default()
        };
        let run = run_cycle(&problem, &cfg).unwrap();
        let counts: Vec<usize> = run.records.iter().map(|r| r.n_elements).collect();
        assert_eq!(counts, vec![2, 8, 32, 128]);
        assert_eq!(run.outcome, CycleOutcome::MaxIterations);
        for r in &run.records {
            assert_eq!(r.n_dofs, 3 * r.n_elements);
        }
    }

    #[test]
    fn adaptive_growth_is_monotone() {
        let problem = Problem::lshape();
        let cfg = AdaptConfig {
            theta: 0.3,
            tol: 1e-12,
            max_iterations: 12,
            ..AdaptConfig::default()
        };
        let run = run_cycle(&problem, &cfg).unwrap();
        for pair in run.records.windows(2) {
            assert!(pair[1].n_elements > pair[0].n_elements);
        }
        // eta^2 decreases in at least 90% of the steps.
        let drops = run
            .records
            .windows(2)
            .filter(|p| p[1].eta_sq < p[0].eta_sq)
            .count();
        assert!(drops * 10 >= (run.records.len() - 1) * 9);
    }

    #[test]
    fn invalid_theta_is_rejected_by_the_driver() {
        let problem = Problem::square_sine();
        let cfg = AdaptConfig {
            theta: 1.5,
            ..AdaptConfig::default()
        };
        let err = run_cycle(&problem, &cfg).unwrap_err();
        assert_eq!(err, AdaptError::InvalidTheta);
        assert_eq!(alloc::format!("{err}"), "theta must be in (0,1)");
    }
}
