//! Benchmark problems, error norms against exact solutions, and a suite of
//! structural identity checks on completed adaptive runs.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};

use crate::adapt::CycleRun;
use crate::estimator;
use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::mwg::{
    assemble_load, assemble_system, dof, energy_norm, weak_gradient, BoundaryMode, DgFunction,
};
use crate::quadrature::{
    integrate_edge, integrate_triangle, EdgePoint, TriPoint, EDGE_GAUSS2, TRI_DEGREE4,
};
use crate::sparse::SparseSymMatrix;

pub type ScalarField = dyn Fn(Vec2) -> f64 + Send + Sync;
pub type VectorField = dyn Fn(Vec2) -> Vec2 + Send + Sync;

/// A closed-form exact solution with its gradient.
pub struct ExactSolution {
    pub u: Box<ScalarField>,
    pub grad_u: Box<VectorField>,
}

/// A benchmark: initial mesh, source term, and optionally the exact solution.
pub struct Problem {
    pub name: String,
    pub mesh: Mesh,
    pub source: Box<ScalarField>,
    pub exact: Option<ExactSolution>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        mesh: Mesh,
        source: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
        exact: Option<ExactSolution>,
    ) -> Self {
        Problem {
            name: name.into(),
            mesh,
            source: Box::new(source),
            exact,
        }
    }

    /// Replaces the source term and drops the exact solution (which would no
    /// longer match).
    pub fn with_source(self, source: impl Fn(Vec2) -> f64 + Send + Sync + 'static) -> Self {
        Problem {
            name: self.name,
            mesh: self.mesh,
            source: Box::new(source),
            exact: None,
        }
    }

    /// Unit square split along the diagonal, `A = 1`, exact solution
    /// `u = sin(pi x) sin(pi y)`.
    pub fn square_sine() -> Self {
        let vertices = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let mesh =
            Mesh::build_initial(vertices, vec![[0, 1, 2], [0, 2, 3]], vec![1.0, 1.0]).unwrap();
        let exact = ExactSolution {
            u: Box::new(|p: Vec2| libm::sin(PI * p.x) * libm::sin(PI * p.y)),
            grad_u: Box::new(|p: Vec2| {
                Vec2::new(
                    PI * libm::cos(PI * p.x) * libm::sin(PI * p.y),
                    PI * libm::sin(PI * p.x) * libm::cos(PI * p.y),
                )
            }),
        };
        Problem::new(
            "square_sine",
            mesh,
            |p: Vec2| 2.0 * PI * PI * libm::sin(PI * p.x) * libm::sin(PI * p.y),
            Some(exact),
        )
    }

    /// L-shaped domain `(-1,1)^2` minus the lower-right quadrant, triangulated
    /// as a six-triangle fan around an interior kernel point, `A = 1`,
    /// `f = 1`. The reentrant corner at the origin drives the singularity;
    /// no closed-form exact solution is carried.
    pub fn lshape() -> Self {
        let vertices = vec![
            Vec2::new(-1.0, -1.0),
            Vec2::new(0.0, -1.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(-0.5, 0.5),
        ];
        let triangles = vec![
            [6, 0, 1],
            [6, 1, 2],
            [6, 2, 3],
            [6, 3, 4],
            [6, 4, 5],
            [6, 5, 0],
        ];
        let mesh = Mesh::build_initial(vertices, triangles, vec![1.0; 6]).unwrap();
        Problem::new("lshape", mesh, |_| 1.0, None)
    }

    /// Unit square with `A` alternating between 1 and `k` on the four
    /// quadrants (checkerboard around the center), `f = 1`, no exact
    /// solution.
    pub fn checkerboard(k: f64) -> Self {
        assert!(k > 0.0, "coefficient must be positive");
        let vertices = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(0.5, 0.5),
            Vec2::new(1.0, 0.5),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 1.0),
            Vec2::new(1.0, 1.0),
        ];
        let triangles = vec![
            [0, 1, 4],
            [0, 4, 3], // lower-left, A = 1
            [1, 2, 4],
            [2, 5, 4], // lower-right, A = k
            [3, 4, 6],
            [4, 7, 6], // upper-left, A = k
            [4, 5, 8],
            [4, 8, 7], // upper-right, A = 1
        ];
        let coeffs = vec![1.0, 1.0, k, k, k, k, 1.0, 1.0];
        let mesh = Mesh::build_initial(vertices, triangles, coeffs).unwrap();
        Problem::new("checkerboard", mesh, |_| 1.0, None)
    }

    /// Looks up a built-in problem by name; `coefficient_k` only affects the
    /// checkerboard.
    pub fn builtin(name: &str, coefficient_k: f64) -> Option<Self> {
        match name {
            "square_sine" => Some(Problem::square_sine()),
            "lshape" => Some(Problem::lshape()),
            "checkerboard" => Some(Problem::checkerboard(coefficient_k)),
            _ => None,
        }
    }

    /// Largest `|u|` of the exact solution at boundary-edge quadrature points
    /// of the initial mesh; `None` without an exact solution.
    pub fn max_exact_boundary_trace(&self) -> Option<f64> {
        let exact = self.exact.as_ref()?;
        let mut worst: f64 = 0.0;
        for e in 0..self.mesh.n_edges() {
            let edge = self.mesh.edge(e);
            if !edge.is_boundary() {
                continue;
            }
            let [p, q] = edge.endpoints();
            let (a, b) = (self.mesh.vertex(p), self.mesh.vertex(q));
            for &(t, _) in &EDGE_GAUSS2 {
                let x = Vec2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                worst = worst.max((exact.u)(x).abs());
            }
        }
        Some(worst)
    }
}

/// Error norms of a discrete solution against the exact one.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    /// `||A^(1/2)(grad u - grad_w u_T)||`.
    pub energy_error: f64,
    /// Squared jump part `sum_t h_t^-1 ||Qb [u - u_T]||^2_{boundary of t}`.
    pub stab_error_sq: f64,
    /// Square root of the sum of the two squared parts.
    pub triple_norm_error: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    MissingExactSolution,
}

impl core::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyError::MissingExactSolution => write!(f, "problem has no exact solution"),
        }
    }
}

impl core::error::Error for VerifyError {}

/// `L^2` norm of a source field over the mesh (fixed degree-4 rule).
pub fn l2_norm(mesh: &Mesh, f: &impl Fn(Vec2) -> f64) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangle_vertices(t);
        total += integrate_triangle(&TRI_DEGREE4, a, b, c, mesh.area(t), |x| {
            let v = f(x);
            v * v
        });
    }
    libm::sqrt(total)
}

/// Error norms with the standard quadrature rules.
pub fn energy_error(mesh: &Mesh, u_t: &DgFunction, problem: &Problem) -> Result<ErrorReport, VerifyError> {
    energy_error_with_rules(mesh, u_t, problem, &TRI_DEGREE4, &EDGE_GAUSS2)
}

/// Error norms with caller-chosen rules (used to audit quadrature
/// sensitivity).
///
/// On interior edges the exact solution has no jump, so the stabilization
/// part uses only the discrete jumps; boundary edges compare the projected
/// traces of `u` and `u_T`.
pub fn energy_error_with_rules(
    mesh: &Mesh,
    u_t: &DgFunction,
    problem: &Problem,
    tri_rule: &[TriPoint],
    edge_rule: &[EdgePoint],
) -> Result<ErrorReport, VerifyError> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or(VerifyError::MissingExactSolution)?;
    let g = weak_gradient(mesh, u_t, BoundaryMode::HomogeneousDirichlet);
    let mut volume = 0.0;
    for t in 0..mesh.n_triangles() {
        let [a, b, c] = mesh.triangle_vertices(t);
        let gt = g.element(t);
        let integral = integrate_triangle(tri_rule, a, b, c, mesh.area(t), |x| {
            let d = (exact.grad_u)(x) - gt;
            d.dot(d)
        });
        volume += mesh.coefficient(t) * integral;
    }
    let mut stab = 0.0;
    for (e, edge) in mesh.edges().iter().enumerate() {
        let (t0, t1) = edge.adjacent();
        match t1 {
            Some(t1) => {
                let jump = u_t.edge_jump(mesh, e);
                let weight =
                    edge.length * (1.0 / mesh.element_size(t0) + 1.0 / mesh.element_size(t1));
                stab += weight * jump * jump;
            }
            None => {
                let [p, q] = edge.endpoints();
                let mean_u = integrate_edge(
                    edge_rule,
                    mesh.vertex(p),
                    mesh.vertex(q),
                    edge.length,
                    |x| (exact.u)(x),
                ) / edge.length;
                let val = mean_u - u_t.edge_average(mesh, e);
                stab += edge.length / mesh.element_size(t0) * val * val;
            }
        }
    }
    let energy = libm::sqrt(volume);
    Ok(ErrorReport {
        energy_error: energy,
        stab_error_sq: stab,
        triple_norm_error: libm::sqrt(volume + stab),
    })
}

/// Largest violation of the discrete equations over conforming hat functions:
/// `max_v |a(u_T, hat_v) - (f, hat_v)|` over interior vertices, computed from
/// the assembled residual.
pub fn galerkin_consistency_gap(
    mesh: &Mesh,
    matrix: &SparseSymMatrix,
    u_t: &DgFunction,
    load: &[f64],
) -> f64 {
    let mut residual = vec![0.0; matrix.dim()];
    matrix.mul_vec(u_t.values(), &mut residual);
    for (r, b) in residual.iter_mut().zip(load) {
        *r -= b;
    }
    let mut per_vertex = vec![0.0; mesh.n_vertices()];
    for t in 0..mesh.n_triangles() {
        for (local, &v) in mesh.triangle(t).iter().enumerate() {
            per_vertex[v] += residual[dof(t, local)];
        }
    }
    let mut worst: f64 = 0.0;
    for v in mesh.interior_vertices() {
        worst = worst.max(per_vertex[v].abs());
    }
    worst
}

/// One structural check of [`lemma_suite`].
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value, in the units of `bound`.
    pub observed: f64,
    pub bound: f64,
}

/// Outcome of the identity checks on a completed run.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Replays a completed cycle and checks the identities the scheme is built
/// on: Galerkin consistency against hat functions, agreement of the weak
/// gradient with the Crouzeix–Raviart route, the data-term reduction under
/// refinement, and positivity of the bilinear form.
///
/// Failures are report entries, never panics.
pub fn lemma_suite(run: &CycleRun, problem: &Problem) -> LemmaReport {
    let mode = BoundaryMode::HomogeneousDirichlet;
    let mut checks = Vec::new();

    // (a) Partial orthogonality: the solved system reproduces (f, hat) for
    // every interior-vertex hat function.
    let mut worst_gal = 0.0f64;
    for step in &run.steps {
        let matrix = assemble_system(&step.mesh, mode);
        let load = assemble_load(&step.mesh, |x| (problem.source)(x));
        let gap = galerkin_consistency_gap(&step.mesh, &matrix, &step.solution, &load);
        let scale = l2_norm(&step.mesh, &|x| (problem.source)(x))
            + energy_norm(&step.mesh, &step.solution, mode);
        if gap > 0.0 {
            worst_gal = worst_gal.max(if scale > 0.0 { gap / scale } else { f64::INFINITY });
        }
    }
    checks.push(LemmaCheck {
        name: "partial orthogonality (hat-function consistency)",
        passed: worst_gal <= 1e-10,
        observed: worst_gal,
        bound: 1e-10,
    });

    // (b) Weak gradient equals the gradient of the CR interpolant.
    let mut worst_gap = 0.0f64;
    for step in &run.steps {
        let scale = 1.0
            + step
                .solution
                .values()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = crate::crbridge::gradient_identity_gap(&step.mesh, &step.solution, mode);
        worst_gap = worst_gap.max(gap / scale);
    }
    checks.push(LemmaCheck {
        name: "weak gradient / CR interpolation identity",
        passed: worst_gap <= 1e-12,
        observed: worst_gap,
        bound: 1e-12,
    });

    // (c) Data-term reduction across each refinement with lambda = 1 - 2^(-1/2).
    let lambda = 1.0 - libm::sqrt(0.5);
    let mut worst_violation = 0.0f64;
    for k in 0..run.steps.len().saturating_sub(1) {
        let step = &run.steps[k];
        let refined = step.refined_set.as_deref().unwrap_or(&[]);
        let f_coarse = run.records[k].f_term;
        let f_fine = run.records[k + 1].f_term;
        let f_refined: f64 = refined
            .iter()
            .map(|&t| estimator::data_term(&step.mesh, t, &|x| (problem.source)(x)))
            .sum();
        worst_violation = worst_violation.max(f_fine - (f_coarse - lambda * f_refined));
    }
    checks.push(LemmaCheck {
        name: "data-term reduction under bisection",
        passed: worst_violation <= 1e-12,
        observed: worst_violation,
        bound: 1e-12,
    });

    // (d) The bilinear form stays positive on random nonzero functions.
    let final_mesh = run.final_mesh();
    let matrix = assemble_system(final_mesh, mode);
    let mut rng = rand::rngs::SmallRng::seed_from_u64(0x5eed);
    let mut min_form = f64::INFINITY;
    for _ in 0..100 {
        let v: Vec<f64> = (0..matrix.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().all(|&x| x == 0.0) {
            continue;
        }
        min_form = min_form.min(matrix.quadratic_form(&v));
    }
    checks.push(LemmaCheck {
        name: "norm positivity on random functions",
        passed: min_form > 0.0,
        observed: min_form,
        bound: 0.0,
    });

    LemmaReport { checks }
}
