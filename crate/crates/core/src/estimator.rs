//! Residual a posteriori error estimator.
//!
//! Per element `t` the squared indicator is
//!
//! ```text
//!   eta^2(t) = h_t^2 / A_t * ||R||_t^2
//!            + sum_{e in dt} h_t * int_e ( Jn^2 / Ae_max + Ae_min * Jt^2 )
//! ```
//!
//! with `Jn` the normal jump of the weak flux `A grad_w u` and `Jt` the
//! tangential jump of `grad_w u`; both vanish on boundary edges. For the
//! lowest-order scheme the element residual `R` reduces to the source `f`
//! itself: the weak flux is constant on each element, so its divergence
//! contributes nothing. Jumps of the piecewise-constant gradient are
//! edge-constant, making the edge integrals `|e| * jump^2` exact.
//!
//! Each interior edge is visited once per adjacent element, weighted with
//! that element's `h_t`, following the element-boundary form of the sum.

use alloc::vec::Vec;

use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::mwg::WeakGradientField;
use crate::quadrature::{integrate_triangle, TRI_DEGREE4};

/// Per-element and global estimator quantities.
#[derive(Debug, Clone)]
pub struct EstimatorBreakdown {
    /// Full squared indicator per element (`f_term + jump_sq`).
    pub eta_sq: Vec<f64>,
    /// Data term `h^2 A^-1 ||f||^2` per element.
    pub f_term: Vec<f64>,
    /// Edge-jump part per element.
    pub jump_sq: Vec<f64>,
    /// Oscillation `h^2 A^-1 ||f - mean f||^2` per element.
    pub osc_sq: Vec<f64>,
    pub total_eta_sq: f64,
    pub total_f: f64,
    pub total_jump_sq: f64,
    pub total_osc_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EstimatorError {
    InvalidElement { id: usize },
}

impl core::fmt::Display for EstimatorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EstimatorError::InvalidElement { id } => write!(f, "invalid element id {id}"),
        }
    }
}

impl core::error::Error for EstimatorError {}

/// Normal jump of the weak flux across edge `e`: the sum of `A grad_w u`
/// dotted with each adjacent element's outward normal. Zero on the boundary.
pub fn normal_jump(mesh: &Mesh, e: usize, g: &WeakGradientField) -> f64 {
    let edge = mesh.edge(e);
    match edge.adjacent() {
        (t0, Some(t1)) => {
            let flux0 = g.element(t0) * mesh.coefficient(t0);
            let flux1 = g.element(t1) * mesh.coefficient(t1);
            flux0.dot(mesh.outward_normal(t0, e)) + flux1.dot(mesh.outward_normal(t1, e))
        }
        _ => 0.0,
    }
}

/// Tangential jump of the weak gradient across edge `e` (no coefficient
/// inside the jump). Zero on the boundary.
pub fn tangential_jump(mesh: &Mesh, e: usize, g: &WeakGradientField) -> f64 {
    let edge = mesh.edge(e);
    match edge.adjacent() {
        (t0, Some(t1)) => (g.element(t0) - g.element(t1)).dot(edge.tangent),
        _ => 0.0,
    }
}

fn coefficient_extremes(mesh: &Mesh, e: usize) -> (f64, f64) {
    let edge = mesh.edge(e);
    match edge.adjacent() {
        (t0, Some(t1)) => {
            let a0 = mesh.coefficient(t0);
            let a1 = mesh.coefficient(t1);
            (a0.max(a1), a0.min(a1))
        }
        (t0, None) => {
            let a = mesh.coefficient(t0);
            (a, a)
        }
    }
}

/// Squared data term of one element, `h^2 A^-1 ||f||^2`.
pub fn data_term(mesh: &Mesh, t: usize, f: &impl Fn(Vec2) -> f64) -> f64 {
    let [a, b, c] = mesh.triangle_vertices(t);
    let l2 = integrate_triangle(&TRI_DEGREE4, a, b, c, mesh.area(t), |x| {
        let v = f(x);
        v * v
    });
    mesh.area(t) / mesh.coefficient(t) * l2
}

/// Squared oscillation of one element, `h^2 A^-1 ||f - mean f||^2`; the
/// lowest-order projection is the element mean.
pub fn oscillation_sq(mesh: &Mesh, t: usize, f: &impl Fn(Vec2) -> f64) -> f64 {
    let [a, b, c] = mesh.triangle_vertices(t);
    let area = mesh.area(t);
    let mean = integrate_triangle(&TRI_DEGREE4, a, b, c, area, f) / area;
    let l2 = integrate_triangle(&TRI_DEGREE4, a, b, c, area, |x| {
        let v = f(x) - mean;
        v * v
    });
    area / mesh.coefficient(t) * l2
}

/// Edge-jump contribution of one element.
pub fn element_jump_sq(mesh: &Mesh, t: usize, g: &WeakGradientField) -> f64 {
    let h = mesh.element_size(t);
    let mut sum = 0.0;
    for e in mesh.triangle_edges(t) {
        let edge = mesh.edge(e);
        if edge.is_boundary() {
            continue;
        }
        let (a_max, a_min) = coefficient_extremes(mesh, e);
        let jn = normal_jump(mesh, e, g);
        let jt = tangential_jump(mesh, e, g);
        sum += h * edge.length * (jn * jn / a_max + a_min * jt * jt);
    }
    sum
}

/// Evaluates the estimator for the weak gradient `g` of a discrete solution
/// and source `f` on every element.
pub fn estimate(mesh: &Mesh, g: &WeakGradientField, f: &impl Fn(Vec2) -> f64) -> EstimatorBreakdown {
    let nt = mesh.n_triangles();
    let mut eta_sq = Vec::with_capacity(nt);
    let mut f_term = Vec::with_capacity(nt);
    let mut jump_sq = Vec::with_capacity(nt);
    let mut osc_sq = Vec::with_capacity(nt);
    for t in 0..nt {
        let ft = data_term(mesh, t, f);
        let js = element_jump_sq(mesh, t, g);
        f_term.push(ft);
        jump_sq.push(js);
        eta_sq.push(ft + js);
        osc_sq.push(oscillation_sq(mesh, t, f));
    }
    let total_f = f_term.iter().sum();
    let total_jump_sq = jump_sq.iter().sum();
    let total_eta_sq = eta_sq.iter().sum();
    let total_osc_sq = osc_sq.iter().sum();
    EstimatorBreakdown {
        eta_sq,
        f_term,
        jump_sq,
        osc_sq,
        total_eta_sq,
        total_f,
        total_jump_sq,
        total_osc_sq,
    }
}

impl EstimatorBreakdown {
    pub fn n_elements(&self) -> usize {
        self.eta_sq.len()
    }

    pub fn eta(&self) -> f64 {
        libm::sqrt(self.total_eta_sq)
    }

    /// Sums `eta^2` over a subset of elements.
    pub fn eta_sq_over(&self, subset: &[usize]) -> Result<f64, EstimatorError> {
        subset_sum(&self.eta_sq, subset)
    }

    /// Sums the data term over a subset of elements.
    pub fn f_over(&self, subset: &[usize]) -> Result<f64, EstimatorError> {
        subset_sum(&self.f_term, subset)
    }
}

fn subset_sum(values: &[f64], subset: &[usize]) -> Result<f64, EstimatorError> {
    let mut sum = 0.0;
    for &t in subset {
        if t >= values.len() {
            return Err(EstimatorError::InvalidElement { id: t });
        }
        sum += values[t];
    }
    Ok(sum)
}
