//! The lowest-order modified weak Galerkin discretization.
//!
//! Trial functions are piecewise linears with no continuity across edges.
//! The scheme never stores a separate edge unknown: wherever an edge value is
//! needed it is the edge mean of the two-sided average of traces. The weak
//! gradient of a function is the elementwise constant field
//!
//! ```text
//!   grad_w v |_t = (1/|t|) * sum_{e in dt} |e| * avg_e(v) * n_{t,e}
//! ```
//!
//! with `avg_e` that projected average (zero on boundary edges under
//! homogeneous Dirichlet conditions), and the bilinear form adds the
//! `h^-1`-weighted product of projected jumps over element boundaries. No
//! penalty parameter appears; the form is an inner product on the whole
//! discontinuous space.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::quadrature::{integrate_triangle, TriPoint, TRI_DEGREE4};
use crate::sparse::{SparseSymMatrix, TripletBuffer};

/// Treatment of the domain boundary.
///
/// Under `HomogeneousDirichlet` no degrees of freedom are eliminated: the
/// boundary condition enters weakly, by zeroing boundary-edge averages inside
/// the weak gradient and by stabilizing the full boundary trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    #[default]
    HomogeneousDirichlet,
}

/// Coefficients of a piecewise-linear discontinuous function: three vertex
/// values per triangle, in the triangle's stored vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct DgFunction {
    values: Vec<f64>,
}

/// Index of the degree of freedom for local vertex `local` of triangle `t`.
pub fn dof(t: usize, local: usize) -> usize {
    3 * t + local
}

impl DgFunction {
    pub fn zeros(mesh: &Mesh) -> Self {
        DgFunction {
            values: vec![0.0; 3 * mesh.n_triangles()],
        }
    }

    /// Wraps a raw coefficient vector (length `3 * n_triangles`).
    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), 3 * mesh.n_triangles());
        DgFunction { values }
    }

    /// Nodal interpolation of a scalar field; continuous fields produce
    /// conforming (jump-free) functions.
    pub fn from_fn(mesh: &Mesh, f: impl Fn(Vec2) -> f64) -> Self {
        Self::from_element_fn(mesh, |_, x| f(x))
    }

    /// Per-element nodal values, for deliberately discontinuous data.
    pub fn from_element_fn(mesh: &Mesh, f: impl Fn(usize, Vec2) -> f64) -> Self {
        let mut values = Vec::with_capacity(3 * mesh.n_triangles());
        for t in 0..mesh.n_triangles() {
            for p in mesh.triangle_vertices(t) {
                values.push(f(t, p));
            }
        }
        DgFunction { values }
    }

    /// The conforming hat function of a vertex, embedded as a DG function.
    pub fn hat(mesh: &Mesh, vertex: usize) -> Self {
        let mut v = Self::zeros(mesh);
        for t in 0..mesh.n_triangles() {
            for (local, &w) in mesh.triangle(t).iter().enumerate() {
                if w == vertex {
                    v.values[dof(t, local)] = 1.0;
                }
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        DgFunction {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Value at local vertex `local` of triangle `t`.
    pub fn vertex_value(&self, t: usize, local: usize) -> f64 {
        self.values[dof(t, local)]
    }

    /// Evaluates the restriction to triangle `t` at a point (barycentric
    /// interpolation; the point is taken to lie in `t`).
    pub fn eval_on(&self, mesh: &Mesh, t: usize, x: Vec2) -> f64 {
        let [a, b, c] = mesh.triangle_vertices(t);
        let area = mesh.area(t);
        let la = crate::geometry::signed_area(x, b, c) / area;
        let lb = crate::geometry::signed_area(a, x, c) / area;
        let lc = 1.0 - la - lb;
        la * self.vertex_value(t, 0) + lb * self.vertex_value(t, 1) + lc * self.vertex_value(t, 2)
    }

    /// Elementwise gradient of the restriction to `t`.
    pub fn element_gradient(&self, mesh: &Mesh, t: usize) -> Vec2 {
        let grads = mesh.basis_gradients(t);
        let mut g = Vec2::ZERO;
        for local in 0..3 {
            g = g + grads[local] * self.vertex_value(t, local);
        }
        g
    }

    /// Mean over edge `e` of the trace from triangle `t`.
    pub fn edge_trace_mean(&self, mesh: &Mesh, t: usize, e: usize) -> f64 {
        let [p, q] = mesh.edge(e).endpoints();
        0.5 * (self.values[dof(t, mesh.local_index(t, p))]
            + self.values[dof(t, mesh.local_index(t, q))])
    }

    /// Projected average on edge `e`: the edge mean of the two-sided average
    /// of traces (of the single trace on boundary edges — callers apply the
    /// boundary mode).
    pub fn edge_average(&self, mesh: &Mesh, e: usize) -> f64 {
        let (t0, t1) = mesh.edge(e).adjacent();
        let m0 = self.edge_trace_mean(mesh, t0, e);
        match t1 {
            Some(t1) => 0.5 * (m0 + self.edge_trace_mean(mesh, t1, e)),
            None => m0,
        }
    }

    /// Projected jump on edge `e`, signed first adjacent minus second; on
    /// boundary edges the jump is the trace itself.
    pub fn edge_jump(&self, mesh: &Mesh, e: usize) -> f64 {
        let (t0, t1) = mesh.edge(e).adjacent();
        let m0 = self.edge_trace_mean(mesh, t0, e);
        match t1 {
            Some(t1) => m0 - self.edge_trace_mean(mesh, t1, e),
            None => m0,
        }
    }
}

/// One constant vector per triangle: the weak gradient of a [`DgFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeakGradientField {
    values: Vec<Vec2>,
}

impl WeakGradientField {
    pub fn from_values(values: Vec<Vec2>) -> Self {
        WeakGradientField { values }
    }

    pub fn element(&self, t: usize) -> Vec2 {
        self.values[t]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values_mut(&mut self) -> &mut [Vec2] {
        &mut self.values
    }
}

/// Computes the weak gradient of `v` on every element.
pub fn weak_gradient(mesh: &Mesh, v: &DgFunction, _mode: BoundaryMode) -> WeakGradientField {
    assert_eq!(v.len(), 3 * mesh.n_triangles());
    let mut values = Vec::with_capacity(mesh.n_triangles());
    for t in 0..mesh.n_triangles() {
        let mut g = Vec2::ZERO;
        for e in mesh.triangle_edges(t) {
            let edge = mesh.edge(e);
            if edge.is_boundary() {
                continue; // homogeneous Dirichlet: boundary average is zero
            }
            let avg = v.edge_average(mesh, e);
            g = g + mesh.outward_normal(t, e) * (edge.length * avg);
        }
        values.push(g.scaled(1.0 / mesh.area(t)));
    }
    WeakGradientField { values }
}

/// The linear map from DG coefficients to the weak gradient on `t`, as
/// `(dof, vector weight)` pairs with duplicates merged. The stencil touches
/// `t` and its edge neighbors.
fn gradient_stencil(mesh: &Mesh, t: usize, out: &mut Vec<(usize, Vec2)>) {
    out.clear();
    let inv_area = 1.0 / mesh.area(t);
    let push = |d: usize, w: Vec2, out: &mut Vec<(usize, Vec2)>| {
        for entry in out.iter_mut() {
            if entry.0 == d {
                entry.1 = entry.1 + w;
                return;
            }
        }
        out.push((d, w));
    };
    for e in mesh.triangle_edges(t) {
        let edge = mesh.edge(e);
        if edge.is_boundary() {
            continue;
        }
        let n = mesh.outward_normal(t, e);
        let w = n * (edge.length * inv_area * 0.25);
        let [p, q] = edge.endpoints();
        let (t0, t1) = edge.adjacent();
        let other = if t0 == t { t1.unwrap() } else { t0 };
        for side in [t, other] {
            push(dof(side, mesh.local_index(side, p)), w, out);
            push(dof(side, mesh.local_index(side, q)), w, out);
        }
    }
}

/// Assembles the stiffness-plus-stabilization matrix of the bilinear form on
/// the full discontinuous space (dimension `3 * n_triangles`).
///
/// The matrix is symmetric positive definite: the gradient part is a sum of
/// Gram terms and the stabilization weights every projected jump, boundary
/// traces included.
pub fn assemble_system(mesh: &Mesh, _mode: BoundaryMode) -> SparseSymMatrix {
    let ndof = 3 * mesh.n_triangles();
    let mut buf = TripletBuffer::new();

    let mut stencil: Vec<(usize, Vec2)> = Vec::new();
    for t in 0..mesh.n_triangles() {
        gradient_stencil(mesh, t, &mut stencil);
        let w = mesh.coefficient(t) * mesh.area(t);
        for i in 0..stencil.len() {
            let (di, gi) = stencil[i];
            buf.push(di, di, w * gi.dot(gi));
            for j in (i + 1)..stencil.len() {
                let (dj, gj) = stencil[j];
                buf.push_sym(di, dj, w * gi.dot(gj));
            }
        }
    }

    let mut dofs: Vec<(usize, f64)> = Vec::with_capacity(4);
    for edge in mesh.edges() {
        dofs.clear();
        let [p, q] = edge.endpoints();
        let (t0, t1) = edge.adjacent();
        dofs.push((dof(t0, mesh.local_index(t0, p)), 0.5));
        dofs.push((dof(t0, mesh.local_index(t0, q)), 0.5));
        let weight = match t1 {
            Some(t1) => {
                dofs.push((dof(t1, mesh.local_index(t1, p)), -0.5));
                dofs.push((dof(t1, mesh.local_index(t1, q)), -0.5));
                edge.length * (1.0 / mesh.element_size(t0) + 1.0 / mesh.element_size(t1))
            }
            None => edge.length / mesh.element_size(t0),
        };
        for i in 0..dofs.len() {
            let (di, ci) = dofs[i];
            buf.push(di, di, weight * ci * ci);
            for j in (i + 1)..dofs.len() {
                let (dj, cj) = dofs[j];
                buf.push_sym(di, dj, weight * ci * cj);
            }
        }
    }

    buf.into_csr(ndof)
}

/// Assembles the load vector `(f, basis)` with the fixed degree-4 rule.
pub fn assemble_load(mesh: &Mesh, f: impl Fn(Vec2) -> f64) -> Vec<f64> {
    assemble_load_with_rule(mesh, &TRI_DEGREE4, f)
}

pub fn assemble_load_with_rule(
    mesh: &Mesh,
    rule: &[TriPoint],
    f: impl Fn(Vec2) -> f64,
) -> Vec<f64> {
    let mut b = vec![0.0; 3 * mesh.n_triangles()];
    for t in 0..mesh.n_triangles() {
        let [pa, pb, pc] = mesh.triangle_vertices(t);
        let area = mesh.area(t);
        for &([la, lb, lc], w) in rule {
            let x = Vec2::new(
                la * pa.x + lb * pb.x + lc * pc.x,
                la * pa.y + lb * pb.y + lc * pc.y,
            );
            let fw = w * area * f(x);
            b[dof(t, 0)] += fw * la;
            b[dof(t, 1)] += fw * lb;
            b[dof(t, 2)] += fw * lc;
        }
    }
    b
}

/// The mesh-dependent energy norm `sqrt(a(v, v))`, evaluated directly from
/// weak gradients and jumps (it coincides with the matrix quadratic form).
pub fn energy_norm(mesh: &Mesh, v: &DgFunction, mode: BoundaryMode) -> f64 {
    let g = weak_gradient(mesh, v, mode);
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let gt = g.element(t);
        total += mesh.coefficient(t) * mesh.area(t) * gt.dot(gt);
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        let jump = v.edge_jump(mesh, e);
        let (t0, t1) = edge.adjacent();
        let weight = match t1 {
            Some(t1) => edge.length * (1.0 / mesh.element_size(t0) + 1.0 / mesh.element_size(t1)),
            None => edge.length / mesh.element_size(t0),
        };
        total += weight * jump * jump;
    }
    libm::sqrt(total)
}

/// `int_t f * basis` terms are also useful elementwise; integrates `f` over
/// one element with the standard rule.
pub fn integrate_on_element(mesh: &Mesh, t: usize, f: impl FnMut(Vec2) -> f64) -> f64 {
    let [a, b, c] = mesh.triangle_vertices(t);
    integrate_triangle(&TRI_DEGREE4, a, b, c, mesh.area(t), f)
}
