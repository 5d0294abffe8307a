//! Crouzeix–Raviart interpolation as an independent route to the weak
//! gradient.
//!
//! A Crouzeix–Raviart function is piecewise linear with one degree of freedom
//! per edge, its edge mean; edge means match across elements because each is
//! stored once. Interpolating a discontinuous function by its projected edge
//! averages and taking the elementwise gradient of the result reproduces the
//! weak gradient element by element — exact algebra, not an approximation.
//! [`gradient_identity_gap`] measures the discrepancy between the two code
//! paths and is the strongest internal consistency check in the crate.

use alloc::vec::Vec;

use crate::geometry::Vec2;
use crate::mesh::Mesh;
use crate::mwg::{weak_gradient, BoundaryMode, DgFunction, WeakGradientField};

/// A piecewise-linear nonconforming function stored by its edge means.
#[derive(Debug, Clone, PartialEq)]
pub struct CrFunction {
    values: Vec<f64>,
}

impl CrFunction {
    /// Wraps raw edge values (one per mesh edge).
    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_edges());
        CrFunction { values }
    }

    /// Canonical interpolation of a DG function: interior edge dofs are the
    /// projected averages, boundary dofs are zero (homogeneous Dirichlet).
    pub fn interpolate(mesh: &Mesh, v: &DgFunction, _mode: BoundaryMode) -> Self {
        let values = (0..mesh.n_edges())
            .map(|e| {
                if mesh.edge(e).is_boundary() {
                    0.0
                } else {
                    v.edge_average(mesh, e)
                }
            })
            .collect();
        CrFunction { values }
    }

    pub fn edge_value(&self, e: usize) -> f64 {
        self.values[e]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Elementwise gradient of the linear reconstruction from edge means.
    ///
    /// The basis function of edge `e_i` (opposite local vertex `i`) is
    /// `1 - 2 lambda_i`, so the gradient is `sum_i c_i * (-2 grad lambda_i)`.
    pub fn gradient(&self, mesh: &Mesh) -> WeakGradientField {
        let mut values = Vec::with_capacity(mesh.n_triangles());
        for t in 0..mesh.n_triangles() {
            let grads = mesh.basis_gradients(t);
            let edges = mesh.triangle_edges(t);
            let mut g = Vec2::ZERO;
            for i in 0..3 {
                g = g + grads[i] * (-2.0 * self.values[edges[i]]);
            }
            values.push(g);
        }
        WeakGradientField::from_values(values)
    }

    /// Evaluates the reconstruction on triangle `t` at a point inside it.
    pub fn eval_on(&self, mesh: &Mesh, t: usize, x: Vec2) -> f64 {
        let [a, b, c] = mesh.triangle_vertices(t);
        let area = mesh.area(t);
        let la = crate::geometry::signed_area(x, b, c) / area;
        let lb = crate::geometry::signed_area(a, x, c) / area;
        let lam = [la, lb, 1.0 - la - lb];
        let edges = mesh.triangle_edges(t);
        (0..3)
            .map(|i| self.values[edges[i]] * (1.0 - 2.0 * lam[i]))
            .sum()
    }

    /// Embeds into the DG space by sampling the reconstruction at vertices:
    /// the value at local vertex `k` is `(sum of the element's edge dofs)
    /// - 2 * dof of the edge opposite k`.
    pub fn to_dg(&self, mesh: &Mesh) -> DgFunction {
        let mut values = Vec::with_capacity(3 * mesh.n_triangles());
        for t in 0..mesh.n_triangles() {
            let edges = mesh.triangle_edges(t);
            let sum: f64 = edges.iter().map(|&e| self.values[e]).sum();
            for &e in &edges {
                values.push(sum - 2.0 * self.values[e]);
            }
        }
        DgFunction::from_values(mesh, values)
    }
}

/// Maximum elementwise distance between the weak gradient of `v` and the
/// gradient of its Crouzeix–Raviart interpolant. Exact algebra says zero;
/// anything above roundoff is a bug in one of the two routes.
pub fn gradient_identity_gap(mesh: &Mesh, v: &DgFunction, mode: BoundaryMode) -> f64 {
    let direct = weak_gradient(mesh, v, mode);
    let via_cr = CrFunction::interpolate(mesh, v, mode).gradient(mesh);
    let mut worst: f64 = 0.0;
    for t in 0..mesh.n_triangles() {
        worst = worst.max((direct.element(t) - via_cr.element(t)).norm());
    }
    worst
}
