//! Adaptive modified weak Galerkin (mWG) finite elements for
//! `-div(A grad u) = f` on 2D polygonal domains with homogeneous Dirichlet
//! boundary conditions and piecewise-constant diffusion `A`.
//!
//! The lowest-order scheme approximates `u` by piecewise linears that are
//! fully discontinuous across edges; continuity is imposed weakly through a
//! weak gradient built from edge averages and an `h^-1`-weighted jump
//! stabilization. No penalty parameter is involved: the bilinear form is an
//! inner product by construction.
//!
//! The crate is organised around the stages of an adaptive loop:
//!
//! - [`mesh`]: conforming triangulations and newest-vertex bisection,
//! - [`mwg`]: the discrete scheme (weak gradients, assembly, load),
//! - [`linsolve`]: a conjugate-gradient solver for the assembled system,
//! - [`estimator`]: the residual a posteriori error estimator,
//! - [`adapt`]: Dörfler marking and the solve–estimate–mark–refine driver,
//! - [`crbridge`]: Crouzeix–Raviart interpolation, used as an independent
//!   cross-check of the weak gradient,
//! - [`verify`]: built-in benchmark problems, error norms against exact
//!   solutions, and a structural identity check suite.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the command
//! line front end live in the companion `mwgfem-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adapt;
pub mod crbridge;
pub mod estimator;
pub mod geometry;
pub mod linsolve;
pub mod mesh;
pub mod mwg;
pub mod quadrature;
pub mod sparse;
pub mod verify;

pub use geometry::Vec2;
pub use mesh::{Mesh, MeshError, RefineResult};
pub use mwg::{BoundaryMode, DgFunction, WeakGradientField};
pub use sparse::SparseSymMatrix;
