//! Conforming 2D triangulations with newest-vertex bisection.
//!
//! Triangles are stored as vertex triples `[v0, v1, v2]` in counterclockwise
//! order with a fixed role convention: `(v0, v1)` is the refinement edge and
//! `v2` is the newest vertex. Bisection inserts the midpoint of the
//! refinement edge, and both children carry that midpoint as their newest
//! vertex, so the convention is preserved without extra bookkeeping.
//!
//! A mesh is immutable once built; [`Mesh::bisect`] returns a new mesh
//! together with the refinement genealogy.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{barycentric_gradients, midpoint, signed_area, Vec2};

/// Errors reported by mesh construction and refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshError {
    /// A triangle refers to a vertex index that does not exist.
    InvalidVertexIndex { triangle: usize },
    /// A triangle has (numerically) zero area.
    DegenerateTriangle { triangle: usize },
    /// The diffusion coefficient of a triangle is not strictly positive.
    NonPositiveCoefficient { triangle: usize },
    /// The input triangulation is non-conforming: an edge is shared by more
    /// than two triangles, or a vertex hangs on the interior of an edge.
    NonConforming { edge: [usize; 2] },
    /// A triangle id passed to a refinement call is out of range.
    InvalidElement { id: usize },
    /// Input lengths disagree (e.g. one coefficient per triangle expected).
    DimensionMismatch,
}

impl core::fmt::Display for MeshError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MeshError::InvalidVertexIndex { triangle } => {
                write!(f, "triangle {triangle} references an invalid vertex index")
            }
            MeshError::DegenerateTriangle { triangle } => {
                write!(f, "triangle {triangle} is degenerate (zero area)")
            }
            MeshError::NonPositiveCoefficient { triangle } => {
                write!(f, "triangle {triangle} has a non-positive coefficient")
            }
            MeshError::NonConforming { edge } => {
                write!(f, "non-conforming: hanging node on edge ({}, {})", edge[0], edge[1])
            }
            MeshError::InvalidElement { id } => write!(f, "invalid element id {id}"),
            MeshError::DimensionMismatch => write!(f, "input lengths disagree"),
        }
    }
}

impl core::error::Error for MeshError {}

const NO_TRIANGLE: usize = usize::MAX;

/// An edge of the triangulation with its globally fixed unit normal.
///
/// For interior edges the normal points from the lower-numbered adjacent
/// triangle into the higher-numbered one; boundary normals point outward.
/// Jumps across the edge are signed "first adjacent minus second adjacent".
#[derive(Debug, Clone)]
pub struct Edge {
    endpoints: [usize; 2],
    adj: [usize; 2],
    pub normal: Vec2,
    pub tangent: Vec2,
    pub length: f64,
}

impl Edge {
    /// Endpoint vertex ids, lower id first.
    pub fn endpoints(&self) -> [usize; 2] {
        self.endpoints
    }

    /// Adjacent triangle ids in jump order (lower id first).
    pub fn adjacent(&self) -> (usize, Option<usize>) {
        if self.adj[1] == NO_TRIANGLE {
            (self.adj[0], None)
        } else {
            (self.adj[0], Some(self.adj[1]))
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.adj[1] == NO_TRIANGLE
    }
}

/// Result of a refinement call.
#[derive(Debug, Clone)]
pub struct RefineResult {
    pub fine_mesh: Mesh,
    /// Coarse triangles that were split (ascending ids).
    pub refined_set: Vec<usize>,
    /// For every fine triangle, the coarse triangle it descends from
    /// (identity for untouched triangles).
    pub parent_of: Vec<usize>,
}

/// A conforming triangulation with a piecewise-constant diffusion
/// coefficient and newest-vertex refinement state.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    coefficient: Vec<f64>,
    generation: Vec<u32>,
    /// Stored element areas. Children are assigned exactly half the parent
    /// value so that size relations under bisection hold without rounding.
    area: Vec<f64>,
    edges: Vec<Edge>,
    /// Edge ids per triangle; entry `i` is the edge opposite local vertex `i`
    /// (so entry 2 is the refinement edge).
    tri_edges: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
}

impl Mesh {
    /// Builds a mesh from raw vertices, vertex-index triples and one
    /// coefficient per triangle.
    ///
    /// Triangles may be given in either orientation; they are stored
    /// counterclockwise. The refinement edge of each input triangle is its
    /// longest edge, ties broken towards the lowest opposite vertex id.
    pub fn build_initial(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        coefficients: Vec<f64>,
    ) -> Result<Mesh, MeshError> {
        if triangles.len() != coefficients.len() {
            return Err(MeshError::DimensionMismatch);
        }
        let nv = vertices.len();
        let mut stored = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            if a >= nv || b >= nv || c >= nv || a == b || b == c || a == c {
                return Err(MeshError::InvalidVertexIndex { triangle: t });
            }
            if !(coefficients[t] > 0.0 && coefficients[t].is_finite()) {
                return Err(MeshError::NonPositiveCoefficient { triangle: t });
            }
            let mut v = [a, b, c];
            let mut ar = signed_area(vertices[a], vertices[b], vertices[c]);
            if ar < 0.0 {
                v.swap(1, 2);
                ar = -ar;
            }
            let scale = (0..3)
                .map(|i| {
                    let d = vertices[v[(i + 1) % 3]] - vertices[v[i]];
                    d.dot(d)
                })
                .fold(0.0, f64::max);
            if ar <= 1e-14 * scale || scale == 0.0 {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            // Newest vertex = vertex opposite the longest edge.
            let mut peak = 0;
            let mut best = -1.0;
            for i in 0..3 {
                let d = vertices[v[(i + 2) % 3]] - vertices[v[(i + 1) % 3]];
                let l2 = d.dot(d);
                if l2 > best || (l2 == best && v[i] < v[peak]) {
                    best = l2;
                    peak = i;
                }
            }
            let rotated = match peak {
                0 => [v[1], v[2], v[0]],
                1 => [v[2], v[0], v[1]],
                _ => v,
            };
            stored.push(rotated);
            areas.push(ar);
        }
        let generation = vec![0u32; stored.len()];
        let mesh = Mesh::finish(vertices, stored, coefficients, generation, areas)?;
        mesh.check_hanging_nodes()?;
        Ok(mesh)
    }

    /// Assembles edge topology for an oriented triangle list whose refinement
    /// edges are already in slot `(v0, v1)`.
    fn finish(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        coefficient: Vec<f64>,
        generation: Vec<u32>,
        area: Vec<f64>,
    ) -> Result<Mesh, MeshError> {
        let mut edge_ids: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut tri_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                let key = if a < b { [a, b] } else { [b, a] };
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    let p = vertices[key[0]];
                    let q = vertices[key[1]];
                    edges.push(Edge {
                        endpoints: key,
                        adj: [NO_TRIANGLE, NO_TRIANGLE],
                        normal: Vec2::ZERO,
                        tangent: Vec2::ZERO,
                        length: (q - p).norm(),
                    });
                    edges.len() - 1
                });
                let e = &mut edges[id];
                if e.adj[0] == NO_TRIANGLE {
                    e.adj[0] = t;
                } else if e.adj[1] == NO_TRIANGLE {
                    e.adj[1] = t;
                } else {
                    return Err(MeshError::NonConforming { edge: key });
                }
                tri_edges[t][i] = id;
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter_mut() {
            if e.adj[0] > e.adj[1] {
                e.adj.swap(0, 1);
            }
            // Unit normal pointing out of adj[0] (into adj[1] when interior).
            let p = vertices[e.endpoints[0]];
            let q = vertices[e.endpoints[1]];
            let d = (q - p).scaled(1.0 / e.length);
            let mut n = Vec2::new(-d.y, d.x);
            let t0 = e.adj[0];
            let centroid = {
                let [a, b, c] = triangles[t0];
                (vertices[a] + vertices[b] + vertices[c]).scaled(1.0 / 3.0)
            };
            if n.dot(midpoint(p, q) - centroid) < 0.0 {
                n = -n;
            }
            e.normal = n;
            e.tangent = n.rotated_cw();
            if e.adj[1] == NO_TRIANGLE {
                boundary_vertex[e.endpoints[0]] = true;
                boundary_vertex[e.endpoints[1]] = true;
            }
        }
        Ok(Mesh {
            vertices,
            triangles,
            coefficient,
            generation,
            area,
            edges,
            tri_edges,
            boundary_vertex,
        })
    }

    /// Rejects vertices that lie strictly inside another edge. Only run on
    /// user-supplied input; refined meshes are conforming by construction.
    fn check_hanging_nodes(&self) -> Result<(), MeshError> {
        for e in &self.edges {
            let p = self.vertices[e.endpoints[0]];
            let q = self.vertices[e.endpoints[1]];
            let d = q - p;
            let len2 = d.dot(d);
            for (v, &x) in self.vertices.iter().enumerate() {
                if v == e.endpoints[0] || v == e.endpoints[1] {
                    continue;
                }
                let r = x - p;
                let cross = d.x * r.y - d.y * r.x;
                if cross.abs() > 1e-12 * len2 {
                    continue;
                }
                let t = r.dot(d) / len2;
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    return Err(MeshError::NonConforming { edge: e.endpoints });
                }
            }
        }
        Ok(())
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> Vec2 {
        self.vertices[v]
    }

    /// Vertex ids of triangle `t`; `(v0, v1)` is the refinement edge and `v2`
    /// the newest vertex.
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Diffusion coefficient on triangle `t`.
    pub fn coefficient(&self, t: usize) -> f64 {
        self.coefficient[t]
    }

    /// Refinement depth of triangle `t` (0 on an initial mesh).
    pub fn generation(&self, t: usize) -> u32 {
        self.generation[t]
    }

    pub fn area(&self, t: usize) -> f64 {
        self.area[t]
    }

    /// Element size `|t|^(1/2)`; halves its square exactly under bisection.
    pub fn element_size(&self, t: usize) -> f64 {
        libm::sqrt(self.area[t])
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of triangle `t`; entry `i` is opposite local vertex `i`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Vertices not on the domain boundary.
    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| !self.boundary_vertex[v])
    }

    /// Outward unit normal of triangle `t` on edge `e`.
    pub fn outward_normal(&self, t: usize, e: usize) -> Vec2 {
        let edge = &self.edges[e];
        if edge.adj[0] == t {
            edge.normal
        } else {
            debug_assert_eq!(edge.adj[1], t);
            -edge.normal
        }
    }

    /// Position of global vertex `v` within triangle `t`.
    pub fn local_index(&self, t: usize, v: usize) -> usize {
        let tri = self.triangles[t];
        tri.iter().position(|&x| x == v).expect("vertex not in triangle")
    }

    /// Gradients of the three nodal basis functions of triangle `t`.
    pub fn basis_gradients(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangle_vertices(t);
        barycentric_gradients(a, b, c, self.area[t])
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangle_vertices(t);
        (a + b + c).scaled(1.0 / 3.0)
    }

    /// Total mesh area.
    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let vs = self.triangle_vertices(t);
            for i in 0..3 {
                let u = vs[(i + 1) % 3] - vs[i];
                let w = vs[(i + 2) % 3] - vs[i];
                let cos = u.dot(w) / (u.norm() * w.norm());
                min = min.min(libm::acos(cos.clamp(-1.0, 1.0)));
            }
        }
        min
    }

    /// Bisects every marked triangle at least once and propagates closure
    /// bisections until the result is conforming.
    pub fn bisect(&self, marked: &[usize]) -> Result<RefineResult, MeshError> {
        let mut cut = vec![false; self.edges.len()];
        let mut stack = Vec::new();
        for &m in marked {
            if m >= self.triangles.len() {
                return Err(MeshError::InvalidElement { id: m });
            }
            let r = self.tri_edges[m][2];
            if !cut[r] {
                cut[r] = true;
                stack.push(r);
            }
        }
        self.refine_cut_edges(cut, stack)
    }

    /// Splits every edge of the mesh: each triangle is bisected twice, so
    /// element areas quarter. One call of this is one "uniform" level.
    pub fn uniform_refine(&self) -> RefineResult {
        let cut = vec![true; self.edges.len()];
        self.refine_cut_edges(cut, Vec::new())
            .expect("uniform refinement cannot fail")
    }

    /// Core refinement: closes the cut-edge set (any triangle with a cut edge
    /// must have its refinement edge cut), then splits each triangle through
    /// its refinement edge, re-bisecting children whose inherited edges are
    /// also cut. A triangle is bisected at most twice per call.
    fn refine_cut_edges(
        &self,
        mut cut: Vec<bool>,
        mut stack: Vec<usize>,
    ) -> Result<RefineResult, MeshError> {
        while let Some(e) = stack.pop() {
            for &t in &self.edges[e].adj {
                if t == NO_TRIANGLE {
                    continue;
                }
                let r = self.tri_edges[t][2];
                if !cut[r] {
                    cut[r] = true;
                    stack.push(r);
                }
            }
        }

        let mut vertices = self.vertices.clone();
        let mut mid_vertex = vec![usize::MAX; self.edges.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            if cut[e] {
                let p = self.vertices[edge.endpoints[0]];
                let q = self.vertices[edge.endpoints[1]];
                mid_vertex[e] = vertices.len();
                vertices.push(midpoint(p, q));
            }
        }

        let mut triangles = Vec::new();
        let mut coefficient = Vec::new();
        let mut generation = Vec::new();
        let mut area = Vec::new();
        let mut parent_of = Vec::new();
        let mut refined_set = Vec::new();
        for t in 0..self.triangles.len() {
            let e = self.tri_edges[t];
            if !(cut[e[0]] || cut[e[1]] || cut[e[2]]) {
                triangles.push(self.triangles[t]);
                coefficient.push(self.coefficient[t]);
                generation.push(self.generation[t]);
                area.push(self.area[t]);
                parent_of.push(t);
                continue;
            }
            refined_set.push(t);
            debug_assert!(cut[e[2]], "closure must cut the refinement edge");
            let [v0, v1, v2] = self.triangles[t];
            let m = mid_vertex[e[2]];
            let half = 0.5 * self.area[t];
            // Child over (v2, v0) inherits edge e[1]; child over (v1, v2)
            // inherits edge e[0].
            for (child, inherited) in [([v2, v0, m], e[1]), ([v1, v2, m], e[0])] {
                if cut[inherited] {
                    let mm = mid_vertex[inherited];
                    let [c0, c1, c2] = child;
                    for grandchild in [[c2, c0, mm], [c1, c2, mm]] {
                        triangles.push(grandchild);
                        coefficient.push(self.coefficient[t]);
                        generation.push(self.generation[t] + 2);
                        area.push(0.5 * half);
                        parent_of.push(t);
                    }
                } else {
                    triangles.push(child);
                    coefficient.push(self.coefficient[t]);
                    generation.push(self.generation[t] + 1);
                    area.push(half);
                    parent_of.push(t);
                }
            }
        }

        let fine_mesh = Mesh::finish(vertices, triangles, coefficient, generation, area)?;
        Ok(RefineResult {
            fine_mesh,
            refined_set,
            parent_of,
        })
    }

    /// Structural audit used by tests: edge incidences, orientation, and
    /// agreement of stored areas with the geometry.
    pub fn audit_conformity(&self) -> Result<(), MeshError> {
        for (t, _) in self.triangles.iter().enumerate() {
            let [a, b, c] = self.triangle_vertices(t);
            let geom = signed_area(a, b, c);
            if geom <= 0.0 {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
            if (geom - self.area[t]).abs() > 1e-12 * self.area[t] {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
        }
        for e in &self.edges {
            if e.adj[0] == NO_TRIANGLE {
                return Err(MeshError::NonConforming { edge: e.endpoints });
            }
        }
        self.check_hanging_nodes()
    }
}
