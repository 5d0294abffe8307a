//! The mesh text format.
//!
//! Line 1: `nv nt`. Then `nv` lines `x y`, then `nt` lines `i j k a` with
//! 0-based vertex indices and the element coefficient `a`. All fields are
//! whitespace-separated decimal reals; boundary edges are inferred from the
//! topology.

use std::fmt;
use std::fmt::Write as _;

use mwgfem::mesh::MeshError;
use mwgfem::{Mesh, Vec2};

#[derive(Debug)]
pub enum MeshIoError {
    /// A count, coordinate, index, or coefficient token is missing or does
    /// not parse.
    Syntax { token: usize, found: String },
    /// The token stream ended early.
    Truncated,
    /// The triangulation itself is invalid.
    Mesh(MeshError),
}

impl fmt::Display for MeshIoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshIoError::Syntax { token, found } => {
                write!(f, "mesh format: token {token} unreadable: {found:?}")
            }
            MeshIoError::Truncated => write!(f, "mesh format: unexpected end of input"),
            MeshIoError::Mesh(e) => write!(f, "invalid mesh: {e}"),
        }
    }
}

impl std::error::Error for MeshIoError {}

impl From<MeshError> for MeshIoError {
    fn from(e: MeshError) -> Self {
        MeshIoError::Mesh(e)
    }
}

struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
    index: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            iter: text.split_whitespace(),
            index: 0,
        }
    }

    fn next_f64(&mut self) -> Result<f64, MeshIoError> {
        self.parse(str::parse::<f64>)
    }

    fn next_usize(&mut self) -> Result<usize, MeshIoError> {
        self.parse(str::parse::<usize>)
    }

    fn parse<T, E>(&mut self, f: impl Fn(&str) -> Result<T, E>) -> Result<T, MeshIoError> {
        let tok = self.iter.next().ok_or(MeshIoError::Truncated)?;
        self.index += 1;
        f(tok).map_err(|_| MeshIoError::Syntax {
            token: self.index,
            found: tok.to_string(),
        })
    }
}

/// Parses the text format and builds a conforming mesh.
pub fn parse_mesh(text: &str) -> Result<Mesh, MeshIoError> {
    let mut toks = Tokens::new(text);
    let nv = toks.next_usize()?;
    let nt = toks.next_usize()?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x = toks.next_f64()?;
        let y = toks.next_f64()?;
        vertices.push(Vec2::new(x, y));
    }
    let mut triangles = Vec::with_capacity(nt);
    let mut coefficients = Vec::with_capacity(nt);
    for _ in 0..nt {
        let i = toks.next_usize()?;
        let j = toks.next_usize()?;
        let k = toks.next_usize()?;
        triangles.push([i, j, k]);
        coefficients.push(toks.next_f64()?);
    }
    Ok(Mesh::build_initial(vertices, triangles, coefficients)?)
}

/// Writes the text format with 17 significant digits.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mesh.n_vertices(), mesh.n_triangles());
    for v in 0..mesh.n_vertices() {
        let p = mesh.vertex(v);
        let _ = writeln!(out, "{:.16e} {:.16e}", p.x, p.y);
    }
    for t in 0..mesh.n_triangles() {
        let [i, j, k] = mesh.triangle(t);
        let _ = writeln!(out, "{i} {j} {k} {:.16e}", mesh.coefficient(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_the_documented_example() {
        let text = "4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2 1.0\n0 2 3 2.5\n";
        let mesh = parse_mesh(text).unwrap();
        assert_eq!(mesh.n_vertices(), 4);
        assert_eq!(mesh.n_triangles(), 2);
        assert_eq!(mesh.n_edges(), 5);
        assert_eq!(mesh.coefficient(1), 2.5);
    }

    #[test]
    fn round_trip_preserves_geometry_and_topology() {
        let problem = mwgfem::verify::Problem::lshape();
        let refined = problem.mesh.uniform_refine().fine_mesh;
        let text = write_mesh(&refined);
        let back = parse_mesh(&text).unwrap();
        assert_eq!(back.n_vertices(), refined.n_vertices());
        assert_eq!(back.n_triangles(), refined.n_triangles());
        assert_eq!(back.n_edges(), refined.n_edges());
        for t in 0..back.n_triangles() {
            assert!((back.area(t) - refined.area(t)).abs() <= 1e-12 * refined.area(t));
            assert_eq!(back.coefficient(t), refined.coefficient(t));
        }
        back.audit_conformity().unwrap();
    }

    #[test]
    fn syntax_errors_are_reported() {
        assert!(matches!(parse_mesh("4"), Err(MeshIoError::Truncated)));
        assert!(matches!(
            parse_mesh("1 0\nx y\n"),
            Err(MeshIoError::Syntax { .. })
        ));
        // Hanging node: rejected by the mesh builder.
        let text = "5 2\n0 0\n1 0\n0 2\n0 1\n-1 0\n0 1 2 1\n0 3 4 1\n";
        assert!(matches!(parse_mesh(text), Err(MeshIoError::Mesh(_))));
    }
}
