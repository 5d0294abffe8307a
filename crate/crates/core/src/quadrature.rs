//! Fixed quadrature rules on triangles and edges.
//!
//! All volume integrals in the crate use the 6-point symmetric triangle rule
//! (exact for polynomials of degree <= 4); edge integrals use 2-point Gauss
//! (exact for cubics). The higher-order rules exist solely so that tests can
//! check that reported quantities are insensitive to the quadrature order.

use alloc::vec::Vec;

use crate::geometry::Vec2;

/// A quadrature point in barycentric coordinates with its weight; weights of
/// a rule sum to 1.
pub type TriPoint = ([f64; 3], f64);

/// A point on the unit interval with its weight; weights of a rule sum to 1.
pub type EdgePoint = (f64, f64);

/// 6-point symmetric rule, exact for degree 4.
pub static TRI_DEGREE4: [TriPoint; 6] = {
    const A1: f64 = 0.108_103_018_168_070_23;
    const B1: f64 = 0.445_948_490_915_964_9;
    const W1: f64 = 0.223_381_589_678_011_47;
    const A2: f64 = 0.816_847_572_980_458_5;
    const B2: f64 = 0.091_576_213_509_770_74;
    const W2: f64 = 0.109_951_743_655_321_87;
    [
        ([A1, B1, B1], W1),
        ([B1, A1, B1], W1),
        ([B1, B1, A1], W1),
        ([A2, B2, B2], W2),
        ([B2, A2, B2], W2),
        ([B2, B2, A2], W2),
    ]
};

/// 2-point Gauss on the unit interval, exact for cubics.
pub static EDGE_GAUSS2: [EdgePoint; 2] = {
    const D: f64 = 0.288_675_134_594_812_88; // 1/(2*sqrt(3))
    [(0.5 - D, 0.5), (0.5 + D, 0.5)]
};

/// 4-point Gauss on the unit interval, exact for degree 7. Audit use only.
pub static EDGE_GAUSS4: [EdgePoint; 4] = {
    const X1: f64 = 0.339_981_043_584_856_26;
    const X2: f64 = 0.861_136_311_594_052_6;
    const W1: f64 = 0.326_072_577_431_273_06;
    const W2: f64 = 0.173_927_422_568_726_9;
    [
        (0.5 - 0.5 * X2, W2),
        (0.5 - 0.5 * X1, W1),
        (0.5 + 0.5 * X1, W1),
        (0.5 + 0.5 * X2, W2),
    ]
};

/// 5-point Gauss nodes and weights on [0, 1], from the closed forms.
fn gauss5_unit() -> [(f64, f64); 5] {
    let s70 = libm::sqrt(70.0);
    let n1 = libm::sqrt(245.0 - 14.0 * s70) / 21.0;
    let n2 = libm::sqrt(245.0 + 14.0 * s70) / 21.0;
    let w0 = 128.0 / 225.0;
    let w1 = (322.0 + 13.0 * s70) / 900.0;
    let w2 = (322.0 - 13.0 * s70) / 900.0;
    // Map from [-1, 1] to [0, 1]: halve the weights.
    [
        (0.5 * (1.0 - n2), 0.5 * w2),
        (0.5 * (1.0 - n1), 0.5 * w1),
        (0.5, 0.5 * w0),
        (0.5 * (1.0 + n1), 0.5 * w1),
        (0.5 * (1.0 + n2), 0.5 * w2),
    ]
}

/// 25-point collapsed tensor Gauss rule, exact for degree 8 (and beyond).
/// Built from the Duffy map `x = u, y = v(1-u)` with 5-point Gauss per axis,
/// so exactness follows from the one-dimensional rule. Audit use only.
pub fn tri_degree8() -> Vec<TriPoint> {
    let g = gauss5_unit();
    let mut points = Vec::with_capacity(25);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            let x = u;
            let y = v * (1.0 - u);
            // Barycentric on the reference corner triangle; weight carries
            // the Jacobian (1 - u), normalized to sum 1 (reference area 1/2).
            points.push(([1.0 - x - y, x, y], 2.0 * wu * wv * (1.0 - u)));
        }
    }
    points
}

/// Integrates `f` over the triangle `(a, b, c)` of the given area.
pub fn integrate_triangle(
    points: &[TriPoint],
    a: Vec2,
    b: Vec2,
    c: Vec2,
    area: f64,
    mut f: impl FnMut(Vec2) -> f64,
) -> f64 {
    let mut sum = 0.0;
    for &([la, lb, lc], w) in points {
        let p = Vec2::new(
            la * a.x + lb * b.x + lc * c.x,
            la * a.y + lb * b.y + lc * c.y,
        );
        sum += w * f(p);
    }
    sum * area
}

/// Integrates `f` along the segment `(p, q)` of the given length.
pub fn integrate_edge(
    points: &[EdgePoint],
    p: Vec2,
    q: Vec2,
    length: f64,
    mut f: impl FnMut(Vec2) -> f64,
) -> f64 {
    let mut sum = 0.0;
    for &(t, w) in points {
        let x = Vec2::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y));
        sum += w * f(x);
    }
    sum * length
}
