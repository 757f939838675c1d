//! Control triangles, subtended angles, distance triplets and the numeric
//! conventions shared by every other module.
//!
//! Labels follow the usual P3P convention: `a = |BC|`, `b = |AC|`, `c = |AB|`,
//! `α` is the angle at the optical center between the rays to `B` and `C`
//! (it subtends side `a`), `β` subtends `b` and `γ` subtends `c`. Distances
//! are `s1 = |OA|`, `s2 = |OB|`, `s3 = |OC|`.
//!
//! Every labelled quantity can be cyclically relabelled with
//! `(A, a, α, s1) → (B, b, β, s2) → (C, c, γ, s3)`; the `rotated` methods
//! implement that map so that formulas written for vertex `A` serve all three.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

/// Numeric thresholds used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative residual accepted for the distance constraints.
    pub residual: f64,
    /// Relative tolerance for exact constructions.
    pub exact: f64,
    /// Scaled distance under which two roots count as one repeated root.
    pub cluster: f64,
    /// Minimum `u`, `v` for a ratio point to count as quadrant I.
    pub quadrant_eps: f64,
    /// Relative singular-value threshold for proportional conics.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-9,
            exact: 1e-12,
            cluster: 1e-7,
            quadrant_eps: 1e-10,
            rank: 1e-10,
        }
    }
}

/// One of the three control points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    A,
    B,
    C,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::A, Vertex::B, Vertex::C];

    pub fn index(self) -> usize {
        match self {
            Vertex::A => 0,
            Vertex::B => 1,
            Vertex::C => 2,
        }
    }

    pub fn from_index(i: usize) -> Vertex {
        Vertex::ALL[i % 3]
    }

    /// The two other vertices, in cyclic order.
    pub fn others(self) -> (Vertex, Vertex) {
        let i = self.index();
        (Vertex::from_index(i + 1), Vertex::from_index(i + 2))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Vertex::A => "A",
            Vertex::B => "B",
            Vertex::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Vertex> {
        match s.trim() {
            "A" | "a" => Ok(Vertex::A),
            "B" | "b" => Ok(Vertex::B),
            "C" | "c" => Ok(Vertex::C),
            other => Err(Error::InvalidArgument(format!("unknown vertex `{other}`, expected A, B or C"))),
        }
    }
}

/// Cyclic shift so that slot 0 holds the entry belonging to `k`.
pub(crate) fn shift<T: Copy>(arr: [T; 3], k: Vertex) -> [T; 3] {
    let k = k.index();
    [arr[k % 3], arr[(k + 1) % 3], arr[(k + 2) % 3]]
}

/// Inverse of [`shift`].
pub(crate) fn unshift<T: Copy>(arr: [T; 3], k: Vertex) -> [T; 3] {
    shift(arr, Vertex::from_index(3 - k.index()))
}

/// Side lengths `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Sides {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Sides> {
        let s = Sides { a, b, c };
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || a <= 0.0 || b <= 0.0 || c <= 0.0 {
            return Err(Error::DegenerateInput(format!("side lengths must be positive, got {a}, {b}, {c}")));
        }
        let slack = 1e-12 * s.max();
        if a >= b + c - slack || b >= a + c - slack || c >= a + b - slack {
            return Err(Error::DegenerateInput(format!("sides {a}, {b}, {c} violate the triangle inequality")));
        }
        Ok(s)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(s: [f64; 3]) -> Sides {
        Sides { a: s[0], b: s[1], c: s[2] }
    }

    pub fn max(&self) -> f64 {
        self.a.max(self.b).max(self.c)
    }

    pub fn rotated(&self, k: Vertex) -> Sides {
        Sides::from_array(shift(self.as_array(), k))
    }

    /// Interior-angle cosines `(cos∠BAC, cos∠ABC, cos∠ACB)` by the law of cosines.
    pub fn interior_cosines(&self) -> [f64; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        [
            (b * b + c * c - a * a) / (2.0 * b * c),
            (a * a + c * c - b * b) / (2.0 * a * c),
            (a * a + b * b - c * c) / (2.0 * a * b),
        ]
    }
}

/// Three non-collinear control points with cached sides and interior angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlTriangle {
    points: [Point3; 3],
    sides: Sides,
    cosines: [f64; 3],
}

impl ControlTriangle {
    pub fn new(a: Point3, b: Point3, c: Point3) -> Result<ControlTriangle> {
        let points = [a, b, c];
        if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(Error::DegenerateInput("non-finite control point".into()));
        }
        let side_bc = (c - b).norm();
        let side_ac = (c - a).norm();
        let side_ab = (b - a).norm();
        let scale = side_bc.max(side_ac).max(side_ab);
        if scale == 0.0 {
            return Err(Error::DegenerateInput("coincident control points".into()));
        }
        // Twice the area relative to the squared scale.
        let area = (b - a).cross(&(c - a)).norm() / (scale * scale);
        if area < 1e-12 {
            return Err(Error::DegenerateInput("collinear control points".into()));
        }
        let sides = Sides::new(side_bc, side_ac, side_ab)?;
        // Cosines from dot products, which stay accurate for thin triangles.
        let cos_at = |p: Point3, q: Point3, r: Point3| {
            let (u, v) = (q - p, r - p);
            (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0)
        };
        let cosines = [cos_at(a, b, c), cos_at(b, a, c), cos_at(c, a, b)];
        Ok(ControlTriangle { points, sides, cosines })
    }

    pub fn from_arrays(pts: [[f64; 3]; 3]) -> Result<ControlTriangle> {
        let p = |i: usize| Point3::new(pts[i][0], pts[i][1], pts[i][2]);
        ControlTriangle::new(p(0), p(1), p(2))
    }

    pub fn point(&self, v: Vertex) -> Point3 {
        self.points[v.index()]
    }

    pub fn points(&self) -> [Point3; 3] {
        self.points
    }

    pub fn sides(&self) -> Sides {
        self.sides
    }

    /// Interior-angle cosines `(cos∠BAC, cos∠ABC, cos∠ACB)`.
    pub fn interior_angles(&self) -> (f64, f64, f64) {
        (self.cosines[0], self.cosines[1], self.cosines[2])
    }

    pub fn interior_cosines(&self) -> [f64; 3] {
        self.cosines
    }

    /// Longest side; the natural length unit of a scene.
    pub fn scale(&self) -> f64 {
        self.sides.max()
    }

    /// Relabel so that vertex `k` plays the role of `A`.
    pub fn rotated(&self, k: Vertex) -> ControlTriangle {
        ControlTriangle {
            points: shift(self.points, k),
            sides: self.sides.rotated(k),
            cosines: shift(self.cosines, k),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<ControlTriangle> {
        let p = self.points;
        ControlTriangle::new(p[0] * factor, p[1] * factor, p[2] * factor)
    }

    pub fn canonical_frame(&self) -> CanonicalFrame {
        CanonicalFrame::from_triangle(self)
    }

    /// Unit normal of the base plane, oriented by `(B − A) × (C − A)`.
    pub fn normal(&self) -> Point3 {
        let [a, b, c] = self.points;
        (b - a).cross(&(c - a)).normalize()
    }
}

/// Interior-angle cosines of a triangle.
pub fn interior_angles(tri: &ControlTriangle) -> (f64, f64, f64) {
    tri.interior_angles()
}

/// Coordinates with `B` at the origin, `C = (a, 0, 0)` and `A = (e, f, 0)`, `f > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalFrame {
    pub a: f64,
    pub e: f64,
    pub f: f64,
    origin: Point3,
    /// Rows are the canonical axes expressed in world coordinates.
    rotation: Matrix3<f64>,
}

impl CanonicalFrame {
    fn from_triangle(tri: &ControlTriangle) -> CanonicalFrame {
        let [pa, pb, pc] = tri.points;
        let Sides { a, b, c } = tri.sides;
        let ex = (pc - pb) / a;
        let rel = pa - pb;
        let ey = (rel - ex * rel.dot(&ex)).normalize();
        let ez = ex.cross(&ey);
        let rotation = Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()]);
        let e = (a * a + c * c - b * b) / (2.0 * a);
        // Height from the cross product rather than sqrt(c² − e²), which cancels
        // badly for thin triangles.
        let f = (pc - pb).cross(&rel).norm() / a;
        CanonicalFrame { a, e, f, origin: pb, rotation }
    }

    /// Frame of the relabelled triangle in which `k` plays `A`.
    pub fn for_vertex(tri: &ControlTriangle, k: Vertex) -> CanonicalFrame {
        tri.rotated(k).canonical_frame()
    }

    pub fn to_canonical(&self, p: &Point3) -> Point3 {
        self.rotation * (p - self.origin)
    }

    pub fn to_world(&self, q: &Point3) -> Point3 {
        self.rotation.transpose() * q + self.origin
    }

    /// Canonical coordinates of `(A, B, C)`.
    pub fn canonical_points(&self) -> [Point3; 3] {
        [Point3::new(self.e, self.f, 0.0), Point3::zeros(), Point3::new(self.a, 0.0, 0.0)]
    }

    /// Side lengths reconstructed from `(a, e, f)`.
    pub fn sides(&self) -> Sides {
        let (a, e, f) = (self.a, self.e, self.f);
        Sides { a, b: ((a - e) * (a - e) + f * f).sqrt(), c: (e * e + f * f).sqrt() }
    }
}

/// Canonical frame of a triangle given by raw points; rejects degenerate input.
pub fn canonical_frame(a: Point3, b: Point3, c: Point3) -> Result<CanonicalFrame> {
    Ok(ControlTriangle::new(a, b, c)?.canonical_frame())
}

/// Cosines of the three subtended angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewAngles {
    pub cos_alpha: f64,
    pub cos_beta: f64,
    pub cos_gamma: f64,
}

impl ViewAngles {
    /// Validated constructor.
    ///
    /// Besides the open range `(−1, 1)` the cosines must form a spherical
    /// triangle: each angle at most the sum of the other two and the total at
    /// most 2π. Equality (coplanar rays, i.e. a center in the base plane) is
    /// accepted so that in-plane and cocyclic configurations can be expressed.
    pub fn new(cos_alpha: f64, cos_beta: f64, cos_gamma: f64) -> Result<ViewAngles> {
        let v = ViewAngles { cos_alpha, cos_beta, cos_gamma };
        for c in v.as_array() {
            if !c.is_finite() || c <= -1.0 || c >= 1.0 {
                return Err(Error::InfeasibleAngles(format!("cosine {c} outside (-1, 1)")));
            }
        }
        let [al, be, ga] = v.radians();
        let slack = 1e-9;
        if al > be + ga + slack || be > al + ga + slack || ga > al + be + slack {
            return Err(Error::InfeasibleAngles("an angle exceeds the sum of the other two".into()));
        }
        if al + be + ga > 2.0 * PI + slack {
            return Err(Error::InfeasibleAngles("angles sum to more than 2π".into()));
        }
        Ok(v)
    }

    pub fn from_array(c: [f64; 3]) -> Result<ViewAngles> {
        ViewAngles::new(c[0], c[1], c[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.cos_alpha, self.cos_beta, self.cos_gamma]
    }

    pub fn radians(&self) -> [f64; 3] {
        self.as_array().map(f64::acos)
    }

    pub fn degrees(&self) -> [f64; 3] {
        self.radians().map(f64::to_degrees)
    }

    pub fn rotated(&self, k: Vertex) -> ViewAngles {
        let c = shift(self.as_array(), k);
        ViewAngles { cos_alpha: c[0], cos_beta: c[1], cos_gamma: c[2] }
    }
}

/// Subtended-angle cosines seen from `o`.
pub fn view_angles_from_center(tri: &ControlTriangle, o: &Point3) -> Result<ViewAngles> {
    let rays = tri.points().map(|p| p - o);
    let min_len = 1e-12 * tri.scale();
    for (r, v) in rays.iter().zip(Vertex::ALL) {
        if r.norm() <= min_len {
            return Err(Error::DegenerateInput(format!("optical center coincides with {v}")));
        }
    }
    let cos = |i: usize, j: usize| {
        (rays[i].dot(&rays[j]) / (rays[i].norm() * rays[j].norm())).clamp(-1.0, 1.0)
    };
    let c = [cos(1, 2), cos(0, 2), cos(0, 1)];
    for x in c {
        if x.abs() >= 1.0 - 1e-12 {
            return Err(Error::DegenerateAngle(x));
        }
    }
    // Rounding can push coplanar configurations a hair past the feasibility
    // boundary; clamp-free construction is fine since `new` has slack.
    ViewAngles::from_array(c)
}

/// Distance from `o` to the circumcircle of the control points.
///
/// Zero exactly on the circle in the base plane, where the pencil of the two
/// characteristic conics degenerates.
pub fn cocyclic_degeneracy(tri: &ControlTriangle, o: &Point3) -> f64 {
    let frame = tri.canonical_frame();
    let q = frame.to_canonical(o);
    let (a, e, f) = (frame.a, frame.e, frame.f);
    let cx = a / 2.0;
    let cy = (e * e - a * e + f * f) / (2.0 * f);
    let r = (cx * cx + cy * cy).sqrt();
    let radial = ((q.x - cx).hypot(q.y - cy) - r).abs();
    radial.hypot(q.z)
}

/// Positive distances `(|OA|, |OB|, |OC|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionTriplet {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl SolutionTriplet {
    /// Unchecked constructor; solver paths validate residuals themselves.
    pub fn new(s1: f64, s2: f64, s3: f64) -> SolutionTriplet {
        SolutionTriplet { s1, s2, s3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn from_array(s: [f64; 3]) -> SolutionTriplet {
        SolutionTriplet { s1: s[0], s2: s[1], s3: s[2] }
    }

    pub fn is_positive(&self) -> bool {
        self.s1 > 0.0 && self.s2 > 0.0 && self.s3 > 0.0
    }

    pub fn rotated(&self, k: Vertex) -> SolutionTriplet {
        SolutionTriplet::from_array(shift(self.as_array(), k))
    }

    pub fn unrotated(&self, k: Vertex) -> SolutionTriplet {
        SolutionTriplet::from_array(unshift(self.as_array(), k))
    }

    /// `(u, v) = (s2 / s1, s3 / s1)`.
    pub fn ratio(&self) -> RatioPair {
        RatioPair::new(self.s2 / self.s1, self.s3 / self.s1)
    }

    pub fn scaled(&self, factor: f64) -> SolutionTriplet {
        SolutionTriplet::from_array(self.as_array().map(|s| s * factor))
    }

    /// Largest relative componentwise difference.
    pub fn rel_diff(&self, other: &SolutionTriplet) -> f64 {
        let scale = self.s1.max(self.s2).max(self.s3).max(f64::MIN_POSITIVE);
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(x, y)| (x - y).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// A candidate conic intersection `(u, v) = (s2 / s1, s3 / s1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPair {
    pub u: f64,
    pub v: f64,
    pub multiplicity: u32,
}

impl RatioPair {
    pub fn new(u: f64, v: f64) -> RatioPair {
        RatioPair { u, v, multiplicity: 1 }
    }

    pub fn with_multiplicity(u: f64, v: f64, multiplicity: u32) -> RatioPair {
        RatioPair { u, v, multiplicity }
    }

    pub fn in_quadrant_one(&self, eps: f64) -> bool {
        self.u > eps && self.v > eps
    }

    /// Express the point in the ratio basis of the relabelled problem in which
    /// `k` plays `A`: `(s_{k+1} / s_k, s_{k+2} / s_k)`.
    pub fn rebased(&self, k: Vertex) -> RatioPair {
        let s = shift([1.0, self.u, self.v], k);
        RatioPair { u: s[1] / s[0], v: s[2] / s[0], multiplicity: self.multiplicity }
    }
}
