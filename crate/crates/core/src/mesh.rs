//! Triangle mesh of a skewed danger cylinder.
//!
//! The surface is the graph `z = ±sqrt(z²(x, y))` over the region where
//! `z²(x, y) ≥ 0`, in the canonical frame of the shared vertex. Grid cells are
//! cut by marching squares; crossings are located by bisection, so every
//! vertex is evaluated on the surface itself. The two sheets share the
//! vertices of the `z = 0` boundary curve.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::loci::SkewedDangerCylinder;
use crate::types::{ControlTriangle, Point3, Vertex};

/// Sampling window in canonical coordinates of the shared vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Sheets are clipped at `|z| = z_max`.
    pub z_max: f64,
}

impl MeshBounds {
    /// The triangle's bounding box grown by one scale on every side, `z_max`
    /// three scales.
    pub fn around(tri: &ControlTriangle, vertex: Vertex) -> MeshBounds {
        let surf = SkewedDangerCylinder::new(tri, vertex);
        let (a, e, f) = (surf.frame.a, surf.frame.e, surf.frame.f);
        let s = tri.scale();
        MeshBounds { x_min: e.min(0.0) - s, x_max: e.max(a) + s, y_min: -s, y_max: f + s, z_max: 3.0 * s }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.x_min < self.x_max && self.y_min < self.y_max && self.z_max > 0.0;
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max, self.z_max].iter().all(|x| x.is_finite());
        if ok && finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("bad mesh bounds {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// World coordinates.
    pub vertices: Vec<Point3>,
    /// Zero-based vertex indices, counter-clockwise seen from outside the
    /// upper sheet.
    pub faces: Vec<[usize; 3]>,
    /// Vertices on the `z = 0` boundary curve.
    pub on_base: Vec<bool>,
}

impl Mesh {
    /// Wavefront OBJ text with 1-based faces. Coordinates are written at
    /// full precision so the file reproduces the vertices exactly.
    pub fn to_obj(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "# {line}");
        }
        for v in &self.vertices {
            let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }
}

/// Parse the `v` and `f` records of an OBJ file.
pub fn parse_obj(text: &str) -> Result<(Vec<Point3>, Vec<[usize; 3]>)> {
    let mut vs = Vec::new();
    let mut fs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || Error::Parse(format!("line {}: `{line}`", n + 1));
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(bad());
                }
                vs.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                if c.len() != 3 || c.iter().any(|&i| i == 0 || i > vs.len()) {
                    return Err(bad());
                }
                fs.push([c[0] - 1, c[1] - 1, c[2] - 1]);
            }
            _ => {}
        }
    }
    Ok((vs, fs))
}

/// Where a grid edge leaves the admissible region.
#[derive(Clone, Copy)]
struct Crossing {
    x: f64,
    y: f64,
    z2: f64,
    base: bool,
}

struct Sampler<'a> {
    surf: &'a SkewedDangerCylinder,
    z2_max: f64,
}

impl Sampler<'_> {
    fn z2(&self, x: f64, y: f64) -> Option<f64> {
        self.surf.z_squared(x, y).filter(|z2| *z2 <= self.z2_max)
    }

    /// Bisect the edge from an admissible point to an inadmissible one. The
    /// admissible end of the final bracket becomes the vertex.
    fn crossing(&self, inside: (f64, f64), outside: (f64, f64)) -> Crossing {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let at = |t: f64| (inside.0 + (outside.0 - inside.0) * t, inside.1 + (outside.1 - inside.1) * t);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (x, y) = at(mid);
            if self.z2(x, y).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x, y) = at(lo);
        let z2 = self.z2(x, y).expect("bisection keeps the admissible end");
        // Leaving through z = 0 rather than through the clip height.
        let base = z2 <= 1e-12 * self.z2_max.max(1.0);
        Crossing { x, y, z2: if base { 0.0 } else { z2 }, base }
    }
}

/// Mesh of the skewed danger cylinder of `vertex` on an `nx × ny` grid.
///
/// Fails when the window contains no admissible point.
pub fn skew_mesh(tri: &ControlTriangle, vertex: Vertex, nx: usize, ny: usize, bounds: &MeshBounds) -> Result<Mesh> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!("mesh grid must be at least 2×2, got {nx}×{ny}")));
    }
    bounds.validate()?;
    let surf = SkewedDangerCylinder::new(tri, vertex);
    let sampler = Sampler { surf: &surf, z2_max: bounds.z_max * bounds.z_max };
    let hx = (bounds.x_max - bounds.x_min) / nx as f64;
    let hy = (bounds.y_max - bounds.y_min) / ny as f64;
    let node = |i: usize, j: usize| (bounds.x_min + i as f64 * hx, bounds.y_min + j as f64 * hy);
    let z2: Vec<Vec<Option<f64>>> =
        (0..=nx).map(|i| (0..=ny).map(|j| { let (x, y) = node(i, j); sampler.z2(x, y) }).collect()).collect();

    let mut mesh = Mesh { vertices: Vec::new(), faces: Vec::new(), on_base: Vec::new() };
    // Keys: grid nodes and grid edges, each with a sheet sign. Base vertices
    // are stored once under sign +1.
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Key {
        Node(usize, usize, i8),
        Edge(usize, usize, bool, i8),
    }
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut emit = |mesh: &mut Mesh, key: Key, x: f64, y: f64, z: f64, base: bool| -> usize {
        *index.entry(key).or_insert_with(|| {
            mesh.vertices.push(surf.frame.to_world(&Point3::new(x, y, z)));
            mesh.on_base.push(base);
            mesh.vertices.len() - 1
        })
    };
    let mut crossings: HashMap<(usize, usize, bool), Crossing> = HashMap::new();

    for i in 0..nx {
        for j in 0..ny {
            // Corners counter-clockwise; edge k joins corner k to corner k + 1.
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let inside: Vec<bool> = corners.iter().map(|&(a, b)| z2[a][b].is_some()).collect();
            if !inside.iter().any(|&b| b) {
                continue;
            }
            // Edge ids: (lower-left node, horizontal?).
            let edge_id = |k: usize| match k {
                0 => (i, j, true),
                1 => (i + 1, j, false),
                2 => (i, j + 1, true),
                _ => (i, j, false),
            };
            for sign in [1i8, -1] {
                let mut poly = Vec::with_capacity(8);
                for k in 0..4 {
                    let (a, b) = corners[k];
                    if inside[k] {
                        let (x, y) = node(a, b);
                        let z = f64::from(sign) * z2[a][b].expect("inside").sqrt();
                        poly.push(emit(&mut mesh, Key::Node(a, b, sign), x, y, z, false));
                    }
                    let next = (k + 1) % 4;
                    if inside[k] != inside[next] {
                        let id = edge_id(k);
                        let c = *crossings.entry(id).or_insert_with(|| {
                            let (p, q) = (corners[k], corners[next]);
                            let (pin, pout) = if inside[k] { (p, q) } else { (q, p) };
                            sampler.crossing(node(pin.0, pin.1), node(pout.0, pout.1))
                        });
                        let (s, z) = if c.base { (1, 0.0) } else { (sign, f64::from(sign) * c.z2.sqrt()) };
                        poly.push(emit(&mut mesh, Key::Edge(id.0, id.1, id.2, s), c.x, c.y, z, c.base));
                    }
                }
                poly.dedup();
                // Points on a square's boundary in cyclic order bound a convex
                // polygon, so a fan is a valid triangulation.
                for k in 1..poly.len().saturating_sub(1) {
                    let (p, q, r) = (poly[0], poly[k], poly[k + 1]);
                    if p == q || q == r || p == r {
                        continue;
                    }
                    mesh.faces.push(if sign > 0 { [p, q, r] } else { [p, r, q] });
                }
            }
        }
    }
    if mesh.faces.is_empty() {
        return Err(Error::InvalidArgument("the skew surface has no admissible region inside the bounds".into()));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loci::{cylinder_membership, danger_cylinder, skewed_membership};

    fn sc1() -> ControlTriangle {
        ControlTriangle::new(Point3::new(1.0, 2.0, 0.0), Point3::zeros(), Point3::new(3.0, 0.0, 0.0)).unwrap()
    }

    #[test]
    fn vertices_lie_on_the_surface() {
        let tri = sc1();
        for v in Vertex::ALL {
            let mesh = skew_mesh(&tri, v, 80, 80, &MeshBounds::around(&tri, v)).unwrap();
            let surf = SkewedDangerCylinder::new(&tri, v);
            assert!(!mesh.faces.is_empty());
            for p in &mesh.vertices {
                assert!(skewed_membership(&surf, p).abs() < 1e-9, "{v}: {p:?}");
            }
        }
    }

    #[test]
    fn base_curve_is_line_or_circle() {
        let tri = sc1();
        let mesh = skew_mesh(&tri, Vertex::A, 120, 120, &MeshBounds::around(&tri, Vertex::A)).unwrap();
        let surf = SkewedDangerCylinder::new(&tri, Vertex::A);
        let cyl = danger_cylinder(tri.canonical_frame());
        let mut on_circle = 0;
        for (p, base) in mesh.vertices.iter().zip(&mesh.on_base) {
            if !base {
                continue;
            }
            let c = surf.frame.to_canonical(p);
            assert!(c.z.abs() < 1e-12);
            // y·Q = 0 on the base curve.
            assert!((c.y * surf.q(c.x, c.y)).abs() < 1e-9);
            if cylinder_membership(&cyl, p).abs() < 1e-9 {
                on_circle += 1;
            }
        }
        assert!(on_circle > 10);
    }

    #[test]
    fn obj_round_trip() {
        let tri = sc1();
        let mesh = skew_mesh(&tri, Vertex::B, 20, 20, &MeshBounds::around(&tri, Vertex::B)).unwrap();
        let (vs, fs) = parse_obj(&mesh.to_obj("skew B")).unwrap();
        assert_eq!(vs, mesh.vertices);
        assert_eq!(fs, mesh.faces);
        assert!(parse_obj("v 1 2\n").is_err());
        assert!(parse_obj("v 1 2 3\nf 1 2 4\n").is_err());
    }

    #[test]
    fn empty_window_is_an_error() {
        let tri = sc1();
        // Outside the circle and above the base line, where z² < 0.
        let b = MeshBounds { x_min: 5.0, x_max: 6.0, y_min: 0.5, y_max: 1.0, z_max: 9.0 };
        assert!(skew_mesh(&tri, Vertex::A, 10, 10, &b).is_err());
        assert!(skew_mesh(&tri, Vertex::A, 1, 10, &MeshBounds::around(&tri, Vertex::A)).is_err());
    }
}
