//! Where in space the special solution structures occur.
//!
//! Every locus lives in a canonical frame (see [`CanonicalFrame`]) and is
//! queried with world points. Surfaces tied to vertex `B` or `C` use the frame
//! of the relabelled triangle in which that vertex plays `A`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::types::{CanonicalFrame, ControlTriangle, Point3, Vertex};

/// Rejection budget of [`sample_locus`].
pub const MAX_REJECTIONS: usize = 10_000;

/// The vertical circular cylinder through the three control points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DangerCylinder {
    pub frame: CanonicalFrame,
    /// Axis position in canonical `(x, y)`.
    pub center: (f64, f64),
    pub radius_squared: f64,
}

impl DangerCylinder {
    pub fn radius(&self) -> f64 {
        self.radius_squared.sqrt()
    }

    /// Axis point in the base plane, world coordinates.
    pub fn center_world(&self) -> Point3 {
        self.frame.to_world(&Point3::new(self.center.0, self.center.1, 0.0))
    }
}

pub fn danger_cylinder(frame: CanonicalFrame) -> DangerCylinder {
    let (a, e, f) = (frame.a, frame.e, frame.f);
    let center = (a / 2.0, (e * e - a * e + f * f) / (2.0 * f));
    let radius_squared = (e * e + f * f) * ((a - e) * (a - e) + f * f) / (4.0 * f * f);
    DangerCylinder { frame, center, radius_squared }
}

/// Horizontal distance to the cylinder wall, negative inside.
pub fn cylinder_membership(cyl: &DangerCylinder, o: &Point3) -> f64 {
    let q = cyl.frame.to_canonical(o);
    (q.x - cyl.center.0).hypot(q.y - cyl.center.1) - cyl.radius()
}

/// The plane through the altitude from `vertex`, perpendicular to the base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalPlane {
    pub vertex: Vertex,
    /// Foot of the altitude (world).
    pub point_on_line: Point3,
    /// Altitude direction (world, unit).
    pub direction: Point3,
    /// Horizontal unit normal, pointing along the opposite side.
    pub normal: Point3,
}

impl VerticalPlane {
    /// `π1`, `π2`, `π3` for `A`, `B`, `C`.
    pub fn name(&self) -> String {
        format!("pi{}", self.vertex.index() + 1)
    }
}

/// Vertical plane for `vertex` of the triangle.
pub fn vertical_plane(tri: &ControlTriangle, vertex: Vertex) -> VerticalPlane {
    let frame = CanonicalFrame::for_vertex(tri, vertex);
    let to_world_dir = |d: Point3| frame.to_world(&d) - frame.to_world(&Point3::zeros());
    VerticalPlane {
        vertex,
        point_on_line: frame.to_world(&Point3::new(frame.e, 0.0, 0.0)),
        direction: to_world_dir(Point3::new(0.0, 1.0, 0.0)),
        normal: to_world_dir(Point3::new(1.0, 0.0, 0.0)),
    }
}

/// Signed distance from `o` to the plane.
pub fn plane_membership(plane: &VerticalPlane, o: &Point3) -> f64 {
    (o - plane.point_on_line).dot(&plane.normal)
}

/// Cubic surface `f·y·Q(x, y) = z²·(e² − f·y − a·e)` for one shared point,
/// where `Q = x² − a·x + y² − y·(e² − a·e + f²)/f` vanishes on the danger
/// cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewedDangerCylinder {
    pub vertex: Vertex,
    pub frame: CanonicalFrame,
}

impl SkewedDangerCylinder {
    pub fn new(tri: &ControlTriangle, vertex: Vertex) -> SkewedDangerCylinder {
        SkewedDangerCylinder { vertex, frame: CanonicalFrame::for_vertex(tri, vertex) }
    }

    /// `Q(x, y)` of the danger cylinder in this frame.
    pub fn q(&self, x: f64, y: f64) -> f64 {
        let (a, e, f) = (self.frame.a, self.frame.e, self.frame.f);
        x * x - a * x + y * y - y * (e * e - a * e + f * f) / f
    }

    /// `e² − f·y − a·e`.
    pub fn denominator(&self, y: f64) -> f64 {
        let (a, e, f) = (self.frame.a, self.frame.e, self.frame.f);
        e * e - f * y - a * e
    }

    /// Left and right sides `(f·y·Q, z²·(e² − f·y − a·e))` at a canonical point.
    pub fn sides_at(&self, p: &Point3) -> (f64, f64) {
        (self.frame.f * p.y * self.q(p.x, p.y), p.z * p.z * self.denominator(p.y))
    }

    /// Raw `G = f·y·Q − z²·(e² − f·y − a·e)` at a canonical point.
    pub fn value_canonical(&self, p: &Point3) -> f64 {
        let (l, r) = self.sides_at(p);
        l - r
    }

    /// `G` normalized by `max(1, |f·y·Q|, |z²·(…)|)` at a canonical point.
    pub fn residual_canonical(&self, p: &Point3) -> f64 {
        let (l, r) = self.sides_at(p);
        (l - r) / 1f64.max(l.abs()).max(r.abs())
    }

    /// `z²` on the surface above `(x, y)`, if admissible.
    pub fn z_squared(&self, x: f64, y: f64) -> Option<f64> {
        let den = self.denominator(y);
        if den.abs() < 1e-8 {
            return None;
        }
        let z2 = self.frame.f * y * self.q(x, y) / den;
        (z2 >= 0.0).then_some(z2)
    }
}

/// Normalized skew-surface residual of a world point.
pub fn skewed_membership(surf: &SkewedDangerCylinder, o: &Point3) -> f64 {
    surf.residual_canonical(&surf.frame.to_canonical(o))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Locus {
    DangerCylinder,
    VerticalPlane(Vertex),
    SkewedCylinder(Vertex),
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::DangerCylinder => write!(f, "danger_cylinder"),
            Locus::VerticalPlane(v) => write!(f, "pi{}", v.index() + 1),
            Locus::SkewedCylinder(v) => write!(f, "skew{v}"),
        }
    }
}

/// Membership residual of a world point for any locus: distances for the
/// cylinder and planes, the normalized cubic for skew surfaces.
pub fn locus_membership(tri: &ControlTriangle, locus: Locus, o: &Point3) -> f64 {
    match locus {
        Locus::DangerCylinder => cylinder_membership(&danger_cylinder(tri.canonical_frame()), o),
        Locus::VerticalPlane(v) => plane_membership(&vertical_plane(tri, v), o),
        Locus::SkewedCylinder(v) => skewed_membership(&SkewedDangerCylinder::new(tri, v), o),
    }
}

/// Box for locus sampling, in multiples of the triangle scale.
///
/// `(x, y)` range over the canonical bounding box of the triangle widened by
/// `margin` on each side; `|z|` ranges over `[z_min, z_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRegion {
    pub margin: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Default for SamplingRegion {
    fn default() -> Self {
        SamplingRegion { margin: 1.0, z_min: 0.1, z_max: 3.0 }
    }
}

struct Bounds {
    x: (f64, f64),
    y: (f64, f64),
    z: (f64, f64),
}

impl SamplingRegion {
    fn bounds(&self, frame: &CanonicalFrame, scale: f64) -> Bounds {
        let m = self.margin * scale;
        let (xs, ys) = (
            [0.0, frame.a, frame.e],
            [0.0, 0.0, frame.f],
        );
        let lo = |v: [f64; 3]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: [f64; 3]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Bounds {
            x: (lo(xs) - m, hi(xs) + m),
            y: (lo(ys) - m, hi(ys) + m),
            z: (self.z_min * scale, self.z_max * scale),
        }
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

fn signed_height<R: Rng + ?Sized>(rng: &mut R, z: (f64, f64)) -> f64 {
    let h = uniform(rng, z);
    if rng.gen_bool(0.5) {
        h
    } else {
        -h
    }
}

/// Draw a world point on a locus inside the region.
pub fn sample_locus<R: Rng + ?Sized>(
    locus: Locus,
    tri: &ControlTriangle,
    rng: &mut R,
    region: &SamplingRegion,
) -> Result<Point3> {
    if !(region.z_min >= 0.0 && region.z_max >= region.z_min && region.margin >= 0.0) {
        return Err(Error::InvalidArgument(format!("bad sampling region {region:?}")));
    }
    let scale = tri.scale();
    match locus {
        Locus::VerticalPlane(v) => {
            let frame = CanonicalFrame::for_vertex(tri, v);
            let b = region.bounds(&frame, scale);
            let p = Point3::new(frame.e, uniform(rng, b.y), signed_height(rng, b.z));
            Ok(frame.to_world(&p))
        }
        Locus::DangerCylinder => {
            let cyl = danger_cylinder(tri.canonical_frame());
            let b = region.bounds(&cyl.frame, scale);
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = cyl.radius();
            let p = Point3::new(cyl.center.0 + r * t.cos(), cyl.center.1 + r * t.sin(), signed_height(rng, b.z));
            Ok(cyl.frame.to_world(&p))
        }
        Locus::SkewedCylinder(v) => {
            let surf = SkewedDangerCylinder::new(tri, v);
            let b = region.bounds(&surf.frame, scale);
            for _ in 0..MAX_REJECTIONS {
                let (x, y) = (uniform(rng, b.x), uniform(rng, b.y));
                let Some(z2) = surf.z_squared(x, y) else { continue };
                let z = z2.sqrt();
                if z2 <= 0.0 || z < b.z.0 || z > b.z.1 {
                    continue;
                }
                let z = if rng.gen_bool(0.5) { z } else { -z };
                let p = Point3::new(x, y, z);
                if surf.residual_canonical(&p).abs() >= 1e-12 {
                    continue;
                }
                return Ok(surf.frame.to_world(&p));
            }
            Err(Error::SamplingFailure(MAX_REJECTIONS))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eq1() -> ControlTriangle {
        ControlTriangle::new(Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0), Point3::zeros(), Point3::new(1.0, 0.0, 0.0))
            .unwrap()
    }

    fn sc1() -> ControlTriangle {
        ControlTriangle::new(Point3::new(1.0, 2.0, 0.0), Point3::zeros(), Point3::new(3.0, 0.0, 0.0)).unwrap()
    }

    /// Circumcenter from perpendicular bisectors, independent of the closed form.
    fn circumcircle(p: [Point3; 3]) -> (f64, f64, f64) {
        let (ax, ay, bx, by, cx, cy) = (p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y);
        let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
        let a2 = ax * ax + ay * ay;
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
        let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
        (ux, uy, (ax - ux).powi(2) + (ay - uy).powi(2))
    }

    #[test]
    fn cylinder_matches_circumcircle() {
        for (tri, want) in [(eq1(), (0.5, 3f64.sqrt() / 6.0, 1.0 / 3.0)), (sc1(), (1.5, 0.5, 2.5))] {
            let cyl = danger_cylinder(tri.canonical_frame());
            assert_relative_eq!(cyl.center.0, want.0, epsilon = 1e-12);
            assert_relative_eq!(cyl.center.1, want.1, epsilon = 1e-12);
            assert_relative_eq!(cyl.radius_squared, want.2, epsilon = 1e-12);
            let (x, y, r2) = circumcircle(tri.canonical_frame().canonical_points());
            assert_relative_eq!(cyl.center.0, x, epsilon = 1e-12);
            assert_relative_eq!(cyl.center.1, y, epsilon = 1e-12);
            assert_relative_eq!(cyl.radius_squared, r2, epsilon = 1e-12);
            for p in tri.points() {
                assert!(cylinder_membership(&cyl, &p).abs() < 1e-12);
                assert!(cylinder_membership(&cyl, &(p + Point3::new(0.0, 0.0, 5.0))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cylinder_membership_fixtures() {
        let cyl = danger_cylinder(eq1().canonical_frame());
        let r = (1.0f64 / 3.0).sqrt();
        let h = 3f64.sqrt() / 6.0;
        assert!(cylinder_membership(&cyl, &Point3::new(0.5 + r, h, 2.3)).abs() < 1e-12);
        assert_relative_eq!(cylinder_membership(&cyl, &Point3::new(0.5, h, 7.0)), -r, epsilon = 1e-12);
    }

    #[test]
    fn vertical_plane_fixtures() {
        let tri = eq1();
        let pi1 = vertical_plane(&tri, Vertex::A);
        assert!(plane_membership(&pi1, &Point3::new(0.5, 3f64.sqrt() / 6.0, 1.0)).abs() < 1e-12);
        assert_relative_eq!(plane_membership(&pi1, &Point3::new(0.7, 0.0, 1.0)), 0.2, epsilon = 1e-12);
        assert_relative_eq!(
            plane_membership(&pi1, &Point3::new(0.7, 0.0, -40.0)),
            plane_membership(&pi1, &Point3::new(0.7, 0.0, 3.0)),
            epsilon = 1e-12
        );
        let pi1 = vertical_plane(&sc1(), Vertex::A);
        assert!(plane_membership(&pi1, &Point3::new(1.0, 2.0, 0.0)).abs() < 1e-12);
        assert!(plane_membership(&pi1, &Point3::new(1.0, -3.0, 9.0)).abs() < 1e-12);
        assert_relative_eq!(plane_membership(&pi1, &Point3::new(2.0, 0.0, 0.0)), 1.0, epsilon = 1e-12);
        // Right angle at B: the plane through B perpendicular to AC.
        let right =
            ControlTriangle::new(Point3::new(0.0, 2.0, 0.0), Point3::zeros(), Point3::new(1.0, 0.0, 0.0)).unwrap();
        let pi2 = vertical_plane(&right, Vertex::B);
        assert!(plane_membership(&pi2, &Point3::zeros()).abs() < 1e-12);
        let ac = Point3::new(1.0, -2.0, 0.0).normalize();
        assert_relative_eq!(pi2.normal.dot(&ac).abs(), 1.0, epsilon = 1e-12);
        assert!(pi2.normal.z.abs() < 1e-12 && pi2.direction.z.abs() < 1e-12);
    }

    #[test]
    fn every_plane_contains_its_altitude() {
        let tri = ControlTriangle::new(
            Point3::new(0.3, 1.1, -0.2),
            Point3::new(-0.7, 0.1, 0.4),
            Point3::new(1.2, -0.4, 0.9),
        )
        .unwrap();
        for v in Vertex::ALL {
            let pl = vertical_plane(&tri, v);
            assert!(plane_membership(&pl, &tri.point(v)).abs() < 1e-12);
            assert!(plane_membership(&pl, &(tri.point(v) + tri.normal() * 3.0)).abs() < 1e-12);
            let (p, q) = v.others();
            assert!(pl.normal.cross(&(tri.point(q) - tri.point(p))).norm() < 1e-12);
        }
    }

    #[test]
    fn skew_surface_fixtures() {
        let tri = sc1();
        let surf = SkewedDangerCylinder::new(&tri, Vertex::A);
        // y = 0 leaves −z²(e² − a·e) = 2z².
        assert_relative_eq!(surf.value_canonical(&Point3::new(0.7, 0.0, 1.5)), 2.0 * 2.25, epsilon = 1e-12);
        // z = 0 on the circle.
        let cyl = danger_cylinder(tri.canonical_frame());
        for t in [0.1, 1.0, 2.5, 4.0] {
            let r = cyl.radius();
            let p = Point3::new(cyl.center.0 + r * f64::cos(t), cyl.center.1 + r * f64::sin(t), 0.0);
            assert!(surf.residual_canonical(&p).abs() < 1e-12);
        }
        let eq = SkewedDangerCylinder::new(&eq1(), Vertex::A);
        assert!(eq.residual_canonical(&Point3::new(0.5, 3f64.sqrt() / 6.0, 1.0)).abs() > 1e-3);
    }

    #[test]
    fn samples_lie_on_their_locus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let region = SamplingRegion::default();
        for tri in [eq1(), sc1()] {
            for locus in [
                Locus::DangerCylinder,
                Locus::VerticalPlane(Vertex::A),
                Locus::VerticalPlane(Vertex::C),
                Locus::SkewedCylinder(Vertex::A),
                Locus::SkewedCylinder(Vertex::B),
            ] {
                for _ in 0..50 {
                    let p = sample_locus(locus, &tri, &mut rng, &region).unwrap();
                    let m = locus_membership(&tri, locus, &p);
                    assert!(m.abs() < 1e-12, "{locus}: {m}");
                }
            }
        }
        let eq = eq1();
        let p = sample_locus(Locus::VerticalPlane(Vertex::A), &eq, &mut rng, &region).unwrap();
        assert_relative_eq!(p.x, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn impossible_region_reports_sampling_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let region = SamplingRegion { margin: 0.0, z_min: 1e6, z_max: 1e6 };
        assert!(matches!(
            sample_locus(Locus::SkewedCylinder(Vertex::A), &sc1(), &mut rng, &region),
            Err(Error::SamplingFailure(_))
        ));
    }
}
