//! From quadrant-I conic intersections to distance triplets and optical centers.

use crate::conic::{build_conics, intersect_conics, quadrant_one_filter, IntersectOptions};
use crate::error::{Error, Result};
use crate::types::{ControlTriangle, Point3, RatioPair, SolutionTriplet, Sides, Tolerances, ViewAngles};

/// Normalized left-minus-right values of the three distance constraints
/// `(r_c, r_b, r_a)`:
///
/// ```text
/// s1² + s2² − 2cosγ·s1·s2 = c²
/// s1² + s3² − 2cosβ·s1·s3 = b²
/// s2² + s3² − 2cosα·s2·s3 = a²
/// ```
pub fn constraint_residuals(t: &SolutionTriplet, sides: Sides, angles: ViewAngles) -> [f64; 3] {
    let SolutionTriplet { s1, s2, s3 } = *t;
    let Sides { a, b, c } = sides;
    let ViewAngles { cos_alpha, cos_beta, cos_gamma } = angles;
    [
        (s1 * s1 + s2 * s2 - 2.0 * cos_gamma * s1 * s2 - c * c) / (c * c),
        (s1 * s1 + s3 * s3 - 2.0 * cos_beta * s1 * s3 - b * b) / (b * b),
        (s2 * s2 + s3 * s3 - 2.0 * cos_alpha * s2 * s3 - a * a) / (a * a),
    ]
}

pub fn max_residual(t: &SolutionTriplet, sides: Sides, angles: ViewAngles) -> f64 {
    constraint_residuals(t, sides, angles).iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Distances for a quadrant-I ratio point:
/// `s1 = a / sqrt(u² + v² − 2cosα·uv)`, `s2 = u·s1`, `s3 = v·s1`.
pub fn triplet_from_ratio(rp: &RatioPair, sides: Sides, angles: ViewAngles, tol: f64) -> Result<SolutionTriplet> {
    let (u, v) = (rp.u, rp.v);
    let radicand = u * u + v * v - 2.0 * angles.cos_alpha * u * v;
    if !(u > 0.0 && v > 0.0) || !(radicand > 0.0) {
        return Err(Error::InfeasibleRatio { u, v });
    }
    let s1 = sides.a / radicand.sqrt();
    let t = SolutionTriplet::new(s1, u * s1, v * s1);
    let res = max_residual(&t, sides, angles);
    if !(res <= tol) {
        return Err(Error::InconsistentInput(res));
    }
    Ok(t)
}

/// One solution together with the ratio point it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub triplet: SolutionTriplet,
    pub ratio: RatioPair,
    /// The conics touch here, so the solution is a repeated one.
    pub repeated: bool,
    /// Spread of the merged roots (0 for simple solutions).
    pub root_gap: f64,
}

/// Every positive solution of one scene, sorted by ascending `s1`, then `s2`,
/// then `s3` (compared at ten digits relative to the triangle scale).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    pub triangle: ControlTriangle,
    pub angles: ViewAngles,
    pub solutions: Vec<Solution>,
}

impl SolutionSet {
    /// Number of distinct solutions.
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn repeated_flags(&self) -> Vec<bool> {
        self.solutions.iter().map(|s| s.repeated).collect()
    }

    pub fn triplets(&self) -> Vec<SolutionTriplet> {
        self.solutions.iter().map(|s| s.triplet).collect()
    }
}

/// Solve a scene: conics → intersections → quadrant I → triplets.
pub fn solve(tri: &ControlTriangle, angles: ViewAngles, tol: &Tolerances) -> Result<SolutionSet> {
    let sides = tri.sides();
    let pair = build_conics(sides, angles);
    let set = intersect_conics(&pair, &IntersectOptions::from(*tol))?;
    let gaps: Vec<(RatioPair, f64)> = set.points.iter().copied().zip(set.gaps.iter().copied()).collect();
    let mut solutions = Vec::new();
    for rp in quadrant_one_filter(&set, tol.quadrant_eps) {
        let gap = gaps.iter().find(|(p, _)| *p == rp).map_or(0.0, |(_, g)| *g);
        let triplet = triplet_from_ratio(&rp, sides, angles, tol.residual)?;
        solutions.push(Solution { triplet, ratio: rp, repeated: rp.multiplicity >= 2, root_gap: gap });
    }
    // Quantized keys keep the order stable when distances tie up to rounding.
    let scale = tri.scale();
    let key = |t: &SolutionTriplet| t.as_array().map(|s| (s / scale * 1e10).round() as i64);
    solutions.sort_by_key(|s| key(&s.triplet));
    Ok(SolutionSet { triangle: *tri, angles, solutions })
}

/// The two optical centers at distances `(s1, s2, s3)` from `(A, B, C)`.
///
/// They are mirror images across the base plane; the first one has positive
/// height in the canonical frame.
pub fn recover_centers(t: &SolutionTriplet, tri: &ControlTriangle) -> Result<(Point3, Point3)> {
    let frame = tri.canonical_frame();
    let (a, e, f) = (frame.a, frame.e, frame.f);
    let SolutionTriplet { s1, s2, s3 } = *t;
    let x = (s2 * s2 - s3 * s3 + a * a) / (2.0 * a);
    let y = (s2 * s2 - s1 * s1 + e * e + f * f - 2.0 * e * x) / (2.0 * f);
    let z2 = s2 * s2 - x * x - y * y;
    let scale = tri.scale().max(s1).max(s2).max(s3);
    if !(z2 >= -1e-9 * scale * scale) {
        return Err(Error::InfeasibleTriplet(z2));
    }
    let z = z2.max(0.0).sqrt();
    Ok((frame.to_world(&Point3::new(x, y, z)), frame.to_world(&Point3::new(x, y, -z))))
}
