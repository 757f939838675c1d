//! Side-sharing and point-sharing solution pairs.
//!
//! Two solutions form a *side-sharing* pair when, with their optical centers
//! superposed, two of the three control points coincide (equal distances to
//! them), and a *point-sharing* pair when exactly one does.
//!
//! For the side `BC` and the point `A` the pair conditions are lines in the
//! ratio plane:
//!
//! ```text
//! side BC:  cosγ·u − cosβ·v = 0
//! point A:  (cos∠ACB / cosγ)·b·u + (cos∠ABC / cosβ)·c·v − a = 0
//! ```
//!
//! The other sides and points reuse the same formulas after cyclic relabelling
//! (see [`crate::types`]) with ratios re-expressed against the new base
//! distance.

use std::fmt;
use std::str::FromStr;

use crate::conic::{build_conics, difference_conic, Conic};
use crate::error::{Error, Result};
use crate::solver::{max_residual, SolutionSet};
use crate::types::{ControlTriangle, RatioPair, SolutionTriplet, Sides, Vertex, ViewAngles};

/// Denominator cosines below this make the point-share line undefined.
const RIGHT_ANGLE_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SharingKind {
    Side,
    Point,
}

/// A side is named by its opposite vertex: `Side + A` is the side `BC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SharingLabel {
    pub kind: SharingKind,
    pub vertex: Vertex,
}

impl SharingLabel {
    pub const ALL: [SharingLabel; 6] = [
        SharingLabel::side(Vertex::A),
        SharingLabel::side(Vertex::B),
        SharingLabel::side(Vertex::C),
        SharingLabel::point(Vertex::A),
        SharingLabel::point(Vertex::B),
        SharingLabel::point(Vertex::C),
    ];

    pub const fn side(opposite: Vertex) -> SharingLabel {
        SharingLabel { kind: SharingKind::Side, vertex: opposite }
    }

    pub const fn point(vertex: Vertex) -> SharingLabel {
        SharingLabel { kind: SharingKind::Point, vertex }
    }

    /// The label the remaining pair of a four-solution scene must carry.
    pub fn companion(self) -> SharingLabel {
        let kind = match self.kind {
            SharingKind::Side => SharingKind::Point,
            SharingKind::Point => SharingKind::Side,
        };
        SharingLabel { kind, vertex: self.vertex }
    }
}

impl fmt::Display for SharingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SharingKind::Side => {
                let (p, q) = self.vertex.others();
                let (p, q) = if p < q { (p, q) } else { (q, p) };
                // Keep the conventional spellings BC, CA, AB.
                match self.vertex {
                    Vertex::B => write!(f, "sideCA"),
                    _ => write!(f, "side{p}{q}"),
                }
            }
            SharingKind::Point => write!(f, "point{}", self.vertex),
        }
    }
}

impl FromStr for SharingLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SharingLabel::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown sharing label `{s}`")))
    }
}

/// `cosγ·u − cosβ·v` in the ratio basis of the relabelled problem.
pub fn side_share_residual(rp: &RatioPair, angles: ViewAngles, opposite: Vertex) -> f64 {
    let r = rp.rebased(opposite);
    let ang = angles.rotated(opposite);
    ang.cos_gamma * r.u - ang.cos_beta * r.v
}

/// `(cos∠ACB / cosγ)·b·u + (cos∠ABC / cosβ)·c·v − a`, relabelled for `vertex`.
pub fn point_share_residual(rp: &RatioPair, tri: &ControlTriangle, angles: ViewAngles, vertex: Vertex) -> Result<f64> {
    let (k1, k2, a) = point_line(tri, angles, vertex)?;
    let r = rp.rebased(vertex);
    Ok(k1 * r.u + k2 * r.v - a)
}

/// [`point_share_residual`] divided by the relabelled side `a`.
pub fn point_share_residual_normalized(
    rp: &RatioPair,
    tri: &ControlTriangle,
    angles: ViewAngles,
    vertex: Vertex,
) -> Result<f64> {
    let a = tri.sides().rotated(vertex).a;
    Ok(point_share_residual(rp, tri, angles, vertex)? / a)
}

/// Coefficients `(k_u, k_v, a)` of the point-share line for `vertex`.
fn point_line(tri: &ControlTriangle, angles: ViewAngles, vertex: Vertex) -> Result<(f64, f64, f64)> {
    let sides = tri.sides().rotated(vertex);
    let interior = tri.rotated(vertex).interior_cosines();
    let ang = angles.rotated(vertex);
    for c in [ang.cos_beta, ang.cos_gamma] {
        if c.abs() < RIGHT_ANGLE_EPS {
            return Err(Error::RightAngleDegeneracy(c));
        }
    }
    Ok((interior[2] / ang.cos_gamma * sides.b, interior[1] / ang.cos_beta * sides.c, sides.a))
}

fn side_residual_of(t: &SolutionTriplet, angles: ViewAngles, opposite: Vertex) -> f64 {
    side_share_residual(&t.ratio(), angles, opposite)
}

/// Mate of `t` across the side opposite `opposite`:
/// `(2cosγ·s2 − s1, s2, s3)` in the relabelled problem, or `None` when the
/// new distance is not positive.
pub fn construct_side_mate(
    t: &SolutionTriplet,
    angles: ViewAngles,
    opposite: Vertex,
    tol: f64,
) -> Result<Option<SolutionTriplet>> {
    let res = side_residual_of(t, angles, opposite);
    if !(res.abs() <= tol) {
        return Err(Error::NotOnLine(res));
    }
    let r = t.rotated(opposite);
    let ang = angles.rotated(opposite);
    let s1 = 2.0 * ang.cos_gamma * r.s2 - r.s1;
    if s1 <= 0.0 {
        return Ok(None);
    }
    Ok(Some(SolutionTriplet::new(s1, r.s2, r.s3).unrotated(opposite)))
}

/// Whether the subtended angle opposite the shared side is smaller than the
/// interior angle at the free vertex (`α < ∠BAC` for side `BC`).
pub fn side_mate_condition(tri: &ControlTriangle, angles: ViewAngles, opposite: Vertex) -> bool {
    let ang = angles.rotated(opposite);
    let interior = tri.rotated(opposite).interior_cosines();
    ang.cos_alpha > interior[0]
}

/// Mate of `t` sharing `vertex`: `(s1, 2cosγ·s1 − s2, 2cosβ·s1 − s3)` in the
/// relabelled problem, or `None` unless both new distances are positive.
pub fn construct_point_mate(
    t: &SolutionTriplet,
    tri: &ControlTriangle,
    angles: ViewAngles,
    vertex: Vertex,
    tol: f64,
) -> Result<Option<SolutionTriplet>> {
    let res = point_share_residual_normalized(&t.ratio(), tri, angles, vertex)?;
    if !(res.abs() <= tol) {
        return Err(Error::NotOnLine(res));
    }
    let r = t.rotated(vertex);
    let ang = angles.rotated(vertex);
    let s2 = 2.0 * ang.cos_gamma * r.s1 - r.s2;
    let s3 = 2.0 * ang.cos_beta * r.s1 - r.s3;
    if s2 <= 0.0 || s3 <= 0.0 {
        return Ok(None);
    }
    Ok(Some(SolutionTriplet::new(r.s1, s2, s3).unrotated(vertex)))
}

/// `β < ∠ABC` and `γ < ∠ACB` in the problem relabelled for `vertex`.
pub fn point_mate_condition(tri: &ControlTriangle, angles: ViewAngles, vertex: Vertex) -> bool {
    let ang = angles.rotated(vertex);
    let interior = tri.rotated(vertex).interior_cosines();
    ang.cos_beta > interior[1] && ang.cos_gamma > interior[2]
}

/// Quantities behind the point-sharing sufficiency argument.
///
/// On the point line the value `1 + v² − 2cosβ·v` equals `b² / s1²`, so two
/// solutions on the line share `s1`. `shared_value` is that constant obtained
/// by substituting the line into `C1`; `m`, `n` and `closed_form` are the
/// published constants `N = (cos∠ABC·cosγ / (cos∠ACB·cosβ))²`,
/// `M = a·cos²γ / (c²·cos∠ACB·cos²β)·(b − a / cos∠ACB) + b² / c²` and
/// `(M − N) / (1 − N)`, which do not reproduce `shared_value` in general.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointShareDiagnostics {
    pub m: f64,
    pub n: f64,
    pub closed_form: f64,
    pub shared_value: f64,
    pub lhs1: f64,
    pub lhs2: f64,
}

pub fn point_share_diagnostics(
    rp1: &RatioPair,
    rp2: &RatioPair,
    tri: &ControlTriangle,
    angles: ViewAngles,
    vertex: Vertex,
) -> Result<PointShareDiagnostics> {
    let (k1, k2, a) = point_line(tri, angles, vertex)?;
    let Sides { b, c, .. } = tri.sides().rotated(vertex);
    let interior = tri.rotated(vertex).interior_cosines();
    let ang = angles.rotated(vertex);
    let (cb_int, cc_int) = (interior[1], interior[2]);
    let (ca, cb, cg) = (ang.cos_alpha, ang.cos_beta, ang.cos_gamma);

    let n = (cb_int * cg / (cc_int * cb)).powi(2);
    let m = a * cg * cg / (c * c * cc_int * cb * cb) * (b - a / cc_int) + b * b / (c * c);

    // C1 with u = (a − k2·v) / k1: v² coefficient and constant term.
    let (a2, b2) = (a * a, b * b);
    let lead = (a2 - b2) - 2.0 * b2 * ca * k2 / k1 - b2 * k2 * k2 / (k1 * k1);
    let constant = a2 - b2 * a2 / (k1 * k1);
    let shared_value = 1.0 - constant / lead;

    let lhs = |rp: &RatioPair| {
        let v = rp.rebased(vertex).v;
        1.0 + v * v - 2.0 * cb * v
    };
    Ok(PointShareDiagnostics {
        m,
        n,
        closed_form: (m - n) / (1.0 - n),
        shared_value,
        lhs1: lhs(rp1),
        lhs2: lhs(rp2),
    })
}

/// Two solutions (indices into the set) carrying a sharing label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedPair {
    pub i: usize,
    pub j: usize,
    pub label: SharingLabel,
    /// Largest normalized line residual of the two members.
    pub residual: f64,
}

/// A pair on which the line test and the distance test disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelDisagreement {
    pub i: usize,
    pub j: usize,
    pub label: SharingLabel,
    pub line_test: bool,
    pub distance_test: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairClassification {
    pub pairs: Vec<SharedPair>,
    /// Solutions that are double roots of the conic pair.
    pub repeated: Vec<usize>,
    pub disagreements: Vec<LabelDisagreement>,
}

impl PairClassification {
    pub fn find(&self, label: SharingLabel) -> impl Iterator<Item = &SharedPair> {
        self.pairs.iter().filter(move |p| p.label == label)
    }

    pub fn has_pair(&self, i: usize, j: usize, label: SharingLabel) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        self.pairs.iter().any(|p| p.i == i && p.j == j && p.label == label)
    }
}

/// Normalized line residual of a triplet for a label; `None` if undefined.
pub fn line_residual(
    t: &SolutionTriplet,
    tri: &ControlTriangle,
    angles: ViewAngles,
    label: SharingLabel,
) -> Option<f64> {
    match label.kind {
        SharingKind::Side => Some(side_residual_of(t, angles, label.vertex)),
        SharingKind::Point => point_share_residual_normalized(&t.ratio(), tri, angles, label.vertex).ok(),
    }
}

fn distance_signature(p: &SolutionTriplet, q: &SolutionTriplet, label: SharingLabel, tol: f64) -> bool {
    let eq = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(y.abs());
    let (p, q) = (p.rotated(label.vertex).as_array(), q.rotated(label.vertex).as_array());
    let same = [eq(p[0], q[0]), eq(p[1], q[1]), eq(p[2], q[2])];
    match label.kind {
        SharingKind::Side => !same[0] && same[1] && same[2],
        SharingKind::Point => same[0] && !same[1] && !same[2],
    }
}

/// Every sharing label of every unordered pair of distinct solutions.
///
/// A label is reported only when both members lie on its line within `tol`
/// and the distances show the matching equal/unequal pattern (relative `tol`).
/// Disagreements between the two tests are listed separately.
pub fn classify_solution_set(set: &SolutionSet, tol: f64) -> PairClassification {
    let tri = &set.triangle;
    let angles = set.angles;
    let mut out = PairClassification {
        repeated: set.solutions.iter().enumerate().filter(|(_, s)| s.repeated).map(|(i, _)| i).collect(),
        ..Default::default()
    };
    let n = set.solutions.len();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (set.solutions[i].triplet, set.solutions[j].triplet);
            for label in SharingLabel::ALL {
                let (Some(rp), Some(rq)) =
                    (line_residual(&p, tri, angles, label), line_residual(&q, tri, angles, label))
                else {
                    continue;
                };
                let line_test = rp.abs() <= tol && rq.abs() <= tol;
                let distance_test = distance_signature(&p, &q, label, tol);
                if line_test && distance_test {
                    out.pairs.push(SharedPair { i, j, label, residual: rp.abs().max(rq.abs()) });
                } else if line_test != distance_test {
                    out.disagreements.push(LabelDisagreement { i, j, label, line_test, distance_test });
                }
            }
        }
    }
    out
}

/// Left side of the pair-existence identity for `vertex`, relative to the
/// squared longest side:
/// `2(b²−c²)cosα·cosβ·cosγ − cos²γ(b²−a²−c²) + cos²β(c²−a²−b²)`.
pub fn companion_identity_residual(sides: Sides, angles: ViewAngles, vertex: Vertex) -> f64 {
    let Sides { a, b, c } = sides.rotated(vertex);
    let ang = angles.rotated(vertex);
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let (ca, cb, cg) = (ang.cos_alpha, ang.cos_beta, ang.cos_gamma);
    let value = 2.0 * (b2 - c2) * ca * cb * cg - cg * cg * (b2 - a2 - c2) + cb * cb * (c2 - a2 - b2);
    value / a2.max(b2).max(c2)
}

/// Product of the side line and the point line for `vertex`, as a conic in
/// the relabelled ratio basis.
pub fn line_product(tri: &ControlTriangle, angles: ViewAngles, vertex: Vertex) -> Result<Conic> {
    let (k1, k2, a) = point_line(tri, angles, vertex)?;
    let ang = angles.rotated(vertex);
    let (cb, cg) = (ang.cos_beta, ang.cos_gamma);
    Ok(Conic {
        vv: -cb * k2,
        uv: cg * k2 - cb * k1,
        uu: cg * k1,
        u: -a * cg,
        v: a * cb,
        c: 0.0,
    })
}

/// Largest normalized 2×2 minor of two coefficient vectors; zero iff proportional.
pub fn proportionality_defect(p: &Conic, q: &Conic) -> f64 {
    let (x, y) = (p.as_array(), q.as_array());
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for j in i + 1..6 {
            worst = worst.max((x[i] * y[j] - x[j] * y[i]).abs());
        }
    }
    worst / (nx * ny)
}

/// Defect of the difference conic against the side-line × point-line product.
pub fn factorization_defect(tri: &ControlTriangle, angles: ViewAngles, vertex: Vertex) -> f64 {
    let pair = build_conics(tri.sides().rotated(vertex), angles.rotated(vertex));
    let diff = difference_conic(&pair);
    match line_product(tri, angles, vertex) {
        Ok(prod) => proportionality_defect(&diff, &prod),
        Err(_) => f64::INFINITY,
    }
}

/// One sharing pair of a four-solution scene and what became of the other two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompanionFinding {
    pub given: SharedPair,
    pub remaining: (usize, usize),
    pub expected: SharingLabel,
    pub confirmed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionReport {
    /// False for scenes with two or fewer solutions.
    pub applicable: bool,
    pub has_side_pair: bool,
    pub has_point_pair: bool,
    pub findings: Vec<CompanionFinding>,
    /// Identity residual per vertex `A, B, C`.
    pub identity_residuals: [f64; 3],
    /// Factorization defect per vertex `A, B, C`.
    pub factorization_defects: [f64; 3],
    /// Vertices whose side or point pair was detected.
    pub involved: Vec<Vertex>,
    pub confirmed: bool,
}

impl CompanionReport {
    pub fn summary(&self) -> String {
        if !self.applicable {
            return "no companion claim applicable".into();
        }
        if self.involved.is_empty() {
            return "no sharing pair present".into();
        }
        if self.confirmed {
            "companion structure confirmed".into()
        } else {
            "companion structure NOT confirmed".into()
        }
    }
}

/// Check the companion structure of a classified scene.
///
/// With four solutions, every side pair must leave a point pair on the same
/// vertex and vice versa. For every vertex with a detected pair the identity
/// residual and the factorization defect must stay below `tol`.
pub fn companion_check(set: &SolutionSet, classes: &PairClassification, tol: f64) -> CompanionReport {
    let tri = &set.triangle;
    let angles = set.angles;
    let sides = tri.sides();
    let identity_residuals = Vertex::ALL.map(|v| companion_identity_residual(sides, angles, v));
    let factorization_defects = Vertex::ALL.map(|v| factorization_defect(tri, angles, v));
    let mut involved: Vec<Vertex> = classes.pairs.iter().map(|p| p.label.vertex).collect();
    involved.sort();
    involved.dedup();

    let n = set.count();
    let mut findings = Vec::new();
    if n == 4 {
        for p in &classes.pairs {
            let rest: Vec<usize> = (0..4).filter(|&k| k != p.i && k != p.j).collect();
            let expected = p.label.companion();
            findings.push(CompanionFinding {
                given: *p,
                remaining: (rest[0], rest[1]),
                expected,
                confirmed: classes.has_pair(rest[0], rest[1], expected),
            });
        }
    }
    let applicable = n > 2;
    let algebra_ok = involved.iter().all(|v| {
        identity_residuals[v.index()].abs() < tol && factorization_defects[v.index()] < tol
    });
    CompanionReport {
        applicable,
        has_side_pair: classes.pairs.iter().any(|p| p.label.kind == SharingKind::Side),
        has_point_pair: classes.pairs.iter().any(|p| p.label.kind == SharingKind::Point),
        confirmed: applicable && findings.iter().all(|f| f.confirmed) && algebra_ok,
        findings,
        identity_residuals,
        factorization_defects,
        involved,
    }
}

/// Whether a constructed mate satisfies the distance constraints.
pub fn mate_residual(t: &SolutionTriplet, tri: &ControlTriangle, angles: ViewAngles) -> f64 {
    max_residual(t, tri.sides(), angles)
}
