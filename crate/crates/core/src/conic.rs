//! The two characteristic conics in the ratio plane `(u, v)` and their
//! intersection.
//!
//! Intersection eliminates `v` with the Sylvester resultant of the two conics
//! viewed as quadratics in `v`, finds the roots of the resulting quartic in `u`
//! from companion-matrix eigenvalues, back-substitutes for `v`, and polishes
//! every point with Newton's method on the original pair of equations.
//! Roots closer than the cluster threshold are merged into one point carrying
//! their summed multiplicity; a merged point is a tangency of the conics.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::types::{RatioPair, Sides, Tolerances, ViewAngles};

/// `F(u, v) = vv·v² + uv·u·v + uu·u² + u·u + v·v + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub vv: f64,
    pub uv: f64,
    pub uu: f64,
    pub u: f64,
    pub v: f64,
    pub c: f64,
}

impl Conic {
    /// Coefficients in the order `(vv, uv, uu, u, v, c)`.
    pub fn from_array(k: [f64; 6]) -> Conic {
        Conic { vv: k[0], uv: k[1], uu: k[2], u: k[3], v: k[4], c: k[5] }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.vv, self.uv, self.uu, self.u, self.v, self.c]
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.vv * v * v + self.uv * u * v + self.uu * u * u + self.u * u + self.v * v + self.c
    }

    /// `(∂F/∂u, ∂F/∂v)`.
    pub fn gradient(&self, u: f64, v: f64) -> (f64, f64) {
        (self.uv * v + 2.0 * self.uu * u + self.u, 2.0 * self.vv * v + self.uv * u + self.v)
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn scaled(&self, k: f64) -> Conic {
        Conic::from_array(self.as_array().map(|c| c * k))
    }

    /// Rescaled to unit max-norm.
    pub fn normalized(&self) -> Conic {
        let m = self.max_abs();
        if m == 0.0 {
            *self
        } else {
            self.scaled(1.0 / m)
        }
    }

    pub fn sub(&self, other: &Conic) -> Conic {
        let (a, b) = (self.as_array(), other.as_array());
        Conic::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }

    /// `|F(u, v)|` relative to the coefficient scale and monomial size.
    pub fn scaled_residual(&self, u: f64, v: f64) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.eval(u, v).abs() / (m * (1.0 + u * u + v * v))
    }

    /// `F(u, ·)` as the quadratic `(A, B, C)` in `v`.
    fn in_v(&self, u: f64) -> (f64, f64, f64) {
        (self.vv, self.uv * u + self.v, self.uu * u * u + self.u * u + self.c)
    }
}

/// The two characteristic conics of a scene together with their inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicPair {
    pub c1: Conic,
    pub c2: Conic,
    pub sides: Sides,
    pub angles: ViewAngles,
}

/// Build the pair
/// `C1: (a²−b²)v² + 2b²cosα·uv − b²u² − 2a²cosβ·v + a²` and
/// `C2: (a²−c²)u² + 2c²cosα·uv − c²v² − 2a²cosγ·u + a²`.
pub fn build_conics(sides: Sides, angles: ViewAngles) -> ConicPair {
    let (a2, b2, c2) = (sides.a * sides.a, sides.b * sides.b, sides.c * sides.c);
    let ViewAngles { cos_alpha, cos_beta, cos_gamma } = angles;
    let c1 = Conic {
        vv: a2 - b2,
        uv: 2.0 * b2 * cos_alpha,
        uu: -b2,
        u: 0.0,
        v: -2.0 * a2 * cos_beta,
        c: a2,
    };
    let c2 = Conic {
        vv: -c2,
        uv: 2.0 * c2 * cos_alpha,
        uu: a2 - c2,
        u: -2.0 * a2 * cos_gamma,
        v: 0.0,
        c: a2,
    };
    ConicPair { c1, c2, sides, angles }
}

/// `C2 − C1` in closed form. It passes through the origin and carries every
/// common point of the pair.
pub fn difference_conic(pair: &ConicPair) -> Conic {
    let Sides { a, b, c } = pair.sides;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let ViewAngles { cos_alpha, cos_beta, cos_gamma } = pair.angles;
    Conic {
        vv: -(a2 - b2 + c2),
        uv: 2.0 * (c2 - b2) * cos_alpha,
        uu: a2 + b2 - c2,
        u: -2.0 * a2 * cos_gamma,
        v: 2.0 * a2 * cos_beta,
        c: 0.0,
    }
}

/// Knobs for [`intersect_conics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectOptions {
    /// Residual (coefficient-scaled) every returned point must reach.
    pub tol: f64,
    /// Scaled distance under which roots merge.
    pub cluster: f64,
    /// Relative singular-value threshold for the proportional-pencil test.
    pub rank: f64,
    pub max_iter: usize,
}

impl Default for IntersectOptions {
    fn default() -> Self {
        IntersectOptions::from(Tolerances::default())
    }
}

impl From<Tolerances> for IntersectOptions {
    fn from(t: Tolerances) -> Self {
        IntersectOptions { tol: t.residual, cluster: t.cluster, rank: t.rank, max_iter: 50 }
    }
}

/// Real intersections of a conic pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionSet {
    /// Distinct points sorted by `(u, v)`.
    pub points: Vec<RatioPair>,
    /// Spread of the merged roots behind each point (0 for simple points).
    pub gaps: Vec<f64>,
    /// Real intersections counted with multiplicity.
    pub real_count: u32,
    /// Roots of the eliminant that are genuinely complex.
    pub complex_count: u32,
}

impl IntersectionSet {
    pub fn empty() -> IntersectionSet {
        IntersectionSet { points: Vec::new(), gaps: Vec::new(), real_count: 0, complex_count: 0 }
    }
}

/// Width below which nearby eliminant roots may be one rounded double root.
const NEAR_REAL: f64 = 1e-4;

/// Residual above which a polished point has not converged to rounding level.
const STALLED: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct RootGroup {
    u: f64,
    mult: u32,
    gap: f64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    u: f64,
    v: f64,
    residual: f64,
    crossing: f64,
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}

fn close2(p: (f64, f64), q: (f64, f64), tol: f64) -> bool {
    let d = (p.0 - q.0).hypot(p.1 - q.1);
    d <= tol * (1.0 + p.0.abs().max(p.1.abs()).max(q.0.abs()).max(q.1.abs()))
}

/// Both conics as rows of a 2×6 matrix: ratio of singular values.
fn pencil_rank_ratio(p: &Conic, q: &Conic) -> f64 {
    let unit = |c: &Conic| {
        let a = c.as_array();
        let n = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        a.map(|x| x / n)
    };
    let (p, q) = (unit(p), unit(q));
    let d: f64 = p.iter().zip(&q).map(|(x, y)| x * y).sum();
    let sign = if d >= 0.0 { 1.0 } else { -1.0 };
    let diff = p.iter().zip(&q).map(|(x, y)| (x - sign * y).powi(2)).sum::<f64>().sqrt();
    // σ_min / σ_max = sqrt((1 − |d|) / (1 + |d|)) with 1 − |d| = |p ∓ q|² / 2.
    diff / (2.0 * (1.0 + d.abs())).sqrt()
}

/// Sylvester resultant of the two conics with respect to `v`.
fn eliminant(p: &Conic, q: &Conic) -> Poly {
    let a1 = Poly::constant(p.vv);
    let b1 = Poly::new(vec![p.v, p.uv]);
    let c1 = Poly::new(vec![p.c, p.u, p.uu]);
    let a2 = Poly::constant(q.vv);
    let b2 = Poly::new(vec![q.v, q.uv]);
    let c2 = Poly::new(vec![q.c, q.u, q.uu]);
    let ac = a1.mul(&c2).sub(&a2.mul(&c1));
    let ab = a1.mul(&b2).sub(&a2.mul(&b1));
    let bc = b1.mul(&c2).sub(&b2.mul(&c1));
    ac.mul(&ac).sub(&ab.mul(&bc))
}

/// Roots of the eliminant, with near-double roots re-derived from the
/// critical point between them (their mean is well conditioned, their
/// difference is not).
fn eliminant_roots(r: &Poly) -> Vec<Complex<f64>> {
    let mut roots = r.roots();
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let d1 = r.derivative();
    let d2 = d1.derivative();
    let window = 1e-4;
    let mut refined = vec![false; roots.len()];
    for i in 0..roots.len() {
        if refined[i] {
            continue;
        }
        let zi = roots[i];
        if zi.im.abs() > window * (1.0 + zi.re.abs()) {
            continue;
        }
        let partner = (i + 1..roots.len())
            .filter(|&j| !refined[j])
            .filter(|&j| roots[j].im.abs() <= window * (1.0 + roots[j].re.abs()))
            .filter(|&j| (roots[j] - zi).norm() < window * (1.0 + zi.re.abs()))
            .min_by(|&j, &k| (roots[j] - zi).norm().total_cmp(&(roots[k] - zi).norm()));
        let Some(j) = partner else { continue };
        let mid = 0.5 * (zi.re + roots[j].re);
        let crit = d1.polish(mid, 30);
        if !close(crit, mid, 1e-3) {
            continue;
        }
        let curv = d2.eval(crit);
        if curv == 0.0 {
            continue;
        }
        let disc = -2.0 * r.eval(crit) / curv;
        let h = disc.abs().sqrt();
        if disc >= 0.0 {
            roots[i] = Complex::new(crit - h, 0.0);
            roots[j] = Complex::new(crit + h, 0.0);
        } else {
            roots[i] = Complex::new(crit, -h);
            roots[j] = Complex::new(crit, h);
        }
        refined[i] = true;
        refined[j] = true;
    }
    for (z, done) in roots.iter_mut().zip(&refined) {
        if !done && z.im == 0.0 {
            z.re = r.polish(z.re, 8);
        }
    }
    roots
}

/// Merge real roots (and complex pairs with negligible imaginary part) into groups.
fn group_roots(roots: &[Complex<f64>], cluster: f64) -> (Vec<RootGroup>, u32) {
    let mut reals: Vec<f64> = Vec::new();
    let mut complex = 0;
    let mut groups = Vec::new();
    let mut seen_pair = Vec::new();
    for z in roots {
        if z.im == 0.0 {
            reals.push(z.re);
        } else if z.im.abs() <= NEAR_REAL * (1.0 + z.re.abs()) {
            // A conjugate pair hugging the real axis may be a double real root;
            // polishing decides.
            if z.im > 0.0 {
                seen_pair.push(RootGroup { u: z.re, mult: 2, gap: 2.0 * z.im });
            }
        } else {
            complex += 1;
        }
    }
    reals.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < reals.len() {
        let mut j = i + 1;
        while j < reals.len() && close(reals[j - 1], reals[j], cluster) {
            j += 1;
        }
        let slice = &reals[i..j];
        let u = slice.iter().sum::<f64>() / slice.len() as f64;
        groups.push(RootGroup { u, mult: slice.len() as u32, gap: slice[slice.len() - 1] - slice[0] });
        i = j;
    }
    groups.extend(seen_pair);
    groups.sort_by(|x, y| x.u.total_cmp(&y.u));
    (groups, complex)
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    if a.abs() < 1e-12 {
        if b.abs() < 1e-12 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // Slightly negative discriminants come from a tangency.
        if disc > -1e-8 * (b * b + (4.0 * a * c).abs()) {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn pair_residual(p: &Conic, q: &Conic, u: f64, v: f64) -> f64 {
    p.scaled_residual(u, v).max(q.scaled_residual(u, v))
}

/// `|sin|` of the angle between the two curves at a point.
fn crossing(p: &Conic, q: &Conic, u: f64, v: f64) -> f64 {
    let (g1, g2) = (p.gradient(u, v), q.gradient(u, v));
    let n = g1.0.hypot(g1.1) * g2.0.hypot(g2.1);
    if n == 0.0 {
        0.0
    } else {
        (g1.0 * g2.1 - g1.1 * g2.0).abs() / n
    }
}

/// Damped Newton on `(F1, F2) = 0`; returns the best iterate.
fn polish_point(p: &Conic, q: &Conic, u0: f64, v0: f64, max_iter: usize) -> (f64, f64, f64) {
    let (mut u, mut v) = (u0, v0);
    let mut res = pair_residual(p, q, u, v);
    for _ in 0..max_iter {
        if res == 0.0 {
            break;
        }
        let (f1, f2) = (p.eval(u, v), q.eval(u, v));
        let (j11, j12) = p.gradient(u, v);
        let (j21, j22) = q.gradient(u, v);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let du = (f1 * j22 - f2 * j12) / det;
        let dv = (j11 * f2 - j21 * f1) / det;
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let (nu, nv) = (u - step * du, v - step * dv);
            let nr = pair_residual(p, q, nu, nv);
            if nr.is_finite() && nr < res {
                u = nu;
                v = nv;
                res = nr;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (u, v, res)
}

/// All real intersections of the pair, with multiplicities.
///
/// Fails with [`Error::DegeneratePencil`] when the conics are proportional or
/// share a component, which happens exactly for cocyclic configurations.
pub fn intersect_conics(pair: &ConicPair, opts: &IntersectOptions) -> Result<IntersectionSet> {
    let p = pair.c1.normalized();
    let q = pair.c2.normalized();
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegeneratePencil("zero conic".into()));
    }
    let ratio = pencil_rank_ratio(&p, &q);
    if ratio < opts.rank {
        return Err(Error::DegeneratePencil(format!("conics are proportional (σ ratio {ratio:e})")));
    }
    let r = eliminant(&p, &q);
    let scale = r.max_abs();
    if scale < opts.rank {
        return Err(Error::DegeneratePencil(format!("eliminant vanishes identically (max coefficient {scale:e})")));
    }
    let r = r.scale(1.0 / scale).trimmed(1e-14);
    let roots = eliminant_roots(&r);
    let (groups, _) = group_roots(&roots, opts.cluster);

    // Groups closer than this in u are one cluster for bookkeeping: a double
    // root of the eliminant can come back split by more than `cluster`.
    const SPAN: f64 = NEAR_REAL;
    let mut clusters: Vec<Vec<RootGroup>> = Vec::new();
    for g in &groups {
        match clusters.last_mut() {
            Some(c) if close(c[c.len() - 1].u, g.u, SPAN) => c.push(*g),
            _ => clusters.push(vec![*g]),
        }
    }

    let mut merged: Vec<(Candidate, u32, f64)> = Vec::new();
    for cl in &clusters {
        let (lo, hi) = (cl[0].u, cl[cl.len() - 1].u);
        let mult: u32 = cl.iter().map(|g| g.mult).sum();
        let spread = cl.iter().map(|g| g.gap).fold(hi - lo, f64::max);
        let mut cands: Vec<Candidate> = Vec::new();
        for g in cl {
            for conic in [&q, &p] {
                let (a, b, c) = conic.in_v(g.u);
                for v in quadratic_roots(a, b, c) {
                    let (u, v, residual) = polish_point(&p, &q, g.u, v, opts.max_iter);
                    if residual > opts.tol || !u.is_finite() || !v.is_finite() {
                        continue;
                    }
                    // Newton may wander onto a point owned by another cluster.
                    if !(close(u, lo, SPAN) || close(u, hi, SPAN) || (lo..=hi).contains(&u)) {
                        continue;
                    }
                    let cand = Candidate { u, v, residual, crossing: crossing(&p, &q, u, v) };
                    // Near a tangency Newton stalls short of the point; a
                    // stalled copy is merged with its neighbour, while two
                    // converged points stay distinct however close they are.
                    let same = |c: &Candidate| {
                        close2((c.u, c.v), (u, v), opts.cluster)
                            || (close2((c.u, c.v), (u, v), SPAN) && c.residual.max(residual) > STALLED)
                    };
                    match cands.iter_mut().find(|c| same(c)) {
                        Some(existing) if existing.residual > residual => *existing = cand,
                        Some(_) => {}
                        None => cands.push(cand),
                    }
                }
            }
        }
        if cands.is_empty() {
            continue;
        }
        cands.sort_by(|x, y| x.residual.total_cmp(&y.residual));
        cands.truncate(mult as usize);
        // Surplus multiplicity belongs to the points where the curves touch.
        let mut mults = vec![1u32; cands.len()];
        let mut order: Vec<usize> = (0..cands.len()).collect();
        order.sort_by(|&i, &j| cands[i].crossing.total_cmp(&cands[j].crossing));
        let mut extra = mult - cands.len() as u32;
        let mut k = 0;
        while extra > 0 {
            mults[order[k % order.len()]] += 1;
            extra -= 1;
            k += 1;
        }
        for (c, m) in cands.into_iter().zip(mults) {
            let gap = if m > 1 { spread } else { 0.0 };
            match merged.iter_mut().find(|(e, _, _)| close2((e.u, e.v), (c.u, c.v), opts.cluster)) {
                Some(entry) => {
                    entry.1 += m;
                    entry.2 = entry.2.max(gap).max((entry.0.u - c.u).hypot(entry.0.v - c.v));
                }
                None => merged.push((c, m, gap)),
            }
        }
    }
    merged.sort_by(|x, y| x.0.u.total_cmp(&y.0.u).then(x.0.v.total_cmp(&y.0.v)));

    let real_count: u32 = merged.iter().map(|m| m.1).sum();
    let complex_count = (roots.len() as u32).saturating_sub(real_count);
    Ok(IntersectionSet {
        points: merged.iter().map(|(c, m, _)| RatioPair::with_multiplicity(c.u, c.v, *m)).collect(),
        gaps: merged.iter().map(|m| m.2).collect(),
        real_count,
        complex_count,
    })
}

/// Points with `u > eps` and `v > eps`.
pub fn quadrant_one_filter(set: &IntersectionSet, eps: f64) -> Vec<RatioPair> {
    set.points.iter().copied().filter(|p| p.in_quadrant_one(eps)).collect()
}

/// Points of multiplicity two or more, i.e. tangencies of the pair.
pub fn tangency_flags(set: &IntersectionSet) -> Vec<bool> {
    set.points.iter().map(|p| p.multiplicity >= 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eq1_pair() -> ConicPair {
        build_conics(Sides { a: 1.0, b: 1.0, c: 1.0 }, ViewAngles::new(0.625, 0.625, 0.625).unwrap())
    }

    #[test]
    fn eq1_coefficients() {
        let pair = eq1_pair();
        assert_eq!(pair.c1.as_array(), [0.0, 1.25, -1.0, 0.0, -1.25, 1.0]);
        assert_eq!(pair.c2.as_array(), [-1.0, 1.25, 0.0, -1.25, 0.0, 1.0]);
        for (u, v) in [(1.0, 1.0), (4.0, 4.0), (1.0, 0.25), (0.25, 1.0)] {
            assert_eq!(pair.c1.eval(u, v), 0.0);
            assert_eq!(pair.c2.eval(u, v), 0.0);
        }
    }

    #[test]
    fn eq1_difference_conic_factors() {
        let pair = eq1_pair();
        let d = difference_conic(&pair);
        assert_eq!(d.as_array(), [-1.0, 0.0, 1.0, -1.25, 1.25, 0.0]);
        assert_eq!(d.as_array(), pair.c2.sub(&pair.c1).as_array());
        // (u − v)(u + v − 1.25) expanded.
        for (u, v) in [(0.3, 0.7), (2.0, -1.0), (1.0, 0.25), (0.25, 1.0)] {
            assert_relative_eq!(d.eval(u, v), (u - v) * (u + v - 1.25), epsilon = 1e-14);
        }
        assert_eq!(d.eval(1.0, 0.25), 0.0);
        assert_eq!(d.eval(0.25, 1.0), 0.0);
    }

    #[test]
    fn eq1_intersections() {
        let set = intersect_conics(&eq1_pair(), &IntersectOptions::default()).unwrap();
        let expected = [(0.25, 1.0), (1.0, 0.25), (1.0, 1.0), (4.0, 4.0)];
        assert_eq!(set.points.len(), 4, "{set:?}");
        assert_eq!(set.real_count, 4);
        for (p, (u, v)) in set.points.iter().zip(expected) {
            assert!((p.u - u).abs() < 1e-9 && (p.v - v).abs() < 1e-9, "{p:?}");
            assert_eq!(p.multiplicity, 1);
        }
        assert_eq!(quadrant_one_filter(&set, 1e-10).len(), 4);
        assert!(tangency_flags(&set).iter().all(|f| !f));
    }

    #[test]
    fn quadrant_filter_and_flags_on_plain_sets() {
        let set = IntersectionSet {
            points: vec![RatioPair::new(1.0, 1.0), RatioPair::new(-0.3, 2.0)],
            gaps: vec![0.0, 0.0],
            real_count: 2,
            complex_count: 0,
        };
        assert_eq!(quadrant_one_filter(&set, 1e-10), vec![RatioPair::new(1.0, 1.0)]);
        assert!(quadrant_one_filter(&IntersectionSet::empty(), 1e-10).is_empty());
        assert!(tangency_flags(&IntersectionSet::empty()).is_empty());
    }

    #[test]
    fn proportional_conics_are_degenerate() {
        let c = Conic::from_array([1.0, 0.5, -2.0, 0.3, 0.1, -1.0]);
        let pair = ConicPair {
            c1: c,
            c2: c.scaled(-3.0),
            sides: Sides { a: 1.0, b: 1.0, c: 1.0 },
            angles: ViewAngles::new(0.5, 0.5, 0.5).unwrap(),
        };
        assert!(matches!(
            intersect_conics(&pair, &IntersectOptions::default()),
            Err(Error::DegeneratePencil(_))
        ));
    }

    #[test]
    fn cocyclic_pencil_shares_a_line() {
        // O on the circumcircle of EQ1 below BC: α = 120°, β = γ = 60°.
        let pair = build_conics(Sides { a: 1.0, b: 1.0, c: 1.0 }, ViewAngles::new(-0.5, 0.5, 0.5).unwrap());
        assert!(matches!(
            intersect_conics(&pair, &IntersectOptions::default()),
            Err(Error::DegeneratePencil(_))
        ));
    }

    #[test]
    fn quadratic_roots_cover_linear_and_tangent_cases() {
        let mut r = quadratic_roots(1.0, -3.0, 2.0);
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
        assert_eq!(quadratic_roots(0.0, 2.0, -1.0), vec![0.5]);
        assert_eq!(quadratic_roots(1.0, -2.0, 1.0 + 1e-12).len(), 1);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
    }
}
