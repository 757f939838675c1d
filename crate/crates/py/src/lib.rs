//! Python bindings: `import p3p_geometry`.
//!
//! Points are 3-sequences of floats and triangles are 3-sequences of points
//! in the order `A, B, C`. Errors from the core raise `P3PError`, a subclass
//! of `ValueError`.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use p3p_core::lab::{self, TheoremId};
use p3p_core::loci::{self, Locus, SamplingRegion, SkewedDangerCylinder};
use p3p_core::mesh::{skew_mesh as core_skew_mesh, MeshBounds};
use p3p_core::{self as core, Point3, Tolerances, Vertex};

create_exception!(p3p_geometry, P3PError, PyValueError);

fn err(e: core::Error) -> PyErr {
    P3PError::new_err(e.to_string())
}

fn point(p: [f64; 3]) -> Point3 {
    Point3::new(p[0], p[1], p[2])
}

fn arr(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

fn vertex(s: &str) -> PyResult<Vertex> {
    s.parse().map_err(err)
}

fn locus(s: &str) -> PyResult<Locus> {
    let l = match s {
        "danger_cylinder" => Locus::DangerCylinder,
        "pi1" => Locus::VerticalPlane(Vertex::A),
        "pi2" => Locus::VerticalPlane(Vertex::B),
        "pi3" => Locus::VerticalPlane(Vertex::C),
        "skewA" => Locus::SkewedCylinder(Vertex::A),
        "skewB" => Locus::SkewedCylinder(Vertex::B),
        "skewC" => Locus::SkewedCylinder(Vertex::C),
        other => return Err(P3PError::new_err(format!("unknown locus `{other}`"))),
    };
    Ok(l)
}

/// Three non-collinear control points.
#[pyclass(frozen, skip_from_py_object, name = "ControlTriangle", module = "p3p_geometry")]
#[derive(Clone)]
struct PyTriangle {
    inner: core::ControlTriangle,
}

#[pymethods]
impl PyTriangle {
    #[new]
    fn new(points: [[f64; 3]; 3]) -> PyResult<Self> {
        Ok(PyTriangle { inner: core::ControlTriangle::from_arrays(points).map_err(err)? })
    }

    fn points(&self) -> [[f64; 3]; 3] {
        self.inner.points().map(|p| arr(&p))
    }

    /// `(a, b, c) = (|BC|, |AC|, |AB|)`.
    fn sides(&self) -> [f64; 3] {
        self.inner.sides().as_array()
    }

    fn interior_cosines(&self) -> [f64; 3] {
        self.inner.interior_cosines()
    }

    fn scale(&self) -> f64 {
        self.inner.scale()
    }

    /// `(cos α, cos β, cos γ)` seen from `center`.
    fn view_cosines(&self, center: [f64; 3]) -> PyResult<[f64; 3]> {
        Ok(core::view_angles_from_center(&self.inner, &point(center)).map_err(err)?.as_array())
    }

    fn __repr__(&self) -> String {
        format!("ControlTriangle({:?})", self.points())
    }
}

/// One positive solution `(s1, s2, s3) = (|OA|, |OB|, |OC|)`.
#[pyclass(frozen, skip_from_py_object, get_all, name = "Solution", module = "p3p_geometry")]
#[derive(Clone)]
struct PySolution {
    s1: f64,
    s2: f64,
    s3: f64,
    u: f64,
    v: f64,
    repeated: bool,
    residual: f64,
}

#[pymethods]
impl PySolution {
    fn triplet(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(s1={}, s2={}, s3={}, u={}, v={}, repeated={})",
            self.s1,
            self.s2,
            self.s3,
            self.u,
            self.v,
            if self.repeated { "True" } else { "False" }
        )
    }
}

fn solve_set(tri: &PyTriangle, cosines: [f64; 3], tol: f64) -> PyResult<core::SolutionSet> {
    let angles = core::ViewAngles::from_array(cosines).map_err(err)?;
    let tol = Tolerances { residual: tol, ..Tolerances::default() };
    core::solve(&tri.inner, angles, &tol).map_err(err)
}

/// Every positive solution for the given subtended-angle cosines.
#[pyfunction]
#[pyo3(signature = (triangle, cosines, tol = 1e-9))]
fn solve(triangle: &PyTriangle, cosines: [f64; 3], tol: f64) -> PyResult<Vec<PySolution>> {
    let set = solve_set(triangle, cosines, tol)?;
    let sides = set.triangle.sides();
    Ok(set
        .solutions
        .iter()
        .map(|s| PySolution {
            s1: s.triplet.s1,
            s2: s.triplet.s2,
            s3: s.triplet.s3,
            u: s.ratio.u,
            v: s.ratio.v,
            repeated: s.repeated,
            residual: core::solver::max_residual(&s.triplet, sides, set.angles),
        })
        .collect())
}

/// The two mirror optical centers at distances `triplet`; the first lies
/// above the plane of the triangle in its canonical orientation.
#[pyfunction]
fn recover_centers(triangle: &PyTriangle, triplet: [f64; 3]) -> PyResult<([f64; 3], [f64; 3])> {
    let t = core::SolutionTriplet::from_array(triplet);
    let (up, down) = core::recover_centers(&t, &triangle.inner).map_err(err)?;
    Ok((arr(&up), arr(&down)))
}

/// Sharing pairs as `(i, j, label, residual)` with zero-based indices into
/// the list returned by `solve`.
#[pyfunction]
#[pyo3(signature = (triangle, cosines, tol = lab::CLASSIFY_TOL))]
fn classify(triangle: &PyTriangle, cosines: [f64; 3], tol: f64) -> PyResult<Vec<(usize, usize, String, f64)>> {
    let set = solve_set(triangle, cosines, 1e-9)?;
    let classes = core::classify_solution_set(&set, tol);
    Ok(classes.pairs.iter().map(|p| (p.i, p.j, p.label.to_string(), p.residual)).collect())
}

/// Companion structure of a scene: `confirmed`, `summary` and the per-vertex
/// identity residuals and factorization defects.
#[pyfunction]
#[pyo3(signature = (triangle, cosines, tol = lab::CLASSIFY_TOL))]
fn companion_check(triangle: &PyTriangle, cosines: [f64; 3], tol: f64) -> PyResult<(bool, String, [f64; 3], [f64; 3])> {
    let set = solve_set(triangle, cosines, 1e-9)?;
    let classes = core::classify_solution_set(&set, tol);
    let r = core::companion_check(&set, &classes, tol);
    Ok((r.confirmed, r.summary(), r.identity_residuals, r.factorization_defects))
}

/// Membership residual of `center` in a locus: `danger_cylinder`, `pi1`..`pi3`
/// or `skewA`..`skewC`.
#[pyfunction]
fn membership(triangle: &PyTriangle, locus_name: &str, center: [f64; 3]) -> PyResult<f64> {
    Ok(loci::locus_membership(&triangle.inner, locus(locus_name)?, &point(center)))
}

/// A random optical center on a locus, reproducible from `seed`.
#[pyfunction]
#[pyo3(signature = (triangle, locus_name, seed = 0))]
fn sample_locus(triangle: &PyTriangle, locus_name: &str, seed: u64) -> PyResult<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = loci::sample_locus(locus(locus_name)?, &triangle.inner, &mut rng, &SamplingRegion::default()).map_err(err)?;
    Ok(arr(&p))
}

/// Run a campaign; returns a dict of counts, residual statistics and buckets.
#[pyfunction]
#[pyo3(signature = (theorem, trials = 500, tol = 1e-7, seed = 42))]
fn verify_theorem(py: Python<'_>, theorem: &str, trials: usize, tol: f64, seed: u64) -> PyResult<Py<PyAny>> {
    let id: TheoremId = theorem.parse().map_err(err)?;
    let r = py.detach(|| lab::verify_theorem(id, trials, tol, seed)).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("theorem", r.theorem.to_string())?;
    d.set_item("trials", r.trials)?;
    d.set_item("passes", r.passes)?;
    d.set_item("skipped", r.skipped)?;
    d.set_item("failures", r.failures.len())?;
    d.set_item("pass_rate", r.pass_rate())?;
    d.set_item("residual_max", r.residual_max)?;
    d.set_item("residual_median", r.residual_median)?;
    let buckets: BTreeMap<String, usize> = r.buckets.clone();
    d.set_item("buckets", buckets)?;
    let failed: Vec<(usize, u64, String, String)> =
        r.failures.iter().map(|f| (f.trial, f.seed, f.mode.clone(), f.reason.clone())).collect();
    d.set_item("failure_records", failed)?;
    Ok(d.into_any().unbind())
}

/// Vertices (world coordinates) and zero-based triangular faces of the skewed
/// danger cylinder of `vertex`.
#[pyfunction]
#[pyo3(signature = (triangle, vertex = "A", nx = 200, ny = 200))]
fn skew_mesh(triangle: &PyTriangle, vertex: &str, nx: usize, ny: usize) -> PyResult<(Vec<[f64; 3]>, Vec<[usize; 3]>)> {
    let v = self::vertex(vertex)?;
    let bounds = MeshBounds::around(&triangle.inner, v);
    let mesh = core_skew_mesh(&triangle.inner, v, nx, ny, &bounds).map_err(err)?;
    Ok((mesh.vertices.iter().map(arr).collect(), mesh.faces))
}

/// Normalized residual of the skewed danger cylinder of `vertex` at `center`.
#[pyfunction]
fn skew_residual(triangle: &PyTriangle, vertex: &str, center: [f64; 3]) -> PyResult<f64> {
    let surf = SkewedDangerCylinder::new(&triangle.inner, self::vertex(vertex)?);
    Ok(loci::skewed_membership(&surf, &point(center)))
}

/// Parse a TOML scene; returns `(triangle, cosines, center or None, label or None)`.
#[pyfunction]
fn parse_scene(text: &str) -> PyResult<(PyTriangle, [f64; 3], Option<[f64; 3]>, Option<String>)> {
    let s = core::io::SceneFile::parse(text).and_then(|f| f.resolve()).map_err(err)?;
    Ok((PyTriangle { inner: s.triangle }, s.angles.as_array(), s.center.map(|c| arr(&c)), s.label))
}

#[pymodule]
fn p3p_geometry(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("P3PError", m.py().get_type::<P3PError>())?;
    m.add_class::<PyTriangle>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(recover_centers, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(companion_check, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(sample_locus, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(skew_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(skew_residual, m)?)?;
    m.add_function(wrap_pyfunction!(parse_scene, m)?)?;
    Ok(())
}
