//! Scene files, tabular reports and their text renderings.
//!
//! A scene file is TOML:
//!
//! ```toml
//! label = "equilateral"
//! control_points = [[0.5, 0.8660254037844386, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
//! optical_center = [0.5, 0.28867513459481287, 1.0]
//! ```
//!
//! `subtended_angle_cosines = [cos α, cos β, cos γ]` may replace
//! `optical_center`. When both are given the center wins and the cosines are
//! derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::CampaignReport;
use crate::loci::Locus;
use crate::sharing::{CompanionReport, PairClassification};
use crate::solver::{recover_centers, SolutionSet};
use crate::types::{view_angles_from_center, ControlTriangle, Point3, ViewAngles};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub control_points: [[f64; 3]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optical_center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtended_angle_cosines: Option<[f64; 3]>,
}

/// A scene file turned into geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScene {
    pub label: Option<String>,
    pub triangle: ControlTriangle,
    pub angles: ViewAngles,
    pub center: Option<Point3>,
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<SceneFile> {
        let scene: SceneFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim().to_string()))?;
        if scene.optical_center.is_none() && scene.subtended_angle_cosines.is_none() {
            return Err(Error::Parse("scene needs `optical_center` or `subtended_angle_cosines`".into()));
        }
        let finite = scene.control_points.iter().flatten().all(|x| x.is_finite())
            && scene.optical_center.iter().flatten().all(|x| x.is_finite())
            && scene.subtended_angle_cosines.iter().flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parse("scene contains a non-finite number".into()));
        }
        Ok(scene)
    }

    pub fn read(path: &std::path::Path) -> Result<SceneFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        SceneFile::parse(&text)
    }

    /// Canonical text form; parsing it gives back an identical scene.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene files always serialize")
    }

    pub fn from_center(tri: &ControlTriangle, center: &Point3, label: Option<String>) -> SceneFile {
        SceneFile {
            label,
            control_points: tri.points().map(|p| [p.x, p.y, p.z]),
            optical_center: Some([center.x, center.y, center.z]),
            subtended_angle_cosines: None,
        }
    }

    pub fn from_angles(tri: &ControlTriangle, angles: ViewAngles, label: Option<String>) -> SceneFile {
        SceneFile {
            label,
            control_points: tri.points().map(|p| [p.x, p.y, p.z]),
            optical_center: None,
            subtended_angle_cosines: Some(angles.as_array()),
        }
    }

    pub fn resolve(&self) -> Result<ResolvedScene> {
        let triangle = ControlTriangle::from_arrays(self.control_points)?;
        let (angles, center) = match (self.optical_center, self.subtended_angle_cosines) {
            (Some(o), _) => {
                let o = Point3::from(o);
                (view_angles_from_center(&triangle, &o)?, Some(o))
            }
            (None, Some(c)) => (ViewAngles::from_array(c)?, None),
            (None, None) => return Err(Error::Parse("scene has neither center nor cosines".into())),
        };
        Ok(ResolvedScene { label: self.label.clone(), triangle, angles, center })
    }
}

/// `x` with 9 significant digits, in the style of C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// A header row plus string cells, rendered as CSV or as an aligned table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let line = |cells: &[String]| cells.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
        let mut out = line(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        out.push_str(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// One row per solution: distances, ratio point, upper center and residual.
pub fn solution_table(set: &SolutionSet) -> Table {
    let mut t = Table::new(&["index", "s1", "s2", "s3", "u", "v", "repeated", "center_x", "center_y", "center_z", "residual"]);
    let sides = set.triangle.sides();
    for (i, s) in set.solutions.iter().enumerate() {
        let center = recover_centers(&s.triplet, &set.triangle).map(|c| c.0);
        let c = |f: fn(&Point3) -> f64| center.as_ref().map_or("nan".to_string(), |p| sig9(f(p)));
        t.push(vec![
            (i + 1).to_string(),
            sig9(s.triplet.s1),
            sig9(s.triplet.s2),
            sig9(s.triplet.s3),
            sig9(s.ratio.u),
            sig9(s.ratio.v),
            s.repeated.to_string(),
            c(|p| p.x),
            c(|p| p.y),
            c(|p| p.z),
            sig9(crate::solver::max_residual(&s.triplet, sides, set.angles)),
        ]);
    }
    t
}

/// Sharing pairs with 1-based solution indices.
pub fn pair_table(classes: &PairClassification) -> Table {
    let mut t = Table::new(&["i", "j", "label", "residual"]);
    for p in &classes.pairs {
        t.push(vec![(p.i + 1).to_string(), (p.j + 1).to_string(), p.label.to_string(), sig9(p.residual)]);
    }
    t
}

/// Every unordered solution pair: its sharing labels (or `none`) and how many
/// of the three distances coincide within `tol`.
pub fn pair_overview(set: &SolutionSet, classes: &PairClassification, tol: f64) -> Table {
    let mut t = Table::new(&["i", "j", "shared", "equal_distances"]);
    let n = set.count();
    for i in 0..n {
        for j in i + 1..n {
            let labels: Vec<String> =
                classes.pairs.iter().filter(|p| p.i == i && p.j == j).map(|p| p.label.to_string()).collect();
            let (x, y) = (set.solutions[i].triplet.as_array(), set.solutions[j].triplet.as_array());
            let equal = x.iter().zip(&y).filter(|(p, q)| (*p - *q).abs() <= tol * p.abs().max(q.abs())).count();
            let shared = if labels.is_empty() { "none".to_string() } else { labels.join(";") };
            t.push(vec![(i + 1).to_string(), (j + 1).to_string(), shared, equal.to_string()]);
        }
    }
    t
}

pub fn membership_table(rows: &[(Locus, f64)]) -> Table {
    let mut t = Table::new(&["locus", "residual"]);
    for (l, r) in rows {
        t.push(vec![l.to_string(), sig9(*r)]);
    }
    t
}

pub fn companion_table(report: &CompanionReport) -> Table {
    let mut t = Table::new(&["vertex", "identity_residual", "factorization_defect"]);
    for v in crate::types::Vertex::ALL {
        t.push(vec![
            v.to_string(),
            sig9(report.identity_residuals[v.index()]),
            sig9(report.factorization_defects[v.index()]),
        ]);
    }
    t
}

/// Campaign statistics as `metric,value` rows, buckets included. Wall time
/// is left out so equal seeds give equal files.
pub fn campaign_table(r: &CampaignReport) -> Table {
    let mut t = Table::new(&["metric", "value"]);
    let mut kv = |k: &str, v: String| t.push(vec![k.to_string(), v]);
    kv("theorem", r.theorem.to_string());
    kv("seed", r.seed.to_string());
    kv("tol", sig9(r.tol));
    kv("trials", r.trials.to_string());
    kv("passes", r.passes.to_string());
    kv("skipped", r.skipped.to_string());
    kv("failures", r.failures.len().to_string());
    kv("pass_rate", sig9(r.pass_rate()));
    kv("residual_max", sig9(r.residual_max));
    kv("residual_median", sig9(r.residual_median));
    for (k, n) in &r.buckets {
        kv(&format!("bucket:{k}"), n.to_string());
    }
    t
}

pub fn failure_table(r: &CampaignReport) -> Table {
    let mut t = Table::new(&["trial", "seed", "mode", "residual", "reason"]);
    for f in &r.failures {
        t.push(vec![f.trial.to_string(), f.seed.to_string(), f.mode.clone(), sig9(f.residual), f.reason.clone()]);
    }
    t
}

/// Human-readable campaign summary.
pub fn campaign_summary(r: &CampaignReport) -> String {
    let mut s = format!(
        "{}: {} trials, {} passed, {} skipped, {} failed (pass rate {:.2}% of checked)\n",
        r.theorem,
        r.trials,
        r.passes,
        r.skipped,
        r.failures.len(),
        100.0 * r.pass_rate()
    );
    s.push_str(&format!("residual max {}, median {}\n", sig9(r.residual_max), sig9(r.residual_median)));
    for (k, n) in &r.buckets {
        s.push_str(&format!("  {k}: {n}\n"));
    }
    for f in r.failures.iter().take(10) {
        s.push_str(&format!("  FAIL trial {} seed {} ({}): {}\n", f.trial, f.seed, f.mode, f.reason));
    }
    if r.failures.len() > 10 {
        s.push_str(&format!("  ... {} more failures\n", r.failures.len() - 10));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EQ1: &str = r#"label = "EQ1"
control_points = [[0.5, 0.8660254037844386, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
optical_center = [0.5, 0.28867513459481287, 1.0]
"#;

    #[test]
    fn sig9_matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1.0 / 3.0, "0.333333333"),
            (1.1547005383792515, "1.15470054"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (2.0f64.sqrt() * 1e-12, "1.41421356e-12"),
        ];
        for (x, want) in cases {
            assert_eq!(sig9(x), want, "{x}");
        }
    }

    #[test]
    fn scene_round_trip_is_exact() {
        let s = SceneFile::parse(EQ1).unwrap();
        assert_eq!(s.to_toml(), EQ1);
        assert_eq!(SceneFile::parse(&s.to_toml()).unwrap(), s);
        let r = s.resolve().unwrap();
        for c in r.angles.as_array() {
            assert!((c - 0.625).abs() < 1e-15);
        }
        let by_angles = SceneFile::from_angles(&r.triangle, r.angles, None);
        assert_eq!(SceneFile::parse(&by_angles.to_toml()).unwrap(), by_angles);
    }

    #[test]
    fn center_wins_over_cosines() {
        let text = format!("{EQ1}subtended_angle_cosines = [0.1, 0.2, 0.3]\n");
        let r = SceneFile::parse(&text).unwrap().resolve().unwrap();
        assert!((r.angles.cos_alpha - 0.625).abs() < 1e-15);
        assert!(r.center.is_some());
    }

    #[test]
    fn malformed_scenes_are_parse_errors() {
        for bad in [
            "control_points = [[0,0,0]]",
            "control_points = [[0.0,0.0,0.0],[1.0,0.0,0.0],[0.0,1.0,0.0]]",
            "nonsense",
            "control_points = [[0.0,0.0,0.0],[1.0,0.0,0.0],[0.0,1.0,0.0]]\noptical_center = [1.0, 2.0, 3.0]\nextra = 1",
        ] {
            assert!(matches!(SceneFile::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
        let collinear = "control_points = [[0.0,0.0,0.0],[1.0,0.0,0.0],[2.0,0.0,0.0]]\noptical_center = [0.0, 0.0, 1.0]";
        assert!(matches!(SceneFile::parse(collinear).unwrap().resolve(), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn tables_render() {
        let mut t = Table::new(&["a", "note"]);
        t.push(vec!["1".into(), "x, \"y\"".into()]);
        assert_eq!(t.to_csv(), "a,note\n1,\"x, \"\"y\"\"\"\n");
        assert_eq!(t.to_text(), "a    note\n-  ------\n1  x, \"y\"\n");
    }
}
