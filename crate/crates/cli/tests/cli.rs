use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use p3p_core::loci::{cylinder_membership, danger_cylinder, skewed_membership, SkewedDangerCylinder};
use p3p_core::mesh::parse_obj;
use p3p_core::{ControlTriangle, Point3, Vertex};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn p3p(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_p3p")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const K: f64 = 1.1547005383792515;

#[test]
fn solve_eq1_lists_the_four_fixture_triplets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eq1.csv");
    let o = p3p(&["solve", scene("eq1.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("solutions: 4"));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 4);
    let mut got: Vec<[f64; 3]> =
        rows.iter().map(|r| [r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap()]).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want = [[K / 4.0, K, K], [K, K / 4.0, K], [K, K, K / 4.0], [K, K, K]];
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, w) in got.iter().zip(want) {
        for (x, y) in g.iter().zip(w) {
            // Nine significant digits.
            assert!((x - y).abs() < 1e-8 * y, "{g:?} vs {w:?}");
        }
    }
    // The cosine form of the same scene gives the same table.
    let c = p3p(&["solve", scene("eq1_cosines.toml").to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    // Everything but the residual column.
    let tail = |s: &str| {
        s.lines()
            .skip_while(|l| !l.starts_with("index"))
            .map(|l| l.split_whitespace().take(10).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
    };
    assert_eq!(tail(&stdout(&c)), tail(&stdout(&o)));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cocyclic = p3p(&["solve", scene("cocyclic.toml").to_str().unwrap()]);
    assert_eq!(cocyclic.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&cocyclic.stderr).contains("degenerate"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "control_points = 3\n").unwrap();
    assert_eq!(p3p(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(p3p(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));

    let missing = dir.path().join("missing.toml");
    assert_eq!(p3p(&["solve", missing.to_str().unwrap()]).status.code(), Some(5));
    assert_eq!(p3p(&["verify", "nosuch", "--trials", "5"]).status.code(), Some(2));
    assert_eq!(p3p(&["frobnicate"]).status.code(), Some(2));

    let collinear = dir.path().join("collinear.toml");
    std::fs::write(&collinear, "control_points = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]\noptical_center = [0.0, 0.0, 1.0]\n").unwrap();
    assert_eq!(p3p(&["solve", collinear.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn analyze_eq1_reports_all_pairs_and_planes() {
    let dir = tempfile::tempdir().unwrap();
    let o = p3p(&["analyze", scene("eq1.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("companion structure confirmed"));
    // Name each solution by its ratio point.
    let sols = csv_rows(&std::fs::read_to_string(dir.path().join("solutions.csv")).unwrap());
    let name = |i: &str| {
        let r = &sols[i.parse::<usize>().unwrap() - 1];
        format!("({},{})", r[4], r[5])
    };
    let pairs = csv_rows(&std::fs::read_to_string(dir.path().join("pairs.csv")).unwrap());
    let mut labels: Vec<String> = pairs
        .iter()
        .map(|r| {
            let mut ends = [name(&r[0]), name(&r[1])];
            ends.sort();
            format!("{}&{}:{}", ends[0], ends[1], r[2])
        })
        .collect();
    labels.sort();
    let mut want = [
        "(1,1)&(4,4):sideBC",
        "(0.25,1)&(1,0.25):pointA",
        "(1,0.25)&(1,1):sideAB",
        "(0.25,1)&(1,1):sideCA",
        "(1,0.25)&(4,4):pointB",
        "(0.25,1)&(4,4):pointC",
    ];
    want.sort();
    assert_eq!(labels, want);
    let membership = csv_rows(&std::fs::read_to_string(dir.path().join("membership.csv")).unwrap());
    for r in membership.iter().filter(|r| r[0].starts_with("pi")) {
        assert!(r[1].parse::<f64>().unwrap().abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn analyze_pair_sections_follow_the_solution_count() {
    let two = p3p(&["analyze", scene("sc1.toml").to_str().unwrap()]);
    assert_eq!(two.status.code(), Some(0));
    let text = stdout(&two);
    assert!(text.contains("solutions: 2"));
    let section: Vec<&str> = text.lines().skip_while(|l| *l != "solution pairs").skip(3).take_while(|l| !l.is_empty()).collect();
    assert_eq!(section.len(), 1, "{text}");

    let one = p3p(&["analyze", scene("single.toml").to_str().unwrap()]);
    let text = stdout(&one);
    assert!(text.contains("solutions: 1"));
    assert!(text.contains("solution pairs\n(none)"));
    assert!(!text.contains("sharing pairs"));
}

#[test]
fn verify_is_deterministic() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |d: &Path| p3p(&["verify", "side_nsc", "--trials", "500", "--seed", "42", "--out", d.to_str().unwrap()]);
    let (a, b) = (run(d1.path()), run(d2.path()));
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(stdout(&a), stdout(&b));
    for f in ["report.csv", "failures.csv", "summary.txt"] {
        let x = std::fs::read_to_string(d1.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read_to_string(d2.path().join(f)).unwrap(), "{f}");
    }
    let failures = csv_rows(&std::fs::read_to_string(d1.path().join("failures.csv")).unwrap());
    assert_eq!(a.status.code(), Some(if failures.is_empty() { 0 } else { 4 }));
    let report = std::fs::read_to_string(d1.path().join("report.csv")).unwrap();
    assert!(report.starts_with("metric,value\ntheorem,side_nsc\nseed,42\n"));
    assert!(report.contains("\ntrials,500\n"));
}

#[test]
fn mesh_export_stays_on_the_surface() {
    let dir = tempfile::tempdir().unwrap();
    for (name, v) in [("sc1.toml", "A"), ("sc1.toml", "C"), ("eq1.toml", "A")] {
        let out = dir.path().join(format!("{name}.{v}.obj"));
        let o = p3p(&["export-skew-mesh", scene(name).to_str().unwrap(), "--vertex", v, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let (vs, fs) = parse_obj(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(!fs.is_empty());
        let file = p3p_core::io::SceneFile::read(&scene(name)).unwrap();
        let tri = ControlTriangle::from_arrays(file.control_points).unwrap();
        let vertex: Vertex = v.parse().unwrap();
        let surf = SkewedDangerCylinder::new(&tri, vertex);
        let cyl = danger_cylinder(tri.canonical_frame());
        let mut on_circle = 0;
        for p in &vs {
            assert!(skewed_membership(&surf, p).abs() < 1e-9, "{p:?}");
            let c = surf.frame.to_canonical(p);
            if c.z.abs() < 1e-12 && cylinder_membership(&cyl, p).abs() < 1e-9 {
                on_circle += 1;
            }
        }
        assert!(on_circle > 0, "{name} {v}");
    }
    let o = p3p(&["export-skew-mesh", scene("sc1.toml").to_str().unwrap(), "--grid", "7x", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    let o = p3p(&[
        "export-skew-mesh",
        scene("sc1.toml").to_str().unwrap(),
        "--bounds",
        "5,6,0.5,1,9",
        "--out",
        dir.path().join("empty.obj").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let _ = Point3::zeros();
}
