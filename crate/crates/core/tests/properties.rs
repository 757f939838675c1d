use proptest::prelude::*;

use p3p_core::io::SceneFile;
use p3p_core::lab::{check_scene, SceneConfig};
use p3p_core::solver::max_residual;
use p3p_core::{recover_centers, solve, ControlTriangle, Point3, SolutionSet, SolutionTriplet, Tolerances, Vertex};

fn coord() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn point() -> impl Strategy<Value = Point3> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

/// A well-conditioned triangle and a center that passes the campaign filters.
fn scene() -> impl Strategy<Value = (ControlTriangle, Point3)> {
    (point(), point(), point(), point()).prop_filter_map("degenerate scene", |(a, b, c, o)| {
        let tri = ControlTriangle::new(a, b, c).ok()?;
        check_scene(&tri, &o, &SceneConfig::default()).ok()?;
        Some((tri, o))
    })
}

fn solve_at(tri: &ControlTriangle, o: &Point3) -> SolutionSet {
    let angles = p3p_core::view_angles_from_center(tri, o).unwrap();
    solve(tri, angles, &Tolerances::default()).unwrap()
}

fn distances(tri: &ControlTriangle, o: &Point3) -> SolutionTriplet {
    let d = |v: Vertex| (*o - tri.point(v)).norm();
    SolutionTriplet::new(d(Vertex::A), d(Vertex::B), d(Vertex::C))
}

fn contains(set: &SolutionSet, t: &SolutionTriplet, tol: f64) -> bool {
    set.solutions.iter().any(|s| s.triplet.rel_diff(t) < tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn true_distances_are_recovered((tri, o) in scene()) {
        let set = solve_at(&tri, &o);
        prop_assert!((1..=4).contains(&set.count()));
        prop_assert!(contains(&set, &distances(&tri, &o), 1e-6));
        for s in &set.solutions {
            prop_assert!(s.triplet.is_positive());
            prop_assert!(max_residual(&s.triplet, tri.sides(), set.angles) < 1e-8);
        }
    }

    #[test]
    fn centers_round_trip((tri, o) in scene()) {
        let (up, down) = recover_centers(&distances(&tri, &o), &tri).unwrap();
        let gap = (up - o).norm().min((down - o).norm());
        prop_assert!(gap < 1e-7 * tri.scale().max(1.0), "gap {gap}");
    }

    #[test]
    fn solutions_scale_with_the_triangle((tri, o) in scene(), k in 0.1..10.0f64) {
        let big = tri.scaled(k).unwrap();
        let set = solve_at(&tri, &o);
        let scaled = solve(&big, set.angles, &Tolerances::default()).unwrap();
        prop_assert_eq!(set.count(), scaled.count());
        for s in &set.solutions {
            prop_assert!(contains(&scaled, &s.triplet.scaled(k), 1e-7));
        }
    }

    #[test]
    fn relabelling_permutes_solutions((tri, o) in scene(), k in 0..3usize) {
        let v = Vertex::from_index(k);
        let set = solve_at(&tri, &o);
        let turned = solve(&tri.rotated(v), set.angles.rotated(v), &Tolerances::default()).unwrap();
        prop_assert_eq!(set.count(), turned.count());
        for s in &set.solutions {
            prop_assert!(contains(&turned, &s.triplet.rotated(v), 1e-7));
        }
    }

    #[test]
    fn scene_files_round_trip((tri, o) in scene()) {
        let file = SceneFile::from_center(&tri, &o, Some("prop".into()));
        let back = SceneFile::parse(&file.to_toml()).unwrap();
        prop_assert_eq!(&back, &file);
    }
}
