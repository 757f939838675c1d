"""Smoke test for the p3p_geometry extension.

Build first with `cargo build --release -p p3p-py`. The script copies the
shared library next to itself under the importable name when needed. Set
P3P_GEOMETRY_LIB to test a specific build instead.
"""

import math
import os
import pathlib
import shutil
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def _locate():
    explicit = os.environ.get("P3P_GEOMETRY_LIB")
    if explicit:
        where = pathlib.Path(tempfile.mkdtemp())
        shutil.copyfile(explicit, where / "p3p_geometry.so")
        sys.path.insert(0, str(where))
        return
    target = HERE / "p3p_geometry.so"
    built = ROOT / "target" / "release" / "libp3p_geometry.so"
    if built.exists() and (not target.exists() or built.stat().st_mtime > target.stat().st_mtime):
        shutil.copyfile(built, target)
    sys.path.insert(0, str(HERE))


_locate()
import p3p_geometry as pg  # noqa: E402


def dist(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def main():
    h = math.sqrt(3) / 2
    points = [[0.5, h, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    center = [0.5, h / 3, 1.0]
    tri = pg.ControlTriangle(points)
    cosines = tri.view_cosines(center)

    sols = pg.solve(tri, cosines)
    assert len(sols) == 4, sols
    truth = [dist(center, p) for p in points]
    best = min(max(abs(a - b) for a, b in zip(s.triplet(), truth)) for s in sols)
    assert best < 1e-9, best
    for s in sols:
        assert s.residual < 1e-9
        up, down = pg.recover_centers(tri, s.triplet())
        assert abs(up[2] + down[2]) < 1e-9

    pairs = pg.classify(tri, cosines)
    assert pairs, "expected sharing pairs on the symmetric scene"
    confirmed, summary, _, _ = pg.companion_check(tri, cosines)
    print("companion:", confirmed, summary)

    o = pg.sample_locus(tri, "danger_cylinder", seed=7)
    assert pg.membership(tri, "danger_cylinder", o) < 1e-9
    assert pg.membership(tri, "pi1", [0.5, 2.0, 1.5]) < 1e-12

    verts, faces = pg.skew_mesh(tri, "A", 40, 40)
    assert verts and faces
    worst = max(pg.skew_residual(tri, "A", v) for v in verts)
    assert worst < 1e-9, worst

    report = pg.verify_theorem("point_nsc", trials=50, seed=1)
    assert report["trials"] == 50
    assert report["failures"] == 0, report["failure_records"]

    scene = (ROOT / "scenes" / "eq1.toml").read_text()
    stri, scos, scenter, label = pg.parse_scene(scene)
    assert scenter is not None and label
    assert len(pg.solve(stri, scos)) == 4

    try:
        pg.ControlTriangle([[0, 0, 0], [1, 0, 0], [2, 0, 0]])
    except pg.P3PError as e:
        print("collinear rejected:", e)
    else:
        raise AssertionError("collinear triangle accepted")

    print("ok:", len(sols), "solutions,", len(pairs), "sharing pairs,", len(faces), "mesh faces")


if __name__ == "__main__":
    main()
