"""Smoke test for the slitspiral extension module.

Build and install it first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/slitspiral-*.whl

then run `python python/smoke_test.py`.
"""

import json
import math
import tempfile
from pathlib import Path

import slitspiral

FIXTURE = Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/three_boundary.json"


def circle(cx, cy, r, orientation):
    return {
        "kind": "arc",
        "center": [cx, cy],
        "radius": r,
        "start_angle": 0.0,
        "end_angle": 0.0,
        "orientation": orientation,
    }


def annulus_doc():
    return {
        "boundaries": [
            {"segments": [circle(0.0, 0.0, 1.0, "ccw")]},
            {"segments": [circle(0.3, 0.0, 0.25, "cw")]},
        ],
        "origin": [-0.5, 0.0],
        "z1": [0.3, 0.0],
        "params": {"n": 256, "spacing": 0.2, "case": "annular"},
    }


def check_map():
    dom = slitspiral.Domain.from_json(json.dumps(annulus_doc()))
    assert dom.holes == 1
    sm = dom.solve_map()
    assert sm.kind == "annular", sm
    assert 0.0 < sm.radii[1] < 1.0
    z = complex(-0.6, 0.2)
    w = sm.forward(z)
    assert abs(sm.inverse(w) - z) < 1e-6
    curve = sm.circle_preimage(0.5 * (1.0 + sm.radii[1]), 64)
    assert len(curve) == 64
    print(f"map: R1 = {sm.radii[1]:.6f}, round trip {abs(sm.inverse(w) - z):.2e}")


def check_plan():
    dom = slitspiral.Domain.load(str(FIXTURE))
    plan = dom.plan(n=256)
    assert plan.k >= 1
    assert len(plan.points) == len(plan.blend)
    assert plan.coverage > 0.99, plan.coverage
    report = plan.report
    assert report["k"] == plan.k
    rescored = dom.rescore(plan.path_json(), n=256)
    assert math.isclose(rescored["coverage_fraction"], plan.coverage, rel_tol=1e-12)
    assert plan.path_csv().startswith("x,y\n")
    assert plan.svg().lstrip().startswith("<svg")
    with tempfile.TemporaryDirectory() as tmp:
        written = plan.write(tmp, ["json", "csv"])
        assert sorted(Path(p).name for p in written) == ["path.csv", "path.json"]
    mic = dom.mic(n=256)
    assert mic["domain"]["radius"] > 0.0
    print(f"plan: {plan!r}, length {plan.length:.1f}, domain MIC {mic['domain']['radius']:.3f}")


def check_errors():
    try:
        slitspiral.Domain.from_json('{"boundaries": [')
    except slitspiral.ValidationError as e:
        print(f"malformed input rejected: {e}")
    else:
        raise AssertionError("malformed JSON accepted")
    dom = slitspiral.Domain.from_json(json.dumps(annulus_doc()))
    try:
        dom.plan(no_such_param=1)
    except slitspiral.ValidationError:
        pass
    else:
        raise AssertionError("unknown parameter accepted")
    assert issubclass(slitspiral.PlanningError, slitspiral.SlitspiralError)
    assert slitspiral.str_ratio(2, 1024, 1000, 11, 0.01, 1.0) > 0.0


if __name__ == "__main__":
    check_map()
    check_plan()
    check_errors()
    print("ok")
