"""Smoke tests for the python bindings."""

import json
import math

import _mixedrobust as mr


def test_roots():
    rs = sorted(mr.roots([-1.0, 0.0, 1.0]), key=lambda z: z.real)  # x^2 - 1
    assert abs(rs[0] - (-1.0)) < 1e-12 and abs(rs[1] - 1.0) < 1e-12


def test_stability():
    assert mr.is_hurwitz([3.0, 2.0, 2.0, 1.0])  # s^3 + 2s^2 + 2s + 3
    assert not mr.is_hurwitz([3.0, 2.0, 1.4, 1.0])
    assert mr.is_schur([0.0, 1.0])  # z
    assert not mr.is_schur([-2.0, 1.0])  # z - 2
    assert mr.stability_margin([1.0, 1.0], "hurwitz") == 1.0


def test_chernoff():
    assert mr.chernoff_sample_size(0.01, 1e-7) == 84057


def test_analyze_reference_example():
    report = json.loads(mr.analyze(mr.example_config("5.3.1")))
    assert math.isclose(report["probability"], 1.0 / 3.0, abs_tol=1e-9)
    assert report["method"] == "exact_cdf"


def test_kharitonov():
    point = [(3.0, 3.0), (2.0, 2.0), (2.0, 2.0), (1.0, 1.0)]
    assert mr.kharitonov_hurwitz(point)


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"PASS {name}")
            except AssertionError as exc:
                failures += 1
                print(f"FAIL {name}: {exc}")
    raise SystemExit(1 if failures else 0)
