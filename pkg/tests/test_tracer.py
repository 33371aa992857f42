"""Curve pullbacks: exact circle oracles on z^d, qualitative convergence on
the tangent Newton map."""

import math

import numpy as np
import pytest

from petallab.errors import AlignmentError, SeedError
from petallab.maps import classify_orbit, map_by_id, sine_attractors
from petallab.metrics import sph_dist
from petallab.tracer import (
    ClosedCurve,
    cauchy_modulus,
    contains_points,
    load_curve_points,
    pullback_curve,
    pullback_residual,
    save_curve,
    seed_curve,
    trace_boundary,
    transversal_arcs,
)

SINE = map_by_id("sine_newton")
SQUARE = map_by_id("power_d", d=2)


# ---------------------------------------------------------------------------
# seeds

def test_seed_circle_sine_valid():
    c = seed_curve(SINE, 0j, 0.5, 256)
    assert len(c) == 256 and c.level == 0 and c.degree == 3
    # f(z) ~ -z^3/3 on the circle, comfortably inside
    assert np.abs(c.points).max() == pytest.approx(0.5)


def test_seed_circle_power_valid():
    c = seed_curve(SQUARE, 0j, 0.5, 128)
    assert c.degree == 2


def test_seed_circle_too_large():
    # radius 1.6 reaches past the pole at pi/2
    with pytest.raises(SeedError):
        seed_curve(SINE, 0j, 1.6, 256)


# ---------------------------------------------------------------------------
# power-map oracles

def test_pullback_square_root_circle():
    c0 = seed_curve(SQUARE, 0j, 0.25, 128)
    c1 = pullback_curve(SQUARE, c0)
    radii = np.abs(c1.points)
    assert np.abs(radii - 0.5).max() < 1e-10
    assert len(c1) == 2 * len(c0)
    assert pullback_residual(SQUARE, c1, c0) < 1e-9


def test_pullback_iterated_radii():
    c = seed_curve(SQUARE, 0j, 0.5, 64)
    for n in range(1, 6):
        c = pullback_curve(SQUARE, c)
        expected = 0.5 ** (1.0 / 2 ** n)
        assert np.abs(np.abs(c.points) - expected).max() < 1e-9
    assert abs(0.5 ** (1.0 / 32) - 0.97857) < 1e-5


def test_pullback_sine_first_level():
    c0 = seed_curve(SINE, 0j, 0.5, 512)
    c1 = pullback_curve(SINE, c0)
    assert len(c1) == 3 * len(c0)
    p0 = math.pi / 2
    assert np.abs(c1.points - p0).min() < np.abs(c0.points - p0).min()
    assert pullback_residual(SINE, c1, c0) < 1e-9


# ---------------------------------------------------------------------------
# moduli and arcs

def _circle(level, r, n, degree=2):
    pts = r * np.exp(2j * np.pi * np.arange(n) / n)
    return ClosedCurve(level=level, degree=degree, center=0j, points=pts)


def test_cauchy_modulus_concentric_circles():
    a = _circle(0, 0.5, 128)
    b = _circle(1, math.sqrt(0.5), 128)
    # radial displacement: the 1-D spherical distance between the radii
    oracle = sph_dist(0.5, math.sqrt(0.5))
    assert abs(cauchy_modulus(a, b) - oracle) < 1e-12
    assert abs(oracle - 0.30366) < 1e-4


def test_cauchy_modulus_identical_curves():
    a = _circle(0, 0.5, 64)
    b = ClosedCurve(level=1, degree=2, center=0j, points=a.points.copy())
    assert cauchy_modulus(a, b) == 0.0


def test_cauchy_modulus_alignment_checks():
    a = _circle(0, 0.5, 64)
    with pytest.raises(AlignmentError):
        cauchy_modulus(a, _circle(2, 0.6, 64))
    with pytest.raises(AlignmentError):
        cauchy_modulus(a, _circle(1, 0.6, 96))


def test_cauchy_modulus_sine_levels_decrease():
    _, rep = trace_boundary(SINE, 0j, 0.5, 5, 4096)
    assert rep.cauchy_moduli[4] < rep.cauchy_moduli[3] < rep.cauchy_moduli[2]


def test_transversal_arcs_radial():
    a = _circle(0, 0.25, 64)
    b = _circle(1, 0.5, 64)
    assert abs(transversal_arcs(a, b) - 0.25) < 1e-12


def test_transversal_arcs_identical():
    a = _circle(0, 0.5, 64)
    b = ClosedCurve(level=1, degree=2, center=0j, points=a.points.copy())
    assert transversal_arcs(a, b) == 0.0


def test_transversal_arcs_sine_bounded():
    _, rep = trace_boundary(SINE, 0j, 0.5, 2, 1024)
    assert 0.0 < rep.alpha_max_length < 10.0


# ---------------------------------------------------------------------------
# full traces

def test_trace_zero_levels_degenerate():
    final, rep = trace_boundary(SINE, 0j, 0.5, 0, 128)
    assert rep.cauchy_moduli == ()
    assert final.level == 0 and len(final) == 128


def test_trace_nesting_and_membership():
    _, rep = trace_boundary(SINE, 0j, 0.5, 3, 1024)
    curves = rep.curves
    attractors = sine_attractors(-2, 2)
    for c in curves:
        sub = c.points[:: max(1, len(c) // 64)]
        for z in sub:
            res = classify_orbit(SINE, complex(z), attractors, max_iter=400)
            assert res.verdict == "converged" and res.index == 2
    for a, b in zip(curves, curves[1:]):
        inside = contains_points(a, b.points)
        assert not inside.any()          # each new curve surrounds the last


def test_trace_symmetry():
    # f is odd and real, so the curve family inherits both symmetries
    _, rep = trace_boundary(SINE, 0j, 0.5, 3, 1024)
    pts = rep.curves[-1].points
    for image in (-pts, np.conj(pts)):
        d = np.abs(image[:, None] - pts[None, :]).min(axis=1)
        assert d.max() < 2e-2


def test_trace_cauchy_partial_sums_shrink():
    _, rep = trace_boundary(SINE, 0j, 0.5, 8, 2048)
    m = rep.cauchy_moduli
    assert sum(m[4:8]) < sum(m[0:4])


def test_trace_pole_gaps_decrease():
    _, rep = trace_boundary(SINE, 0j, 0.5, 4, 2048)
    for pole_idx in (0, 1):
        gaps = [g[pole_idx] for g in rep.accessible_pole_gaps]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_curve_file_roundtrip(tmp_path):
    c = seed_curve(SINE, 0j, 0.5, 64)
    path = tmp_path / "curve.bin"
    save_curve(c, path)
    raw = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(-1, 3)
    assert raw.shape == (64, 3)
    assert np.array_equal(raw[:, 0], np.arange(64) / 64)
    back = load_curve_points(path)
    assert np.array_equal(back, c.points)


def test_trace_writes_run_directory(tmp_path):
    out = tmp_path / "run"
    trace_boundary(SINE, 0j, 0.5, 2, 256, out_dir=str(out))
    names = sorted(p.name for p in out.iterdir())
    assert names == ["curve_000.bin", "curve_001.bin", "curve_002.bin"]
