"""Rendering and the command-line interface."""

import json
import math
import os

import numpy as np
import pytest

import petallab.cli as cli
import petallab.petals as petals_mod
from petallab.errors import ConfigError
from petallab.maps import map_by_id
from petallab.petals import PetalReport
from petallab.render import (
    BASIN_PALETTE,
    OVERLAY_COLOR,
    PREPOLE_COLOR,
    RenderJob,
    Viewport,
    read_image,
    render,
    write_image,
)
from petallab.tracer import save_curve, seed_curve


def _vp(center=0j, width=4 * math.pi, px=161, py=None):
    py = px if py is None else py
    return Viewport(center=center, width=width, height=width * py / px,
                    pixels_x=px, pixels_y=py)


# ---------------------------------------------------------------------------
# viewport

def test_viewport_aspect_validation():
    with pytest.raises(ConfigError):
        Viewport(center=0j, width=4.0, height=1.0, pixels_x=100, pixels_y=100)
    with pytest.raises(ConfigError):
        Viewport(center=0j, width=-1.0, height=1.0, pixels_x=10, pixels_y=10)


def test_viewport_pixel_mapping_roundtrip():
    vp = _vp(px=101)
    grid = vp.pixel_centers()
    for (j, i) in ((0, 0), (50, 50), (100, 3)):
        z = grid[j, i]
        assert vp.to_pixel(z) == (i, j)
    assert vp.to_pixel(100 + 0j) is None


# ---------------------------------------------------------------------------
# render

def test_render_basin_and_pole_colors():
    # odd pixel count, center 0: the middle pixel sits exactly at 0
    vp = _vp(px=161)
    img = render(RenderJob(map_id="sine_newton", viewport=vp))
    i, j = vp.to_pixel(0j)
    assert tuple(img[j, i]) == tuple(BASIN_PALETTE[0])
    # a viewport centered on the pole puts a pixel exactly at pi/2
    vp2 = _vp(center=complex(math.pi / 2, 0), px=33, width=1.0)
    img2 = render(RenderJob(map_id="sine_newton", viewport=vp2))
    i, j = vp2.to_pixel(complex(math.pi / 2, 0))
    assert tuple(img2[j, i]) == tuple(PREPOLE_COLOR)


def test_render_real_axis_row_is_basin_one():
    vp = _vp(px=201)
    img = render(RenderJob(map_id="sine_newton", viewport=vp))
    hits = 0
    total = 0
    for x in np.linspace(math.pi / 2 + 0.1, 3 * math.pi / 2 - 0.1, 60):
        i, j = vp.to_pixel(complex(x, 0.001))
        total += 1
        if tuple(img[j, i]) == tuple(BASIN_PALETTE[1]):
            hits += 1
    assert hits / total > 0.6


def test_render_colorings():
    vp = _vp(px=33)
    for coloring in ("iteration_shade", "julia_mask"):
        img = render(RenderJob(map_id="sine_newton", viewport=vp,
                               coloring=coloring))
        assert img.shape == (33, 33, 3)
    with pytest.raises(ConfigError):
        RenderJob(map_id="sine_newton", viewport=vp, coloring="rainbow")


def test_render_deterministic_and_thread_invariant():
    vp = _vp(px=97)
    job = RenderJob(map_id="sine_newton", viewport=vp)
    a = render(job, threads=1)
    b = render(job, threads=1)
    c = render(job, threads=8)
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)


def test_render_overlay_marks_curve_pixels(tmp_path):
    m = map_by_id("sine_newton")
    curve = seed_curve(m, 0j, 0.5, 256)
    path = tmp_path / "c.bin"
    save_curve(curve, path)
    vp = _vp(px=200, width=3.0)
    job = RenderJob(map_id="sine_newton", viewport=vp,
                    overlay_curves=(str(path),))
    img = render(job)
    for z in curve.points[::16]:
        i, j = vp.to_pixel(complex(z))
        assert tuple(img[j, i]) == tuple(OVERLAY_COLOR)


def test_write_image_format(tmp_path):
    buf = np.full((1, 1, 3), 255, np.uint8)
    p = tmp_path / "w.ppm"
    write_image(buf, p)
    raw = p.read_bytes()
    assert raw == b"P6\n1 1\n255\n\xff\xff\xff"
    assert np.array_equal(read_image(p), buf)


def test_write_image_rejects_bad_buffer(tmp_path):
    with pytest.raises(ConfigError):
        write_image(np.zeros((4, 4)), tmp_path / "x.ppm")


# ---------------------------------------------------------------------------
# CLI

def test_cli_render(tmp_path, capsys):
    rc = cli.main(["render", "--map", "sine_newton", "--center", "0+0i",
                   "--width", "12", "--px", "80", "--out", str(tmp_path)])
    assert rc == 0
    img = read_image(tmp_path / "render.ppm")
    assert img.shape == (80, 80, 3)


def test_cli_render_config_file(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "map": "sine_newton", "center": "0+0i", "width": 6, "px": 40,
        "out": str(tmp_path / "run")}))
    rc = cli.main(["render", "--config", str(cfgfile)])
    assert rc == 0
    assert (tmp_path / "run" / "render.ppm").exists()


def test_cli_flag_overrides_config(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"px": 40, "width": 6,
                                   "out": str(tmp_path)}))
    rc = cli.main(["render", "--config", str(cfgfile), "--px", "24"])
    assert rc == 0
    assert read_image(tmp_path / "render.ppm").shape == (24, 24, 3)


def test_cli_census(tmp_path):
    rc = cli.main(["census", "--depth", "1", "--k-range", "0,0",
                   "--l-range=-3,3", "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "census.csv").read_text().splitlines()
    assert lines[0] == ("level,k,l,branch_path,anchor_re,anchor_im,"
                        "diam_sph,area_sph,samples")
    assert len(lines) == 1 + 1 + 5     # header, one basin, five pole components
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary["whyburn_counts"]) == {"0.5", "0.2", "0.1", "0.05"}
    assert summary["area_ok"] is True


def test_cli_census_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        rc = cli.main(["census", "--depth", "1", "--k-range", "0,0",
                       "--l-range=-3,3", "--out", str(d)])
        assert rc == 0
        outs.append((d / "census.csv").read_bytes()
                    + (d / "summary.json").read_bytes())
    assert outs[0] == outs[1]


def test_cli_trace_boundary(tmp_path):
    rc = cli.main(["trace-boundary", "--map", "power_d", "--zeta", "0+0i",
                   "--r0", "0.5", "--levels", "3", "--samples", "128",
                   "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["cauchy_moduli"]) == 3
    assert all((tmp_path / f"curve_{n:03d}.bin").exists() for n in range(4))


def test_cli_verify_petals(tmp_path):
    rc = cli.main(["verify-petals", "--map", "sine_newton", "--M", "10",
                   "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "petals.json").read_text())
    assert report["passed"] is True
    assert len(report["petals"]) == 2
    assert report["petals"][0]["delta_hat"] < 1e-3


def test_cli_verify_petals_failure_exit_code(tmp_path, monkeypatch):
    failing = PetalReport(passed=False, c1_hat=0.0, c2_hat=2.0,
                          delta_hat=2.0, samples_tested=1,
                          worst_point=1 + 2j, label="stub")
    monkeypatch.setattr(petals_mod, "petal_condition_audit",
                        lambda *a, **k: failing)
    rc = cli.main(["verify-petals", "--out", str(tmp_path)])
    assert rc == 3
    report = json.loads((tmp_path / "petals.json").read_text())
    assert report["passed"] is False
    assert report["petals"][0]["worst_point"] == {"re": 1.0, "im": 2.0}


def test_cli_verify_metrics_pass_and_fail(tmp_path):
    rc = cli.main(["verify-metrics", "--map", "power_d", "--metric",
                   "euclidean", "--start", "2+0i", "--steps", "3",
                   "--out", str(tmp_path)])
    assert rc == 0
    report = json.loads((tmp_path / "metrics.json").read_text())
    assert report["violations"] == []
    # the spherical metric contracts along this escaping orbit
    rc = cli.main(["verify-metrics", "--map", "power_d", "--metric",
                   "spherical", "--start", "2+0i", "--steps", "3",
                   "--bound-ratio", "1.0", "--out", str(tmp_path)])
    assert rc == 3


def test_cli_threads_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("PETALLAB_THREADS", "4")
    rc = cli.main(["render", "--px", "40", "--width", "6",
                   "--out", str(tmp_path)])
    assert rc == 0
    monkeypatch.setenv("PETALLAB_THREADS", "0")
    rc = cli.main(["render", "--px", "40", "--width", "6",
                   "--out", str(tmp_path)])
    assert rc == 2


def test_cli_error_exit_codes(tmp_path):
    assert cli.main(["frobnicate"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["render", "--config", str(bad)]) == 2
    # numerical failure: seed circle through the pole
    rc = cli.main(["trace-boundary", "--map", "sine_newton", "--zeta", "0+0i",
                   "--r0", "1.6", "--levels", "1", "--samples", "64",
                   "--out", str(tmp_path)])
    assert rc == 3


def test_json_float_formatting():
    text = cli.dump_json({"x": 1 / 3, "y": [1.0, 2], "z": {"w": True}})
    assert "0.33333333333333331" in text
    parsed = json.loads(text)
    assert parsed["x"] == 1 / 3
    assert parsed["z"]["w"] is True
