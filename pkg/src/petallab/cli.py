"""Command-line front door.

Subcommands: render | trace-boundary | census | verify-petals | verify-metrics.
Global flags: --config <json> (file values are defaults, flags win),
--threads (PETALLAB_THREADS as fallback), --seed, --out.

Exit codes: 0 success, 2 configuration error, 3 numerical or certification
failure.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .census import CensusConfig, census as run_census, summability_report, whyburn_count
from . import metrics as metrics_mod
from . import petals as petals_mod
from .errors import ConfigError, ParameterError, PetalLabError
from .maps import eval_map, inverse_branch_step, map_by_id
from .render import RenderJob, Viewport, render, write_image
from .tracer import trace_boundary


# ---------------------------------------------------------------------------
# deterministic serialization: stable key order, floats at 17 significant
# digits, so byte-identical reports are a matter of equal inputs

def _fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dump_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{k}": {dump_json(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return dump_json({"re": obj.real, "im": obj.imag}, indent)
    return json.dumps(str(obj))


def write_json(obj, path):
    with open(path, "w") as fh:
        fh.write(dump_json(obj) + "\n")


# ---------------------------------------------------------------------------
# argument plumbing

def parse_complex(s):
    """Accepts 1+2i, 1+2j, 11i, 0.5, -3-4i."""
    try:
        return complex(str(s).strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {s!r}")


def _resolve(args, config, key, default=None):
    """Flag value if given, else config file value, else default."""
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    if key in config:
        return config[key]
    return default


def _threads(args, config):
    t = _resolve(args, config, "threads")
    if t is None:
        t = os.environ.get("PETALLAB_THREADS", 1)
    t = int(t)
    if t < 1:
        raise ConfigError("thread count must be >= 1")
    return t


def _outdir(args, config):
    out = _resolve(args, config, "out", ".")
    os.makedirs(out, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_render(args, config):
    out = _outdir(args, config)
    map_id = _resolve(args, config, "map", "sine_newton")
    center = parse_complex(_resolve(args, config, "center", "0+0i"))
    width = float(_resolve(args, config, "width", 12.0))
    px = int(_resolve(args, config, "px", 800))
    py = int(_resolve(args, config, "py", px))
    height = _resolve(args, config, "height")
    height = width * py / px if height is None else float(height)
    vp = Viewport(center=center, width=width, height=height,
                  pixels_x=px, pixels_y=py)
    job = RenderJob(
        map_id=map_id, viewport=vp,
        max_iter=int(_resolve(args, config, "max-iter", 200)),
        coloring=_resolve(args, config, "coloring", "basin_index"),
        overlay_curves=tuple(_resolve(args, config, "overlay", []) or []),
        d=int(_resolve(args, config, "d", 2)))
    img = render(job, threads=_threads(args, config))
    path = os.path.join(out, _resolve(args, config, "name", "render.ppm"))
    write_image(img, path)
    print(path)
    return 0


def cmd_trace_boundary(args, config):
    out = _outdir(args, config)
    m = map_by_id(_resolve(args, config, "map", "sine_newton"),
                  d=int(_resolve(args, config, "d", 2)))
    zeta = parse_complex(_resolve(args, config, "zeta", "0+0i"))
    r0 = float(_resolve(args, config, "r0", 0.5))
    levels = int(_resolve(args, config, "levels", 6))
    samples = int(_resolve(args, config, "samples", 2048))
    final, rep = trace_boundary(m, zeta, r0, levels, samples, out_dir=out)
    report = {
        "map": m.id,
        "zeta": zeta,
        "r0": r0,
        "levels": levels,
        "samples": samples,
        "cauchy_moduli": list(rep.cauchy_moduli),
        "ratio_estimates": list(rep.ratio_estimates),
        "accessible_pole_gaps": [list(g) for g in rep.accessible_pole_gaps],
        "alpha_max_length": rep.alpha_max_length,
    }
    write_json(report, os.path.join(out, "report.json"))
    if _resolve(args, config, "overlay-image", False):
        w = 2.0 * (np.abs(final.points - zeta).max() * 1.2 + 0.2)
        vp = Viewport(center=zeta, width=w, height=w, pixels_x=600, pixels_y=600)
        curves = sorted(f for f in os.listdir(out) if f.startswith("curve_")
                        and f.endswith(".bin"))
        job = RenderJob(map_id=m.id, viewport=vp, d=m.d,
                        overlay_curves=tuple(os.path.join(out, c) for c in curves))
        write_image(render(job, threads=_threads(args, config)),
                    os.path.join(out, "overlay.ppm"))
    print(os.path.join(out, "report.json"))
    return 0


def _census_config(args, config):
    kw = {}
    for key, cast in (("depth", int), ("delta", float), ("R", float),
                      ("grid-step", float), ("eps-pole", float),
                      ("max-iter", int), ("tol", float)):
        v = _resolve(args, config, key)
        if v is not None:
            kw[key.replace("-", "_")] = cast(v)
    for key in ("k-range", "l-range"):
        v = _resolve(args, config, key)
        if v is not None:
            if isinstance(v, str):
                v = [int(p) for p in v.split(",")]
            kw[key.replace("-", "_")] = (int(v[0]), int(v[1]))
    return CensusConfig(**kw)


def cmd_census(args, config):
    out = _outdir(args, config)
    cfg = _census_config(args, config)
    m = map_by_id("sine_newton")
    records = run_census(cfg, m)
    csv_path = os.path.join(out, "census.csv")
    with open(csv_path, "w") as fh:
        fh.write("level,k,l,branch_path,anchor_re,anchor_im,diam_sph,"
                 "area_sph,samples\n")
        for r in records:
            bp = ";".join(str(b) for b in r.branch_path)
            fh.write(f"{r.level},{r.k},{r.l},{bp},"
                     f"{_fmt_float(r.anchor.real)},{_fmt_float(r.anchor.imag)},"
                     f"{_fmt_float(r.diam_sph)},{_fmt_float(r.area_sph)},"
                     f"{r.sample_count}\n")
    rep = summability_report(records)
    summary = {
        "records": len(records),
        "sum_diam_sq_by_level": {str(k): v for k, v
                                 in sorted(rep.sum_diam_sq_by_level.items())},
        "sum_area_by_level": {str(k): v for k, v
                              in sorted(rep.sum_area_by_level.items())},
        "total_area": rep.total_area,
        "area_ok": rep.area_ok,
        "band_sums_diam_sq": {f"{lo}-{hi}": v for (lo, hi), v
                              in sorted(rep.band_sums_diam_sq.items())},
        "decay_exponent": rep.decay_exponent,
        "sub_resolution_count": rep.sub_resolution_count,
        "whyburn_counts": {str(e): whyburn_count(records, e)
                           for e in (0.5, 0.2, 0.1, 0.05)},
    }
    write_json(summary, os.path.join(out, "summary.json"))
    print(csv_path)
    return 0 if rep.area_ok else 3


def cmd_verify_petals(args, config):
    out = _outdir(args, config)
    m = map_by_id(_resolve(args, config, "map", "sine_newton"))
    if m.id != "sine_newton":
        raise ConfigError("petal verification is wired for sine_newton only")
    M = float(_resolve(args, config, "M", 10.0))
    g = metrics_mod.constant_gauge(1.0)
    seed = int(_resolve(args, config, "seed", 0))

    def inv_up(z):
        return inverse_branch_step(m, z, z + 1j)

    def inv_down(z):
        return inverse_branch_step(m, z, z - 1j)

    reports = []
    ok = True
    for petal, G in ((petals_mod.upper_half_plane_petal(M, g), inv_up),
                     (petals_mod.lower_half_plane_petal(M, g), inv_down)):
        rep = petals_mod.petal_condition_audit(G, petal, seed=seed)
        ok = ok and rep.passed
        reports.append({
            "label": rep.label,
            "passed": rep.passed,
            "c1_hat": rep.c1_hat,
            "c2_hat": rep.c2_hat,
            "delta_hat": rep.delta_hat,
            "samples_tested": rep.samples_tested,
            "worst_point": rep.worst_point,
        })
    path = os.path.join(out, "petals.json")
    write_json({"map": m.id, "M": M, "petals": reports, "passed": ok}, path)
    print(path)
    return 0 if ok else 3


def cmd_verify_metrics(args, config):
    out = _outdir(args, config)
    m = map_by_id(_resolve(args, config, "map", "power_d"),
                  d=int(_resolve(args, config, "d", 2)))
    variant = _resolve(args, config, "metric", "euclidean")
    alpha = float(_resolve(args, config, "alpha", 1.5))
    if variant == "euclidean":
        metric = metrics_mod.euclidean()
    elif variant == "spherical":
        metric = metrics_mod.spherical()
    elif variant == "power_infinity":
        metric = metrics_mod.power_infinity(alpha)
    else:
        raise ConfigError(f"unknown metric variant {variant!r}")
    start = parse_complex(_resolve(args, config, "start", "2+0i"))
    steps = int(_resolve(args, config, "steps", 3))
    ratio = float(_resolve(args, config, "bound-ratio", 0.5))
    orbit = [start]
    for _ in range(steps):
        orbit.append(eval_map(m, orbit[-1]))
    bound_seq = ratio ** np.arange(steps + 1)
    rep = metrics_mod.expansion_audit(m, metric, orbit, bound_seq)
    orbit_id = f"{m.id}:{start.real:g}{start.imag:+g}i:{steps}"
    report = {
        "metric": rep.metric,
        "orbit_id": orbit_id,
        "min_margin": rep.min_margin,
        "violations": list(rep.violations),
    }
    path = os.path.join(out, "metrics.json")
    write_json(report, path)
    print(path)
    return 0 if rep.passed else 3


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="petallab",
        description="numerical laboratory for meromorphic basin boundaries")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file mirroring the flags")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")

    sp = sub.add_parser("render", help="rasterize basins to a PPM image")
    common(sp)
    sp.add_argument("--map")
    sp.add_argument("--center")
    sp.add_argument("--width", type=float)
    sp.add_argument("--height", type=float)
    sp.add_argument("--px", type=int)
    sp.add_argument("--py", type=int)
    sp.add_argument("--max-iter", type=int, dest="max_iter")
    sp.add_argument("--coloring")
    sp.add_argument("--overlay", nargs="*")
    sp.add_argument("--name")
    sp.add_argument("--d", type=int)

    sp = sub.add_parser("trace-boundary", help="pull back equipotential curves")
    common(sp)
    sp.add_argument("--map")
    sp.add_argument("--zeta")
    sp.add_argument("--r0", type=float)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--overlay-image", action="store_const", const=True,
                    dest="overlay_image")
    sp.add_argument("--d", type=int)

    sp = sub.add_parser("census", help="Fatou-component census")
    common(sp)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--k-range", dest="k_range")
    sp.add_argument("--l-range", dest="l_range")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--R", type=float)
    sp.add_argument("--grid-step", type=float, dest="grid_step")
    sp.add_argument("--eps-pole", type=float, dest="eps_pole")
    sp.add_argument("--max-iter", type=int, dest="max_iter")
    sp.add_argument("--tol", type=float)

    sp = sub.add_parser("verify-petals", help="audit the petals at infinity")
    common(sp)
    sp.add_argument("--map")
    sp.add_argument("--M", type=float)

    sp = sub.add_parser("verify-metrics", help="audit metric expansion on an orbit")
    common(sp)
    sp.add_argument("--map")
    sp.add_argument("--metric")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--start")
    sp.add_argument("--steps", type=int)
    sp.add_argument("--bound-ratio", type=float, dest="bound_ratio")
    sp.add_argument("--d", type=int)

    return p


_COMMANDS = {
    "render": cmd_render,
    "trace-boundary": cmd_trace_boundary,
    "census": cmd_census,
    "verify-petals": cmd_verify_petals,
    "verify-metrics": cmd_verify_metrics,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if args.command not in _COMMANDS:
        parser.print_usage(sys.stderr)
        return 2
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"bad config file: {exc}", file=sys.stderr)
            return 2
        if not isinstance(config, dict):
            print("config file must hold a JSON object", file=sys.stderr)
            return 2
    try:
        return _COMMANDS[args.command](args, config)
    except (ConfigError, ParameterError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PetalLabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
