"""Equipotential-style curve pullbacks inside an attracting basin.

gamma_{n+1} is the preimage of gamma_n under the basin map, traced by Newton
continuation so that f(gamma_{n+1}(theta)) = gamma_n(d theta mod 1) holds at
the stored samples exactly (to the Newton tolerance).  The uniform spherical
Cauchy moduli between consecutive curves are the local-connectivity
diagnostic.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
from matplotlib.path import Path as MplPath

from . import _kernels as K
from .errors import AlignmentError, ContinuationError, SeedError, TopologyError
from .maps import eval_map_array, inverse_branch_step
from .metrics import sph_dist_array


@dataclass(frozen=True)
class ClosedCurve:
    """Uniformly sampled closed curve at one pullback level."""
    level: int
    degree: int
    center: complex
    points: np.ndarray          # complex128, ordered by theta, wraps

    @property
    def thetas(self):
        n = len(self.points)
        return np.arange(n) / n

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class TraceReport:
    cauchy_moduli: tuple
    ratio_estimates: tuple
    accessible_pole_gaps: tuple     # per level, tuple of distances per pole
    alpha_max_length: float
    curves: tuple = field(repr=False, default=())


def seed_curve(m, zeta, r0, m_samples):
    """Round seed curve about the attracting fixed point zeta; fails unless
    f maps its closure well inside."""
    zeta = complex(zeta)
    pts = zeta + r0 * np.exp(2j * np.pi * np.arange(m_samples) / m_samples)
    img = eval_map_array(m, pts)
    dev = np.abs(img - zeta)
    if not np.all(np.isfinite(dev)) or dev.max() >= r0:
        raise SeedError(
            f"f does not map the seed circle into itself (max deviation "
            f"{np.nanmax(dev):.3g} vs r0 ={r0}); choose a smaller r0")
    return ClosedCurve(level=0, degree=m.basin_degree(), center=zeta, points=pts)


def _solve_refined(m, t_prev, t_next, w, tol, depth=24):
    """Newton continuation step with recursive target bisection."""
    try:
        return inverse_branch_step(m, t_next, w, tol=tol)
    except ContinuationError:
        if depth <= 0:
            raise
        mid = 0.5 * (t_prev + t_next)
        w = _solve_refined(m, t_prev, mid, w, tol, depth - 1)
        return _solve_refined(m, mid, t_next, w, tol, depth - 1)


def _initial_preimage(m, curve, tol):
    """Any preimage of gamma(0) on the next curve, found from a bundle of
    deterministic seeds near gamma(0)."""
    t0 = curve.points[0]
    zeta = curve.center
    spread = max(abs(t0 - zeta), 1e-3)
    seeds = [t0,
             zeta + 1.1 * (t0 - zeta),
             t0 + 0.3j * spread,
             t0 - 0.3j * spread,
             zeta + (t0 - zeta) * np.exp(0.4j),
             zeta + (t0 - zeta) * np.exp(-0.4j)]
    for s in seeds:
        try:
            w = inverse_branch_step(m, t0, s, tol=tol)
        except ContinuationError:
            continue
        if abs(w - zeta) < 100.0 * (1.0 + spread):
            return w
    raise ContinuationError(f"no starting preimage found for {t0}", target=t0)


def pullback_curve(m, curve, tol=1e-10):
    """One preimage curve: the full d-fold covering sweep of the input.

    Level 0 input with M samples yields d*M samples; deeper levels keep their
    sample count (the walk passes through d times as many solves and keeps
    every d-th).  gamma_{n+1}(0) is the sheet start closest to gamma_n(0).
    """
    d = curve.degree
    old = curve.points
    n_old = len(old)
    targets = np.tile(old, d)
    w0 = _initial_preimage(m, curve, tol)
    ws, fail = K.continue_walk(m.kernel_id, m.d, targets, w0, tol, 80)
    if fail >= 0:
        # redo the walk in python, bisecting targets where the plain
        # continuation loses its footing
        ws = ws.copy()
        w = w0
        for s in range(len(targets)):
            t_prev = targets[s - 1] if s > 0 else targets[0]
            try:
                w = inverse_branch_step(m, targets[s], w, tol=tol)
            except ContinuationError:
                w = _solve_refined(m, t_prev, targets[s], w, tol)
            ws[s] = w
    # closure: one more continuation step must land back on the start
    w_close = _solve_refined(m, targets[-1], targets[0], ws[-1], tol)
    gap = abs(w_close - ws[0])
    if gap > 1e-6 * (1.0 + np.abs(ws).max()):
        raise TopologyError(
            f"pullback curve does not close up (gap {gap:.3g}); "
            f"increase the sample count")
    # rotate whole sheets so the new start is the preimage closest to gamma(0)
    sheet_starts = ws[::n_old]
    k_star = int(np.argmin(np.abs(sheet_starts - old[0])))
    ws = np.roll(ws, -k_star * n_old)
    pts = ws if curve.level == 0 else ws[::d]
    return ClosedCurve(level=curve.level + 1, degree=d, center=curve.center,
                       points=pts)


def pullback_residual(m, new_curve, old_curve):
    """max_theta |f(gamma_{n+1}(theta)) - gamma_n(d theta mod 1)|."""
    d = new_curve.degree
    n_new = len(new_curve)
    n_old = len(old_curve)
    img = eval_map_array(m, new_curve.points)
    idx = (np.arange(n_new) * d * n_old // n_new) % n_old
    return float(np.abs(img - old_curve.points[idx]).max())


def _matched_pairs(a, b):
    """Samples of consecutive curves at their common parameters."""
    if b.level != a.level + 1:
        raise AlignmentError(f"levels {a.level},{b.level} are not consecutive")
    la, lb = len(a), len(b)
    if la == lb:
        return a.points, b.points
    if lb % la == 0:
        step = lb // la
        return a.points, b.points[::step]
    raise AlignmentError(f"incompatible sample counts {la}, {lb}")


def cauchy_modulus(a, b):
    """sup over matched parameters of the spherical distance between
    consecutive curves."""
    pa, pb = _matched_pairs(a, b)
    return float(sph_dist_array(pa, pb).max())


def curve_path(curve):
    return MplPath(np.column_stack([curve.points.real, curve.points.imag]),
                   closed=False)


def contains_points(curve, pts):
    pts = np.asarray(pts, np.complex128)
    return curve_path(curve).contains_points(
        np.column_stack([pts.real, pts.imag]))


def transversal_arcs(a, b):
    """Max length of transversal arcs joining gamma_0(theta) to gamma_1(theta).

    Straight segments, with a two-segment detour through a neighboring midline
    point when the segment midpoint leaves the closed annulus."""
    pa, pb = _matched_pairs(a, b)
    n = len(pa)
    mid = 0.5 * (pa + pb)
    inside = contains_points(b, mid) & ~contains_points(a, mid)
    direct = np.abs(pb - pa)
    lengths = direct.copy()
    for j in np.nonzero(~inside)[0]:
        if direct[j] == 0.0:
            continue  # degenerate arc, nothing to route around
        j1 = (j + 1) % n
        detour = 0.5 * (pa[j1] + pb[j1])
        lengths[j] = abs(detour - pa[j]) + abs(pb[j] - detour)
    return float(lengths.max())


def save_curve(curve, path):
    """Binary little-endian (theta, Re z, Im z) triples."""
    data = np.column_stack([curve.thetas, curve.points.real,
                            curve.points.imag]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(data.tobytes())


def load_curve_points(path):
    raw = np.frombuffer(open(path, "rb").read(), dtype="<f8").reshape(-1, 3)
    return raw[:, 1] + 1j * raw[:, 2]


def trace_boundary(m, zeta, r0, n_levels, m_samples, out_dir=None, tol=1e-10):
    """Run n_levels pullbacks from a round seed and collect the convergence
    diagnostics.  Returns (final curve, TraceReport)."""
    zeta = complex(zeta)
    curves = [seed_curve(m, zeta, r0, m_samples)]
    for _ in range(n_levels):
        curves.append(pullback_curve(m, curves[-1], tol=tol))
    moduli = [cauchy_modulus(curves[n], curves[n + 1])
              for n in range(len(curves) - 1)]
    ratios = [moduli[n + 1] / moduli[n] for n in range(len(moduli) - 1)]
    gaps = []
    if m.has_poles:
        k = round(zeta.real / math.pi)
        accessible = [m.pole(k - 1), m.pole(k)]
        for c in curves:
            gaps.append(tuple(float(np.abs(c.points - p).min())
                              for p in accessible))
    alpha_max = transversal_arcs(curves[0], curves[1]) if n_levels >= 1 else 0.0
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for c in curves:
            save_curve(c, os.path.join(out_dir, f"curve_{c.level:03d}.bin"))
    report = TraceReport(cauchy_moduli=tuple(moduli),
                         ratio_estimates=tuple(ratios),
                         accessible_pole_gaps=tuple(gaps),
                         alpha_max_length=alpha_max,
                         curves=tuple(curves))
    return curves[-1], report
