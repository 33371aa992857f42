"""Fatou-component census for f(z) = z - tan z: locate the level-1 components
clustered at the poles, flood-fill their extents on a grid, and aggregate the
diameter/area statistics behind the finiteness criterion."""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull

from . import _kernels as K
from .errors import CensusError, ConfigError, ParameterError
from .maps import eval_map, inverse_branch_step, map_by_id, classify_grid
from .metrics import sph_dist

# frozen extremal constants for the spherical/Euclidean disc comparison,
# valid for radii below SPH_DISC_RCAP (computed by scanning the chordal
# extremals over |z| and r; regression-tested)
SPH_DISC_C1 = 1.57
SPH_DISC_C2 = 2.60
SPH_DISC_RCAP = 0.5

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class CensusConfig:
    depth: int = 1
    k_range: tuple = (-2, 2)
    l_range: tuple = (-8, 8)
    delta: float = 0.3
    R: float = 12.0
    grid_step: float = 2.0 ** -7
    grid_step_basin: float = 2.0 ** -5
    eps_pole: float = 0.1
    z0: complex = 11j               # anchor reference point on the basin axis
    max_iter: int = 400
    tol: float = 1e-6
    escape_radius: float = 60.0
    min_cells: int = 200            # refine the grid until a component has this many
    min_step: float = 2.0 ** -13

    def __post_init__(self):
        if not (0 < self.delta < HALF_PI):
            raise ConfigError("need 0 < delta < pi/2")
        if self.R <= 2:
            raise ConfigError("R too small for the component boxes")
        if abs(self.z0.imag) <= self.R - 2:
            raise ConfigError("|Im z0| must exceed R - 2")

    @property
    def attr_k_lo(self):
        return min(self.k_range[0], self.l_range[0]) - 2

    @property
    def attr_k_hi(self):
        return max(self.k_range[1], self.l_range[1]) + 2

    def attractors(self):
        return np.array([k * math.pi
                         for k in range(self.attr_k_lo, self.attr_k_hi + 1)],
                        np.complex128)

    def attr_index(self, k):
        return k - self.attr_k_lo


@dataclass(frozen=True)
class ComponentRecord:
    level: int
    k: int                          # box index of the component
    l: int                          # basin index the component feeds
    branch_path: tuple
    anchor: complex
    diam_sph: float = 0.0
    area_sph: float = 0.0
    sample_count: int = 0
    grid_step: float = 0.0
    sub_resolution: bool = False


def boxes(cfg):
    """The disjoint rectangles R_k that contain the level-1 components."""
    out = []
    for k in range(cfg.k_range[0], cfg.k_range[1] + 1):
        out.append((k, (k * math.pi + cfg.delta, (k + 1) * math.pi - cfg.delta,
                        -cfg.R, cfg.R)))
    return out


def locate_component_anchor(k, l, cfg, m=None):
    """The unique preimage of the anchor z_l inside the pole disc D(p_k, eps).

    Solved once for the translated problem (0, l-k) and shifted by k pi, so
    translation consistency is exact."""
    if l in (k, k + 1):
        raise CensusError(f"(k, l) = ({k}, {l}) indexes the basin itself")
    m = m or map_by_id("sine_newton")
    lk = l - k
    target = cfg.z0 + lk * math.pi
    p0 = m.pole(0)
    seed = p0 + 1.0 / (target - p0)
    w = inverse_branch_step(m, target, seed, tol=1e-12)
    if abs(w - p0) >= cfg.eps_pole:
        raise CensusError(
            f"anchor for (0, {lk}) landed outside D(p_0, {cfg.eps_pole}): {w}")
    if abs(eval_map(m, w) - target) > 1e-8:
        raise CensusError(f"anchor verification failed for (0, {lk})")
    return w + k * math.pi


def _sph_embed(pts):
    """Stereographic embedding onto the unit sphere."""
    x, y = pts.real, pts.imag
    s = 1.0 + x * x + y * y
    return np.column_stack([2 * x / s, 2 * y / s, (s - 2.0) / s])


def _max_pairwise_arc(pts):
    """Spherical diameter of a finite point set."""
    if len(pts) < 2:
        return 0.0
    emb = _sph_embed(np.asarray(pts, np.complex128))
    if len(emb) > 16:
        try:
            emb = emb[ConvexHull(emb).vertices]
        except Exception:
            pass  # degenerate (flat) sets: brute force below
    if len(emb) > 4000:
        emb = emb[:: len(emb) // 4000 + 1]
    d2 = np.sum((emb[:, None, :] - emb[None, :, :]) ** 2, axis=-1)
    chord = math.sqrt(float(d2.max()))
    return 2.0 * math.asin(min(1.0, chord / 2.0))


def _classify_mask(m, cfg, xs, ys, attr_target):
    grid = xs[None, :] + 1j * ys[:, None]
    codes, data, _, _ = classify_grid(
        m, grid.ravel(), cfg.attractors(), max_iter=cfg.max_iter, tol=cfg.tol,
        escape_radius=cfg.escape_radius)
    mask = (codes == K.CONVERGED) & (data == attr_target)
    return mask.reshape(grid.shape)


def _flood_extent(m, cfg, anchor, attr_target, box, step):
    """Grid extent of the component containing `anchor`, by connected-component
    labeling of the matching-verdict mask.  The window grows until the
    component no longer touches its edge.  Returns (centers, diam, area)."""
    x0b, x1b, y0b, y1b = box
    half = 16 * step
    while True:
        x0 = max(x0b, anchor.real - half)
        x1 = min(x1b, anchor.real + half)
        y0 = max(y0b, anchor.imag - half)
        y1 = min(y1b, anchor.imag + half)
        # grid anchored at the anchor itself so translated components see
        # translated grids
        xs = anchor.real + step * np.arange(math.ceil((x0 - anchor.real) / step),
                                            math.floor((x1 - anchor.real) / step) + 1)
        ys = anchor.imag + step * np.arange(math.ceil((y0 - anchor.imag) / step),
                                            math.floor((y1 - anchor.imag) / step) + 1)
        mask = _classify_mask(m, cfg, xs, ys, attr_target)
        ai = int(np.argmin(np.abs(xs - anchor.real)))
        aj = int(np.argmin(np.abs(ys - anchor.imag)))
        labels, _ = ndimage.label(mask)
        lab = labels[aj, ai]
        if lab == 0:
            return None
        comp = labels == lab
        clamped = (x0 == x0b and x1 == x1b and y0 == y0b and y1 == y1b)
        touches = (comp[0, :].any() or comp[-1, :].any()
                   or comp[:, 0].any() or comp[:, -1].any())
        if touches and not clamped:
            half *= 2
            continue
        centers = (xs[None, :] + 1j * ys[:, None])[comp]
        boundary = comp & ~ndimage.binary_erosion(comp)
        bpts = (xs[None, :] + 1j * ys[:, None])[boundary]
        h = step / 2
        corners = np.concatenate([bpts + h + 1j * h, bpts + h - 1j * h,
                                  bpts - h + 1j * h, bpts - h - 1j * h])
        diam = _max_pairwise_arc(corners)
        dens = 2.0 / (1.0 + np.abs(centers) ** 2)
        area = float(np.sum(step * step * dens * dens))
        return centers, diam, area


def component_extent(rec, cfg, m=None):
    """Flood-fill a record's component; refines the grid for components that
    fall below the cell-count floor.  Returns the completed record."""
    m = m or map_by_id("sine_newton")
    attr_target = cfg.attr_index(rec.l)
    if rec.level == 0:
        k = rec.k
        box = (k * math.pi - HALF_PI, k * math.pi + HALF_PI, -cfg.R, cfg.R)
        step = cfg.grid_step_basin
        out = _flood_extent(m, cfg, rec.anchor, attr_target, box, step)
        if out is None:
            raise CensusError(f"basin anchor misclassified for k={k}")
        centers, diam, area = out
        return replace(rec, diam_sph=diam, area_sph=area,
                       sample_count=len(centers), grid_step=step,
                       sub_resolution=False)
    box = dict(boxes(cfg))[rec.k]
    step = cfg.grid_step
    while True:
        out = _flood_extent(m, cfg, rec.anchor, attr_target, box, step)
        if out is not None:
            centers, diam, area = out
            if len(centers) >= cfg.min_cells or step <= cfg.min_step:
                break
        elif step <= cfg.min_step:
            raise CensusError(f"anchor misclassified for (k,l)=({rec.k},{rec.l})")
        step /= 2
    return replace(rec, diam_sph=diam, area_sph=area,
                   sample_count=len(centers), grid_step=step,
                   sub_resolution=len(centers) < cfg.min_cells)


def component_points(rec, cfg, m=None):
    """The accepted grid centers of a completed record (for set-level tests)."""
    m = m or map_by_id("sine_newton")
    if rec.level == 0:
        box = (rec.k * math.pi - HALF_PI, rec.k * math.pi + HALF_PI, -cfg.R, cfg.R)
        step = cfg.grid_step_basin
    else:
        box = dict(boxes(cfg))[rec.k]
        step = rec.grid_step or cfg.grid_step
    out = _flood_extent(m, cfg, rec.anchor, cfg.attr_index(rec.l), box, step)
    if out is None:
        raise CensusError("anchor misclassified")
    return out[0]


def census(cfg, m=None, progress=None):
    """Records for levels 0..depth over the configured index ranges."""
    m = m or map_by_id("sine_newton")
    records = []
    for k in range(cfg.k_range[0], cfg.k_range[1] + 1):
        rec = ComponentRecord(level=0, k=k, l=k, branch_path=(),
                              anchor=complex(k * math.pi, 0.0))
        records.append(component_extent(rec, cfg, m))
        if progress:
            progress(records[-1])
    if cfg.depth < 1:
        return records
    level1 = []
    for k in range(cfg.k_range[0], cfg.k_range[1] + 1):
        for l in range(cfg.l_range[0], cfg.l_range[1] + 1):
            if l in (k, k + 1):
                continue
            anchor = locate_component_anchor(k, l, cfg, m)
            rec = ComponentRecord(level=1, k=k, l=l, branch_path=(k,),
                                  anchor=anchor)
            level1.append(component_extent(rec, cfg, m))
            if progress:
                progress(level1[-1])
    records.extend(level1)
    prev = level1
    for _ in range(2, cfg.depth + 1):
        nxt = []
        for rec in prev:
            for k2 in range(cfg.k_range[0], cfg.k_range[1] + 1):
                p = m.pole(k2)
                if abs(rec.anchor - p) < 2 * cfg.eps_pole:
                    continue  # would re-find the parent cluster
                seed = p + 1.0 / (rec.anchor - p)
                try:
                    w = inverse_branch_step(m, rec.anchor, seed, tol=1e-12)
                except Exception:
                    continue
                if abs(w - p) >= cfg.eps_pole:
                    continue
                if any(abs(w - r.anchor) < cfg.grid_step / 2 for r in nxt):
                    continue
                child = ComponentRecord(level=rec.level + 1, k=k2, l=rec.l,
                                        branch_path=(k2,) + rec.branch_path,
                                        anchor=w)
                try:
                    nxt.append(component_extent(child, cfg, m))
                except CensusError:
                    continue
                if progress:
                    progress(nxt[-1])
        records.extend(nxt)
        prev = nxt
    return records


@dataclass(frozen=True)
class SummabilityReport:
    sum_diam_sq_by_level: dict
    sum_area_by_level: dict
    total_area: float
    band_sums_diam_sq: dict         # |l-k| bands over level >= 1 records
    decay_exponent: float
    area_ok: bool
    sub_resolution_count: int


def summability_report(records):
    by_level_d = {}
    by_level_a = {}
    for r in records:
        by_level_d[r.level] = by_level_d.get(r.level, 0.0) + r.diam_sph ** 2
        by_level_a[r.level] = by_level_a.get(r.level, 0.0) + r.area_sph
    total_area = sum(by_level_a.values())
    bands = {(2, 4): 0.0, (4, 8): 0.0, (8, 16): 0.0, (16, 64): 0.0}
    for r in records:
        if r.level < 1:
            continue
        n = abs(r.l - r.k)
        for (lo, hi) in bands:
            if lo <= n < hi:
                bands[(lo, hi)] += r.diam_sph ** 2
    # decay exponent of diam vs |l - k| over the well-resolved level-1 records
    # (|l - k| >= 2 only; the two nearest components sit outside the
    # asymptotic regime).  Restricted to k = 0 when available: the spherical
    # density shrinks the translated copies and would steepen the fit.
    pool = [r for r in records
            if r.level == 1 and not r.sub_resolution and r.diam_sph > 0
            and abs(r.l - r.k) >= 2]
    k0 = [r for r in pool if r.k == 0]
    if len(k0) >= 3:
        pool = k0
    xs = [math.log(abs(r.l - r.k)) for r in pool]
    ys = [math.log(r.diam_sph) for r in pool]
    if len(xs) >= 3:
        slope = np.polyfit(xs, ys, 1)[0]
        exponent = -float(slope)
    else:
        exponent = math.nan
    return SummabilityReport(
        sum_diam_sq_by_level=by_level_d, sum_area_by_level=by_level_a,
        total_area=total_area, band_sums_diam_sq=bands,
        decay_exponent=exponent, area_ok=total_area <= 4 * math.pi,
        sub_resolution_count=sum(1 for r in records if r.sub_resolution))


def whyburn_count(records, eps):
    """Number of recorded components with spherical diameter >= eps."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    return sum(1 for r in records if r.diam_sph >= eps)


def sph_disc_bounds(z, r):
    """Certified radii s1 <= s2 with D_sph(z, s1) in D(z, r) in D_sph(z, s2)."""
    if not (0 < r < SPH_DISC_RCAP):
        raise ParameterError(f"need 0 < r < {SPH_DISC_RCAP}")
    scale = r / (abs(complex(z)) ** 2 + 1.0)
    return SPH_DISC_C1 * scale, SPH_DISC_C2 * scale
