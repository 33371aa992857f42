"""Dynamical-plane rendering: per-pixel orbit classification to an RGB buffer
and binary PPM output.  Pixel rows are dispatched to a thread pool in fixed
chunks and written back by index, so the image bytes do not depend on the
thread count."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigError
from .maps import map_by_id, classify_grid
from .tracer import load_curve_points

# root of z + e^z, the attractor of the exponential Newton map
OMEGA = -0.5671432904097838

COLORINGS = ("basin_index", "iteration_shade", "julia_mask")

#: flat basin palette, indexed by k mod 12
BASIN_PALETTE = np.array([
    (66, 135, 245), (240, 160, 40), (80, 190, 120), (220, 80, 90),
    (150, 110, 220), (160, 120, 80), (235, 130, 200), (130, 130, 130),
    (190, 200, 60), (70, 200, 220), (250, 220, 100), (120, 80, 150),
], np.uint8)

UNDECIDED_COLOR = np.array((40, 40, 40), np.uint8)
PREPOLE_COLOR = np.array((0, 0, 0), np.uint8)
ESCAPED_COLOR = np.array((255, 255, 255), np.uint8)
OVERLAY_COLOR = np.array((255, 0, 0), np.uint8)


@dataclass(frozen=True)
class Viewport:
    center: complex
    width: float
    height: float
    pixels_x: int
    pixels_y: int

    def __post_init__(self):
        if min(self.width, self.height) <= 0 or min(self.pixels_x, self.pixels_y) < 1:
            raise ConfigError("viewport extents and pixel counts must be positive")
        aspect_view = self.height / self.width
        aspect_px = self.pixels_y / self.pixels_x
        if abs(aspect_px - aspect_view) > 0.01 * aspect_view:
            raise ConfigError(
                f"pixel aspect {aspect_px:.4f} disagrees with viewport aspect "
                f"{aspect_view:.4f} by more than 1%")

    def pixel_centers(self):
        """Complex coordinates of pixel centers, row-major top-down."""
        xs = self.center.real + self.width * (
            (np.arange(self.pixels_x) + 0.5) / self.pixels_x - 0.5)
        ys = self.center.imag + self.height * (
            0.5 - (np.arange(self.pixels_y) + 0.5) / self.pixels_y)
        return xs[None, :] + 1j * ys[:, None]

    def to_pixel(self, z):
        """(col, row) of a complex point, or None when outside the frame."""
        fx = (z.real - self.center.real) / self.width + 0.5
        fy = 0.5 - (z.imag - self.center.imag) / self.height
        i = int(fx * self.pixels_x)
        j = int(fy * self.pixels_y)
        if 0 <= i < self.pixels_x and 0 <= j < self.pixels_y:
            return i, j
        return None


@dataclass(frozen=True)
class RenderJob:
    map_id: str
    viewport: Viewport
    max_iter: int = 200
    coloring: str = "basin_index"
    overlay_curves: tuple = ()
    d: int = 2
    tol: float = 1e-6
    escape_radius: float = 50.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.coloring not in COLORINGS:
            raise ConfigError(f"unknown coloring {self.coloring!r}; "
                              f"choose from {COLORINGS}")


def _attractors_for(m, vp):
    """Default attractor list covering the viewport."""
    if m.id == "sine_newton":
        k_lo = math.floor((vp.center.real - vp.width / 2) / math.pi) - 2
        k_hi = math.ceil((vp.center.real + vp.width / 2) / math.pi) + 2
        return (np.array([k * math.pi for k in range(k_lo, k_hi + 1)],
                         np.complex128), k_lo)
    if m.id == "exp_newton":
        return np.array([OMEGA], np.complex128), 0
    # power_d and parabolic_quad settle at the origin
    return np.array([0j], np.complex128), 0


def _colorize(job, k_lo, codes, data, steps):
    n = len(codes)
    img = np.empty((n, 3), np.uint8)
    if job.coloring == "julia_mask":
        img[:] = ESCAPED_COLOR
        img[codes != K.CONVERGED] = PREPOLE_COLOR
        return img
    if job.coloring == "iteration_shade":
        shade = (255.0 * (1.0 - steps / float(job.max_iter))).astype(np.uint8)
        img[:, 0] = img[:, 1] = img[:, 2] = shade
        img[codes == K.UNDECIDED] = UNDECIDED_COLOR
        return img
    img[:] = UNDECIDED_COLOR
    conv = codes == K.CONVERGED
    img[conv] = BASIN_PALETTE[(data[conv] + k_lo) % len(BASIN_PALETTE)]
    img[codes == K.PREPOLE] = PREPOLE_COLOR
    img[codes == K.ESCAPED] = ESCAPED_COLOR
    return img


def render(job, threads=1):
    """Classify every pixel center and return the (py, px, 3) uint8 buffer."""
    m = map_by_id(job.map_id, d=job.d)
    vp = job.viewport
    attractors, k_lo = _attractors_for(m, vp)
    grid = vp.pixel_centers()
    py, px = grid.shape
    img = np.empty((py, px, 3), np.uint8)

    def work(row_lo, row_hi):
        chunk = grid[row_lo:row_hi].ravel()
        codes, data, steps, _ = classify_grid(
            m, chunk, attractors, max_iter=job.max_iter, tol=job.tol,
            escape_radius=job.escape_radius)
        return _colorize(job, k_lo, codes, data, steps).reshape(
            row_hi - row_lo, px, 3)

    chunk_rows = max(1, py // (4 * max(1, threads)))
    bounds = [(lo, min(lo + chunk_rows, py)) for lo in range(0, py, chunk_rows)]
    if threads <= 1:
        for lo, hi in bounds:
            img[lo:hi] = work(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for (lo, hi), block in zip(bounds,
                                       pool.map(lambda b: work(*b), bounds)):
                img[lo:hi] = block
    for path in job.overlay_curves:
        _overlay(img, vp, load_curve_points(path))
    return img


def _overlay(img, vp, pts):
    for z in pts:
        hit = vp.to_pixel(z)
        if hit is not None:
            i, j = hit
            img[j, i] = OVERLAY_COLOR


def write_image(buffer, path):
    """Binary PPM (P6), 8-bit RGB, row-major top-down."""
    buffer = np.ascontiguousarray(buffer, np.uint8)
    if buffer.ndim != 3 or buffer.shape[2] != 3 or buffer.size == 0:
        raise ConfigError("image buffer must be a nonempty (rows, cols, 3) array")
    py, px = buffer.shape[:2]
    try:
        with open(path, "wb") as fh:
            fh.write(f"P6\n{px} {py}\n255\n".encode("ascii"))
            fh.write(buffer.tobytes())
    except OSError as exc:
        raise OSError(f"could not write image to {path}: {exc}") from exc


def read_image(path):
    """Parse a P6 file written by write_image back into an array."""
    with open(path, "rb") as fh:
        raw = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    if fields[0] != b"P6" or fields[3] != b"255":
        raise ConfigError(f"{path} is not an 8-bit P6 file")
    px, py = int(fields[1]), int(fields[2])
    data = np.frombuffer(raw[pos:pos + 3 * px * py], np.uint8)
    return data.reshape(py, px, 3)
