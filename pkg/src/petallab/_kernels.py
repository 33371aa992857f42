"""Hot numeric kernels.

The inner loops (per-pixel orbit classification, Newton continuation along
curves, ladder recurrences) are compiled with numba when it is available.
Setting the environment variable ``PETALLAB_NO_NUMBA=1`` forces the fallback
path: vectorized numpy for the grid classifier, plain Python for the
sequential loops.  ``benchmarks/bench_kernels.py`` compares the two.
"""

import cmath
import math
import os

import numpy as np

_FORCE_FALLBACK = bool(os.environ.get("PETALLAB_NO_NUMBA"))

try:
    if _FORCE_FALLBACK:
        raise ImportError("fallback forced by PETALLAB_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


MAP_SINE_NEWTON = 0
MAP_EXP_NEWTON = 1
MAP_PARABOLIC_QUAD = 2
MAP_POWER_D = 3

# orbit verdict codes
UNDECIDED = 0
CONVERGED = 1
ESCAPED = 2
PREPOLE = 3

# two-term representation of pi, for argument reduction of tan
_PI_HI = math.pi
_PI_LO = 1.2246467991473532e-16
_HALF_PI = math.pi / 2.0

# |Im z| beyond which tan is evaluated through its asymptote +-i
_TAN_ASYMPTOTE_IM = 20.0


@njit(cache=True)
def tan_safe(z):
    """tan(z) with pi-periodic argument reduction and overflow-free tails."""
    y = z.imag
    if y > _TAN_ASYMPTOTE_IM:
        q = cmath.exp(2j * z)
        return 1j * (1.0 - q) / (1.0 + q)
    if y < -_TAN_ASYMPTOTE_IM:
        q = cmath.exp(-2j * z)
        return -1j * (1.0 - q) / (1.0 + q)
    k = math.floor(z.real / math.pi + 0.5)
    x = (z.real - k * _PI_HI) - k * _PI_LO
    return cmath.tan(complex(x, y))


@njit(cache=True)
def map_eval(map_id, dpar, z):
    if map_id == MAP_SINE_NEWTON:
        return z - tan_safe(z)
    elif map_id == MAP_EXP_NEWTON:
        if z.real < -30.0:
            return (z - 1.0) * cmath.exp(z)
        return (z - 1.0) / (1.0 + cmath.exp(-z))
    elif map_id == MAP_PARABOLIC_QUAD:
        return z + z * z
    else:
        return z ** dpar


@njit(cache=True)
def map_deriv(map_id, dpar, z):
    if map_id == MAP_SINE_NEWTON:
        t = tan_safe(z)
        return -t * t
    elif map_id == MAP_EXP_NEWTON:
        # f = z - g/g' for g = z + e^z, so f' = g g'' / g'^2
        if z.real > 30.0:
            return 1.0 + (z - 2.0) * cmath.exp(-z)
        if z.real < -30.0:
            return z * cmath.exp(z)
        w = cmath.exp(z)
        return (z + w) * w / ((1.0 + w) * (1.0 + w))
    elif map_id == MAP_PARABOLIC_QUAD:
        return 1.0 + 2.0 * z
    else:
        return dpar * z ** (dpar - 1)


@njit(cache=True)
def pole_distance(map_id, z):
    """Distance to the nearest pole (inf for pole-free maps)."""
    if map_id == MAP_SINE_NEWTON:
        k = math.floor((z.real - _HALF_PI) / math.pi + 0.5)
        return math.hypot(z.real - (_HALF_PI + k * math.pi), z.imag)
    return math.inf


@njit(cache=True, nogil=True)
def _classify_loop(map_id, dpar, z0s, attractors, attr_real, max_iter, tol,
                   escape_radius, pole_eps):
    n = z0s.shape[0]
    na = attractors.shape[0]
    codes = np.zeros(n, np.int8)
    data = np.full(n, -1, np.int64)
    steps = np.zeros(n, np.int64)
    finals = np.zeros(n, np.complex128)
    for i in range(n):
        z = z0s[i]
        code = UNDECIDED
        dat = -1
        prev = -1
        step = 0
        while step <= max_iter:
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                code = ESCAPED
                dat = step
                break
            if pole_distance(map_id, z) < pole_eps:
                code = PREPOLE
                dat = step
                break
            hit = -1
            if (not attr_real) or abs(z.imag) < tol:
                for a in range(na):
                    if abs(z - attractors[a]) < tol:
                        hit = a
                        break
            if hit >= 0 and hit == prev:
                code = CONVERGED
                dat = hit
                break
            prev = hit
            if abs(z.imag) > escape_radius:
                code = ESCAPED
                dat = step
                break
            if step == max_iter:
                break
            z = map_eval(map_id, dpar, z)
            step += 1
        codes[i] = code
        data[i] = dat
        steps[i] = step
        finals[i] = z
    return codes, data, steps, finals


def _tan_safe_np(z):
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    hi = z.imag > _TAN_ASYMPTOTE_IM
    lo = z.imag < -_TAN_ASYMPTOTE_IM
    mid = ~(hi | lo)
    if hi.any():
        q = np.exp(2j * z[hi])
        out[hi] = 1j * (1.0 - q) / (1.0 + q)
    if lo.any():
        q = np.exp(-2j * z[lo])
        out[lo] = -1j * (1.0 - q) / (1.0 + q)
    if mid.any():
        zm = z[mid]
        k = np.floor(zm.real / np.pi + 0.5)
        x = (zm.real - k * _PI_HI) - k * _PI_LO
        out[mid] = np.tan(x + 1j * zm.imag)
    return out


def map_eval_np(map_id, dpar, z):
    """Vectorized map evaluation (numpy fallback path)."""
    z = np.asarray(z, dtype=np.complex128)
    if map_id == MAP_SINE_NEWTON:
        return z - _tan_safe_np(z)
    if map_id == MAP_EXP_NEWTON:
        out = np.empty_like(z)
        low = z.real < -30.0
        out[low] = (z[low] - 1.0) * np.exp(z[low])
        hi = ~low
        out[hi] = (z[hi] - 1.0) / (1.0 + np.exp(-z[hi]))
        return out
    if map_id == MAP_PARABOLIC_QUAD:
        return z + z * z
    return z ** dpar


def _pole_distance_np(map_id, z):
    if map_id == MAP_SINE_NEWTON:
        k = np.floor((z.real - _HALF_PI) / np.pi + 0.5)
        return np.hypot(z.real - (_HALF_PI + k * np.pi), z.imag)
    return np.full(np.shape(z), np.inf)


def _classify_numpy(map_id, dpar, z0s, attractors, attr_real, max_iter, tol,
                    escape_radius, pole_eps):
    n = z0s.shape[0]
    z = z0s.astype(np.complex128).copy()
    codes = np.zeros(n, np.int8)
    data = np.full(n, -1, np.int64)
    steps = np.zeros(n, np.int64)
    prev = np.full(n, -1, np.int64)
    active = np.ones(n, bool)
    for step in range(max_iter + 1):
        if not active.any():
            break
        bad = active & ~(np.isfinite(z.real) & np.isfinite(z.imag))
        if bad.any():
            codes[bad] = ESCAPED
            data[bad] = step
            steps[bad] = step
            active &= ~bad
        pd = _pole_distance_np(map_id, z)
        pole = active & (pd < pole_eps)
        if pole.any():
            codes[pole] = PREPOLE
            data[pole] = step
            steps[pole] = step
            active &= ~pole
        hit = np.full(n, -1, np.int64)
        cand = active.copy()
        if attr_real:
            cand &= np.abs(z.imag) < tol
        if cand.any():
            for a in range(attractors.shape[0]):
                m = cand & (hit < 0) & (np.abs(z - attractors[a]) < tol)
                hit[m] = a
        conv = active & (hit >= 0) & (hit == prev)
        if conv.any():
            codes[conv] = CONVERGED
            data[conv] = hit[conv]
            steps[conv] = step
            active &= ~conv
        prev[active] = hit[active]
        esc = active & (np.abs(z.imag) > escape_radius)
        if esc.any():
            codes[esc] = ESCAPED
            data[esc] = step
            steps[esc] = step
            active &= ~esc
        if step < max_iter and active.any():
            z[active] = map_eval_np(map_id, dpar, z[active])
    steps[active] = max_iter
    return codes, data, steps, z


def classify_batch(map_id, dpar, z0s, attractors, max_iter, tol,
                   escape_radius, pole_eps):
    """Classify an array of starting points; returns (codes, data, steps, finals)."""
    z0s = np.ascontiguousarray(z0s, dtype=np.complex128)
    attractors = np.ascontiguousarray(attractors, dtype=np.complex128)
    attr_real = bool(np.all(attractors.imag == 0.0))
    if NUMBA_ENABLED:
        return _classify_loop(map_id, dpar, z0s, attractors, attr_real,
                              max_iter, tol, escape_radius, pole_eps)
    return _classify_numpy(map_id, dpar, z0s, attractors, attr_real,
                           max_iter, tol, escape_radius, pole_eps)


@njit(cache=True, nogil=True)
def newton_solve(map_id, dpar, target, seed, tol, max_newton):
    """Damped Newton for f(w) = target; step capped at half the pole distance.

    Returns (w, ok).
    """
    w = seed
    for _ in range(max_newton):
        r = map_eval(map_id, dpar, w) - target
        if abs(r) < tol:
            return w, True
        dz = map_deriv(map_id, dpar, w)
        if dz == 0.0:
            return w, False
        step = -r / dz
        cap = 0.5 * pole_distance(map_id, w)
        if not math.isfinite(cap):
            cap = 10.0 * (1.0 + abs(w))
        m = abs(step)
        if m > cap:
            step *= cap / m
        w = w + step
    r = map_eval(map_id, dpar, w) - target
    return w, abs(r) < tol


@njit(cache=True, nogil=True)
def continue_walk(map_id, dpar, targets, w0, tol, max_newton):
    """Sequential Newton continuation: solve f(w_s) = targets[s], seeding each
    solve from the previous solution.  Returns (ws, fail_index); fail_index is
    -1 on success."""
    n = targets.shape[0]
    ws = np.zeros(n, np.complex128)
    w = w0
    for s in range(n):
        w, ok = newton_solve(map_id, dpar, targets[s], w, tol, max_newton)
        if not ok:
            return ws, s
        ws[s] = w
    return ws, -1


LADDER_CONSTANT = 0
LADDER_POWER_DECAY = 1
LADDER_EXP_DECAY = 2


@njit(cache=True)
def ladder_walk(variant, a, b, t1, n):
    """t_{k+1} = t_k + g(t_k) for the three gauge variants."""
    out = np.empty(n)
    t = t1
    out[0] = t
    for i in range(1, n):
        if variant == LADDER_CONSTANT:
            g = a
        elif variant == LADDER_POWER_DECAY:
            g = t ** (-a)
        else:
            g = math.exp(-a * t ** b)
        t = t + g
        out[i] = t
    return out
