"""Conformal metric densities, ladder sequences, contraction bounds and the
radial glue profile used to hand off between the compact-core and petal
metrics."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DomainError, ParameterError, SingularityError
from .maps import derivative, eval_map

# default exponents for the petal metrics; constrained only from below by the
# critical-orbit condition, which is vacuous for z - tan z, so these are
# conventions, not canon
ALPHA_PAR = 0.5
ALPHA_INF = 1.5


# ---------------------------------------------------------------------------
# logarithmically convex gauge functions

@dataclass(frozen=True)
class LogConvexFn:
    """Positive non-increasing log-convex gauge on (domain_start, inf)."""
    variant: str                    # constant | power_decay | exp_decay
    a: float = 1.0
    b: float = 1.0
    domain_start: float = 0.0

    def __post_init__(self):
        if self.variant not in ("constant", "power_decay", "exp_decay"):
            raise ParameterError(f"unknown gauge variant {self.variant!r}")
        if self.variant == "constant" and self.a <= 0:
            raise ParameterError("constant gauge needs a positive value")
        if self.variant == "power_decay" and self.a <= 0:
            raise ParameterError("power_decay needs a > 0")
        if self.variant == "exp_decay" and not (self.a > 0 and 0 < self.b <= 1):
            raise ParameterError("exp_decay needs a > 0 and 0 < b <= 1")

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.variant == "constant":
            out = np.full_like(t, self.a)
        elif self.variant == "power_decay":
            out = t ** (-self.a)
        else:
            out = np.exp(-self.a * t ** self.b)
        return out if out.ndim else float(out)

    @property
    def kernel_variant(self):
        return {"constant": K.LADDER_CONSTANT,
                "power_decay": K.LADDER_POWER_DECAY,
                "exp_decay": K.LADDER_EXP_DECAY}[self.variant]


def constant_gauge(c=1.0):
    return LogConvexFn("constant", a=c)


def power_decay_gauge(a):
    return LogConvexFn("power_decay", a=a)


def exp_decay_gauge(a, b=1.0):
    return LogConvexFn("exp_decay", a=a, b=b)


def logconvex_ladder(g, t1, n):
    """t_1 .. t_n with t_{k+1} = t_k + g(t_k)."""
    if t1 <= g.domain_start:
        raise ParameterError(f"t1 = {t1} not above domain start {g.domain_start}")
    if n < 1:
        raise ParameterError("need n >= 1")
    return K.ladder_walk(g.kernel_variant, g.a, g.b, float(t1), int(n))


def parabolic_bound_seq(m, b, n):
    """[1, prod_{k=m}^{m}(1-b/k), ..., prod_{k=m}^{n+m-1}(1-b/k)]."""
    if not (m > b):
        raise ParameterError(f"need m > b for positive factors, got m={m}, b={b}")
    if b <= 1:
        raise ParameterError("need b > 1 for summability")
    factors = 1.0 - b / np.arange(m, m + n, dtype=float)
    out = np.empty(n + 1)
    out[0] = 1.0
    np.cumprod(factors, out=out[1:])
    return out


# ---------------------------------------------------------------------------
# metric densities

@dataclass(frozen=True)
class GlueProfile:
    """Radial correction h interpolating between the compact-core metric and
    the petal metric across the crossover radii R_minus < R_plus."""
    R_minus: float
    R_plus: float
    C1: float
    C2: float
    c0: float
    A: float
    g: LogConvexFn

    def h(self, t):
        t = float(t)
        e0 = self.C1 / self.c0
        if t < self.R_minus:
            return self.A ** e0 + self.C2 * (self.R_minus - t)
        if t < self.R_plus:
            # slope written through (R_plus - R_minus) = C1 g(R_plus) so the
            # endpoint values are exact regardless of the solver residual
            return self.A ** (e0 * (self.R_plus - t) / (self.R_plus - self.R_minus))
        return 1.0


def glue_profile_build(g, R_minus, C1, C2, c0, A, tol=1e-12):
    """Solve R_plus = R_minus + C1 g(R_plus) by bisection and build the profile."""
    if min(R_minus, C1, C2, c0, A) <= 0:
        raise ParameterError("all glue constants must be positive")

    def phi(t):
        return t - R_minus - C1 * float(g(t))

    lo = R_minus
    hi = R_minus + C1 * float(g(R_minus))
    if phi(hi) == 0.0:
        R_plus = hi
    else:
        flo, fhi = phi(lo), phi(hi)
        if not (flo < 0 <= fhi):
            raise ParameterError("fixed-point bracket failed; gauge not non-increasing?")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if phi(mid) < 0:
                lo = mid
            else:
                hi = mid
        R_plus = 0.5 * (lo + hi)
    return GlueProfile(R_minus=float(R_minus), R_plus=float(R_plus),
                       C1=float(C1), C2=float(C2), c0=float(c0), A=float(A), g=g)


@dataclass(frozen=True)
class MetricKind:
    variant: str        # euclidean | spherical | power_infinity | power_point | glued_infinity
    alpha: float = 0.0
    p: complex = 0j
    profile: GlueProfile = None

    def __post_init__(self):
        if self.variant == "power_infinity" and not self.alpha > 1:
            raise ParameterError("power_infinity requires alpha > 1")
        if self.variant == "power_point" and not (0 <= self.alpha < 1):
            raise ParameterError("power_point requires alpha in [0, 1)")
        if self.variant == "glued_infinity" and self.profile is None:
            raise ParameterError("glued_infinity requires a profile")


def euclidean():
    return MetricKind("euclidean")


def spherical():
    return MetricKind("spherical")


def power_infinity(alpha):
    return MetricKind("power_infinity", alpha=alpha)


def power_point(p, alpha):
    return MetricKind("power_point", alpha=alpha, p=complex(p))


def glued_infinity(alpha, profile):
    return MetricKind("glued_infinity", alpha=alpha, profile=profile)


def density(metric, z):
    """Conformal density of the metric at z."""
    z = complex(z)
    if metric.variant == "euclidean":
        return 1.0
    if metric.variant == "spherical":
        return 2.0 / (1.0 + abs(z) ** 2)
    if metric.variant == "power_infinity":
        if z == 0:
            raise SingularityError("power_infinity density singular at 0")
        return abs(z) ** (-metric.alpha)
    if metric.variant == "power_point":
        r = abs(z - metric.p)
        if r == 0 and metric.alpha > 0:
            raise SingularityError(f"power_point density singular at {metric.p}")
        return 1.0 if metric.alpha == 0 else r ** (-metric.alpha)
    if z == 0:
        raise SingularityError("glued_infinity density singular at 0")
    return metric.profile.h(abs(z)) * abs(z) ** (-metric.alpha)


def metric_derivative(m, metric, z):
    """|f'(z)| measured in the metric: density(f(z))/density(z) * |f'(z)|."""
    z = complex(z)
    fz = eval_map(m, z)
    if not (math.isfinite(fz.real) and math.isfinite(fz.imag)):
        raise SingularityError(f"f({z}) leaves the metric domain (pole)")
    return density(metric, fz) / density(metric, z) * abs(derivative(m, z))


# ---------------------------------------------------------------------------
# spherical distance

def _chord(z, w):
    zinf = not (math.isfinite(z.real) and math.isfinite(z.imag))
    winf = not (math.isfinite(w.real) and math.isfinite(w.imag))
    if zinf and winf:
        return 0.0
    if zinf:
        return 2.0 / math.hypot(1.0, abs(w))
    if winf:
        return 2.0 / math.hypot(1.0, abs(z))
    return 2.0 * abs(z - w) / (math.hypot(1.0, abs(z)) * math.hypot(1.0, abs(w)))


def sph_dist(z, w):
    """Great-circle distance for the density 2|dz|/(1+|z|^2); diam = pi."""
    c = _chord(complex(z), complex(w))
    return 2.0 * math.asin(min(1.0, 0.5 * c))


def sph_dist_array(zs, ws):
    zs = np.asarray(zs, np.complex128)
    ws = np.asarray(ws, np.complex128)
    c = 2.0 * np.abs(zs - ws) / (np.hypot(1.0, np.abs(zs)) * np.hypot(1.0, np.abs(ws)))
    return 2.0 * np.arcsin(np.minimum(1.0, 0.5 * c))


# ---------------------------------------------------------------------------
# expansion audit

@dataclass(frozen=True)
class ExpansionReport:
    metric: str
    margins: tuple          # cumulative metric expansion times bound, per step
    min_margin: float
    violations: tuple       # step indices with margin < 1
    per_step: tuple

    @property
    def passed(self):
        return len(self.violations) == 0


def expansion_audit(m, metric, orbit, bound_seq, orbit_tol=1e-8):
    """Audit |(f^n)'|_metric * bound_seq[n] > 1 along a forward orbit.

    The cumulative derivative is accumulated step by step; the orbit must be a
    genuine forward orbit of the map.
    """
    orbit = [complex(z) for z in orbit]
    for i in range(len(orbit) - 1):
        fz = eval_map(m, orbit[i])
        if not (math.isfinite(fz.real) and math.isfinite(fz.imag)):
            raise DomainError(f"orbit hits a pole at step {i}")
        if abs(fz - orbit[i + 1]) > orbit_tol * (1.0 + abs(orbit[i + 1])):
            raise DomainError(f"not a forward orbit at step {i}")
    per_step = []
    for i in range(len(orbit) - 1):
        per_step.append(metric_derivative(m, metric, orbit[i]))
    margins = []
    violations = []
    cum = 1.0
    for n in range(1, len(per_step) + 1):
        if n >= len(bound_seq):
            break
        cum *= per_step[n - 1]
        margin = cum * float(bound_seq[n])
        margins.append(margin)
        if margin < 1.0:
            violations.append(n)
    min_margin = min(margins) if margins else math.inf
    return ExpansionReport(metric=metric.variant, margins=tuple(margins),
                           min_margin=min_margin, violations=tuple(violations),
                           per_step=tuple(per_step))
