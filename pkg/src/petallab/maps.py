"""Catalog of the meromorphic maps under study.

Each map knows its derivative in closed form, its poles and critical points,
and how to run inverse-branch continuation and orbit classification.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ContinuationError, DomainError, PoleError, UnsupportedMap

#: marker returned by eval at a pole
INFINITY = complex(math.inf, 0.0)

#: a point closer than this to a pole is treated as the pole
POLE_EPS = 1e-9

_MAP_IDS = {
    "sine_newton": K.MAP_SINE_NEWTON,
    "exp_newton": K.MAP_EXP_NEWTON,
    "parabolic_quad": K.MAP_PARABOLIC_QUAD,
    "power_d": K.MAP_POWER_D,
}


@dataclass(frozen=True)
class MapSpec:
    """Immutable description of one map from the catalog."""
    id: str
    d: int = 2                      # exponent, power_d only
    kernel_id: int = field(init=False)

    def __post_init__(self):
        if self.id not in _MAP_IDS:
            raise UnsupportedMap(f"unknown map id {self.id!r}")
        if self.id == "power_d" and self.d < 2:
            raise DomainError("power_d requires integer d >= 2")
        object.__setattr__(self, "kernel_id", _MAP_IDS[self.id])

    @property
    def period_translation(self):
        """tau with f(z + tau) = f(z) + tau, or None."""
        return math.pi if self.id == "sine_newton" else None

    @property
    def has_poles(self):
        return self.id == "sine_newton"

    def pole(self, k):
        if not self.has_poles:
            raise UnsupportedMap(f"{self.id} has no poles")
        return complex(math.pi / 2 + k * math.pi, 0.0)

    def critical_point(self, k):
        if self.id == "sine_newton":
            return complex(k * math.pi, 0.0)
        if self.id == "power_d":
            return 0j
        raise UnsupportedMap(f"no indexed critical points for {self.id}")

    def basin_degree(self):
        """Degree of f restricted to the immediate basin of its superattracting
        fixed point (3 for z - tan z, d for z^d)."""
        if self.id == "sine_newton":
            return 3
        if self.id == "power_d":
            return self.d
        raise UnsupportedMap(f"no basin degree on record for {self.id}")


def map_by_id(name, d=2):
    return MapSpec(id=name, d=d)


def nearest_pole_distance(m, z):
    return K.pole_distance(m.kernel_id, complex(z))


def eval_map(m, z):
    """f(z); returns the INFINITY marker within machine distance of a pole."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite input {z}")
    if m.has_poles and nearest_pole_distance(m, z) < POLE_EPS:
        return INFINITY
    return K.map_eval(m.kernel_id, m.d, z)


def eval_map_array(m, zs):
    """Vectorized f over an array (no pole masking; caller filters)."""
    return K.map_eval_np(m.kernel_id, m.d, np.asarray(zs, np.complex128))


def derivative(m, z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite input {z}")
    if m.has_poles and nearest_pole_distance(m, z) < POLE_EPS:
        raise PoleError(f"derivative requested at pole-adjacent point {z}")
    return K.map_deriv(m.kernel_id, m.d, z)


def inverse_branch_step(m, target, seed, tol=1e-12, max_steps=80):
    """Solve f(w) = target by damped Newton from seed, staying on the branch
    selected by the seed (steps capped at half the distance to the nearest
    pole)."""
    target = complex(target)
    seed = complex(seed)
    if not (math.isfinite(target.real) and math.isfinite(target.imag)):
        raise DomainError(f"non-finite target {target}")
    w, ok = K.newton_solve(m.kernel_id, m.d, target, seed, tol, max_steps)
    if not ok:
        raise ContinuationError(
            f"no convergence for f(w)={target} from seed {seed}", seed=seed,
            target=target)
    return w


@dataclass(frozen=True)
class OrbitResult:
    verdict: str                    # converged | escaped | prepole | undecided
    index: int                      # attractor index or prepole step, else -1
    steps_used: int
    final_point: complex

    @property
    def converged(self):
        return self.verdict == "converged"


_VERDICTS = {K.UNDECIDED: "undecided", K.CONVERGED: "converged",
             K.ESCAPED: "escaped", K.PREPOLE: "prepole"}


def classify_orbit(m, z0, attractors, max_iter=200, tol=1e-6,
                   escape_radius=50.0, pole_eps=POLE_EPS):
    """Iterate f from z0 and classify the orbit.

    converged(k) requires two consecutive steps within tol of attractors[k];
    prepole fires within pole_eps of a pole; escaped when |Im z| outruns
    escape_radius.
    """
    if len(attractors) == 0:
        raise DomainError("attractors must be nonempty")
    codes, data, steps, finals = K.classify_batch(
        m.kernel_id, m.d, np.array([z0], np.complex128),
        np.asarray(attractors, np.complex128), max_iter, tol,
        escape_radius, pole_eps)
    return OrbitResult(_VERDICTS[int(codes[0])], int(data[0]), int(steps[0]),
                       complex(finals[0]))


def classify_grid(m, zs, attractors, max_iter=200, tol=1e-6,
                  escape_radius=50.0, pole_eps=POLE_EPS):
    """Batch version of classify_orbit over a flat complex array."""
    flat = np.ascontiguousarray(zs, np.complex128).ravel()
    return K.classify_batch(m.kernel_id, m.d, flat,
                            np.asarray(attractors, np.complex128),
                            max_iter, tol, escape_radius, pole_eps)


def translation_check(m, samples, tol=1e-12):
    """True iff f(z + tau) = f(z) + tau on every sample."""
    tau = m.period_translation
    if tau is None:
        raise UnsupportedMap(f"{m.id} has no translation symmetry")
    for z in samples:
        err = abs(eval_map(m, complex(z) + tau) - eval_map(m, z) - tau)
        if err >= tol:
            return False
    return True


def sine_attractors(k_lo, k_hi):
    """Attractor list [k_lo*pi, ..., k_hi*pi]; index i corresponds to k_lo+i."""
    return np.array([k * math.pi for k in range(k_lo, k_hi + 1)], np.complex128)
