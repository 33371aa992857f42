"""Sector geometry and sampling-based certification of attracting/repelling
petals, at finite parabolic points and at infinity."""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AuditError, DomainError, ParameterError, UnsupportedPetalKind
from .maps import eval_map

#: default angular margin used in audits (the sector argument bound the model
#: construction achieves)
DEFAULT_DELTA = math.pi / 3


def _wrap_angle(a):
    """Reduce an angle difference to (-pi, pi]."""
    return math.remainder(a, math.tau)


def parabolic_direction_angles(d, a):
    """The 2d sector axes at a parabolic point with leading coefficient a.

    Returns [(theta_j, 'repelling'|'attracting')] for j = 0..2d-1; even j are
    repelling directions, odd j attracting.
    """
    if d < 1 or a == 0:
        raise ParameterError("need d >= 1 and a != 0")
    arg_a = cmath.phase(complex(a))
    out = []
    for j in range(2 * d):
        theta = _wrap_angle((-arg_a + math.pi * j) / d)
        out.append((theta, "attracting" if j % 2 else "repelling"))
    return out


@dataclass(frozen=True)
class SectorSpec:
    """Sector region around a direction axis: U_j near a finite point, V_j
    near infinity."""
    kind: str                   # at_point | at_infinity
    j: int
    d: int
    a: complex
    delta: float
    p: complex = 0j             # at_point only
    eps: float = 1.0            # at_point: |z - p| < eps
    r: float = 0.0              # at_infinity: |z| > r

    def __post_init__(self):
        if self.kind not in ("at_point", "at_infinity"):
            raise ParameterError(f"unknown sector kind {self.kind!r}")
        if self.d < 1 or self.a == 0:
            raise ParameterError("need d >= 1 and a != 0")
        if not (0 < self.delta < math.pi / self.d):
            raise ParameterError("need delta in (0, pi/d)")

    @property
    def theta(self):
        arg_a = cmath.phase(complex(self.a))
        if self.kind == "at_point":
            return (-arg_a + math.pi * self.j) / self.d
        return (arg_a + math.pi * self.j) / self.d


def sector_contains(sector, z):
    """Exact membership test (open angle interval, open modulus bound)."""
    z = complex(z)
    if sector.kind == "at_point":
        w = z - sector.p
        if w == 0 or not abs(w) < sector.eps:
            return False
    else:
        w = z
        if not abs(w) > sector.r:
            return False
    return abs(_wrap_angle(cmath.phase(w) - sector.theta)) < sector.delta


@dataclass(frozen=True)
class PetalSpec:
    """A petal hypothesis: a region predicate plus the displacement gauge it
    is supposed to obey."""
    kind: str                   # parabolic | infinity
    region: object              # membership predicate z -> bool
    g: object = None            # LogConvexFn, infinity kind
    delta: float = DEFAULT_DELTA
    p: complex = 0j             # parabolic fixed point
    order: int = 1
    coeff: complex = 1.0
    label: str = ""


def upper_half_plane_petal(m_threshold, g):
    return PetalSpec(kind="infinity", region=lambda z: z.imag > m_threshold,
                     g=g, label=f"P+ (Im z > {m_threshold})")


def lower_half_plane_petal(m_threshold, g):
    return PetalSpec(kind="infinity", region=lambda z: z.imag < -m_threshold,
                     g=g, label=f"P- (Im z < -{m_threshold})")


@dataclass(frozen=True)
class PetalReport:
    passed: bool
    c1_hat: float               # min |G(z)-z| / g(|z|)
    c2_hat: float               # max of the same ratio
    delta_hat: float            # worst |Arg(G(z)-z) - Arg z|
    samples_tested: int
    worst_point: complex
    label: str = ""


def petal_condition_audit(G, petal, sample_orbits=64, steps=200, burn_in=800,
                          seed=0, base_point=None):
    """Certify the displacement/argument conditions on sampled inverse orbits.

    G must be the inverse-map handle on the claimed petal.  Orbits are started
    on a fixed transversal inside the region, iterated burn_in steps, then
    measured for `steps` steps.  This is a sampling certificate, not a proof.
    """
    if petal.kind != "infinity":
        raise UnsupportedPetalKind(
            "only petals at infinity are audited here; parabolic petals are "
            "checked through sector trajectories")
    rng = np.random.default_rng(seed)
    probe = base_point
    if probe is None:
        # probe the imaginary axis for an interior base point
        for im in (11.0, -11.0, 30.0, -30.0):
            if petal.region(complex(0.0, im)):
                probe = complex(0.0, im)
                break
        else:
            raise AuditError("could not find a base point inside the region")
    # starting transversal: a small compact set around the base point
    starts = []
    for _ in range(sample_orbits):
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(0.0, 1.0)
        z0 = probe + complex(x, math.copysign(y, probe.imag))
        if not petal.region(z0):
            raise AuditError("start sample outside region", escape_point=z0)
        starts.append(z0)

    c1_hat = math.inf
    c2_hat = 0.0
    delta_hat = 0.0
    worst = 0j
    tested = 0
    for z in starts:
        for n in range(burn_in + steps):
            gz = G(z)
            if not petal.region(gz):
                raise AuditError(f"orbit escapes the region at {gz}",
                                 escape_point=gz)
            if n >= burn_in:
                disp = gz - z
                ratio = abs(disp) / float(petal.g(abs(z)))
                dev = abs(_wrap_angle(cmath.phase(disp) - cmath.phase(z)))
                c1_hat = min(c1_hat, ratio)
                c2_hat = max(c2_hat, ratio)
                if dev > delta_hat:
                    delta_hat = dev
                    worst = z
                tested += 1
            z = gz
    passed = c1_hat > 0 and delta_hat < math.pi / 2
    return PetalReport(passed=passed, c1_hat=c1_hat, c2_hat=c2_hat,
                       delta_hat=delta_hat, samples_tested=tested,
                       worst_point=worst, label=petal.label)


def asymptotic_form_check(m, sector, d, a, samples=64):
    """Worst residual |f(z) - z - a/z^(d-1)| * |z|^(d-1) on the sector at two
    radii (r and 2r); both should shrink as the radius grows."""
    if sector.kind != "at_infinity":
        raise ParameterError("asymptotic form is checked on sectors at infinity")
    if sector.r <= 0:
        raise ParameterError("sector needs a positive inner radius")
    out = []
    for radius in (sector.r, 2 * sector.r):
        worst = 0.0
        angles = np.linspace(sector.theta - sector.delta,
                             sector.theta + sector.delta, samples + 2)[1:-1]
        for ang in angles:
            z = radius * cmath.exp(1j * ang)
            fz = eval_map(m, z)
            if not (math.isfinite(fz.real) and math.isfinite(fz.imag)):
                raise DomainError(f"pole inside sector at {z}")
            resid = abs(fz - z - a / z ** (d - 1)) * abs(z) ** (d - 1)
            worst = max(worst, resid)
        out.append(worst)
    return tuple(out)
