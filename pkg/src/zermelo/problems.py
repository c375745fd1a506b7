"""Problem families for time-minimal navigation in a rotationally symmetric current.

A problem lives on a surface of revolution with metric ``g = dr^2 + m(r)^2 dtheta^2``
in coordinates ``(r, theta)`` and carries a current ``mu(r) d/dtheta`` blowing
along the parallels.  A vehicle moves with unit own-speed relative to the
current, steered by a heading angle.  Where ``|mu(r)| m(r) > 1`` the current is
*strong*: it overpowers the vehicle and small-time controllability is lost.

Three closed families are built in:

* ``historical``   -- flat plane with a linear shear, ``m = 1``, ``mu(y) = y``.
  States read ``(x, y, gamma)`` in a Cartesian chart; the strong region is
  ``|y| > 1``.
* ``vortex``       -- flat plane around a point vortex of circulation ``k``,
  ``m(r) = r``, ``mu(r) = k / r^2`` on the punctured plane.
* ``powerlaw``     -- ``m(r) = r^b``, ``mu(r) = k r^a``; subsumes both built-ins
  up to chart relabeling and keeps the config format closed.

Derivatives of the profiles are analytic per family, never finite differences:
downstream quantities (the heading feedback and the bracket determinants) are
sensitive to derivative error.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Chart",
    "DomainError",
    "ExtendedState",
    "ProblemDefinition",
    "current_norm",
    "make_historical",
    "make_powerlaw",
    "make_vortex",
    "problem_from_descriptor",
    "wrap_angle",
]

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class DomainError(ValueError):
    """A radius or state fell outside the open domain of a problem."""


class Chart(enum.Enum):
    """Coordinate convention used to read an :class:`ExtendedState`.

    ``POLAR`` states read ``(r, theta, alpha)`` with ``alpha`` the heading
    measured from the meridian direction.  ``HISTORICAL_CARTESIAN`` states
    read ``(x, y, gamma)`` where ``x`` runs along the current, ``y`` is the
    metric radius and ``gamma = pi/2 - alpha``.
    """

    POLAR = "polar"
    HISTORICAL_CARTESIAN = "historical-cartesian"


def wrap_angle(angle):
    """Normalize an angle (scalar or array) to the half-open interval (-pi, pi]."""
    return math.pi - (math.pi - angle) % TWO_PI


@dataclass(frozen=True)
class ExtendedState:
    """A position plus heading angle, read per the owning problem's chart.

    ``heading`` is normalized to (-pi, pi] at construction; every operation
    that produces a state re-normalizes.
    """

    c1: float
    c2: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "c1", float(self.c1))
        object.__setattr__(self, "c2", float(self.c2))
        object.__setattr__(self, "heading", float(wrap_angle(float(self.heading))))

    @property
    def position(self) -> tuple[float, float]:
        return (self.c1, self.c2)


_FAMILY_CODES = {"historical": 0, "vortex": 1, "powerlaw": 2}


@dataclass(frozen=True)
class ProblemDefinition:
    """Metric profile ``m``, current profile ``mu`` and their chart.

    Immutable after construction; all methods are pure, accept scalars or
    numpy arrays, and raise :class:`DomainError` outside the open ``domain``.
    """

    family: str
    chart: Chart
    k: float = 1.0
    a: float = 0.0
    b: float = 0.0
    domain: tuple[float, float] = (-math.inf, math.inf)

    # -- profile evaluation -------------------------------------------------

    def check_domain(self, r) -> None:
        lo, hi = self.domain
        inside = (r > lo) & (r < hi)
        if not np.all(inside):
            raise DomainError(f"radius {r!r} outside the open domain ({lo}, {hi})")

    def m(self, r):
        """Metric profile m(r) > 0."""
        self.check_domain(r)
        if self.family == "historical":
            return np.ones_like(r, dtype=float) if isinstance(r, np.ndarray) else 1.0
        if self.family == "vortex":
            return 1.0 * r
        return r ** self.b

    def m_prime(self, r):
        self.check_domain(r)
        if self.family == "historical":
            return np.zeros_like(r, dtype=float) if isinstance(r, np.ndarray) else 0.0
        if self.family == "vortex":
            return np.ones_like(r, dtype=float) if isinstance(r, np.ndarray) else 1.0
        return self.b * r ** (self.b - 1.0)

    def mu(self, r):
        """Current intensity along the parallels."""
        self.check_domain(r)
        if self.family == "historical":
            return 1.0 * r
        if self.family == "vortex":
            return self.k / (r * r)
        return self.k * r ** self.a

    def mu_prime(self, r):
        self.check_domain(r)
        if self.family == "historical":
            return np.ones_like(r, dtype=float) if isinstance(r, np.ndarray) else 1.0
        if self.family == "vortex":
            return -2.0 * self.k / (r * r * r)
        return self.k * self.a * r ** (self.a - 1.0)

    # -- chart conversions --------------------------------------------------

    @property
    def code(self) -> int:
        """Integer family tag consumed by the integration kernels."""
        return _FAMILY_CODES[self.family]

    def to_canonical(self, state: ExtendedState) -> tuple[float, float, float]:
        """Read a chart state as canonical ``(r, theta, alpha)``."""
        if self.chart is Chart.POLAR:
            return state.c1, state.c2, state.heading
        return state.c2, state.c1, float(wrap_angle(HALF_PI - state.heading))

    def from_canonical(self, r: float, theta: float, alpha: float) -> ExtendedState:
        if self.chart is Chart.POLAR:
            return ExtendedState(r, theta, alpha)
        return ExtendedState(theta, r, HALF_PI - alpha)

    def heading_to_canonical(self, heading):
        """Chart heading -> canonical alpha (an involution in the Cartesian chart)."""
        if self.chart is Chart.POLAR:
            return wrap_angle(heading)
        return wrap_angle(HALF_PI - heading)

    def heading_from_canonical(self, alpha):
        if self.chart is Chart.POLAR:
            return wrap_angle(alpha)
        return wrap_angle(HALF_PI - alpha)

    def radius_of(self, position) -> float:
        """Canonical radius coordinate of a chart position pair."""
        c1, c2 = float(position[0]), float(position[1])
        return c1 if self.chart is Chart.POLAR else c2


def make_historical() -> ProblemDefinition:
    """Flat plane with linear shear current: m == 1, mu(y) = y, states (x, y, gamma)."""
    return ProblemDefinition(
        family="historical",
        chart=Chart.HISTORICAL_CARTESIAN,
        domain=(-math.inf, math.inf),
    )


def make_vortex(k: float) -> ProblemDefinition:
    """Point vortex of circulation k > 0 on the punctured plane: m = r, mu = k/r^2."""
    if not (isinstance(k, (int, float)) and math.isfinite(k) and k > 0.0):
        raise ValueError(f"circulation k must be a positive finite number, got {k!r}")
    return ProblemDefinition(
        family="vortex", chart=Chart.POLAR, k=float(k), domain=(0.0, math.inf)
    )


def make_powerlaw(k: float, a: float, b: float) -> ProblemDefinition:
    """Power-law family m(r) = r^b, mu(r) = k r^a on r > 0."""
    for name, value in (("k", k), ("a", a), ("b", b)):
        if not (isinstance(value, (int, float)) and math.isfinite(value)):
            raise ValueError(f"power-law parameter {name} must be finite, got {value!r}")
    return ProblemDefinition(
        family="powerlaw",
        chart=Chart.POLAR,
        k=float(k),
        a=float(a),
        b=float(b),
        domain=(0.0, math.inf),
    )


def current_norm(problem: ProblemDefinition, r):
    """Metric norm of the current at radius r, i.e. |mu(r)| * m(r).

    Values above 1 mark the strong-current region, values below 1 the weak
    one; the boundary is exactly where the drift ties the unit own-speed.
    """
    return np.abs(problem.mu(r)) * problem.m(r)


def problem_from_descriptor(descriptor: dict) -> ProblemDefinition:
    """Build a problem from the JSON descriptor consumed by the CLI.

    Accepted forms::

        {"family": "historical"}
        {"family": "vortex", "k": 2.0}
        {"family": "powerlaw", "k": 1.0, "a": 1.0, "b": 0.0}

    The format is closed: unknown keys are rejected.
    """
    if not isinstance(descriptor, dict):
        raise ValueError("problem descriptor must be a JSON object")
    family = descriptor.get("family")
    if family not in _FAMILY_CODES:
        raise ValueError(f"unknown problem family {family!r}")
    allowed = {"historical": {"family"}, "vortex": {"family", "k"},
               "powerlaw": {"family", "k", "a", "b"}}[family]
    extra = set(descriptor) - allowed
    if extra:
        raise ValueError(f"unexpected descriptor keys for {family}: {sorted(extra)}")

    def _num(key, default=None):
        value = descriptor.get(key, default)
        if value is None:
            raise ValueError(f"descriptor for {family} requires numeric {key!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"descriptor key {key!r} must be a number, got {value!r}")
        return float(value)

    if family == "historical":
        return make_historical()
    if family == "vortex":
        return make_vortex(_num("k", 1.0))
    return make_powerlaw(_num("k"), _num("a"), _num("b"))
