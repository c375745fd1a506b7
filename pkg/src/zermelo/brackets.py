"""Bracket determinants of the heading-extended system and the classification they induce.

Extending the planar dynamics with the heading angle as a third state turns
the problem into a single-input affine system whose structure is captured by
three determinants ``D``, ``D'`` and ``D''`` built from iterated brackets of
the drift and the heading field.  In canonical ``(r, theta, alpha)``
coordinates they evaluate in closed form:

    D   = 1 / m(r)
    D'  = -mu'(r) sin(alpha)^2 + m'(r) sin(alpha) / m(r)^2
    D'' = mu(r) sin(alpha) + 1 / m(r)

``D > 0`` everywhere, so the sign of ``D * D''`` splits headings into
hyperbolic (time-minimizing candidates) and elliptic (time-maximizing)
classes, while ``D'' = 0`` carries the abnormal headings.  In the Cartesian
chart the heading runs opposite to alpha, which flips the sign of ``D'``
(and of the feedback) but leaves ``D`` and ``D''`` unchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .problems import Chart, ExtendedState, ProblemDefinition, current_norm, wrap_angle

__all__ = [
    "BracketData",
    "ExtremalClass",
    "ExtremalTag",
    "abnormal_headings",
    "bracket_data",
    "classify",
    "singular_feedback",
]


@dataclass(frozen=True)
class BracketData:
    """The three bracket determinants evaluated at one extended state."""

    D: float
    Dprime: float
    Dsecond: float
    at: ExtendedState


class ExtremalTag(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    ABNORMAL = "abnormal"


@dataclass(frozen=True)
class ExtremalClass:
    tag: ExtremalTag
    data: BracketData


def bracket_data(problem: ProblemDefinition, state: ExtendedState) -> BracketData:
    """Evaluate D, D', D'' from the closed formulas (no numeric differentiation)."""
    r, _, alpha = problem.to_canonical(state)
    m = problem.m(r)
    sa = math.sin(alpha)
    d = 1.0 / m
    dprime = -problem.mu_prime(r) * sa * sa + problem.m_prime(r) * sa / (m * m)
    dsecond = problem.mu(r) * sa + 1.0 / m
    if problem.chart is Chart.HISTORICAL_CARTESIAN:
        dprime = -dprime
    return BracketData(d, dprime, dsecond, state)


def classify(problem: ProblemDefinition, state: ExtendedState, tol: float = 1e-9) -> ExtremalClass:
    """Tag a state hyperbolic / elliptic / abnormal by the sign structure of D''.

    The abnormality test is relative, scaled by ``1 + |mu| m``, because D''
    mixes an O(1) term with an O(|mu| m) one.
    """
    if not tol > 0.0:
        raise ValueError(f"classification tolerance must be positive, got {tol!r}")
    data = bracket_data(problem, state)
    r, _, _ = problem.to_canonical(state)
    scale = 1.0 + float(current_norm(problem, r))
    if abs(data.Dsecond) <= tol * scale:
        tag = ExtremalTag.ABNORMAL
    elif data.D * data.Dsecond > 0.0:
        tag = ExtremalTag.HYPERBOLIC
    else:
        tag = ExtremalTag.ELLIPTIC
    return ExtremalClass(tag, data)


def abnormal_headings(problem: ProblemDefinition, r: float, tol: float = 1e-9) -> tuple[float, ...]:
    """Chart headings at radius r for which D'' vanishes.

    Empty in the weak-current region, a single tangent heading where
    ``|mu| m = 1`` (within ``tol``), and two headings with equal heading-sine
    in the strong region.  Headings are returned ascending in the problem's
    chart convention.
    """
    norm = float(current_norm(problem, r))
    product = float(problem.mu(r)) * float(problem.m(r))
    if abs(norm - 1.0) <= tol:
        sin_alpha = math.copysign(1.0, -product)
        alpha = math.asin(sin_alpha)
        return (float(problem.heading_from_canonical(alpha)),)
    if norm < 1.0:
        return ()
    sin_alpha = -1.0 / product
    alpha1 = math.asin(sin_alpha)
    alpha2 = float(wrap_angle(math.pi - alpha1))
    headings = sorted(
        (
            float(problem.heading_from_canonical(alpha1)),
            float(problem.heading_from_canonical(alpha2)),
        )
    )
    return tuple(headings)


def singular_feedback(problem: ProblemDefinition, state: ExtendedState) -> float:
    """Heading-rate feedback -D'/D, in the chart's own heading convention.

    This is one of two routes to the heading equation of the flow; the other
    is the third component of the extended right-hand side.  They agree
    identically.
    """
    data = bracket_data(problem, state)
    return -data.Dprime / data.D
