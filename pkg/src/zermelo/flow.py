"""Extended geodesic flow: numeric integration, closed forms and conserved data.

Geodesic candidates of the navigation problem are the trajectories of the
three-dimensional heading-extended system.  Rotational symmetry conserves
the angular adjoint ``p_theta = m(r_0) sin(alpha_0)`` (the multiplier is
normalized to 1 at the start, fixing ``p0 = -1 - p_theta mu(r_0)``), and the
radial adjoint is reconstructed pointwise from the heading instead of being
integrated: that keeps the state three-dimensional and ``p_theta`` exactly
constant.  Conservation is monitored through residuals, never enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, closedform
from .problems import Chart, ExtendedState, ProblemDefinition, wrap_angle

__all__ = [
    "AdjointInit",
    "GeodesicTrajectory",
    "IntegrationError",
    "Residuals",
    "StepControl",
    "closed_form_trajectory",
    "exponential_map",
    "extended_rhs",
    "first_integral_residuals",
    "integrate_closed_form_historical",
    "integrate_numeric",
    "make_adjoint",
    "position_speed",
    "state_at",
]

METHOD_CLOSED_FORM = "closed-form"
METHOD_NUMERIC_RK = "numeric-rk"

STATUS_NAMES = {
    _kernels.STATUS_OK: "completed",
    _kernels.STATUS_DOMAIN_EXIT: "domain-exit",
    _kernels.STATUS_STEP_COLLAPSE: "step-collapse",
    _kernels.STATUS_MAX_STEPS: "max-steps",
}

# residual masks: both conserved relations have removable poles at these angles
SIN_ALPHA_FLOOR = 1e-6


class IntegrationError(RuntimeError):
    """An endpoint was requested past the point where integration halted."""

    def __init__(self, message: str, status: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class StepControl:
    """Tolerances and limits for the adaptive 5(4) stepper."""

    rtol: float = 1e-10
    atol: float = 1e-10
    max_step: float = 0.25
    max_steps: int = 200_000
    boundary_pad: float = 1e-6

    def __post_init__(self):
        if self.rtol <= 0.0 or self.atol <= 0.0 or self.max_step <= 0.0:
            raise ValueError("step-control tolerances must be positive")


@dataclass(frozen=True)
class AdjointInit:
    """Conserved adjoint data fixed at the start of a trajectory.

    ``p_theta`` is the angular momentum conjugate to the symmetry,
    ``p_zero`` the cost multiplier; the initial covector norm ``lambda0``
    is always normalized to 1.
    """

    p_theta: float
    p_zero: float
    lambda0: float = 1.0


def make_adjoint(problem: ProblemDefinition, state: ExtendedState) -> AdjointInit:
    r, _, alpha = problem.to_canonical(state)
    p_theta = float(problem.m(r)) * math.sin(alpha)
    return AdjointInit(p_theta=p_theta, p_zero=-1.0 - p_theta * float(problem.mu(r)))


@dataclass
class Residuals:
    """Per-sample defects of the conserved relations; nan marks a masked sample.

    ``hamiltonian``            |p_r cos(a) + p_theta (mu + sin(a)/m) + p0|
    ``reduced_hamiltonian``    |p_theta (mu + 1/(m sin(a))) + p0|
    ``historical_invariant``   |y + 1/cos(gamma) - C0|  (linear-shear problem only)
    """

    hamiltonian: np.ndarray
    reduced_hamiltonian: np.ndarray
    historical_invariant: np.ndarray


@dataclass
class GeodesicTrajectory:
    """Time-sampled extended states with their conserved quantities.

    ``states`` holds chart coordinates, one row per sample, heading wrapped
    to (-pi, pi]; ``t`` is strictly increasing from 0.  ``status`` records
    whether integration finished or halted (domain exit, step collapse).
    """

    problem: ProblemDefinition
    t: np.ndarray
    states: np.ndarray
    adjoint: AdjointInit
    method: str
    status: str
    control: StepControl
    residuals: Residuals = field(repr=False, default=None)

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def state(self, i: int) -> ExtendedState:
        c1, c2, h = self.states[i]
        return ExtendedState(float(c1), float(c2), float(h))

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, :2]

    @property
    def headings(self) -> np.ndarray:
        return self.states[:, 2]

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def final_state(self) -> ExtendedState:
        return self.state(len(self) - 1)


def extended_rhs(problem: ProblemDefinition, state: ExtendedState) -> tuple[float, float, float]:
    """Right-hand side of the extended dynamics in the problem's chart."""
    r, _, alpha = problem.to_canonical(state)
    problem.check_domain(r)
    dr, dth, dal = _kernels.rhs(problem.code, problem.k, problem.a, problem.b, r, alpha)
    if problem.chart is Chart.POLAR:
        return dr, dth, dal
    return dth, dr, -dal


def position_speed(problem: ProblemDefinition, state: ExtendedState) -> float:
    """Metric norm of the position velocity, sqrt(r'^2 + m^2 theta'^2)."""
    r, _, alpha = problem.to_canonical(state)
    m = float(problem.m(r))
    mu = float(problem.mu(r))
    return math.hypot(math.cos(alpha), m * mu + math.sin(alpha))


def _canonical_samples(problem: ProblemDefinition, traj: GeodesicTrajectory):
    """(r, alpha) arrays of a trajectory, independent of its chart."""
    if problem.chart is Chart.POLAR:
        return traj.states[:, 0], traj.states[:, 2]
    return traj.states[:, 1], np.asarray(wrap_angle(0.5 * math.pi - traj.states[:, 2]))


def _states_from_canonical(problem: ProblemDefinition, ys: np.ndarray) -> np.ndarray:
    out = np.empty_like(ys)
    if problem.chart is Chart.POLAR:
        out[:, 0] = ys[:, 0]
        out[:, 1] = ys[:, 1]
        out[:, 2] = wrap_angle(ys[:, 2])
    else:
        out[:, 0] = ys[:, 1]
        out[:, 1] = ys[:, 0]
        out[:, 2] = wrap_angle(0.5 * math.pi - ys[:, 2])
    return out


def first_integral_residuals(problem: ProblemDefinition, traj: GeodesicTrajectory) -> Residuals:
    """Defects of the conserved relations at every sample of a trajectory.

    Samples where a relation has a removable pole (|sin alpha| or
    |cos gamma| at or below 1e-6) are masked with nan rather than evaluated.
    """
    r, alpha = _canonical_samples(problem, traj)
    n = r.shape[0]
    if n == 0:
        empty = np.empty(0)
        return Residuals(empty.copy(), empty.copy(), empty.copy())
    m = problem.m(r)
    mu = problem.mu(r)
    sin_a = np.sin(alpha)
    cos_a = np.cos(alpha)
    p_theta = traj.adjoint.p_theta
    p_zero = traj.adjoint.p_zero

    res_h = np.full(n, np.nan)
    res_red = np.full(n, np.nan)
    res_hist = np.full(n, np.nan)

    mask = np.abs(sin_a) > SIN_ALPHA_FLOOR
    if p_theta == 0.0:
        # heading locked to 0 mod pi: the covector norm stays exactly 1
        res_h = np.abs(cos_a * cos_a + p_zero)
    elif np.any(mask):
        lam = p_theta / (m[mask] * sin_a[mask])
        p_r = lam * cos_a[mask]
        res_h[mask] = np.abs(
            p_r * cos_a[mask] + p_theta * (mu[mask] + sin_a[mask] / m[mask]) + p_zero
        )
        res_red[mask] = np.abs(p_theta * (mu[mask] + 1.0 / (m[mask] * sin_a[mask])) + p_zero)

    if problem.family == "historical":
        # conserved height y + 1/cos(gamma); cos(gamma) = sin(alpha) here
        cos_g0 = sin_a[0]
        if abs(cos_g0) > SIN_ALPHA_FLOOR:
            c0 = r[0] + 1.0 / cos_g0
            res_hist[mask] = np.abs(r[mask] + 1.0 / sin_a[mask] - c0)
    return Residuals(res_h, res_red, res_hist)


def integrate_numeric(
    problem: ProblemDefinition,
    state0: ExtendedState,
    t_final: float,
    control: StepControl | None = None,
) -> GeodesicTrajectory:
    """Adaptive 5(4) trajectory storing every accepted step.

    Halts with a ``domain-exit`` status (partial trajectory, no exception)
    when the radius reaches the domain boundary, and ``step-collapse`` when
    the step size underflows away from it.
    """
    if not t_final > 0.0:
        raise ValueError(f"t_final must be positive, got {t_final!r}")
    control = control or StepControl()
    r0, th0, al0 = problem.to_canonical(state0)
    problem.check_domain(r0)
    n_max = control.max_steps + 1
    out_t = np.empty(n_max)
    out_y = np.empty((n_max, 3))
    lo, hi = problem.domain
    n, status = _kernels.rk45_trajectory(
        problem.code,
        problem.k,
        problem.a,
        problem.b,
        float(r0),
        float(th0),
        float(al0),
        float(t_final),
        control.rtol,
        control.atol,
        control.max_step,
        lo,
        hi,
        control.boundary_pad,
        out_t,
        out_y,
    )
    t = out_t[:n].copy()
    states = _states_from_canonical(problem, out_y[:n])
    traj = GeodesicTrajectory(
        problem=problem,
        t=t,
        states=states,
        adjoint=make_adjoint(problem, state0),
        method=METHOD_NUMERIC_RK,
        status=STATUS_NAMES[status],
        control=control,
    )
    traj.residuals = first_integral_residuals(problem, traj)
    return traj


def integrate_closed_form_historical(state0: ExtendedState, t: float) -> ExtendedState:
    """Exact flow of the linear-shear problem over time ``t`` (Cartesian chart)."""
    return closedform.historical_state(state0, float(t))


def closed_form_trajectory(
    problem: ProblemDefinition,
    state0: ExtendedState,
    t_final: float,
    n_samples: int = 512,
) -> GeodesicTrajectory:
    """Closed-form trajectory sampled on a uniform time grid."""
    if problem.family != "historical":
        raise ValueError("closed-form trajectories exist only for the historical problem")
    if not t_final > 0.0:
        raise ValueError(f"t_final must be positive, got {t_final!r}")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, float(t_final), int(n_samples))
    x, y, g = closedform.historical_state_arrays(state0.c1, state0.c2, state0.heading, ts)
    states = np.column_stack((x, y, g))
    traj = GeodesicTrajectory(
        problem=problem,
        t=ts,
        states=states,
        adjoint=make_adjoint(problem, state0),
        method=METHOD_CLOSED_FORM,
        status="completed",
        control=StepControl(),
    )
    traj.residuals = first_integral_residuals(problem, traj)
    return traj


def _endpoint_numeric(
    problem: ProblemDefinition,
    state0: ExtendedState,
    t: float,
    control: StepControl,
) -> ExtendedState:
    r0, th0, al0 = problem.to_canonical(state0)
    problem.check_domain(r0)
    ts = np.array([float(t)])
    out = np.full((1, 3), np.nan)
    lo, hi = problem.domain
    filled, status = _kernels.rk45_at_times(
        problem.code,
        problem.k,
        problem.a,
        problem.b,
        float(r0),
        float(th0),
        float(al0),
        ts,
        control.rtol,
        control.atol,
        control.max_step,
        lo,
        hi,
        control.boundary_pad,
        control.max_steps,
        out,
    )
    if filled < 1:
        raise IntegrationError(
            f"integration halted before t={t} ({STATUS_NAMES[status]})",
            STATUS_NAMES[status],
        )
    return problem.from_canonical(out[0, 0], out[0, 1], out[0, 2])


def state_at(traj: GeodesicTrajectory, t: float) -> ExtendedState:
    """Extended state of a trajectory at an arbitrary time within its span.

    Closed-form trajectories re-evaluate exactly; numeric ones re-integrate
    from the nearest stored sample at the trajectory's own tolerances.
    """
    if t < 0.0 or t > traj.t_end + 1e-12:
        raise ValueError(f"time {t!r} outside trajectory span [0, {traj.t_end}]")
    problem = traj.problem
    if traj.method == METHOD_CLOSED_FORM:
        return closedform.historical_state(traj.state(0), float(t))
    idx = int(np.searchsorted(traj.t, t, side="right") - 1)
    idx = max(0, min(idx, len(traj) - 1))
    if traj.t[idx] == t:
        return traj.state(idx)
    return _endpoint_numeric(problem, traj.state(idx), float(t - traj.t[idx]), traj.control)


def exponential_map(
    problem: ProblemDefinition,
    q0: tuple[float, float],
    heading0: float,
    t: float,
    control: StepControl | None = None,
) -> tuple[float, float]:
    """Position reached at time ``t`` from ``q0`` with initial heading ``heading0``.

    Dispatches to the closed form for the historical problem and to the
    numeric integrator otherwise; raises :class:`IntegrationError` when the
    trajectory leaves the domain before ``t``.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    if t == 0.0:
        return (float(q0[0]), float(q0[1]))
    state0 = ExtendedState(q0[0], q0[1], heading0)
    if problem.family == "historical":
        end = closedform.historical_state(state0, float(t))
    else:
        end = _endpoint_numeric(problem, state0, float(t), control or StepControl())
    return end.position
