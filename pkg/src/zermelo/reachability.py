"""Wavefronts, time-minimal spheres and balls, shooting, cut-locus estimation.

The fixed-time wavefront is the image of the heading circle under the
endpoint map.  In the strong-current region only part of the front is
time-minimal: the sphere is recovered by filtering front points through the
value function, and the small-time ball is the fan bounded by that sphere
sector together with the two abnormal arcs.

The value function itself is computed by two-stage shooting: a dense
(heading x time) endpoint grid locates candidate arrivals, then a damped
Newton iteration on the 2-d endpoint map polishes each candidate until it
lands within ``position_tol`` of the target.  The minimal polished arrival
time over all candidates is reported; a scan that finds nothing up to
``t_max`` yields an unreachable marker, which is a value, not an error.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import closedform
from .brackets import ExtremalTag, abnormal_headings, classify
from .cusp import cusp_numeric
from .flow import (
    GeodesicTrajectory,
    IntegrationError,
    StepControl,
    closed_form_trajectory,
    integrate_numeric,
    state_at,
)
from .geometry import polyline_self_intersections, refine_curve_intersection
from .problems import (
    Chart,
    DomainError,
    ExtendedState,
    ProblemDefinition,
    current_norm,
    wrap_angle,
)

__all__ = [
    "CutLocusEstimate",
    "JumpReport",
    "SeparatingPoint",
    "ShootingConfig",
    "ShootingGrid",
    "SphereAndBall",
    "ValueSample",
    "ValueScan",
    "Wavefront",
    "build_shooting_grid",
    "cut_locus_estimate",
    "discontinuity_scan",
    "loop_time_estimate",
    "self_intersections",
    "sphere_and_ball",
    "value_function",
    "wavefront",
    "winding_number",
]

UNREACHABLE = math.inf


@dataclass(frozen=True)
class ShootingConfig:
    """Grid sizes and tolerances for value-function shooting."""

    n_alpha: int = 720
    n_time: int = 600
    t_max: float = 6.0
    position_tol: float = 1e-8
    sphere_tol: float = 1e-6
    max_newton: int = 60
    capture_factor: float = 3.0
    max_candidates: int = 200
    abnormal_match_tol: float = 1e-6
    step_control: StepControl = StepControl()

    def __post_init__(self):
        if self.n_alpha < 8 or self.n_time < 8:
            raise ValueError("shooting grids need at least 8 headings and 8 times")
        if self.t_max <= 0.0 or self.position_tol <= 0.0:
            raise ValueError("t_max and position_tol must be positive")


@dataclass
class ShootingGrid:
    """Precomputed endpoint grid, reusable across targets from the same start."""

    q0: tuple[float, float]
    alphas: np.ndarray  # (n_alpha,) chart headings
    times: np.ndarray  # (n_time,) ascending from 0
    positions: np.ndarray  # (n_alpha, n_time, 2); nan where integration halted
    cell: np.ndarray = None  # (n_alpha, n_time) local endpoint spacing

    def __post_init__(self):
        if self.cell is None:
            step_a = np.linalg.norm(
                self.positions - np.roll(self.positions, 1, axis=0), axis=-1
            )
            step_t = np.abs(np.diff(self.positions, axis=1)).max(axis=-1)
            step_t = np.concatenate((step_t, step_t[:, -1:]), axis=1)
            self.cell = np.fmax(
                np.where(np.isfinite(step_a), step_a, 0.0),
                np.where(np.isfinite(step_t), step_t, 0.0),
            )


@dataclass(frozen=True)
class ValueSample:
    """Minimal transfer time to one target, with the achieving heading."""

    target: tuple[float, float]
    t_min: float  # inf marks an unreachable target within the scan horizon
    heading0: float | None
    flag: str  # "interior" | "via-abnormal" | "unreachable"

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.t_min)


@dataclass
class Wavefront:
    """Endpoint-map image of the heading circle at one fixed time."""

    problem: ProblemDefinition
    q0: tuple[float, float]
    t: float
    alpha0: np.ndarray
    positions: np.ndarray  # (n, 2); nan rows where the trajectory left the domain
    tags: list[ExtremalTag]
    ok: np.ndarray


@dataclass
class SphereAndBall:
    """Sphere filter over a wavefront plus the fan's abnormal boundary arcs."""

    front: Wavefront
    t_min: np.ndarray
    is_sphere: np.ndarray
    abnormal_arcs: list[GeodesicTrajectory]


@dataclass(frozen=True)
class JumpReport:
    """One detected discontinuity of the sampled value function."""

    index: int  # sample index immediately left of the maximal gap
    s: float  # arclength at the gap midpoint
    t_left: float
    t_right: float
    position: tuple[float, float]


@dataclass
class ValueScan:
    s: np.ndarray
    positions: np.ndarray
    samples: list[ValueSample]
    jumps: list[JumpReport]


@dataclass(frozen=True)
class SeparatingPoint:
    """Equal-time crossing of two distinct minimizing geodesics."""

    t: float
    position: tuple[float, float]
    heading_a: float
    heading_b: float
    confirmed: bool


@dataclass
class CutLocusEstimate:
    arcs: list[GeodesicTrajectory]
    arc_headings: tuple[float, ...]
    separating_points: list[SeparatingPoint]


# -- endpoint evaluation ----------------------------------------------------


def _endpoint_batch(problem: ProblemDefinition, q0, control: StepControl):
    """Vectorized (headings, times) -> positions map from a fixed start."""
    x0, y0 = float(q0[0]), float(q0[1])
    if problem.family == "historical":

        def batch(headings, ts):
            return closedform.historical_endpoints(x0, y0, headings, ts)

        return batch

    from .flow import _endpoint_numeric  # local import: private helper

    def batch(headings, ts):
        headings = np.atleast_1d(np.asarray(headings, dtype=float))
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        out = np.full((headings.shape[0], 2), np.nan)
        for i in range(headings.shape[0]):
            if ts[i] <= 0.0:
                out[i] = (x0, y0)
                continue
            try:
                end = _endpoint_numeric(
                    problem, ExtendedState(x0, y0, headings[i]), float(ts[i]), control
                )
            except IntegrationError:
                continue
            out[i] = end.position
        return out

    return batch


def build_shooting_grid(
    problem: ProblemDefinition, q0, config: ShootingConfig | None = None
) -> ShootingGrid:
    """Dense endpoint grid over evenly spaced headings and times up to t_max."""
    config = config or ShootingConfig()
    problem.check_domain(problem.radius_of(q0))
    n = config.n_alpha
    alphas = -math.pi + 2.0 * math.pi * np.arange(1, n + 1) / n
    times = np.linspace(0.0, config.t_max, config.n_time)
    x0, y0 = float(q0[0]), float(q0[1])
    if problem.family == "historical":
        positions = closedform.historical_positions(x0, y0, alphas, times)
    else:
        positions = np.full((n, config.n_time, 2), np.nan)
        from . import _kernels

        lo, hi = problem.domain
        sc = config.step_control
        for i, heading in enumerate(alphas):
            r0, th0, al0 = problem.to_canonical(ExtendedState(x0, y0, heading))
            out = np.full((config.n_time, 3), np.nan)
            _kernels.rk45_at_times(
                problem.code,
                problem.k,
                problem.a,
                problem.b,
                float(r0),
                float(th0),
                float(al0),
                times,
                sc.rtol,
                sc.atol,
                sc.max_step,
                lo,
                hi,
                sc.boundary_pad,
                sc.max_steps,
                out,
            )
            if problem.chart is Chart.POLAR:
                positions[i, :, 0] = out[:, 0]
                positions[i, :, 1] = out[:, 1]
            else:
                positions[i, :, 0] = out[:, 1]
                positions[i, :, 1] = out[:, 0]
    return ShootingGrid(q0=(x0, y0), alphas=alphas, times=times, positions=positions)


def _candidate_nodes(grid: ShootingGrid, target, config: ShootingConfig):
    """Grid nodes that plausibly bracket an arrival at the target."""
    diff = grid.positions - np.asarray(target, dtype=float)
    d = np.hypot(diff[..., 0], diff[..., 1])
    d = np.where(np.isfinite(d), d, np.inf)

    local = (d <= np.roll(d, 1, axis=0)) & (d <= np.roll(d, -1, axis=0))
    local[:, 1:] &= d[:, 1:] <= d[:, :-1]
    local[:, :-1] &= d[:, :-1] <= d[:, 1:]
    mask = local & np.isfinite(d) & (d <= config.capture_factor * np.fmax(grid.cell, 1e-12))
    idx = np.argwhere(mask)
    if idx.shape[0] == 0 and np.any(np.isfinite(d)):
        flat = int(np.argmin(d))
        idx = np.array([[flat // d.shape[1], flat % d.shape[1]]])
    if idx.shape[0] > config.max_candidates:
        order = np.argsort(d[idx[:, 0], idx[:, 1]])[: config.max_candidates]
        idx = idx[order]
    return idx


def _newton_polish(endpoint_batch, target, a0, t0, config: ShootingConfig):
    """Damped Newton on the 2-d endpoint map for a batch of candidates.

    Returns (headings, times, converged) with times clamped to [0, inf).
    """
    target = np.asarray(target, dtype=float)
    al = np.asarray(a0, dtype=float).copy()
    tt = np.asarray(t0, dtype=float).copy()
    n = al.shape[0]
    f = endpoint_batch(al, tt) - target
    h = 1e-7
    done = np.zeros(n, dtype=bool)
    for _ in range(config.max_newton):
        norm = np.hypot(f[:, 0], f[:, 1])
        done |= norm <= config.position_tol
        active = ~done & np.isfinite(norm)
        if not np.any(active):
            break
        ia = np.nonzero(active)[0]
        fa = f[ia]
        ja = (endpoint_batch(al[ia] + h, tt[ia]) - target - fa) / h
        jt = (endpoint_batch(al[ia], tt[ia] + h) - target - fa) / h
        det = ja[:, 0] * jt[:, 1] - ja[:, 1] * jt[:, 0]
        ok = np.abs(det) > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            da = np.where(ok, (-fa[:, 0] * jt[:, 1] + fa[:, 1] * jt[:, 0]) / det, 0.0)
            dt = np.where(ok, (-ja[:, 0] * fa[:, 1] + ja[:, 1] * fa[:, 0]) / det, 0.0)
        lam = np.ones(ia.shape[0])
        improved = np.zeros(ia.shape[0], dtype=bool)
        for _ in range(20):
            trial_al = al[ia] + lam * da
            trial_tt = np.maximum(tt[ia] + lam * dt, 0.0)
            f_trial = endpoint_batch(trial_al, trial_tt) - target
            trial_norm = np.hypot(f_trial[:, 0], f_trial[:, 1])
            better = ~improved & (trial_norm < norm[ia])
            if np.any(better):
                sel = ia[better]
                al[sel] = trial_al[better]
                tt[sel] = trial_tt[better]
                f[sel] = f_trial[better]
                improved |= better
            if np.all(improved):
                break
            lam = np.where(improved, lam, lam * 0.5)
        stalled = ia[~improved]
        done[stalled] = True  # converged or stuck; final residual decides below
    norm = np.hypot(f[:, 0], f[:, 1])
    converged = np.isfinite(norm) & (norm <= config.position_tol)
    return al, tt, converged


def value_function(
    problem: ProblemDefinition,
    q0,
    target,
    config: ShootingConfig | None = None,
    grid: ShootingGrid | None = None,
) -> ValueSample:
    """Minimal transfer time from ``q0`` to ``target`` by two-stage shooting.

    Pass a prebuilt :class:`ShootingGrid` when evaluating many targets from
    the same start; the grid depends only on ``(problem, q0, config)``.
    """
    config = config or ShootingConfig()
    tgt = (float(target[0]), float(target[1]))
    problem.check_domain(problem.radius_of(tgt))
    if math.hypot(tgt[0] - q0[0], tgt[1] - q0[1]) <= config.position_tol:
        return ValueSample(tgt, 0.0, None, "interior")
    if grid is None:
        grid = build_shooting_grid(problem, q0, config)
    idx = _candidate_nodes(grid, tgt, config)
    if idx.shape[0] == 0:
        return ValueSample(tgt, UNREACHABLE, None, "unreachable")
    batch = _endpoint_batch(problem, grid.q0, config.step_control)
    al, tt, converged = _newton_polish(
        batch, tgt, grid.alphas[idx[:, 0]], grid.times[idx[:, 1]], config
    )
    valid = converged & (tt <= config.t_max + 1e-9)
    if not np.any(valid):
        return ValueSample(tgt, UNREACHABLE, None, "unreachable")
    best = int(np.nonzero(valid)[0][np.argmin(tt[valid])])
    t_best = float(tt[best])
    heading = float(wrap_angle(al[best]))
    flag = "interior"
    try:
        heads = abnormal_headings(problem, problem.radius_of(grid.q0))
    except DomainError:
        heads = ()
    for h_ab in heads:
        gap = abs(float(wrap_angle(heading - h_ab)))
        if gap <= config.abnormal_match_tol:
            flag = "via-abnormal"
            break
    return ValueSample(tgt, t_best, heading, flag)


# -- wavefronts, spheres and balls -------------------------------------------


def wavefront(
    problem: ProblemDefinition,
    q0,
    t: float,
    n_alpha: int,
    include_headings=(),
    control: StepControl | None = None,
) -> Wavefront:
    """Endpoint-map image of ``n_alpha`` evenly spaced headings at time ``t``.

    Each point is tagged by the classification of its initial state; points
    whose trajectory leaves the domain before ``t`` are kept as nan rows and
    marked not-ok.  ``include_headings`` lets callers pin extra headings
    (e.g. the abnormal ones) onto the front exactly.
    """
    if n_alpha < 8:
        raise ValueError("wavefront needs at least 8 headings")
    if not t > 0.0:
        raise ValueError("wavefront time must be positive")
    control = control or StepControl()
    x0, y0 = float(q0[0]), float(q0[1])
    base = -math.pi + 2.0 * math.pi * np.arange(1, n_alpha + 1) / n_alpha
    extra = np.asarray(wrap_angle(np.asarray(list(include_headings), dtype=float)))
    alphas = np.sort(np.concatenate((base, np.atleast_1d(extra)))) if extra.size else base
    keep = np.ones(alphas.shape[0], dtype=bool)
    keep[1:] = np.diff(alphas) > 1e-15
    alphas = alphas[keep]

    if problem.family == "historical":
        positions = closedform.historical_endpoints(x0, y0, alphas, np.full_like(alphas, t))
        ok = np.ones(alphas.shape[0], dtype=bool)
    else:
        batch = _endpoint_batch(problem, (x0, y0), control)
        positions = batch(alphas, np.full_like(alphas, t))
        ok = np.isfinite(positions[:, 0])
    tags = [classify(problem, ExtendedState(x0, y0, h)).tag for h in alphas]
    return Wavefront(problem, (x0, y0), float(t), alphas, positions, tags, ok)


def _abnormal_arc(
    problem: ProblemDefinition, q0, heading: float, t: float, control: StepControl
) -> GeodesicTrajectory:
    state0 = ExtendedState(q0[0], q0[1], heading)
    t_arc = t
    if problem.family == "historical":
        t_c = closedform.cusp_time(heading)
        if t_c > 0.0:
            t_arc = min(t_arc, t_c)
        return closed_form_trajectory(problem, state0, t_arc, n_samples=256)
    cp = cusp_numeric(problem, state0, t, control)
    if cp is not None:
        t_arc = min(t_arc, cp.t_cusp)
    return integrate_numeric(problem, state0, t_arc, control)


def sphere_and_ball(
    problem: ProblemDefinition,
    q0,
    t: float,
    n_alpha: int,
    config: ShootingConfig | None = None,
    control: StepControl | None = None,
) -> SphereAndBall:
    """Time-minimal sphere filter over the wavefront, plus the fan's boundary arcs.

    A front point belongs to the sphere when its minimal time equals the
    front time within ``sphere_tol``.  In the strong-current case the two
    abnormal arcs (the cusped one truncated at its cusp) complete the ball
    boundary; in the weak case there are none.
    """
    config = config or ShootingConfig()
    if config.t_max < 1.5 * t:
        config = dataclasses.replace(config, t_max=1.5 * t)
    control = control or config.step_control
    try:
        heads = abnormal_headings(problem, problem.radius_of(q0))
    except DomainError:
        heads = ()
    front = wavefront(problem, q0, t, n_alpha, include_headings=heads, control=control)
    grid = build_shooting_grid(problem, q0, config)
    t_min = np.full(front.alpha0.shape[0], UNREACHABLE)
    for i in range(front.alpha0.shape[0]):
        if not front.ok[i]:
            continue
        t_min[i] = value_function(problem, q0, front.positions[i], config, grid).t_min
    is_sphere = np.abs(t_min - t) <= config.sphere_tol * (1.0 + t)
    arcs = [_abnormal_arc(problem, q0, h, t, control) for h in heads]
    return SphereAndBall(front=front, t_min=t_min, is_sphere=is_sphere, abnormal_arcs=arcs)


# -- geodesic self-intersections ---------------------------------------------


def self_intersections(traj: GeodesicTrajectory, refine: bool = True):
    """Transversal self-crossings of a trajectory's position trace.

    Returns ``(t1, t2, (c1, c2))`` tuples with ``t1 < t2``.  Polyline
    crossings are polished against the exact flow unless ``refine`` is
    false or polishing fails, in which case the polyline estimate stands.
    """
    if len(traj) < 2:
        raise ValueError("trajectory needs at least two samples")
    hits = polyline_self_intersections(traj.positions, traj.t)
    if not refine or not hits:
        return hits
    out = []
    for t1, t2, pos in hits:
        polished = refine_curve_intersection(
            lambda u: state_at(traj, u).position, t1, t2, (0.0, traj.t_end)
        )
        out.append(polished if polished is not None else (t1, t2, pos))
    return out


# -- value-function scans ------------------------------------------------------


def discontinuity_scan(
    problem: ProblemDefinition,
    q0,
    segment: tuple[tuple[float, float], tuple[float, float]],
    n_samples: int,
    config: ShootingConfig | None = None,
) -> ValueScan:
    """Sample the value function along a segment and flag its jumps.

    Adjacent differences exceeding ten times their median (plus a tiny
    absolute floor) are discontinuity candidates; consecutive candidates
    merge into one jump event whose left-limit is read at the sample just
    left of the event's maximal gap.
    """
    config = config or ShootingConfig()
    a = np.asarray(segment[0], dtype=float)
    b = np.asarray(segment[1], dtype=float)
    for endpoint in (a, b):
        problem.check_domain(problem.radius_of(endpoint))
    length = float(np.hypot(*(b - a)))
    if length == 0.0 or n_samples < 2:
        points = a[None, :]
        s = np.zeros(1)
    else:
        frac = np.linspace(0.0, 1.0, int(n_samples))
        points = a[None, :] + frac[:, None] * (b - a)[None, :]
        s = frac * length
    grid = build_shooting_grid(problem, q0, config)
    samples = [value_function(problem, q0, pt, config, grid) for pt in points]
    t_vals = np.array([smp.t_min for smp in samples])

    jumps: list[JumpReport] = []
    if t_vals.shape[0] >= 2:
        diffs = np.abs(np.diff(t_vals))
        finite = np.isfinite(diffs)
        med = float(np.median(diffs[finite])) if np.any(finite) else 0.0
        threshold = 10.0 * med + 1e-7
        both_inf = ~np.isfinite(t_vals[:-1]) & ~np.isfinite(t_vals[1:])
        flagged = np.where(both_inf, False, ~finite | (diffs > threshold))
        i = 0
        n_d = diffs.shape[0]
        while i < n_d:
            if not flagged[i]:
                i += 1
                continue
            j = i
            while j + 1 < n_d and flagged[j + 1]:
                j += 1
            run = np.arange(i, j + 1)
            gaps = diffs[run]
            edge = int(run[int(np.argmax(np.where(np.isfinite(gaps), gaps, np.inf)))])
            mid = 0.5 * (points[edge] + points[edge + 1])
            jumps.append(
                JumpReport(
                    index=edge,
                    s=float(0.5 * (s[edge] + s[edge + 1])),
                    t_left=float(t_vals[edge]),
                    t_right=float(t_vals[edge + 1]),
                    position=(float(mid[0]), float(mid[1])),
                )
            )
            i = j + 1
    return ValueScan(s=s, positions=points, samples=samples, jumps=jumps)


# -- cut locus ---------------------------------------------------------------


def winding_number(points: np.ndarray, center) -> int:
    """Winding number of a closed polygonal curve around a point."""
    v = np.asarray(points, dtype=float) - np.asarray(center, dtype=float)
    ang = np.arctan2(v[:, 1], v[:, 0])
    d = wrap_angle(np.diff(np.concatenate((ang, ang[:1]))))
    return int(round(float(np.sum(d)) / (2.0 * math.pi)))


def loop_time_estimate(
    problem: ProblemDefinition,
    q0,
    t_upper: float,
    n_alpha: int = 180,
    control: StepControl | None = None,
    iters: int = 40,
) -> float:
    """First time the wavefront encloses the start point (estimate only).

    Bisects on the winding number of the front around ``q0``; returns inf
    when the front still fails to enclose the start at ``t_upper``.
    """
    def encloses(t: float) -> bool:
        front = wavefront(problem, q0, t, n_alpha, control=control)
        if not np.all(front.ok):
            return False
        return winding_number(front.positions, q0) != 0

    if not encloses(t_upper):
        return UNREACHABLE
    lo, hi = 0.0, float(t_upper)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if encloses(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _default_cut_horizon(problem: ProblemDefinition, q0, heads, control: StepControl) -> float:
    """Adapted neighborhood radius: 1.5x the forward cusp time of the cusped arc."""
    times = []
    for h in heads:
        if problem.family == "historical":
            t_c = closedform.cusp_time(h)
            if t_c > 0.0:
                times.append(t_c)
        else:
            cp = cusp_numeric(problem, ExtendedState(q0[0], q0[1], h), 20.0, control)
            if cp is not None:
                times.append(cp.t_cusp)
    if not times:
        raise ValueError(
            "no forward cusp found to size the adapted neighborhood; pass t_max explicitly"
        )
    return 1.5 * min(times)


def cut_locus_estimate(
    problem: ProblemDefinition,
    q0,
    t_max: float | None = None,
    n_alpha: int = 256,
    config: ShootingConfig | None = None,
    n_front_times: int = 5,
) -> CutLocusEstimate:
    """Cut-locus estimate at a strong-current start.

    The two abnormal arcs (the cusped one truncated at its cusp) form the
    estimate's backbone; equal-time self-crossings of intermediate
    wavefronts are collected as separating-line candidates and confirmed
    when the value function matches the front time at the crossing.
    ``t_max`` defaults to 1.5x the forward cusp time (the adapted
    neighborhood this estimate is valid in).
    """
    config = config or ShootingConfig()
    radius = problem.radius_of(q0)
    if float(current_norm(problem, radius)) <= 1.0:
        raise ValueError("cut-locus estimation is only supported at strong-current starts")
    heads = abnormal_headings(problem, radius)
    control = config.step_control
    if t_max is None:
        t_max = _default_cut_horizon(problem, q0, heads, control)
    if config.t_max < t_max:
        config = dataclasses.replace(config, t_max=float(t_max))
    arcs = [_abnormal_arc(problem, q0, h, t_max, control) for h in heads]

    grid = build_shooting_grid(problem, q0, config)
    separating: list[SeparatingPoint] = []
    for t_k in np.linspace(0.35, 1.0, n_front_times) * t_max:
        front = wavefront(problem, q0, float(t_k), n_alpha, control=control)
        if not np.all(front.ok):
            continue
        pts = np.vstack((front.positions, front.positions[:1]))
        par = np.concatenate((front.alpha0, front.alpha0[:1] + 2.0 * math.pi))
        for a1, a2, pos in polyline_self_intersections(pts, par):
            sample = value_function(problem, q0, pos, config, grid)
            confirmed = (
                sample.reachable
                and abs(sample.t_min - t_k) <= config.sphere_tol * (1.0 + t_k) * 100.0
            )
            separating.append(
                SeparatingPoint(
                    t=float(t_k),
                    position=pos,
                    heading_a=float(wrap_angle(a1)),
                    heading_b=float(wrap_angle(a2)),
                    confirmed=bool(confirmed),
                )
            )
    return CutLocusEstimate(arcs=arcs, arc_headings=tuple(heads), separating_points=separating)
