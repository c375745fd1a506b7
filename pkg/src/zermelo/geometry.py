"""Planar polyline intersection helpers.

Used to find self-intersections of geodesic traces and wavefront polygons.
Candidate segment pairs are screened with vectorized bounding boxes, solved
exactly as line segments, and optionally polished against the true curve by
a small damped Newton iteration on the two curve parameters.
"""

from __future__ import annotations

import numpy as np

__all__ = ["polyline_self_intersections", "refine_curve_intersection"]


def polyline_self_intersections(
    points: np.ndarray,
    params: np.ndarray,
    min_param_gap: float | None = None,
) -> list[tuple[float, float, tuple[float, float]]]:
    """Transversal self-intersections of an open polyline.

    ``points`` is (n, 2), ``params`` the matching strictly increasing curve
    parameter.  Returns tuples ``(u1, u2, (x, y))`` with ``u1 < u2``, the
    parameters linearly interpolated within the intersecting segments.
    Pairs closer than ``min_param_gap`` in parameter are dropped (defaults
    to three maximal sample spacings) so that mere sample adjacency never
    counts as a crossing.
    """
    pts = np.asarray(points, dtype=float)
    par = np.asarray(params, dtype=float)
    n = pts.shape[0]
    if n < 4:
        return []
    if min_param_gap is None:
        min_param_gap = 3.0 * float(np.max(np.diff(par)))

    a = pts[:-1]
    b = pts[1:]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    nseg = n - 1
    ii, jj = np.triu_indices(nseg, k=2)
    overlap = (
        (lo[ii, 0] <= hi[jj, 0])
        & (lo[jj, 0] <= hi[ii, 0])
        & (lo[ii, 1] <= hi[jj, 1])
        & (lo[jj, 1] <= hi[ii, 1])
    )
    ii, jj = ii[overlap], jj[overlap]
    if ii.size == 0:
        return []

    d1 = b[ii] - a[ii]
    d2 = b[jj] - a[jj]
    rr = a[jj] - a[ii]
    den = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (rr[:, 0] * d2[:, 1] - rr[:, 1] * d2[:, 0]) / den
        w = (rr[:, 0] * d1[:, 1] - rr[:, 1] * d1[:, 0]) / den
    eps = 1e-9
    good = (
        (np.abs(den) > 0.0)
        & (s >= -eps)
        & (s <= 1.0 + eps)
        & (w >= -eps)
        & (w <= 1.0 + eps)
    )
    out = []
    for idx in np.nonzero(good)[0]:
        i, j = int(ii[idx]), int(jj[idx])
        si, wj = float(s[idx]), float(w[idx])
        u1 = par[i] + si * (par[i + 1] - par[i])
        u2 = par[j] + wj * (par[j + 1] - par[j])
        if u2 - u1 <= min_param_gap:
            continue
        p = a[i] + si * d1[idx]
        out.append((float(u1), float(u2), (float(p[0]), float(p[1]))))
    out.sort()
    return out


def refine_curve_intersection(
    eval_fn,
    u1: float,
    u2: float,
    bounds: tuple[float, float],
    tol: float = 1e-10,
    max_iter: int = 40,
) -> tuple[float, float, tuple[float, float]] | None:
    """Polish a polyline crossing against the true curve ``eval_fn(u) -> (x, y)``.

    Damped Newton on F(u1, u2) = eval(u1) - eval(u2) with finite-difference
    Jacobian; returns ``None`` if the iteration leaves ``bounds`` or fails
    to converge, in which case the caller keeps the polyline estimate.
    """
    lo, hi = bounds
    u = np.array([u1, u2], dtype=float)

    def gap(v):
        p1 = np.asarray(eval_fn(v[0]), dtype=float)
        p2 = np.asarray(eval_fn(v[1]), dtype=float)
        return p1 - p2

    f = gap(u)
    h = 1e-7 * max(1.0, hi)
    for _ in range(max_iter):
        norm = float(np.hypot(*f))
        if norm <= tol:
            p = np.asarray(eval_fn(u[0]), dtype=float)
            return float(u[0]), float(u[1]), (float(p[0]), float(p[1]))
        j1 = (gap([u[0] + h, u[1]]) - f) / h
        j2 = (gap([u[0], u[1] + h]) - f) / h
        jac = np.column_stack((j1, j2))
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(20):
            trial = u + lam * step
            if trial[0] < lo or trial[1] > hi or trial[0] >= trial[1]:
                lam *= 0.5
                continue
            f_trial = gap(trial)
            if float(np.hypot(*f_trial)) < norm:
                u, f = trial, f_trial
                break
            lam *= 0.5
        else:
            return None
    return None
