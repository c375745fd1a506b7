import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zermelo import (
    Chart,
    DomainError,
    ExtendedState,
    current_norm,
    make_historical,
    make_powerlaw,
    make_vortex,
    problem_from_descriptor,
    wrap_angle,
)


def test_historical_profiles(historical):
    assert historical.mu(2.0) == 2.0
    assert historical.m(-5.0) == 1.0
    assert historical.m_prime(3.0) == 0.0
    assert historical.mu_prime(-7.0) == 1.0
    assert historical.chart is Chart.HISTORICAL_CARTESIAN


def test_vortex_profiles(vortex):
    assert vortex.mu(2.0) == 0.25
    assert vortex.m(2.0) == 2.0
    assert vortex.mu_prime(1.0) == -2.0
    assert vortex.m_prime(17.0) == 1.0
    assert vortex.chart is Chart.POLAR


def test_vortex_rejects_bad_circulation():
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            make_vortex(bad)


def test_powerlaw_subsumes_builtins(vortex, powerlaw_historical_twin):
    r = np.linspace(0.2, 4.0, 17)
    twin = powerlaw_historical_twin
    assert np.allclose(twin.m(r), 1.0)
    assert np.allclose(twin.mu(r), r)
    vtwin = make_powerlaw(k=1.0, a=-2.0, b=1.0)
    assert np.allclose(vtwin.m(r), vortex.m(r))
    assert np.allclose(vtwin.mu(r), vortex.mu(r))
    assert np.allclose(vtwin.mu_prime(r), vortex.mu_prime(r))


def test_current_norm_values(historical, vortex):
    assert current_norm(historical, 2.0) == 2.0
    assert current_norm(historical, 0.0) == 0.0
    assert current_norm(vortex, 0.5) == 2.0  # |k/r^2| * r = k/r


@given(st.floats(-50.0, 50.0))
def test_current_norm_historical_is_abs_height(y):
    assert current_norm(make_historical(), y) == abs(y)


@given(st.floats(0.01, 50.0))
def test_current_norm_vortex_is_k_over_r(r):
    assert math.isclose(current_norm(make_vortex(1.0), r), 1.0 / r, rel_tol=1e-15)


def test_domain_errors(vortex):
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            vortex.mu(bad)
    with pytest.raises(DomainError):
        current_norm(vortex, -0.5)
    # arrays are validated elementwise
    with pytest.raises(DomainError):
        vortex.m(np.array([0.5, -0.1]))


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_wrap_angle_range_and_period(angle):
    w = wrap_angle(angle)
    assert -math.pi < w <= math.pi
    assert math.isclose(
        math.cos(w), math.cos(angle), abs_tol=1e-9
    ) and math.isclose(math.sin(w), math.sin(angle), abs_tol=1e-9)
    assert wrap_angle(w) == w


def test_wrap_angle_boundary():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi


def test_extended_state_normalizes_heading():
    s = ExtendedState(0.0, 2.0, 7.0)
    assert -math.pi < s.heading <= math.pi
    assert math.isclose(s.heading, 7.0 - 2.0 * math.pi)


def test_chart_roundtrip(historical, vortex):
    s = ExtendedState(0.3, 2.0, -1.1)
    for problem in (historical, vortex):
        r, th, al = problem.to_canonical(s)
        back = problem.from_canonical(r, th, al)
        assert math.isclose(back.c1, s.c1)
        assert math.isclose(back.c2, s.c2)
        assert math.isclose(back.heading, s.heading)
        h = problem.heading_from_canonical(problem.heading_to_canonical(-2.5))
        assert math.isclose(h, -2.5)


def test_descriptor_parsing():
    p = problem_from_descriptor({"family": "historical"})
    assert p.family == "historical"
    v = problem_from_descriptor({"family": "vortex", "k": 2})
    assert v.k == 2.0
    w = problem_from_descriptor({"family": "powerlaw", "k": 1.5, "a": -2, "b": 1})
    assert (w.k, w.a, w.b) == (1.5, -2.0, 1.0)


@pytest.mark.parametrize(
    "descriptor",
    [
        {"family": "spiral"},
        {"family": "historical", "k": 1.0},
        {"family": "vortex", "k": "two"},
        {"family": "powerlaw", "k": 1.0},
        {"family": "vortex", "k": -1.0},
        "historical",
    ],
)
def test_descriptor_rejects_malformed(descriptor):
    with pytest.raises(ValueError):
        problem_from_descriptor(descriptor)
