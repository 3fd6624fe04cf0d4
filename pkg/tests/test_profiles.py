"""Log-radius profile calculus: derivatives, averages, antiderivatives."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from bergman_lab import UsageError
from bergman_lab.profiles import (
    ExpProfile,
    FlowAverageProfile,
    PolyVProfile,
    SmoothStepProfile,
    SumProfile,
    antiderivative_chain,
    irwin_hall_density,
    iterated_average,
)

V_GRID = np.array([0.05, 0.2, 0.45, 0.6, 0.75, 1.3, 2.0])


def test_irwin_hall_density_values():
    # fold 2: triangle on [0, 2] peaking at 1
    assert irwin_hall_density(2, 1.0) == pytest.approx(1.0)
    assert irwin_hall_density(2, 0.5) == pytest.approx(0.5)
    assert irwin_hall_density(2, 1.5) == pytest.approx(0.5)
    # fold 3: value 3/4 at the center
    assert irwin_hall_density(3, 1.5) == pytest.approx(0.75)
    # unit mass for every fold
    for fold in (1, 2, 3, 4):
        mass, _ = quad(lambda u: float(irwin_hall_density(fold, u)), 0, fold,
                       points=list(range(fold + 1)), limit=200)
        assert mass == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(UsageError):
        irwin_hall_density(0, 0.5)


def test_exp_profile_derivatives_and_antiderivative():
    p = ExpProfile(-2.0, scale=3.0)
    v = V_GRID
    assert p.derivative(0, v) == pytest.approx(3.0 * np.exp(-2.0 * v))
    assert p.derivative(3, v) == pytest.approx(3.0 * (-2.0) ** 3 * np.exp(-2.0 * v))
    F = p.antiderivative()
    assert F.derivative(1, v) == pytest.approx(p.derivative(0, v), abs=1e-14)


def test_poly_profile_round_trip():
    p = PolyVProfile((1.0, 2.0, 3.0))          # 1 + 2v + 3v^2
    v = V_GRID
    assert p.derivative(0, v) == pytest.approx(1.0 + 2.0 * v + 3.0 * v * v)
    assert p.derivative(1, v) == pytest.approx(2.0 + 6.0 * v)
    assert p.derivative(2, v) == pytest.approx(np.full_like(v, 6.0))
    F = p.antiderivative()
    assert F.derivative(1, v) == pytest.approx(p.derivative(0, v), abs=1e-13)


def test_smooth_step_profile_shape():
    # profile of the radial cutoff: 1 near the boundary (small v), 0 deep inside
    p = SmoothStepProfile(0.5, 0.7)
    assert p.derivative(0, 0.05) == pytest.approx(1.0)     # r = e^-0.05 > 0.7
    assert p.derivative(0, 1.2) == pytest.approx(0.0)      # r < 0.5
    assert p.upper_cutoff == pytest.approx(-math.log(0.5))
    assert len(p.breakpoints) == 2
    vals = p.derivative(0, np.linspace(0.0, 1.0, 64))
    assert np.all(np.diff(vals) <= 1e-15)                  # monotone in v
    # finite differences agree with the exact first derivative mid-transition
    v0, h = 0.5, 1e-5
    fd = (p.derivative(0, v0 + h) - p.derivative(0, v0 - h)) / (2 * h)
    assert p.derivative(1, v0) == pytest.approx(fd, rel=1e-8)
    with pytest.raises(UsageError):
        p.derivative(p.max_order + 1, 0.5)


def test_flow_average_exponential_closed_form():
    # A[e^{cv}](v) = e^{cv} (e^c - 1)/c, and the two-fold average squares it
    c = -2.0
    p = ExpProfile(c)
    factor = (math.exp(c) - 1.0) / c
    one = FlowAverageProfile(p, fold=1)
    two = FlowAverageProfile(p, fold=2)
    v = V_GRID
    assert one.derivative(0, v) == pytest.approx(np.exp(c * v) * factor, abs=1e-14)
    assert two.derivative(0, v) == pytest.approx(np.exp(c * v) * factor ** 2,
                                                 abs=1e-14)


def test_flow_average_matches_adaptive_quadrature():
    p = SmoothStepProfile(0.5, 0.7)
    avg = FlowAverageProfile(p, fold=1, nodes_per_segment=64)
    for v0 in (0.0, 0.1, 0.3, 0.55):
        ref, err = quad(lambda u: float(p.derivative(0, v0 + u)), 0.0, 1.0,
                        points=[b - v0 for b in p.breakpoints if 0 < b - v0 < 1],
                        limit=200)
        assert float(avg.derivative(0, v0)) == pytest.approx(ref, abs=1e-12)


def test_iterated_average_telescopes():
    p = SmoothStepProfile(0.5, 0.7)
    it = iterated_average(p, 1)
    # d/dv of a unit moving average telescopes to a finite difference
    v = np.array([0.05, 0.3, 0.5])
    lhs = it.derivative(1, v)
    rhs = p.derivative(0, v + 1.0) - p.derivative(0, v)
    assert lhs == pytest.approx(rhs, abs=1e-11)
    # two-fold iterated average equals the Irwin-Hall weighted single integral
    it2 = iterated_average(p, 2)
    quad2 = FlowAverageProfile(p, fold=2, nodes_per_segment=64)
    assert it2.derivative(0, v) == pytest.approx(quad2.derivative(0, v), abs=1e-11)


def test_antiderivative_chain_round_trip():
    p = SmoothStepProfile(0.5, 0.7)
    F = antiderivative_chain(p, 1)
    v = np.array([0.1, 0.35, 0.52, 0.64, 0.9, 1.8])
    assert F.derivative(1, v) == pytest.approx(p.derivative(0, v), abs=1e-11)
    # chains cache per profile: asking again returns the same object
    assert antiderivative_chain(p, 1) is F
    # depth 2 differentiates back to depth 1
    F2 = antiderivative_chain(p, 2)
    assert F2.derivative(1, v) == pytest.approx(F.derivative(0, v), abs=1e-11)


def test_chebyshev_tables_refuse_extrapolation():
    p = SmoothStepProfile(0.5, 0.7)
    F = antiderivative_chain(p, 1)
    with pytest.raises(UsageError):
        F.derivative(0, np.array([25.0]))


def test_sum_profile_combines_parts():
    p = SumProfile((ExpProfile(-1.0), PolyVProfile((0.5,))))
    v = V_GRID
    assert p.derivative(0, v) == pytest.approx(np.exp(-v) + 0.5)
    assert p.derivative(1, v) == pytest.approx(-np.exp(-v))
    F = p.antiderivative()
    assert F.derivative(1, v) == pytest.approx(p.derivative(0, v), abs=1e-13)
