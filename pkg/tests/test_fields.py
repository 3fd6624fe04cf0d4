"""Scalar fields: evaluation, exact derivatives, products, guard rails."""

import math

import numpy as np
import pytest

from bergman_lab import (
    DomainError,
    UsageError,
    apply_partial,
    apply_tuple,
    apply_vector_field,
    build_bump_cutoff,
    build_counterexample,
    constant_field,
    harmonic_monomial,
    harmonicity_residual,
    laplacian,
    monomial_field,
    norm,
    polynomial_field,
    rotation_field,
)
from bergman_lab.fields import ScalarField, mode_terms

RNG = np.random.default_rng(11)
PTS = 0.8 * RNG.uniform(-1, 1, size=(40, 2)) / math.sqrt(2.0)


def _complex(pts):
    return pts[:, 0] + 1j * pts[:, 1]


def test_monomial_values_and_derivatives():
    f = monomial_field((2, 3), coeff=1.5)
    x = PTS
    assert f.evaluate(x) == pytest.approx(1.5 * x[:, 0] ** 2 * x[:, 1] ** 3)
    d = apply_partial(f, (1, 1))
    assert d.evaluate(x) == pytest.approx(1.5 * 2 * x[:, 0] * 3 * x[:, 1] ** 2)
    d2 = apply_partial(f, (0, 2))
    assert d2.evaluate(x) == pytest.approx(1.5 * x[:, 0] ** 2 * 6 * x[:, 1])


def test_polynomial_field_combines_terms():
    f = polynomial_field({(0, 0): 2.0, (1, 0): -1.0, (0, 2): 3.0}, 2)
    x = PTS
    assert f.evaluate(x) == pytest.approx(2.0 - x[:, 0] + 3.0 * x[:, 1] ** 2)


def test_constant_field_is_exact():
    f = constant_field(4.2, n=3)
    pts3 = RNG.uniform(-0.4, 0.4, size=(10, 3))
    assert f.evaluate(pts3) == pytest.approx(np.full(10, 4.2))
    assert laplacian(f).evaluate(pts3) == pytest.approx(np.zeros(10), abs=1e-14)


def test_harmonic_monomial_matches_complex_powers():
    z = _complex(PTS)
    for m in (1, 2, 5, 8):
        re = harmonic_monomial(m, "real")
        im = harmonic_monomial(m, "imag")
        assert re.evaluate(PTS) == pytest.approx((z ** m).real, abs=1e-14)
        assert im.evaluate(PTS) == pytest.approx((z ** m).imag, abs=1e-14)


def test_harmonic_monomials_are_harmonic():
    for m in (1, 3, 6):
        assert harmonicity_residual(harmonic_monomial(m), PTS) < 1e-12


def test_harmonic_monomial_rejects_bad_input():
    with pytest.raises(UsageError):
        harmonic_monomial(-1)
    with pytest.raises(UsageError):
        harmonic_monomial(2, "modulus")


def test_bump_cutoff_plateaus():
    zeta = build_bump_cutoff(0.5, 0.7)
    inner = np.array([[0.1, 0.2], [0.0, 0.0], [-0.3, 0.2]])
    outer = np.array([[0.5, 0.5], [0.0, 0.75], [-0.8, 0.1]])
    mid = np.array([[0.6, 0.0], [0.0, -0.62]])
    assert zeta.evaluate(inner) == pytest.approx(np.zeros(3), abs=1e-80)
    assert zeta.evaluate(outer) == pytest.approx(np.ones(3), abs=1e-80)
    vals = zeta.evaluate(mid)
    assert np.all((vals > 0.0) & (vals < 1.0))
    assert zeta.support.inner == pytest.approx(0.5)


def test_counterexample_polar_form_and_norm(disk):
    k = 4
    f = build_counterexample(k)
    r = np.hypot(PTS[:, 0], PTS[:, 1])
    th = np.arctan2(PTS[:, 1], PTS[:, 0])
    assert f.evaluate(PTS) == pytest.approx(r * np.cos((k + 1) * th), abs=1e-14)
    assert norm(f, disk) == pytest.approx(math.sqrt(math.pi) / 2.0, abs=1e-12)
    with pytest.raises(UsageError):
        build_counterexample(0)


def test_counterexample_refuses_derivatives_at_origin():
    # the exact polar rule works arbitrarily close to the flagged origin ...
    f = build_counterexample(2)
    d = apply_partial(f, (1, 0))
    assert np.isfinite(d.evaluate(np.array([[0.01, 0.0]])))[0]
    # ... but not at it, where the field is not differentiable
    with pytest.raises(DomainError):
        d.evaluate(np.array([[0.0, 0.0]]))
    # cut-off fields vanish identically near 0, so their derivatives are 0
    zeta = build_bump_cutoff()
    g = apply_partial(zeta * harmonic_monomial(2), (0, 1))
    assert g.evaluate(np.array([[0.0, 0.0]])) == pytest.approx([0.0], abs=1e-300)


def test_rotation_acts_exactly_on_modes():
    # T(R(r) cos(p t)) = -p R(r) sin(p t)
    T = rotation_field(1, 2, 2)
    for m in (1, 4):
        f = harmonic_monomial(m)
        g = apply_vector_field(f, T)
        r = np.hypot(PTS[:, 0], PTS[:, 1])
        th = np.arctan2(PTS[:, 1], PTS[:, 0])
        assert g.evaluate(PTS) == pytest.approx(-m * r ** m * np.sin(m * th),
                                                abs=1e-13)


def test_products_with_cutoff_keep_mode_structure():
    zeta = build_bump_cutoff()
    f = zeta * harmonic_monomial(3)
    assert mode_terms(f) is not None
    x = np.array([[0.61, 0.05], [0.3, 0.55], [-0.45, -0.52]])
    assert f.evaluate(x) == pytest.approx(
        zeta.evaluate(x) * harmonic_monomial(3).evaluate(x), abs=1e-15)
    # distributing over a sum of modes keeps every term exact
    g = zeta * (harmonic_monomial(2) + harmonic_monomial(3, "imag"))
    terms = mode_terms(g)
    assert terms is not None and len(terms) >= 2


def test_sum_and_scaling_evaluate_pointwise():
    f = 2.0 * harmonic_monomial(2) - harmonic_monomial(1)
    z = _complex(PTS)
    assert f.evaluate(PTS) == pytest.approx(2 * (z ** 2).real - z.real, abs=1e-14)


def test_apply_tuple_composes_rotations():
    f = harmonic_monomial(3)
    g = apply_tuple(f, (1, 1))            # T^2 on the disk
    r = np.hypot(PTS[:, 0], PTS[:, 1])
    th = np.arctan2(PTS[:, 1], PTS[:, 0])
    assert g.evaluate(PTS) == pytest.approx(-9.0 * r ** 3 * np.cos(3 * th),
                                            abs=1e-12)
    assert apply_tuple(f, ()) is f


def test_generic_fd_path_approximates_derivatives():
    f = ScalarField(2, lambda pts: np.sin(pts[:, 0]) * np.exp(pts[:, 1]),
                    name="sin*exp")
    x = np.array([[0.2, -0.3], [0.4, 0.1]])
    d1 = apply_partial(f, (1, 0)).evaluate(x)
    assert d1 == pytest.approx(np.cos(x[:, 0]) * np.exp(x[:, 1]), rel=1e-8)
    lap = laplacian(f).evaluate(x)
    # sin(x) e^y has zero Laplacian exactly
    assert lap == pytest.approx(np.zeros(2), abs=1e-7)


def test_derivative_order_cap():
    f = monomial_field((2, 2))
    with pytest.raises(UsageError):
        apply_partial(f, (3, 2))
