"""Product quadrature on the disk and the 3-ball, with compensated sums.

Rules are Gauss–Legendre in the radius (weighted by the Jacobian r or r²)
crossed with uniform angles — exact for the trigonometric/polynomial degrees
used throughout and byte-deterministic: nodes depend only on the requested
sizes, and every integral is accumulated with :func:`math.fsum`, so results
are independent of evaluation order and chunking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import NumericError, UsageError
from .fields import ScalarField, apply_tuple
from .geometry import TangentialSpanningSet, spanning_set_for_ball

__all__ = [
    "QuadratureRule",
    "disk_rule",
    "ball3_rule",
    "inner_product",
    "norm",
    "lebesgue_norm",
    "NormReport",
    "sobolev_norm",
    "tangential_sobolev_norm",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights for integration over a ball (identity-hashed)."""

    dimension: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    resolution: tuple = ()
    name: str = "rule"

    def __post_init__(self):
        if self.points.ndim != 2 or self.points.shape[1] != self.dimension:
            raise UsageError("points must have shape (N, dimension)")
        if self.weights.shape != (self.points.shape[0],):
            raise UsageError("weights must have shape (N,)")
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def total_weight(self) -> float:
        return math.fsum(self.weights.tolist())

    def scaled(self, factor: float) -> "QuadratureRule":
        """The induced rule on the ball shrunk by ``factor`` (0 < factor <= 1)."""
        if not 0.0 < factor <= 1.0:
            raise UsageError(f"scale factor must be in (0, 1], got {factor}")
        return QuadratureRule(
            self.dimension,
            self.points * factor,
            self.weights * factor**self.dimension,
            resolution=self.resolution,
            name=f"{self.name}*{factor}",
        )

    def __repr__(self):
        return f"<QuadratureRule {self.name!r} dim={self.dimension} size={self.size}>"


def _gauss_legendre_01(n: int):
    """Gauss–Legendre nodes/weights mapped from [-1, 1] to (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=16)
def disk_rule(n_radial: int = 160, n_angular: int = 256) -> QuadratureRule:
    """Tensor rule on the unit disk: GL radii × uniform angles.

    Radial weights carry the Jacobian r; angular nodes θ_j = 2πj/n are exact
    for trigonometric polynomials of degree < n.  Total weight is π.
    """
    if n_radial < 2 or n_angular < 4:
        raise UsageError("need at least 2 radial and 4 angular nodes")
    r, wr = _gauss_legendre_01(n_radial)
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    w_theta = 2.0 * np.pi / n_angular
    R, TH = np.meshgrid(r, theta, indexing="ij")
    pts = np.stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()], axis=1)
    wts = (np.repeat(wr * r, n_angular) * w_theta)
    return QuadratureRule(
        2,
        pts,
        wts,
        resolution=(n_radial, n_angular),
        name=f"disk({n_radial}x{n_angular})",
    )


@lru_cache(maxsize=16)
def ball3_rule(n_radial: int = 96, n_polar: int = 64, n_azimuth: int = 64) -> QuadratureRule:
    """Tensor rule on the unit 3-ball: GL radii × GL in cos(polar) × uniform azimuth.

    Radial weights carry r²; the polar variable is integrated as t = cos φ on
    [-1, 1].  Total weight is 4π/3.
    """
    if n_radial < 2 or n_polar < 2 or n_azimuth < 4:
        raise UsageError("need at least 2 radial, 2 polar, 4 azimuthal nodes")
    r, wr = _gauss_legendre_01(n_radial)
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    psi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    w_psi = 2.0 * np.pi / n_azimuth
    s = np.sqrt(1.0 - t * t)
    R, T, PSI = np.meshgrid(r, t, psi, indexing="ij")
    S = np.sqrt(1.0 - T * T)
    pts = np.stack(
        [
            (R * S * np.cos(PSI)).ravel(),
            (R * S * np.sin(PSI)).ravel(),
            (R * T).ravel(),
        ],
        axis=1,
    )
    wts = (
        np.repeat(wr * r * r, n_polar * n_azimuth)
        * np.tile(np.repeat(wt, n_azimuth), n_radial)
        * w_psi
    )
    return QuadratureRule(
        3,
        pts,
        wts,
        resolution=(n_radial, n_polar, n_azimuth),
        name=f"ball3({n_radial}x{n_polar}x{n_azimuth})",
    )


def _values_on(obj, rule: QuadratureRule) -> np.ndarray:
    if isinstance(obj, ScalarField):
        if obj.dimension != rule.dimension:
            raise UsageError("field and rule dimensions differ")
        return np.asarray(obj.evaluate(rule.points), dtype=float)
    arr = np.asarray(obj, dtype=float)
    if arr.shape != (rule.size,):
        raise UsageError(
            f"value array has shape {arr.shape}, rule has {rule.size} nodes"
        )
    return arr


def _check_finite(vals: np.ndarray, rule: QuadratureRule, what: str):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NumericError(
            f"non-finite {what} ({vals[i]}) at quadrature node {i}, "
            f"point {rule.points[i]}"
        )


def inner_product(f, g, rule: QuadratureRule, weight=None) -> float:
    """∫ f·g (·weight) over the rule's ball, compensated summation.

    ``f``/``g`` may be fields or precomputed value arrays on the rule's
    nodes; ``weight`` may be a field, a value array, or None.
    """
    fv = _values_on(f, rule)
    gv = fv if g is None or g is f else _values_on(g, rule)
    integrand = fv * gv * rule.weights
    if weight is not None:
        integrand = integrand * _values_on(weight, rule)
    _check_finite(integrand, rule, "integrand")
    return math.fsum(integrand.tolist())


def norm(f, rule: QuadratureRule, weight=None) -> float:
    """L² norm (optionally weighted) of a field or value array."""
    return math.sqrt(max(inner_product(f, f, rule, weight=weight), 0.0))


def lebesgue_norm(f, rule: QuadratureRule, p: float = 2.0) -> float:
    """L^p norm for p in {1, 2, inf} (inf = max over nodes)."""
    fv = _values_on(f, rule)
    _check_finite(fv, rule, "field values")
    if p == 1:
        return math.fsum((np.abs(fv) * rule.weights).tolist())
    if p == 2:
        return norm(fv, rule)
    if p == math.inf:
        return float(np.max(np.abs(fv)))
    raise UsageError(f"p must be 1, 2 or inf, got {p}")


@dataclass(frozen=True)
class NormReport:
    """A norm value together with its per-term breakdown (squared pieces)."""

    kind: str
    value: float
    breakdown: dict

    def __float__(self):
        return self.value


def sobolev_norm(f: ScalarField, rule: QuadratureRule, order: int = 1) -> NormReport:
    """Sobolev norm sqrt(Σ_{|α| ≤ order} ‖D^α f‖²) with per-index breakdown."""
    if order < 0 or order > 4:
        raise UsageError(f"order must be in 0..4, got {order}")
    breakdown = {}
    n = rule.dimension
    for total in range(order + 1):
        for alpha in _compositions(total, n):
            vals = f.derivative_values(alpha, rule.points)
            breakdown[alpha] = inner_product(vals, None, rule)
    value = math.sqrt(max(math.fsum(breakdown.values()), 0.0))
    kind = "l2" if order == 0 else f"sobolev({order})"
    return NormReport(kind, value, breakdown)


def tangential_sobolev_norm(
    f: ScalarField,
    rule: QuadratureRule,
    order: int = 1,
    spanning_set: TangentialSpanningSet | None = None,
) -> NormReport:
    """sqrt(Σ_{ℓ ≤ order} Σ_{J ∈ {1..m}^ℓ} ‖T_J f‖²) over rotation tuples."""
    if order < 0:
        raise UsageError(f"order must be >= 0, got {order}")
    sset = spanning_set if spanning_set is not None else spanning_set_for_ball(rule.dimension)
    m = len(sset.fields)
    breakdown = {}
    for length in range(order + 1):
        for J in _tuples(m, length):
            g = apply_tuple(f, J, sset)
            breakdown[J] = inner_product(g.evaluate(rule.points), None, rule)
    value = math.sqrt(max(math.fsum(breakdown.values()), 0.0))
    kind = "l2" if order == 0 else f"tangential({order})"
    return NormReport(kind, value, breakdown)


def weighted_norm(f, k: int, rule: QuadratureRule) -> NormReport:
    """L² norm of (1 - |x|²)^k · f, a lower-bound proxy for negative-order
    norms; the dual norm itself is never computed here."""
    if k < 0:
        raise UsageError(f"weight power must be >= 0, got {k}")
    fv = _values_on(f, rule)
    _check_finite(fv, rule, "field values")
    r2 = np.sum(rule.points * rule.points, axis=1)
    wv = fv * (1.0 - r2) ** k
    squared = inner_product(wv, None, rule)
    kind = "l2" if k == 0 else f"weighted({k})"
    return NormReport(kind, math.sqrt(max(squared, 0.0)), {k: squared})


def _compositions(total: int, n: int):
    """All multi-indices in n variables with |alpha| == total (lex order)."""
    if n == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for rest in _compositions(total - head, n - 1):
            yield (head,) + rest


def _tuples(m: int, length: int):
    """All index tuples from {1..m}^length (lex order)."""
    if length == 0:
        yield ()
        return
    for head in range(1, m + 1):
        for rest in _tuples(m, length - 1):
            yield (head,) + rest
