"""Unit-ball geometry: defining function, volumes, and tangential fields.

The domain is the open unit ball in ``n`` real dimensions.  Its boundary is
the level set of the defining function ``|x|^2 - 1``.  Two families of
polynomial-coefficient vector fields matter here: the radial field
``N = sum_j x_j d/dx_j`` (transversal to the boundary) and the rotation
fields ``T(i,j) = x_i d/dx_j - x_j d/dx_i`` (tangential), which together
span the tangent space of every sphere centred at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import UsageError

__all__ = [
    "BallDomain",
    "VectorFieldSpec",
    "TangentialSpanningSet",
    "defining_function",
    "ball_volume",
    "radial_field",
    "rotation_field",
    "spanning_set_for_ball",
]


def _as_points(x, dim: int) -> np.ndarray:
    """Coerce a single point or an (N, dim) batch to a 2-d float array."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise UsageError(
            f"expected points of dimension {dim}, got array of shape {np.asarray(x).shape}"
        )
    return pts


def defining_function(x, n: int | None = None):
    """Boundary defining function ``r(x) = |x|^2 - 1``.

    Negative inside the ball, zero on the sphere, positive outside.  Accepts
    a single point or an (N, n) batch; returns a scalar or an (N,) array.
    """
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if n is not None and pts.shape[1] != n:
        raise UsageError(f"point dimension {pts.shape[1]} does not match n={n}")
    vals = np.einsum("ij,ij->i", pts, pts) - 1.0
    return float(vals[0]) if single else vals


def ball_volume(n: int) -> float:
    """Volume of the unit ball: pi^(n/2) / Gamma(n/2 + 1)."""
    if n < 2:
        raise UsageError(f"dimension must be >= 2, got {n}")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class BallDomain:
    """The open unit ball in ``dimension`` real variables."""

    dimension: int

    def __post_init__(self):
        if self.dimension < 2:
            raise UsageError("ball domain needs dimension >= 2")

    @property
    def volume(self) -> float:
        return ball_volume(self.dimension)

    def contains(self, x, margin: float = 0.0) -> np.ndarray:
        pts = _as_points(x, self.dimension)
        return np.einsum("ij,ij->i", pts, pts) < (1.0 - margin) ** 2


@dataclass(frozen=True)
class VectorFieldSpec:
    """First-order operator ``sum_j c_j(x) d/dx_j`` with polynomial-coefficient
    built-ins.

    ``kind`` is one of ``"radial"`` (c_j = x_j), ``"rotation"`` (the pair
    ``(i, j)`` gives c_j = x_i and c_i = -x_j, all other coefficients zero;
    indices are 1-based), or ``"generic"`` (coefficients supplied as a
    callable mapping an (N, n) batch to an (N, n) coefficient array).
    """

    kind: str
    dimension: int
    pair: tuple[int, int] | None = None
    coefficient_fn: object | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("radial", "rotation", "generic"):
            raise UsageError(f"unknown vector field kind {self.kind!r}")
        if self.kind == "rotation":
            if self.pair is None:
                raise UsageError("rotation field needs an index pair (i, j)")
            i, j = self.pair
            if not (1 <= i < j <= self.dimension):
                raise UsageError(
                    f"rotation indices must satisfy 1 <= i < j <= {self.dimension}, got {self.pair}"
                )
        if self.kind == "generic" and self.coefficient_fn is None:
            raise UsageError("generic field needs a coefficient callable")

    @property
    def is_tangential(self) -> bool:
        return self.kind == "rotation"

    def coefficients(self, x) -> np.ndarray:
        """Coefficient vectors at each point: an (N, n) array."""
        pts = _as_points(x, self.dimension)
        if self.kind == "radial":
            return pts.copy()
        if self.kind == "rotation":
            i, j = self.pair  # 1-based
            out = np.zeros_like(pts)
            out[:, j - 1] = pts[:, i - 1]
            out[:, i - 1] = -pts[:, j - 1]
            return out
        out = np.asarray(self.coefficient_fn(pts), dtype=float)
        if out.shape != pts.shape:
            raise UsageError(
                f"generic coefficients returned shape {out.shape}, expected {pts.shape}"
            )
        return out

    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "radial":
            return "N"
        if self.kind == "rotation":
            return f"T{self.pair}"
        return "V"


def radial_field(n: int) -> VectorFieldSpec:
    """The radial field ``N = sum_j x_j d/dx_j``."""
    return VectorFieldSpec(kind="radial", dimension=n, name="N")


def rotation_field(i: int, j: int, n: int) -> VectorFieldSpec:
    """Rotation field ``T(i,j) = x_i d/dx_j - x_j d/dx_i`` (1-based indices)."""
    return VectorFieldSpec(kind="rotation", dimension=n, pair=(i, j))


@dataclass(frozen=True)
class TangentialSpanningSet:
    """The lexicographically ordered rotation fields spanning sphere tangents.

    Contains m = n(n-1)/2 fields; together with the radial field they span
    R^n at every point off the coordinate origin.
    """

    dimension: int
    fields: tuple[VectorFieldSpec, ...]

    def __len__(self) -> int:
        return len(self.fields)

    def __getitem__(self, index: int) -> VectorFieldSpec:
        """1-based access, matching tangential tuple indices."""
        if not (1 <= index <= len(self.fields)):
            raise UsageError(
                f"tangential index {index} outside 1..{len(self.fields)}"
            )
        return self.fields[index - 1]


def spanning_set_for_ball(n: int) -> TangentialSpanningSet:
    """All rotation fields T(i,j), i < j, in lexicographic order."""
    if n not in (2, 3):
        raise UsageError(f"tangential spanning sets are built for n in {{2, 3}}, got {n}")
    fields = tuple(
        rotation_field(i, j, n) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    )
    return TangentialSpanningSet(dimension=n, fields=fields)
