"""Reproducing-kernel projection onto harmonic L² functions on the ball.

Three independent routes compute the projection:

* ``project_kernel`` / ``project_kernel_quadrature`` — integrate the
  closed-form kernel against the input (any dimension; evaluation
  restricted to a safe radius where the quadrature resolves the kernel's
  near-boundary concentration);
* ``project_basis_disk`` — orthonormal expansion over the circular
  harmonics 1/√π, √(2(m+1)/π)·Re zᵐ, √(2(m+1)/π)·Im zᵐ (disk only);
* ``project_via_analytic`` — complex coefficients bₘ of the holomorphic
  part, reassembled as 2·Re(Σ bₘ zᵐ) − b₀ (disk only).

The routes share nothing but quadrature nodes, so their agreement is a
meaningful cross-check; tests compare them rather than trusting any one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, RefusalError, UsageError
from .fields import ScalarField
from .geometry import ball_volume
from .profiles import UNLIMITED
from .quadrature import QuadratureRule, disk_rule, inner_product, norm

__all__ = [
    "KernelEval",
    "harmonic_kernel",
    "kernel_matrix",
    "analytic_kernel_disk",
    "kernel_decomposition_residual",
    "kernel_section",
    "KernelQuadratureProjection",
    "project_kernel",
    "project_kernel_quadrature",
    "BasisExpansion",
    "basis_labels",
    "basis_normalizer",
    "project_basis_disk",
    "project_via_analytic",
    "commutator_residual",
    "self_adjointness_residual",
    "idempotence_residual",
    "DEFAULT_MAX_DEGREE",
    "DEFAULT_EVALUATION_RADIUS",
]

#: highest circular-harmonic degree carried by the basis routes
DEFAULT_MAX_DEGREE = 64

#: kernel-quadrature evaluations are refused outside this radius
DEFAULT_EVALUATION_RADIUS = 0.7


@dataclass(frozen=True)
class KernelEval:
    """Kernel evaluation context: dimension plus the trusted projection radius.

    ``evaluation_radius`` is the largest |x| at which kernel-quadrature
    projections are considered reliable with the default product rules.
    """

    dimension: int
    evaluation_radius: float = DEFAULT_EVALUATION_RADIUS

    def __post_init__(self):
        if self.dimension < 2:
            raise UsageError(f"dimension must be >= 2, got {self.dimension}")
        if not 0.0 < self.evaluation_radius < 1.0:
            raise UsageError(
                f"evaluation radius must lie in (0, 1), got {self.evaluation_radius}"
            )


def _pair_arrays(x, y):
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    single = xa.ndim == 1 and ya.ndim == 1
    if xa.ndim == 1:
        xa = xa[None, :]
    if ya.ndim == 1:
        ya = ya[None, :]
    if xa.shape[1] != ya.shape[1]:
        raise UsageError("x and y must have the same dimension")
    if xa.shape[0] != ya.shape[0]:
        if xa.shape[0] == 1:
            xa = np.broadcast_to(xa, ya.shape)
        elif ya.shape[0] == 1:
            ya = np.broadcast_to(ya, xa.shape)
        else:
            raise UsageError("x and y batches must match (or be single points)")
    return xa, ya, single


def _require_interior(xa: np.ndarray, label: str) -> None:
    worst = float(np.max(np.sum(xa * xa, axis=1))) if xa.size else 0.0
    if worst >= 1.0:
        raise DomainError(
            f"{label} must lie strictly inside the unit ball; "
            f"got |{label}| = {math.sqrt(worst):.6f}"
        )


def _kernel_core(a, x2, y2, n: int):
    """Kernel value from ⟨x,y⟩, |x|², |y|² (broadcastable arrays)."""
    t2 = x2 * y2
    A = 1.0 - 2.0 * a + t2
    vol = ball_volume(n)
    return (n * (1.0 - t2) ** 2 / A - 4.0 * t2) / (n * vol * A ** (n / 2.0))


def harmonic_kernel(x, y, n: int | None = None):
    """Kernel K(x, y) reproducing harmonic L² functions on the unit ball.

    Accepts single points or matched batches; ``n`` defaults to the point
    dimension.  K(0, y) = 1/|B|, and K is symmetric and harmonic in each
    argument.  Both arguments must be interior points.
    """
    xa, ya, single = _pair_arrays(x, y)
    dim = xa.shape[1] if n is None else int(n)
    if dim != xa.shape[1]:
        raise UsageError(f"points have dimension {xa.shape[1]}, n={dim} given")
    _require_interior(xa, "x")
    _require_interior(ya, "y")
    a = np.sum(xa * ya, axis=1)
    out = _kernel_core(a, np.sum(xa * xa, axis=1), np.sum(ya * ya, axis=1), dim)
    return float(out[0]) if single else out


def kernel_matrix(xs, ys, n: int | None = None) -> np.ndarray:
    """Kernel evaluated on a grid: entry (i, j) is K(xs[i], ys[j])."""
    xa = np.asarray(xs, dtype=float)
    ya = np.asarray(ys, dtype=float)
    if xa.ndim != 2 or ya.ndim != 2 or xa.shape[1] != ya.shape[1]:
        raise UsageError("expected (N, d) and (M, d) point arrays")
    _require_interior(xa, "x")
    _require_interior(ya, "y")
    dim = xa.shape[1] if n is None else int(n)
    a = xa @ ya.T
    x2 = np.sum(xa * xa, axis=1)[:, None]
    y2 = np.sum(ya * ya, axis=1)[None, :]
    return _kernel_core(a, x2, y2, dim)


def analytic_kernel_disk(x, y):
    """Analytic Bergman kernel on the disk, (1/π)(1 − z·w̄)⁻², as (re, im).

    The harmonic kernel is 2·re − 1/π; see
    :func:`kernel_decomposition_residual`.
    """
    xa, ya, single = _pair_arrays(x, y)
    if xa.shape[1] != 2:
        raise UsageError("analytic kernel is a disk (dimension 2) object")
    _require_interior(xa, "z")
    _require_interior(ya, "w")
    z = xa[:, 0] + 1j * xa[:, 1]
    w = ya[:, 0] + 1j * ya[:, 1]
    k = 1.0 / (math.pi * (1.0 - z * np.conj(w)) ** 2)
    if single:
        return float(k.real[0]), float(k.imag[0])
    return k.real, k.imag


def kernel_decomposition_residual(sample_pairs, relative: bool = False) -> float:
    """Worst-case gap between K(x,y) and 2·Re K_an(x,y) − 1/π on the disk.

    ``sample_pairs`` is a sequence of (x, y) point pairs.  The two kernels
    are algebraically equal, so the maximum absolute difference (or the
    difference relative to |K| when ``relative`` is set, appropriate near
    the boundary where both kernels grow) measures floating-point error
    only.
    """
    pairs = np.asarray(sample_pairs, dtype=float)
    if pairs.ndim == 2:
        pairs = pairs[None, :, :]
    if pairs.ndim != 3 or pairs.shape[1] != 2 or pairs.shape[2] != 2:
        raise UsageError("expected a sequence of ((x1,x2), (y1,y2)) pairs")
    xs, ys = pairs[:, 0, :], pairs[:, 1, :]
    direct = harmonic_kernel(xs, ys)
    re, _ = analytic_kernel_disk(xs, ys)
    gap = np.abs(direct - (2.0 * re - 1.0 / math.pi))
    if relative:
        gap = gap / np.abs(direct)
    return float(np.max(gap))


def kernel_section(y, n: int | None = None) -> ScalarField:
    """The field x ↦ K(x, y) for a fixed source point y (harmonic in x)."""
    ya = np.asarray(y, dtype=float)
    if ya.ndim != 1:
        raise UsageError("y must be a single point")
    dim = ya.shape[0] if n is None else int(n)
    return ScalarField(
        dim,
        lambda pts: harmonic_kernel(pts, ya[None, :].repeat(pts.shape[0], axis=0)),
        name=f"K(·,{np.round(ya, 3)})",
    )


# -- route A: kernel quadrature ------------------------------------------------

class KernelQuadratureProjection:
    """Projection of one field computed by integrating the kernel.

    Evaluation is refused outside ``evaluation_radius``: the kernel's mass
    concentrates near the boundary diagonal and the fixed product rule can
    no longer resolve it, so values there would be silently wrong rather
    than slightly degraded.
    """

    def __init__(self, source, rule: QuadratureRule,
                 evaluation_radius: float = DEFAULT_EVALUATION_RADIUS):
        self.rule = rule
        self.evaluation_radius = float(evaluation_radius)
        if isinstance(source, ScalarField):
            self.name = f"P[{source.name}]"
            vals = source.evaluate(rule.points)
        else:
            self.name = "P[values]"
            vals = np.asarray(source, dtype=float)
            if vals.shape != (rule.size,):
                raise UsageError("value array does not match rule nodes")
        self._weighted = vals * rule.weights

    def evaluate(self, pts) -> np.ndarray:
        arr = np.asarray(pts, dtype=float)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        radii = np.sqrt(np.sum(arr * arr, axis=1))
        worst = float(np.max(radii))
        if worst > self.evaluation_radius:
            raise RefusalError(
                f"kernel-quadrature evaluation requested at |x| = {worst:.4f}, "
                f"beyond the trusted radius {self.evaluation_radius}; the fixed "
                f"rule cannot resolve the kernel there — use a basis route or "
                f"enlarge the rule and radius explicitly"
            )
        K = kernel_matrix(arr, self.rule.points)
        out = np.array([math.fsum((row * self._weighted).tolist()) for row in K])
        return out[0] if single else out

    __call__ = evaluate


def project_kernel_quadrature(
    source,
    rule: QuadratureRule | None = None,
    evaluation_radius: float = DEFAULT_EVALUATION_RADIUS,
) -> KernelQuadratureProjection:
    """Route A: projection by direct kernel integration (any dimension)."""
    if rule is None:
        rule = disk_rule()
    return KernelQuadratureProjection(source, rule, evaluation_radius)


def project_kernel(
    source,
    x,
    rule: QuadratureRule | None = None,
    evaluation_radius: float = DEFAULT_EVALUATION_RADIUS,
) -> float:
    """Route A at a single point: ∫ K(x, y)·f(y) dy by quadrature.

    Refuses points beyond ``evaluation_radius``; for many evaluations of
    the same field, build :func:`project_kernel_quadrature` once instead.
    """
    xa = np.asarray(x, dtype=float)
    if xa.ndim != 1:
        raise UsageError("x must be a single point")
    return float(project_kernel_quadrature(source, rule, evaluation_radius)(xa))


# -- routes B and C: circular-harmonic expansions --------------------------------

def basis_labels(max_degree: int):
    """Labels (m, part) for the orthonormal disk basis, constant first."""
    labels = [(0, "real")]
    for m in range(1, max_degree + 1):
        labels.append((m, "real"))
        labels.append((m, "imag"))
    return labels


def basis_normalizer(m: int) -> float:
    """L² normalizer: ‖normalizer · Re zᵐ‖ = 1 (and the same for Im, m ≥ 1)."""
    if m == 0:
        return 1.0 / math.sqrt(math.pi)
    return math.sqrt(2.0 * (m + 1) / math.pi)


@lru_cache(maxsize=8)
def _node_powers(rule: QuadratureRule, max_degree: int) -> np.ndarray:
    """zᵐ at the rule's nodes for m = 0..max_degree, shape (max_degree+1, N)."""
    if rule.dimension != 2:
        raise UsageError("basis routes are disk-only")
    z = rule.points[:, 0] + 1j * rule.points[:, 1]
    out = np.empty((max_degree + 1, rule.size), dtype=complex)
    out[0] = 1.0
    for m in range(1, max_degree + 1):
        out[m] = out[m - 1] * z
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BasisExpansion:
    """Coefficients of a projection over the orthonormal circular harmonics."""

    coefficients: dict
    max_degree: int
    route: str

    def coefficient(self, m: int, part: str = "real") -> float:
        return self.coefficients.get((m, part), 0.0)

    def norm(self) -> float:
        """L² norm of the projected field (Parseval)."""
        return math.sqrt(math.fsum(c * c for c in self.coefficients.values()))

    def off_mode_norm(self, keep) -> float:
        """ℓ² mass outside the ``keep`` labels (set of (m, part) pairs)."""
        keep = set(keep)
        return math.sqrt(
            math.fsum(
                c * c for lbl, c in self.coefficients.items() if lbl not in keep
            )
        )

    def to_field(self) -> ScalarField:
        """Reconstruction as a field with exact derivatives of every order."""
        const = self.coefficient(0, "real") * basis_normalizer(0)
        gamma = np.zeros(self.max_degree + 1, dtype=complex)
        for m in range(1, self.max_degree + 1):
            c = basis_normalizer(m)
            gamma[m] = complex(
                self.coefficient(m, "real") * c, -self.coefficient(m, "imag") * c
            )
        return _reconstruction_field(const, gamma, name=f"recon[{self.route}]")


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Σ coeffs[m]·zᵐ by Horner's scheme on complex arrays."""
    out = np.full(z.shape, coeffs[-1], dtype=complex)
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


def _reconstruction_field(const: float, gamma: np.ndarray, name: str) -> ScalarField:
    """const + Re(Σ_{m≥1} γₘ zᵐ) with exact holomorphic derivatives.

    Note Re(γ zᵐ) = Re(γ)·Re(zᵐ) − Im(γ)·Im(zᵐ); the imaginary part of γₘ
    therefore carries the *negative* of the sine-mode amplitude, which is
    accounted for by the caller.
    """
    M = gamma.shape[0] - 1

    def evaluator(pts):
        z = pts[:, 0] + 1j * pts[:, 1]
        return const + np.real(_horner(gamma, z))

    def rule(alpha, pts):
        a, b = alpha
        k = a + b
        if k == 0:
            return evaluator(pts)
        if k > M:
            return np.zeros(pts.shape[0])
        z = pts[:, 0] + 1j * pts[:, 1]
        shifted = np.array(
            [gamma[m + k] * (1j**b) * math.perm(m + k, k) for m in range(M - k + 1)],
            dtype=complex,
        )
        return np.real(_horner(shifted, z))

    return ScalarField(2, evaluator, rule=rule, exact_order=UNLIMITED, name=name)


def project_basis_disk(
    source,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rule: QuadratureRule | None = None,
) -> BasisExpansion:
    """Route B: orthonormal expansion ⟨f, e⟩ e over the circular harmonics."""
    if max_degree < 1:
        raise UsageError(f"degree cap must be >= 1, got {max_degree}")
    if rule is None:
        rule = disk_rule()
    powers = _node_powers(rule, max_degree)
    fvals = source.evaluate(rule.points) if isinstance(source, ScalarField) \
        else np.asarray(source, dtype=float)
    coeffs = {}
    for m, part in basis_labels(max_degree):
        row = powers[m].real if part == "real" else powers[m].imag
        coeffs[(m, part)] = basis_normalizer(m) * inner_product(fvals, row, rule)
    return BasisExpansion(coeffs, max_degree, route="basis")


def project_via_analytic(
    source,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rule: QuadratureRule | None = None,
) -> BasisExpansion:
    """Route C: complex coefficients bₘ = ((m+1)/π)·⟨f, wᵐ⟩, then 2Re − b₀.

    Valid for real-valued disk fields.  Returns the same orthonormal
    coefficient container as route B so the two can be compared label by
    label; the arithmetic path (complex inner products and the
    2·Re(·) − b₀ reassembly) is entirely separate.
    """
    if max_degree < 1:
        raise UsageError(f"degree cap must be >= 1, got {max_degree}")
    if rule is None:
        rule = disk_rule()
    powers = _node_powers(rule, max_degree)
    fvals = source.evaluate(rule.points) if isinstance(source, ScalarField) \
        else np.asarray(source, dtype=float)
    coeffs = {}
    for m in range(max_degree + 1):
        raw = complex(
            inner_product(fvals, powers[m].real, rule),
            -inner_product(fvals, powers[m].imag, rule),
        )
        b = (m + 1) / math.pi * raw
        if m == 0:
            # 2·Re(Bf) − b₀ leaves b₀ itself on the constant; ⟨f,e₀⟩ = √π·b₀
            coeffs[(0, "real")] = math.sqrt(math.pi) * b.real
        else:
            c = basis_normalizer(m)
            coeffs[(m, "real")] = 2.0 * b.real / c
            coeffs[(m, "imag")] = -2.0 * b.imag / c
    return BasisExpansion(coeffs, max_degree, route="analytic")


# -- projection operator properties ---------------------------------------------

def commutator_residual(
    source: ScalarField,
    tangential=None,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rule: QuadratureRule | None = None,
    shrink: float = 0.9,
) -> float:
    """‖T(Pf) − P(Tf)‖ on a slightly shrunk ball for a rotation field T.

    ``tangential`` defaults to the disk rotation x₁∂₂ − x₂∂₁; any other
    rotation :class:`~bergman_lab.geometry.VectorFieldSpec` on the disk is
    accepted, non-rotation fields are not (the identity being checked is
    specific to rotations).
    """
    from .fields import apply_vector_field
    from .geometry import VectorFieldSpec, rotation_field

    if rule is None:
        rule = disk_rule()
    T = rotation_field(1, 2, 2) if tangential is None else tangential
    if not isinstance(T, VectorFieldSpec) or T.kind != "rotation":
        raise UsageError("the commutator identity holds for rotation fields only")
    if T.dimension != rule.dimension:
        raise UsageError(
            f"rotation field has dimension {T.dimension}, rule has {rule.dimension}"
        )
    proj_then_rotate = apply_vector_field(
        project_basis_disk(source, max_degree, rule).to_field(), T
    )
    rotate_then_project = project_basis_disk(
        apply_vector_field(source, T), max_degree, rule
    ).to_field()
    inner_rule = rule.scaled(shrink)
    diff = proj_then_rotate.evaluate(inner_rule.points) - rotate_then_project.evaluate(
        inner_rule.points
    )
    return norm(diff, inner_rule)


def self_adjointness_residual(
    f: ScalarField,
    g: ScalarField,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rule: QuadratureRule | None = None,
) -> float:
    """|⟨Pf, g⟩ − ⟨f, Pg⟩| over the disk."""
    if rule is None:
        rule = disk_rule()
    Pf = project_basis_disk(f, max_degree, rule).to_field()
    Pg = project_basis_disk(g, max_degree, rule).to_field()
    return abs(inner_product(Pf, g, rule) - inner_product(f, Pg, rule))


def idempotence_residual(
    f: ScalarField,
    max_degree: int = DEFAULT_MAX_DEGREE,
    rule: QuadratureRule | None = None,
) -> float:
    """‖P(Pf) − Pf‖ over the disk."""
    if rule is None:
        rule = disk_rule()
    Pf = project_basis_disk(f, max_degree, rule).to_field()
    PPf = project_basis_disk(Pf, max_degree, rule).to_field()
    diff = PPf.evaluate(rule.points) - Pf.evaluate(rule.points)
    return norm(diff, rule)
