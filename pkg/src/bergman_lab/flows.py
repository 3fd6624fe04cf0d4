"""Backward scaling flow, flow averages, and the antiderivative identities.

The transversal direction field on the ball is the radial field
``N = Σ x_j ∂_j``, whose flow is the exact scaling ``φ(t, x) = e^t x``.
Averaging a field over one unit of backward flow,

    𝔄[g](x) = ∫_{-1}^{0} g(φ(s, x)) ds,

inverts N in the sense of the fundamental theorem of calculus whenever g
vanishes before the flow runs out (support inside ``|x| > e^{-1}``), and
its iterates invert powers of N.  Combining 𝔄² with the elliptic split
``N² − |x|²Δ = −Σ (T^{i,j})² − (n−2)N`` turns those inversions into an
explicit decomposition of a cut-off harmonic function into tangential
derivatives — the constructive content this module exposes as
:func:`prop_decompose`, with :func:`ftc_residual`,
:func:`laplace_split_residual` and :func:`iterated_antiderivative_residual`
measuring each ingredient separately.

Mode fields carry their radial factor as a log-radius profile, so N, T,
|x|²Δ and every flow average act on them exactly; the only numerical error
left in the identity residuals is the Gauss quadrature in the flow
parameter.  Generic fields integrate along the flow node by node and
differentiate by stencils, which is slower and noisier but places no
structural demands on the input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, PreconditionError, UsageError
from .fields import (
    ModeField,
    ScalarField,
    Support,
    apply_tuple,
    apply_vector_field,
    harmonicity_residual,
    laplacian,
    mode_terms,
)
from .geometry import VectorFieldSpec, radial_field, spanning_set_for_ball
from .profiles import (
    DerivativeProfile,
    FlowAverageProfile,
    SumProfile,
    iterated_average,
)
from .quadrature import QuadratureRule, norm, weighted_norm

__all__ = [
    "UNIT_BACKWARD_RADIUS",
    "DEFAULT_RK4_STEP",
    "DEFAULT_S_NODES",
    "CollarSpec",
    "FlowMap",
    "flow_map_eval",
    "boundary_hit_time",
    "AOperator",
    "apply_A",
    "ftc_residual",
    "laplace_split_residual",
    "iterated_antiderivative_residual",
    "DecompositionResult",
    "prop_decompose",
    "weighted_bound_probe",
    "transversal_solve_residual",
]

#: radius contraction of unit-time backward flow: |φ(-1, x)| = e^{-1}|x|
UNIT_BACKWARD_RADIUS = math.exp(-1.0)

#: default RK4 step; h⁴ local error keeps the radial cross-check below 1e-12
DEFAULT_RK4_STEP = 1.0 / 512.0

#: default Gauss-Legendre node count in the flow parameter s ∈ (-1, 0)
DEFAULT_S_NODES = 64


@dataclass(frozen=True)
class CollarSpec:
    """Annular collar ``inner_radius < |x| < 1 + margin`` around the sphere.

    The margin is bookkeeping only — nothing is ever evaluated outside the
    closed ball.  The inner radius must exceed ``e^{-1}`` so that one unit
    of backward flow started anywhere in the collar leaves any admissible
    cutoff support (the standard bump vanishes for |x| ≤ 0.5 > e^{-1}).
    """

    inner_radius: float = 0.45
    margin: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.inner_radius < 1.0:
            raise UsageError(
                f"collar inner radius must lie in (0, 1), got {self.inner_radius}"
            )
        if self.inner_radius <= UNIT_BACKWARD_RADIUS:
            raise UsageError(
                "collar inner radius must exceed e^{-1} ≈ 0.3679 so unit-time "
                f"backward flow exits the collar supports; got {self.inner_radius}"
            )
        if self.margin < 0.0:
            raise UsageError(f"collar margin must be >= 0, got {self.margin}")

    def contains(self, x) -> np.ndarray:
        """Membership mask for a point or batch."""
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        r = np.sqrt(np.sum(pts * pts, axis=1))
        mask = (r > self.inner_radius) & (r < 1.0 + self.margin)
        return bool(mask[0]) if single else mask


def _rk4_advance(field_spec: VectorFieldSpec, t: float, pts: np.ndarray,
                 step: float) -> np.ndarray:
    """Fixed-step classical Runge-Kutta for dy/dt = c(y), from 0 to t."""
    if t == 0.0:
        return pts.copy()
    nsteps = max(1, math.ceil(abs(t) / step))
    h = t / nsteps
    y = pts.copy()
    for _ in range(nsteps):
        k1 = field_spec.coefficients(y)
        k2 = field_spec.coefficients(y + 0.5 * h * k1)
        k3 = field_spec.coefficients(y + 0.5 * h * k2)
        k4 = field_spec.coefficients(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


class FlowMap:
    """The flow of a transversal direction field, for times t ∈ [-1, 0].

    The radial field admits the closed form ``φ(t, x) = e^t x``, which is
    the default integrator; ``integrator="rk4"`` integrates the same ODE
    with fixed-step RK4 and exists both as a cross-check and as the only
    route for non-radial (generic) transversal fields.  Tangential fields
    are rejected: their flow never reaches the boundary, so none of the
    constructions here apply.
    """

    def __init__(self, field: VectorFieldSpec | None = None,
                 collar: CollarSpec | None = None,
                 integrator: str = "closed-form",
                 step: float = DEFAULT_RK4_STEP):
        if field is None:
            field = radial_field(2)
        if not isinstance(field, VectorFieldSpec):
            raise UsageError("flow map needs a VectorFieldSpec direction field")
        if field.is_tangential:
            raise UsageError(
                f"{field.label()} is tangential, not transversal: its flow "
                "preserves spheres and never meets the boundary"
            )
        if integrator not in ("closed-form", "rk4"):
            raise UsageError(
                f"integrator must be 'closed-form' or 'rk4', got {integrator!r}"
            )
        if integrator == "closed-form" and field.kind != "radial":
            raise UsageError(
                "closed-form flow is available for the radial field only; "
                "use integrator='rk4' for generic transversal fields"
            )
        if integrator == "rk4":
            if not 0.0 < step <= 1.0 / 64.0:
                raise UsageError(
                    f"RK4 step must lie in (0, 1/64], got {step}"
                )
        self.field = field
        self.collar = collar if collar is not None else CollarSpec()
        self.integrator = integrator
        self.step = float(step)

    def evaluate(self, t: float, x) -> np.ndarray:
        """φ(t, x) for t ∈ [-1, 0]; accepts a point or an (N, n) batch."""
        t = float(t)
        if not -1.0 <= t <= 0.0:
            raise UsageError(f"flow time must lie in [-1, 0], got {t}")
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[1] != self.field.dimension:
            raise UsageError(
                f"expected points of dimension {self.field.dimension}, "
                f"got shape {np.asarray(x).shape}"
            )
        if self.integrator == "closed-form":
            out = math.exp(t) * pts
        else:
            out = _rk4_advance(self.field, t, pts, self.step)
        return out[0] if single else out

    __call__ = evaluate

    def __repr__(self):
        return (
            f"<FlowMap {self.field.label()} integrator={self.integrator!r} "
            f"step={self.step}>"
        )


def flow_map_eval(t: float, x, field: VectorFieldSpec | None = None,
                  integrator: str = "closed-form",
                  step: float = DEFAULT_RK4_STEP) -> np.ndarray:
    """One-shot flow evaluation; see :class:`FlowMap` for the contract."""
    if field is None:
        arr = np.asarray(x, dtype=float)
        dim = arr.shape[-1]
        field = radial_field(int(dim))
    return FlowMap(field, integrator=integrator, step=step).evaluate(t, x)


def boundary_hit_time(x, method: str = "closed",
                      step: float = DEFAULT_RK4_STEP) -> float:
    """Forward flow time at which the trajectory through x meets the sphere.

    For the radial flow this is ``-log|x|``: positive inside the ball, zero
    on the sphere.  ``method="solve"`` recomputes it without the logarithm,
    by bracketing the radius crossing of the RK4 trajectory — an
    independent route used to cross-check the closed form.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise UsageError("boundary hit time takes a single point")
    r = float(np.sqrt(np.sum(arr * arr)))
    if r == 0.0:
        raise DomainError(
            "the origin is a fixed point of the radial flow: "
            "its boundary hit time is infinite"
        )
    if r > 1.0 + 1e-12:
        raise DomainError(f"point lies outside the closed ball: |x| = {r:.6f}")
    if method == "closed":
        return 0.0 if r >= 1.0 else -math.log(r)
    if method != "solve":
        raise UsageError(f"method must be 'closed' or 'solve', got {method!r}")
    if r >= 1.0:
        return 0.0
    fld = radial_field(arr.shape[0])

    def radius_defect(T: float) -> float:
        y = _rk4_advance(fld, T, arr[None, :], step)
        return float(np.sqrt(np.sum(y * y))) - 1.0

    upper = -math.log(r) + 0.5
    return float(brentq(radius_defect, 0.0, upper, xtol=1e-13, rtol=1e-15))


# -- the antiderivative operator ------------------------------------------------

@dataclass(frozen=True)
class AOperator:
    """A flow-average operator: composition length, weight, and s-quadrature.

    With no weight and ``length == 1`` this is exactly 𝔄.  ``length == j``
    composes j unit averages (𝔄^j).  A weight — the exponent ``mu`` for a
    factor s^mu, and/or a callable ``gamma(s, points)`` — produces the
    weighted variant ∫_{-1}^{0} s^mu γ(s,x) g(φ(s,x)) ds and is restricted
    to single-fold operators.  ``derivative_budget`` is bookkeeping: the
    number of input derivatives the operator's mapping-property bound is
    allowed to consume (see :func:`weighted_bound_probe`).
    """

    length: int = 1
    mu: int = 0
    derivative_budget: int = 0
    weight: object | None = dataclass_field(default=None, compare=False)
    s_nodes: int = DEFAULT_S_NODES

    def __post_init__(self):
        if self.length < 1:
            raise UsageError(f"composition length must be >= 1, got {self.length}")
        if self.mu < 0:
            raise UsageError(f"weight exponent must be >= 0, got {self.mu}")
        if self.derivative_budget < 0:
            raise UsageError(
                f"derivative budget must be >= 0, got {self.derivative_budget}"
            )
        if self.s_nodes < 2:
            raise UsageError(f"need at least 2 Gauss nodes, got {self.s_nodes}")
        if self.is_weighted and self.length != 1:
            raise UsageError("weighted averages are single-fold only")

    @property
    def is_weighted(self) -> bool:
        return self.mu > 0 or self.weight is not None

    @property
    def grade(self) -> tuple:
        """(composition length, weight exponent, derivative budget)."""
        return (self.length, self.mu, self.derivative_budget)


def _gauss_backward(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    u = (x + 1.0) / 2.0  # nodes in (0, 1); s = -u
    return u, w / 2.0


def _single_average(h: ScalarField, flow: FlowMap, op: AOperator) -> ScalarField:
    u_nodes, weights = _gauss_backward(op.s_nodes)

    def evaluator(pts, _h=h, _flow=flow):
        out = np.zeros(pts.shape[0])
        for ui, wi in zip(u_nodes, weights):
            vals = _h.evaluate(_flow.evaluate(-float(ui), pts))
            fac = wi * ((-float(ui)) ** op.mu if op.mu else 1.0)
            if op.weight is not None:
                vals = vals * np.asarray(op.weight(-float(ui), pts), dtype=float)
            out += fac * vals
        return out

    support = Support(inner=h.support.inner, outer=1.0)
    return ScalarField(h.dimension, evaluator, support=support,
                       name=f"A[{h.name}]")


def apply_A(op: AOperator, g: ScalarField, flow: FlowMap | None = None) -> ScalarField:
    """Apply a flow-average operator to a field.

    Mode fields under the radial flow are handled exactly on the profile:
    the j-fold average collapses (Fubini) to one integral against the
    Irwin-Hall density, and the s^mu weight becomes a profile weight.  All
    other cases integrate the field along the flow at Gauss nodes, nesting
    once per composition factor.
    """
    if flow is None:
        flow = FlowMap(radial_field(g.dimension))
    radial_flow = flow.field.kind == "radial"
    terms = mode_terms(g)
    if radial_flow and terms is not None and op.weight is None:
        out = None
        for part in terms:
            weight = None
            if op.mu:
                weight = lambda u, v, _m=op.mu: (-u) ** _m
            profile = FlowAverageProfile(
                part.profile, fold=op.length,
                nodes_per_segment=op.s_nodes, weight=weight,
            )
            piece = ModeField(part.dimension, part.mode, part.parity, profile,
                              name=f"A^{op.length}[{part.name}]")
            out = piece if out is None else out + piece
        return out
    out = g
    for _ in range(op.length):
        out = _single_average(out, flow, op)
    return out


# -- identity residuals -----------------------------------------------------------

def _require_exit_support(g: ScalarField, what: str) -> None:
    if g.support.inner <= UNIT_BACKWARD_RADIUS:
        raise PreconditionError(
            f"{what} needs g(e^{{-1}}x) to vanish on the ball: the input must be "
            f"supported in an annulus with inner radius > e^{{-1}} ≈ 0.3679, but "
            f"its support reaches down to |x| = {g.support.inner:.4f}"
        )


def ftc_residual(g: ScalarField, rule: QuadratureRule,
                 s_nodes: int = DEFAULT_S_NODES) -> float:
    """L² norm of ``g − 𝔄[Ng]`` — zero in exact arithmetic for collar inputs.

    One unit of backward flow integrates the radial derivative back up to
    the value, provided the flow exits the support of g in time; inputs
    supported below ``|x| = e^{-1}`` are rejected rather than silently
    producing a spurious residual.
    """
    _require_exit_support(g, "the flow antiderivative identity")
    Ng = apply_vector_field(g, radial_field(g.dimension))
    ANg = apply_A(AOperator(s_nodes=s_nodes), Ng)
    vals = g.evaluate(rule.points) - ANg.evaluate(rule.points)
    return norm(vals, rule)


def laplace_split_residual(g: ScalarField, n: int, rule: QuadratureRule) -> float:
    """L² norm of ``(N² − |x|²Δ + Σ_{i<j}(T^{i,j})² + (n−2)N) g``.

    The polar decomposition of the Laplacian makes this vanish identically;
    the residual is pure numerics (exact for mode fields and fields with
    exact derivative rules).
    """
    if n != g.dimension:
        raise UsageError(f"field has dimension {g.dimension}, n={n} given")
    if n != rule.dimension:
        raise UsageError(f"rule has dimension {rule.dimension}, n={n} given")
    N = radial_field(n)
    Ng = apply_vector_field(g, N)
    NNg = apply_vector_field(Ng, N)
    pts = rule.points
    r2 = np.sum(pts * pts, axis=1)
    total = NNg.evaluate(pts) - r2 * laplacian(g).evaluate(pts)
    total += float(n - 2) * Ng.evaluate(pts)
    for T in spanning_set_for_ball(n).fields:
        total += apply_vector_field(apply_vector_field(g, T), T).evaluate(pts)
    return norm(total, rule)


def _mode_parts_or_raise(g: ScalarField, what: str):
    terms = mode_terms(g)
    if terms is None:
        raise UsageError(
            f"{what} requires a circular-mode field (or a sum of them): the "
            "nested flow averages need the exact radial-profile calculus, "
            "which generic fields do not carry"
        )
    return terms


def _nn_field(m: ModeField) -> ModeField:
    """N²m (the radial field applied twice), exactly on the profile."""
    return ModeField(m.dimension, m.mode, m.parity,
                     DerivativeProfile(m.profile, 2), name=f"NN[{m.name}]")


def _a_laplacian_mode(m: ModeField) -> ModeField:
    """|x|²Δm on the profile: S'' + (2−n)S' − p²S (the e^{2v} factor cancels)."""
    profile = SumProfile(
        (DerivativeProfile(m.profile, 2), DerivativeProfile(m.profile, 1), m.profile),
        (1.0, float(2 - m.dimension), -float(m.mode**2)),
    )
    return ModeField(m.dimension, m.mode, m.parity, profile, name=f"aLap[{m.name}]")


def _elliptic_mode(m: ModeField) -> ModeField:
    """(N² − |x|²Δ)m = ((n−2)S' + p²S) on the profile."""
    profile = SumProfile(
        (DerivativeProfile(m.profile, 1), m.profile),
        (float(m.dimension - 2), float(m.mode**2)),
    )
    return ModeField(m.dimension, m.mode, m.parity, profile, name=f"ell[{m.name}]")


def _avg_mode(m: ModeField, fold: int, s_nodes: int) -> ModeField:
    profile = iterated_average(m.profile, fold, resolution=s_nodes)
    return ModeField(m.dimension, m.mode, m.parity, profile,
                     name=f"A^{fold}[{m.name}]")


def _step_mode(m: ModeField, s_nodes: int) -> ModeField:
    """One iteration step 𝔄²[(N² − |x|²Δ) · ] on the profile calculus."""
    return _avg_mode(_elliptic_mode(m), 2, s_nodes)


def iterated_antiderivative_residual(g: ScalarField, k: int, rule: QuadratureRule,
                                     s_nodes: int = 32) -> float:
    """L² defect of the k-times iterated antiderivative identity.

    The identity writes g as ``step^k(g) + Σ_{ℓ<k} step^ℓ(𝔄²[|x|²Δ g])``
    with ``step = 𝔄² ∘ (N² − |x|²Δ)``.  Each step operates on the radial
    profile calculus: flow averages are the exact telescoping finite
    differences of antiderivatives (see
    :class:`~bergman_lab.profiles.IteratedAverageProfile`), so nested
    compositions stay both exact and cheap.  ``s_nodes`` sets the
    resolution of the antiderivative tables for the cutoff transition;
    the residual drops spectrally with it until hitting the floor of the
    spatial quadrature rule.
    """
    if k not in (1, 2, 3):
        raise UsageError(f"iteration order must be 1, 2 or 3, got {k}")
    _require_exit_support(g, "the iterated antiderivative identity")
    parts = _mode_parts_or_raise(g, "the iterated antiderivative identity")
    total = np.zeros(rule.points.shape[0])
    for part in parts:
        rhs = part
        for _ in range(k):
            rhs = _step_mode(rhs, s_nodes)
        tail = _avg_mode(_a_laplacian_mode(part), 2, s_nodes)
        rhs_vals = rhs.evaluate(rule.points)
        for ell in range(k):
            term = tail
            for _ in range(ell):
                term = _step_mode(term, s_nodes)
            rhs_vals = rhs_vals + term.evaluate(rule.points)
        total += part.evaluate(rule.points) - rhs_vals
    return norm(total, rule)


# -- the constructive decomposition ----------------------------------------------

@dataclass(frozen=True)
class DecompositionResult:
    """Outcome of :func:`prop_decompose`.

    ``terms`` maps each tangential tuple (1,)*ℓ to its field H; applying
    the tuple's rotations to the fields and summing reproduces ζh up to
    ``residual``.  ``term_norms`` holds the L² norm of each H and
    ``weighted_input_norm`` the proxy ‖(1−|x|²)^k h‖ against which the
    term norms are compared in the boundedness diagnostics.
    """

    order: int
    terms: dict
    residual: float
    term_norms: dict
    weighted_input_norm: float

    @property
    def norm_diagnostics(self) -> dict:
        return {
            "term_norms": dict(self.term_norms),
            "weighted_input_norm": self.weighted_input_norm,
        }


def prop_decompose(h: ScalarField, k: int, zeta: ScalarField,
                   rule: QuadratureRule, s_nodes: int = 32,
                   harmonic_tolerance: float = 1e-6) -> DecompositionResult:
    """Write the cut-off harmonic field ζh as tangential derivatives.

    On the disk the construction is explicit: the top term at the length-k
    tuple is ``(−1)^k 𝔄^{2k}[T^k(ζh)]`` and the tail at length ℓ < k is
    ``(−1)^ℓ 𝔄^{2ℓ}[T^ℓ(𝔄²[|x|²Δ(ζh)])]``, where T is the disk rotation.
    Every stored field vanishes for ``|x| ≤ ρ₀`` (the cutoff's inner
    radius), because the backward flow only ever shrinks radii, and is
    evaluable on the whole closed collar.
    """
    if h.dimension != 2:
        raise UsageError(
            "the tangential decomposition is implemented on the disk only"
        )
    if k not in (1, 2, 3):
        raise UsageError(f"decomposition order must be 1, 2 or 3, got {k}")
    zparts = mode_terms(zeta)
    if zparts is None or any(p.mode != 0 or p.parity != "cos" for p in zparts):
        raise UsageError("the cutoff must be a radial (mode-0) field")
    sample = rule.points[np.sum(rule.points**2, axis=1) <= 0.8**2]
    sample = sample[:: max(1, sample.shape[0] // 128)]
    h_defect = harmonicity_residual(h, sample)
    if h_defect > harmonic_tolerance:
        raise PreconditionError(
            f"input must be harmonic: max |Δh| = {h_defect:.3e} over "
            f"{sample.shape[0]} interior sample points "
            f"(tolerance {harmonic_tolerance:.1e})"
        )
    product = zeta * h
    _require_exit_support(product, "the tangential decomposition")
    pparts = _mode_parts_or_raise(product, "the tangential decomposition")

    def build(transform) -> ScalarField:
        out = None
        for part in pparts:
            piece = transform(part)
            out = piece if out is None else out + piece
        return out

    sset = spanning_set_for_ball(2)
    T = sset[1]

    def rotated(field_in: ScalarField, times: int) -> ScalarField:
        out = field_in
        for _ in range(times):
            out = apply_vector_field(out, T)
        return out

    terms: dict = {}
    for ell in range(k + 1):
        if ell == k:
            def top(part, _k=k):
                inner = rotated(part, _k)
                return _avg_mode(inner, 2 * _k, s_nodes)
            H = build(top) * float((-1.0) ** k)
        else:
            def tail(part, _ell=ell):
                seed = _avg_mode(_a_laplacian_mode(part), 2, s_nodes)
                inner = rotated(seed, _ell)
                if _ell == 0:
                    return inner
                return _avg_mode(inner, 2 * _ell, s_nodes)
            H = build(tail) * float((-1.0) ** ell)
        terms[(1,) * ell] = H

    recon = np.zeros(rule.points.shape[0])
    for J, H in terms.items():
        recon += apply_tuple(H, J, sset).evaluate(rule.points)
    residual = norm(product.evaluate(rule.points) - recon, rule)
    term_norms = {J: norm(H.evaluate(rule.points), rule) for J, H in terms.items()}
    proxy = weighted_norm(h, k, rule).value
    return DecompositionResult(
        order=k,
        terms=terms,
        residual=residual,
        term_norms=term_norms,
        weighted_input_norm=proxy,
    )


# -- empirical boundedness probes -------------------------------------------------

def _multiindices(n: int, max_total: int):
    """All multi-indices in n variables with |alpha| <= max_total."""
    if n == 0:
        yield ()
        return
    for head in range(max_total + 1):
        for rest in _multiindices(n - 1, max_total - head):
            yield (head,) + rest


def weighted_bound_probe(op: AOperator, g: ScalarField, ell: int,
                         rule: QuadratureRule) -> float | None:
    """Ratio probing the weighted mapping bound of a flow-average operator.

    Computes ``‖t_x^ℓ · A[g]‖ / Σ_{|β| ≤ ν} ‖t_x^{ℓ+L} · D^β g‖`` with
    ``t_x = −log|x|`` the boundary hit time, L the operator's composition
    length, and ν its derivative budget.  A bounded operator class keeps
    this ratio uniformly bounded in ℓ; tests compare the values for
    ℓ = 0..4.  Returns None for identically zero input (the ratio is 0/0).
    """
    if not 0 <= ell <= 4:
        raise UsageError(f"weight exponent must lie in 0..4, got {ell}")
    pts = rule.points
    gvals = g.evaluate(pts)
    if float(np.max(np.abs(gvals))) == 0.0:
        return None
    t = -np.log(np.sqrt(np.sum(pts * pts, axis=1)))
    avals = apply_A(op, g).evaluate(pts)
    numerator = norm(t**ell * avals, rule)
    denominator = math.fsum(
        norm(t ** (ell + op.length) * g.derivative_values(beta, pts), rule)
        for beta in _multiindices(g.dimension, op.derivative_budget)
    )
    return numerator / denominator


def transversal_solve_residual(points) -> float:
    """Cross-check of the closed-form radial coefficient in ∂_k = a⁰_k N + Σ aʲ_k T_j.

    At each sample point the coordinate direction e_k is decomposed over
    the radial and rotation fields by least squares; the radial coefficient
    must equal x_k/|x|².  Returns the largest deviation over all points and
    coordinates.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    n = pts.shape[1]
    radial = radial_field(n)
    rotations = spanning_set_for_ball(n).fields
    r2 = np.sum(pts * pts, axis=1)
    if np.any(r2 == 0.0):
        raise DomainError(
            "the frame degenerates at the origin: sample points must be nonzero"
        )
    worst = 0.0
    for i in range(pts.shape[0]):
        p = pts[i : i + 1]
        columns = [radial.coefficients(p)[0]]
        columns += [T.coefficients(p)[0] for T in rotations]
        A = np.stack(columns, axis=1)
        for kk in range(n):
            sol, *_ = np.linalg.lstsq(A, np.eye(n)[kk], rcond=None)
            closed = pts[i, kk] / r2[i]
            worst = max(worst, abs(float(sol[0]) - closed))
    return worst
