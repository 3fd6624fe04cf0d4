"""One-dimensional radial profiles in the log-radius variable.

A rotation-invariant factor ``R(|x|)`` of a field on the disk or ball is
stored here as the profile ``S(v) = R(e^{-v})`` of the log-radius
``v = -log|x| ∈ [0, ∞)``.  Three things become exact in this variable:

* the radial direction field ``|x| d/d|x|`` is ``-d/dv``,
* the backward scaling flow is translation ``v -> v + u`` with ``u ≥ 0``,
* averaging along unit-time backward flow is the moving average
  ``(A S)(v) = ∫_0^1 S(v + u) du``, and its j-fold iterate collapses (by
  Fubini) to a single integral against the Irwin–Hall density of the sum
  of j independent uniforms.

Every profile exposes exact derivatives ``d^j S / dv^j`` up to a stated
order, so operators built from these profiles never fall back to finite
differences.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .exceptions import UsageError

__all__ = [
    "Profile",
    "ExpProfile",
    "PolyVProfile",
    "SmoothStepProfile",
    "SumProfile",
    "ProductProfile",
    "DerivativeProfile",
    "ChebPiecesProfile",
    "FlowAverageProfile",
    "IteratedAverageProfile",
    "iterated_average",
    "antiderivative_chain",
    "irwin_hall_density",
]

#: order cap for profiles whose derivatives exist in closed form at any order
UNLIMITED = 64

#: antiderivative tables cover log-radii v in [0, _V_MAX]; the quadrature
#: rules in use never place nodes below |x| = e^{-_V_MAX} ~ 2e-9.
_V_MAX = 20.0


@lru_cache(maxsize=32)
def _gauss01(n: int):
    """Gauss–Legendre nodes/weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def irwin_hall_density(fold: int, u) -> np.ndarray:
    """Density of the sum of ``fold`` independent uniform(0,1) variables.

    Piecewise polynomial of degree fold-1 supported on [0, fold]; this is
    the weight against which a fold-times iterated unit moving average
    collapses to a single integral.
    """
    u = np.asarray(u, dtype=float)
    if fold < 1:
        raise UsageError(f"fold must be >= 1, got {fold}")
    if fold == 1:
        return ((u >= 0.0) & (u <= 1.0)).astype(float)
    out = np.zeros_like(u)
    for i in range(fold + 1):
        out += (-1.0) ** i * math.comb(fold, i) * np.clip(u - i, 0.0, None) ** (fold - 1)
    return out / math.factorial(fold - 1)


class Profile:
    """A scalar function of the log-radius with exact derivatives.

    Subclasses implement ``derivative(order, v)`` vectorized over ``v`` and
    set ``max_order`` (highest exact derivative) and ``upper_cutoff`` (a
    finite V means the profile vanishes identically for v >= V, i.e. the
    field vanishes for |x| <= e^{-V}; None means no such cutoff).
    ``breakpoints`` lists the log-radii where the profile fails to be
    analytic (the edges of a cutoff transition): quadrature panels split
    there, and interpolation-based antiderivatives grade toward them.
    """

    max_order: int = 0
    upper_cutoff: float | None = None
    breakpoints: tuple = ()

    def __call__(self, v):
        return self.derivative(0, v)

    def derivative(self, order: int, v):  # pragma: no cover - interface
        raise NotImplementedError

    def _check_order(self, order: int):
        if order < 0:
            raise UsageError(f"derivative order must be >= 0, got {order}")
        if order > self.max_order:
            raise UsageError(
                f"profile supports exact derivatives up to order {self.max_order}, got {order}"
            )


class ExpProfile(Profile):
    """``S(v) = scale * e^{c v}``; the power field |x|^(-c) in disk terms."""

    def __init__(self, c: float, scale: float = 1.0):
        self.c = float(c)
        self.scale = float(scale)
        self.max_order = UNLIMITED
        self.upper_cutoff = None

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        amp = self.scale * self.c**order
        if self.c == 0.0:
            return np.full_like(v, self.scale if order == 0 else 0.0)
        with np.errstate(over="ignore"):
            out = amp * np.exp(self.c * v)
        return out

    def antiderivative(self, resolution: int = 48) -> Profile:
        if self.c == 0.0:
            return PolyVProfile((0.0, self.scale))
        return ExpProfile(self.c, self.scale / self.c)


class PolyVProfile(Profile):
    """Polynomial in the log-radius ``v`` (antiderivatives of constants)."""

    def __init__(self, coeffs):
        self._poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
        self.max_order = UNLIMITED
        self.upper_cutoff = None

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        p = self._poly.deriv(order) if order else self._poly
        return p(v)

    def antiderivative(self, resolution: int = 48) -> Profile:
        return PolyVProfile(self._poly.integ().coef)


class _LazyDervs:
    """Symbolic v-derivatives of one expression, lambdified on first use.

    Successive orders of the smooth step blow up combinatorially, and almost
    every caller stops at order 2, so orders are built only when asked for.
    """

    def __init__(self, v_sym, expr):
        import sympy as sp

        self._sp = sp
        self._v = v_sym
        self._exprs = [expr]
        self._fns = [sp.lambdify(v_sym, expr, modules="numpy")]

    def __getitem__(self, order: int):
        while len(self._fns) <= order:
            self._exprs.append(self._sp.diff(self._exprs[-1], self._v))
            self._fns.append(
                self._sp.lambdify(self._v, self._exprs[-1], modules="numpy"))
        return self._fns[order]


@lru_cache(maxsize=4)
def _smoothstep_dervs(rho0: float, rho1: float) -> _LazyDervs:
    """Numpy callables for d^j/dv^j of the smooth step composed with e^{-v}.

    The step is psi(t) = E(t)/(E(t)+E(1-t)) with E(t) = exp(-1/t), evaluated
    at t = (e^{-v} - rho0)/(rho1 - rho0); derivatives are symbolic in v.
    Valid only strictly inside the transition window.
    """
    import sympy as sp

    v_sym = sp.Symbol("v")
    t = (sp.exp(-v_sym) - rho0) / (rho1 - rho0)
    e_lo = sp.exp(-1 / t)
    e_hi = sp.exp(-1 / (1 - t))
    return _LazyDervs(v_sym, e_lo / (e_lo + e_hi))


class SmoothStepProfile(Profile):
    """Log-radius profile of the radial cutoff that is 0 for |x| <= rho0 and
    1 for |x| >= rho1, glued by the canonical smooth step.

    Derivatives are taken symbolically with respect to v (chain rule through
    t = (e^{-v} - rho0)/(rho1 - rho0)) and evaluated only strictly inside the
    transition; the clamped tails are exactly flat.
    """

    #: stay this far inside (0,1) in t before switching to the flat branches;
    #: exp(-1/t) < 1e-86 there, far below any derivative's round-off.
    _T_EDGE = 0.005

    def __init__(self, rho0: float = 0.5, rho1: float = 0.7, order_max: int = 8):
        if not (0.0 < rho0 < rho1 <= 1.0):
            raise UsageError(f"need 0 < rho0 < rho1 <= 1, got ({rho0}, {rho1})")
        self.rho0 = float(rho0)
        self.rho1 = float(rho1)
        self.max_order = order_max
        # field vanishes for |x| <= rho0  <=>  profile vanishes for v >= -log(rho0)
        self.upper_cutoff = -math.log(rho0)
        self._v_flat_one = -math.log(rho1)  # profile == 1 for v <= this
        width = rho1 - rho0
        # transition v-window shrunk so t stays in [_T_EDGE, 1-_T_EDGE]
        self._v_lo = -math.log(rho1 - self._T_EDGE * width)
        self._v_hi = -math.log(rho0 + self._T_EDGE * width)
        self.breakpoints = (self._v_lo, self._v_hi)
        self._dervs = _smoothstep_dervs(self.rho0, self.rho1)

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        scalar = v.ndim == 0
        v = np.atleast_1d(v)
        inside = (v > self._v_lo) & (v < self._v_hi)
        out = np.zeros(v.shape, dtype=float)
        if order == 0:
            out[v <= self._v_lo] = 1.0
        if np.any(inside):
            vc = np.clip(v, self._v_lo, self._v_hi)
            with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
                vals = self._dervs[order](vc)
            out[inside] = np.asarray(vals, dtype=float)[inside]
        return out[0] if scalar else out


class SumProfile(Profile):
    """Linear combination ``sum_i c_i S_i``."""

    def __init__(self, parts, coeffs=None):
        self.parts = tuple(parts)
        self.coeffs = tuple(1.0 for _ in self.parts) if coeffs is None else tuple(
            float(c) for c in coeffs
        )
        if len(self.coeffs) != len(self.parts):
            raise UsageError("one coefficient per profile part required")
        self.max_order = min(p.max_order for p in self.parts)
        cuts = [p.upper_cutoff for p in self.parts]
        self.upper_cutoff = None if any(c is None for c in cuts) else max(cuts)
        self.breakpoints = tuple(sorted({b for p in self.parts for b in p.breakpoints}))

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=float)
        for c, p in zip(self.coeffs, self.parts):
            out += c * p.derivative(order, v)
        return out

    def antiderivative(self, resolution: int = 48) -> Profile:
        return SumProfile(
            tuple(antiderivative_chain(p, 1, resolution) for p in self.parts),
            self.coeffs,
        )


class ProductProfile(Profile):
    """Pointwise product with the one-dimensional Leibniz rule."""

    def __init__(self, left: Profile, right: Profile):
        self.left = left
        self.right = right
        self.max_order = min(left.max_order, right.max_order)
        cuts = [c for c in (left.upper_cutoff, right.upper_cutoff) if c is not None]
        self.upper_cutoff = min(cuts) if cuts else None
        self.breakpoints = tuple(sorted(set(left.breakpoints) | set(right.breakpoints)))

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=float)
        for i in range(order + 1):
            out += (
                math.comb(order, i)
                * self.left.derivative(i, v)
                * self.right.derivative(order - i, v)
            )
        return out


class DerivativeProfile(Profile):
    """``d^shift S / dv^shift`` as a profile in its own right."""

    def __init__(self, base: Profile, shift: int, scale: float = 1.0):
        if shift < 0 or shift > base.max_order:
            raise UsageError(f"cannot take {shift} exact derivatives of this profile")
        self.base = base
        self.shift = shift
        self.scale = float(scale)
        self.max_order = base.max_order - shift
        self.upper_cutoff = base.upper_cutoff
        self.breakpoints = base.breakpoints

    def derivative(self, order, v):
        self._check_order(order)
        return self.scale * self.base.derivative(order + self.shift, v)

    def antiderivative(self, resolution: int = 48) -> Profile:
        if self.shift >= 1:
            return DerivativeProfile(self.base, self.shift - 1, self.scale)
        inner = antiderivative_chain(self.base, 1, resolution)
        if self.scale == 1.0:
            return inner
        return DerivativeProfile(inner, 0, self.scale)


def _graded_edges(breaks, levels: int = 10, span: float = _V_MAX,
                  max_len: float = 1.0) -> np.ndarray:
    """Panel edges on [0, span], graded dyadically toward each breakpoint.

    The cutoff transition is smooth but not analytic at its edges
    (derivatives of every order vanish there while growing factorially
    just inside), so fixed-order interpolation or quadrature only
    converges on panels whose width shrinks with the distance to the
    edge.  Dyadic grading gives every panel a bounded ratio of
    (distance to nearest bad point) / (panel width), restoring spectral
    accuracy at fixed polynomial degree.
    """
    bks = sorted({float(b) for b in breaks if 0.0 < b < span})
    anchors = [0.0] + bks + [span]
    edges: list[float] = []
    for a, b in zip(anchors[:-1], anchors[1:]):
        width = b - a
        pts = {a, b}
        if a in bks:
            pts.update(a + width * 0.5**j for j in range(1, levels + 1))
        if b in bks:
            pts.update(b - width * 0.5**j for j in range(1, levels + 1))
        sub = sorted(pts)
        for p, q in zip(sub[:-1], sub[1:]):
            m = max(1, int(math.ceil((q - p) / max_len)))
            edges.extend(p + (q - p) * i / m for i in range(m))
    edges.append(span)
    return np.asarray(edges, dtype=float)


class ChebPiecesProfile(Profile):
    """Piecewise-Chebyshev representation on [0, _V_MAX] with exact calculus.

    This is the antiderivative fallback for profiles without a closed-form
    primitive (the smooth cutoff and its products): the profile is sampled
    once per panel — panels graded toward its breakpoints — and
    antidifferentiation is then an exact operation on the coefficients,
    stitched continuously across panels.
    """

    def __init__(self, edges, blocks):
        self.edges = np.asarray(edges, dtype=float)
        self.blocks = [np.asarray(c, dtype=float) for c in blocks]
        self.max_order = 2  # differentiation amplifies interpolation error
        self.upper_cutoff = None

    @classmethod
    def fit(cls, profile: Profile, resolution: int = 48) -> "ChebPiecesProfile":
        edges = _graded_edges(profile.breakpoints)
        cheb = np.polynomial.chebyshev
        blocks = []
        for a, b in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            blocks.append(cheb.chebinterpolate(
                lambda x: profile.derivative(0, mid + half * np.asarray(x)),
                resolution,
            ))
        return cls(edges, blocks)

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        scalar = v.ndim == 0
        flat = np.atleast_1d(v).ravel()
        if flat.size and (flat.min() < -1e-9 or flat.max() > self.edges[-1] + 1e-9):
            raise UsageError(
                f"antiderivative tables cover log-radii [0, {self.edges[-1]:g}], "
                f"got values in [{flat.min():g}, {flat.max():g}]"
            )
        flat = np.clip(flat, self.edges[0], self.edges[-1])
        cheb = np.polynomial.chebyshev
        idx = np.searchsorted(self.edges, flat, side="right") - 1
        idx = np.clip(idx, 0, len(self.blocks) - 1)
        out = np.empty_like(flat)
        for i in np.unique(idx):
            sel = idx == i
            a, b = self.edges[i], self.edges[i + 1]
            x = (flat[sel] - 0.5 * (a + b)) / (0.5 * (b - a))
            coef = self.blocks[i]
            if order:
                coef = cheb.chebder(coef, order, scl=2.0 / (b - a))
            out[sel] = cheb.chebval(x, coef)
        return float(out[0]) if scalar else out.reshape(v.shape)

    def antiderivative(self, resolution: int = 48) -> "ChebPiecesProfile":
        cheb = np.polynomial.chebyshev
        blocks = []
        running = 0.0
        for a, b, coef in zip(self.edges[:-1], self.edges[1:], self.blocks):
            prim = cheb.chebint(coef, 1, scl=0.5 * (b - a))
            prim[0] += running - cheb.chebval(-1.0, prim)
            blocks.append(prim)
            running = cheb.chebval(1.0, prim)
        return ChebPiecesProfile(self.edges, blocks)


def antiderivative_chain(profile: Profile, depth: int, resolution: int = 48) -> Profile:
    """The ``depth``-th antiderivative of a profile (negative depth = derivative).

    Constants of integration are arbitrary — every use is through finite
    differences of order >= depth, which annihilate the ambiguity.  Results
    are cached on the profile instance, keyed by resolution, so iterated
    averages of the same profile share one set of tables.
    """
    if depth == 0:
        return profile
    if depth < 0:
        return DerivativeProfile(profile, -depth)
    cache = profile.__dict__.setdefault("_antiderivatives", {})
    seq = cache.setdefault(int(resolution), [profile])
    while len(seq) <= depth:
        prev = seq[-1]
        make = getattr(prev, "antiderivative", None)
        if make is not None:
            seq.append(make(resolution))
        else:
            seq.append(ChebPiecesProfile.fit(prev, resolution).antiderivative(resolution))
    return seq[depth]


class IteratedAverageProfile(Profile):
    """Exact ``scale · d^o/dv^o (A^fold S)`` via the telescoping identity.

    A single unit moving average satisfies ``(A S)(v) = F(v+1) − F(v)``
    with ``F' = S``; iterating, the fold-times average is the fold-th
    forward finite difference of the fold-th antiderivative.  Evaluation
    therefore needs no quadrature in the flow parameter at all — only
    fold+1 point evaluations of an antiderivative table.  ``pre_derivative``
    may be negative (net antiderivatives of the average).  ``resolution``
    is the Chebyshev degree of the antiderivative panels for profile pieces
    without a closed-form primitive.
    """

    def __init__(self, base: Profile, fold: int, pre_derivative: int = 0,
                 scale: float = 1.0, resolution: int = 48):
        if fold < 1:
            raise UsageError(f"fold must be >= 1, got {fold}")
        self.base = base
        self.fold = int(fold)
        self.pre_derivative = int(pre_derivative)
        self.scale = float(scale)
        self.resolution = int(resolution)
        self.max_order = base.max_order + self.fold - self.pre_derivative
        if self.max_order < 0:
            raise UsageError(
                f"cannot take {pre_derivative} derivatives through a "
                f"{fold}-fold average of this profile"
            )
        self.upper_cutoff = base.upper_cutoff
        self.breakpoints = tuple(sorted({
            b - i for b in base.breakpoints for i in range(self.fold + 1) if b - i > 0
        }))
        self._binom = tuple(
            (-1.0) ** (self.fold - i) * math.comb(self.fold, i)
            for i in range(self.fold + 1)
        )

    def derivative(self, order, v):
        self._check_order(order)
        depth = self.fold - self.pre_derivative - order
        table = antiderivative_chain(self.base, depth, self.resolution)
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape, dtype=float)
        for i, c in enumerate(self._binom):
            out += c * table.derivative(0, v + float(i))
        return self.scale * out

    def antiderivative(self, resolution: int = 48) -> "IteratedAverageProfile":
        return IteratedAverageProfile(self.base, self.fold, self.pre_derivative - 1,
                                      self.scale, self.resolution)


def _derivative_through(profile: Profile, shift: int, scale: float) -> Profile:
    """Push a derivative wrapper through sums and iterated averages."""
    if shift == 0 and scale == 1.0:
        return profile
    if isinstance(profile, SumProfile):
        return SumProfile(
            tuple(_derivative_through(p, shift, scale) for p in profile.parts),
            profile.coeffs,
        )
    if isinstance(profile, IteratedAverageProfile):
        return IteratedAverageProfile(
            profile.base, profile.fold, profile.pre_derivative + shift,
            profile.scale * scale, profile.resolution,
        )
    return DerivativeProfile(profile, shift, scale)


def iterated_average(base: Profile, fold: int, resolution: int = 48) -> Profile:
    """``A^fold`` of a profile in the exact telescope representation.

    Distributes over sums and fuses with derivative wrappers and previous
    averages (translation averages commute with d/dv and with each other),
    so arbitrarily deep compositions stay flat: a sum of single
    :class:`IteratedAverageProfile` terms over shared antiderivative tables.
    """
    if fold < 1:
        raise UsageError(f"fold must be >= 1, got {fold}")
    if isinstance(base, SumProfile):
        return SumProfile(
            tuple(iterated_average(p, fold, resolution) for p in base.parts),
            base.coeffs,
        )
    if isinstance(base, DerivativeProfile):
        inner = iterated_average(base.base, fold, resolution)
        return _derivative_through(inner, base.shift, base.scale)
    if isinstance(base, IteratedAverageProfile):
        return IteratedAverageProfile(base.base, base.fold + fold,
                                      base.pre_derivative, base.scale, resolution)
    return IteratedAverageProfile(base, fold, 0, 1.0, resolution)


class FlowAverageProfile(Profile):
    """Profile of a ``fold``-times iterated unit backward-flow average.

    Unweighted, represents ``v -> ∫ S(v+u) K(u) du`` with K the Irwin–Hall
    density on [0, fold].  A ``weight`` callable (only with fold == 1)
    replaces the uniform weight: it receives the quadrature offsets
    ``u ∈ (0, 1)`` and the evaluation log-radii ``v`` (same shape) and
    must return the integrand weight, matching operators of the form
    ``∫ w(s, x) g(flow(s, x)) ds`` with ``s = -u``.

    The integral is composite Gauss–Legendre: for each evaluation point the
    flow interval splits at the Irwin–Hall knots and at the base profile's
    breakpoints, with panels graded dyadically toward breakpoints so the
    non-analytic cutoff transition is resolved to near machine precision.
    ``nodes_per_segment`` sets the Gauss order per panel (a quarter of it,
    clipped to [4, 32]).
    """

    _GRADE_LEVELS = 10

    def __init__(self, base: Profile, fold: int = 1, nodes_per_segment: int = 32,
                 weight=None):
        if fold < 1:
            raise UsageError(f"fold must be >= 1, got {fold}")
        if weight is not None and fold != 1:
            raise UsageError("weighted averages are single-fold only")
        self.base = base
        self.fold = fold
        self.weight = weight
        self.max_order = base.max_order
        self.upper_cutoff = base.upper_cutoff
        self.breakpoints = tuple(sorted({
            b - i for b in base.breakpoints for i in range(fold + 1) if b - i > 0
        }))
        q = int(min(32, max(4, nodes_per_segment // 4)))
        self._gx, self._gw = _gauss01(q)

    def _segment_nodes(self, vi: float):
        """Composite panel nodes/weights on u ∈ [0, fold] for one log-radius."""
        interior = [
            b - vi for b in self.base.breakpoints
            if 1e-12 < b - vi < self.fold - 1e-12
        ]
        edges = sorted(set(range(self.fold + 1)) | set(interior))
        us, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            width = b - a
            pts = {a, b}
            if a in interior:
                pts.update(a + width * 0.5**j for j in range(1, self._GRADE_LEVELS + 1))
            if b in interior:
                pts.update(b - width * 0.5**j for j in range(1, self._GRADE_LEVELS + 1))
            sub = sorted(pts)
            for p, q in zip(sub[:-1], sub[1:]):
                us.append(p + (q - p) * self._gx)
                ws.append((q - p) * self._gw)
        u = np.concatenate(us)
        w = np.concatenate(ws)
        if self.fold > 1:
            w = w * irwin_hall_density(self.fold, u)
        return u, w

    def derivative(self, order, v):
        self._check_order(order)
        v = np.asarray(v, dtype=float)
        scalar = v.ndim == 0
        flat = np.atleast_1d(v).ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        args, wts, offsets = [], [], [0]
        for vi in uniq:
            u, w = self._segment_nodes(float(vi))
            args.append(vi + u)
            if self.weight is not None:
                w = w * np.asarray(self.weight(u, np.full_like(u, vi)), dtype=float)
            wts.append(w)
            offsets.append(offsets[-1] + u.size)
        vals = self.base.derivative(order, np.concatenate(args))
        sums = np.add.reduceat(vals * np.concatenate(wts), np.asarray(offsets[:-1]))
        out = sums[inv]
        return float(out[0]) if scalar else out.reshape(v.shape)
