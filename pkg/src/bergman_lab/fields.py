"""Scalar fields on the ball with exact derivative rules and an FD fallback.

A :class:`ScalarField` bundles a vectorized evaluator with an optional exact
derivative rule (multi-index -> values).  Sums, products and first-order
operators propagate exact rules, so the built-in families — monomials,
harmonic monomials on the disk, the radial cutoff, and the slow-mode
counterexample family — never need finite differences; 4th-order central
differences remain as the fallback for rule-less fields.

Fields of the form ``R(|x|) * cos(p θ)`` / ``R(|x|) * sin(p θ)`` (single
angular mode, disk) or plain radial fields in any dimension are represented
by :class:`ModeField`, which carries the radial profile in log-radius form
so rotation/scaling operators stay exact; see :mod:`bergman_lab.profiles`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, UsageError
from .geometry import VectorFieldSpec, spanning_set_for_ball
from .profiles import (
    UNLIMITED,
    DerivativeProfile,
    ExpProfile,
    Profile,
    ProductProfile,
    SmoothStepProfile,
    SumProfile,
)

__all__ = [
    "MAX_DERIVATIVE_ORDER",
    "Support",
    "ScalarField",
    "ModeField",
    "mode_terms",
    "constant_field",
    "monomial_field",
    "polynomial_field",
    "harmonic_monomial",
    "build_counterexample",
    "build_bump_cutoff",
    "apply_partial",
    "apply_vector_field",
    "apply_tuple",
    "laplacian",
    "harmonicity_residual",
]

#: highest derivative order accepted by the generic operator entry points
MAX_DERIVATIVE_ORDER = 4

#: relative finite-difference step (scaled by max(1, |x|) pointwise)
FD_STEP = 1.0e-3

# 4th-order central first-derivative stencil: (offset, coefficient/h)
_FD1 = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
# 4th-order central second-derivative stencil: (offset, coefficient/h^2)
_FD2 = (
    (-2, -1.0 / 12.0),
    (-1, 16.0 / 12.0),
    (0, -30.0 / 12.0),
    (1, 16.0 / 12.0),
    (2, -1.0 / 12.0),
)


@dataclass(frozen=True)
class Support:
    """Radial support descriptor: the field vanishes for |x| < inner."""

    inner: float = 0.0
    outer: float = 1.0

    @property
    def is_whole(self) -> bool:
        return self.inner == 0.0


def _as_batch(pts, dim: int):
    arr = np.asarray(pts, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise UsageError(f"expected points in R^{dim}, got shape {np.shape(pts)}")
    return arr, single


def _zeros_alpha(dim: int) -> tuple[int, ...]:
    return (0,) * dim


def _total(alpha) -> int:
    return int(sum(alpha))


def _multiindices_upto(alpha):
    return itertools.product(*(range(a + 1) for a in alpha))


def _multi_binom(alpha, beta) -> float:
    out = 1.0
    for a, b in zip(alpha, beta):
        out *= math.comb(a, b)
    return out


class ScalarField:
    """Real-valued field with a vectorized evaluator and optional exact rule.

    Parameters
    ----------
    dimension : int
        Ambient dimension (2 or 3 here).
    evaluator : callable
        Maps an (N, dimension) array to an (N,) array.
    rule : callable or None
        Exact derivative rule ``rule(alpha, pts) -> values`` valid for
        multi-indices with ``|alpha| <= exact_order``.
    exact_order : int
        Highest total order the rule covers (0 if no rule).
    support : Support
        Radial support descriptor.
    singularities : tuple of points
        Flagged non-smooth points; finite differences refuse to straddle
        them (see ``singular_radius``).
    """

    def __init__(self, dimension, evaluator, rule=None, exact_order=0,
                 support=Support(), singularities=(), singular_radius=0.0,
                 name="field", smoothness_note=""):
        self.dimension = int(dimension)
        self._evaluator = evaluator
        self._rule = rule
        self.exact_order = int(exact_order) if rule is not None else 0
        self.support = support
        self.singularities = tuple(np.asarray(p, dtype=float) for p in singularities)
        self.singular_radius = float(singular_radius)
        self.name = name
        self.smoothness_note = smoothness_note

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, pts) -> np.ndarray:
        arr, single = _as_batch(pts, self.dimension)
        vals = np.asarray(self._evaluator(arr), dtype=float)
        return vals[0] if single else vals

    def __call__(self, pts):
        out = self.evaluate(pts)
        return float(out) if np.ndim(out) == 0 else out

    def has_exact(self, order: int) -> bool:
        return self._rule is not None and order <= self.exact_order

    def derivative_values(self, alpha, pts) -> np.ndarray:
        """D^alpha values at pts, exact if the rule covers |alpha|."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dimension or any(a < 0 for a in alpha):
            raise UsageError(f"bad multi-index {alpha} for dimension {self.dimension}")
        arr, single = _as_batch(pts, self.dimension)
        if _total(alpha) == 0:
            vals = np.asarray(self._evaluator(arr), dtype=float)
        elif self.has_exact(_total(alpha)):
            vals = np.asarray(self._rule(alpha, arr), dtype=float)
        else:
            vals = _fd_partial(self, alpha, arr)
        return vals[0] if single else vals

    # -- combinators --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, ScalarField):
            return _sum_field(self, other)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            return _sum_field(self, _scaled_field(other, -1.0))
        return NotImplemented

    def __neg__(self):
        return _scaled_field(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return _product_field(self, other)
        if np.isscalar(other):
            return _scaled_field(self, float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} dim={self.dimension}>"


# -- finite differences ------------------------------------------------------

def _fd_guard(field: ScalarField, arr: np.ndarray, h: np.ndarray):
    if not field.singularities:
        return
    reach = np.max(h) * 2.5
    radius = max(field.singular_radius, reach)
    for p in field.singularities:
        d = np.sqrt(np.sum((arr - p[None, :]) ** 2, axis=1))
        bad = d < radius
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DomainError(
                f"finite differences for {field.name!r} requested at {arr[i]}, "
                f"within {radius:.3g} of flagged non-smooth point {p}"
            )


def _fd_axis(evaluate, arr: np.ndarray, axis: int, order: int, h: np.ndarray):
    """One-coordinate FD of given order; order >= 3 iterates first differences."""
    if order == 1:
        stencil, power = _FD1, 1
    elif order == 2:
        stencil, power = _FD2, 2
    else:
        inner = lambda a: _fd_axis(evaluate, a, axis, order - 1, h)  # noqa: E731
        return _fd_axis(inner, arr, axis, 1, h)
    out = np.zeros(arr.shape[0])
    for offset, coeff in stencil:
        shifted = arr.copy()
        shifted[:, axis] += offset * h
        out += coeff * np.asarray(evaluate(shifted), dtype=float)
    return out / h**power


def _fd_partial(field: ScalarField, alpha, arr: np.ndarray, step: float = FD_STEP):
    """Iterated central differences for D^alpha f; mixed orders nest axis by axis."""
    if _total(alpha) > MAX_DERIVATIVE_ORDER:
        raise UsageError(
            f"derivative order {_total(alpha)} exceeds maximum {MAX_DERIVATIVE_ORDER}"
        )
    h = step * np.maximum(1.0, np.sqrt(np.sum(arr * arr, axis=1)))
    _fd_guard(field, arr, h)

    evaluate = lambda a: field._evaluator(a)  # noqa: E731
    for axis in range(field.dimension - 1, -1, -1):
        order = alpha[axis]
        if order == 0:
            continue
        prev = evaluate
        evaluate = (
            lambda a, _prev=prev, _axis=axis, _order=order:
            _fd_axis(_prev, a, _axis, _order, h)
        )
    return np.asarray(evaluate(arr), dtype=float)


# -- combinator fields --------------------------------------------------------

def mode_terms(f: "ScalarField"):
    """f as a tuple of :class:`ModeField` summands, or None.

    Single mode fields return themselves; sums and scalings of mode fields
    propagate a ``mode_components`` attribute so that linear operators with
    exact polar actions can be applied term by term.
    """
    if isinstance(f, ModeField):
        return (f,)
    comps = getattr(f, "mode_components", None)
    return tuple(comps) if comps is not None else None


def _support_union(a: Support, b: Support) -> Support:
    return Support(inner=min(a.inner, b.inner), outer=max(a.outer, b.outer))


def _support_intersection(a: Support, b: Support) -> Support:
    return Support(inner=max(a.inner, b.inner), outer=min(a.outer, b.outer))


def _sum_field(f: ScalarField, g: ScalarField) -> ScalarField:
    if f.dimension != g.dimension:
        raise UsageError("cannot add fields of different dimensions")
    if (
        isinstance(f, ModeField)
        and isinstance(g, ModeField)
        and f.mode == g.mode
        and f.parity == g.parity
    ):
        return ModeField(
            f.dimension, f.mode, f.parity, SumProfile((f.profile, g.profile)),
            name=f"({f.name}+{g.name})",
            singularities=f.singularities + g.singularities,
            singular_radius=max(f.singular_radius, g.singular_radius),
        )
    rule = None
    order = 0
    if f._rule is not None and g._rule is not None:
        order = min(f.exact_order, g.exact_order)

        def rule(alpha, pts):
            return f.derivative_values(alpha, pts) + g.derivative_values(alpha, pts)

    out = ScalarField(
        f.dimension,
        lambda pts: f._evaluator(pts) + g._evaluator(pts),
        rule=rule,
        exact_order=order,
        support=_support_union(f.support, g.support),
        singularities=f.singularities + g.singularities,
        singular_radius=max(f.singular_radius, g.singular_radius),
        name=f"({f.name}+{g.name})",
    )
    ft, gt = mode_terms(f), mode_terms(g)
    if ft is not None and gt is not None:
        out.mode_components = ft + gt
    return out


def _scaled_field(f: ScalarField, c: float) -> ScalarField:
    if isinstance(f, ModeField):
        return ModeField(
            f.dimension, f.mode, f.parity,
            SumProfile((f.profile,), (c,)),
            name=f"({c}*{f.name})",
            singularities=f.singularities, singular_radius=f.singular_radius,
            cartesian_rule=None if f._custom_rule is None else (
                lambda alpha, pts: c * f._custom_rule(alpha, pts)
            ),
            cartesian_order=f.exact_order,
        )
    rule = None
    if f._rule is not None:
        def rule(alpha, pts):
            return c * f._rule(alpha, pts)

    out = ScalarField(
        f.dimension,
        lambda pts: c * f._evaluator(pts),
        rule=rule,
        exact_order=f.exact_order,
        support=f.support,
        singularities=f.singularities,
        singular_radius=f.singular_radius,
        name=f"({c}*{f.name})",
    )
    ft = mode_terms(f)
    if ft is not None:
        out.mode_components = tuple(_scaled_field(part, c) for part in ft)
    return out


def _mode_product_ok(a: ScalarField, b: ScalarField) -> bool:
    """Whether a pairwise product of mode terms stays a single mode field."""
    return (
        isinstance(a, ModeField)
        and isinstance(b, ModeField)
        and (a.mode == 0 or b.mode == 0)
        and not (a.mode == 0 and a.parity == "sin")
        and not (b.mode == 0 and b.parity == "sin")
    )


def _product_field(f: ScalarField, g: ScalarField) -> ScalarField:
    if f.dimension != g.dimension:
        raise UsageError("cannot multiply fields of different dimensions")
    if (
        isinstance(f, ModeField)
        and isinstance(g, ModeField)
        and (f.mode == 0 or g.mode == 0)
        and not (f.parity == "sin" and f.mode == 0)
        and not (g.parity == "sin" and g.mode == 0)
    ):
        angular = f if g.mode == 0 else g
        return ModeField(
            f.dimension, angular.mode, angular.parity,
            ProductProfile(f.profile, g.profile),
            name=f"({f.name}*{g.name})",
            singularities=f.singularities + g.singularities,
            singular_radius=max(f.singular_radius, g.singular_radius),
        )
    ft, gt = mode_terms(f), mode_terms(g)
    if (
        ft is not None
        and gt is not None
        and not (isinstance(f, ModeField) and isinstance(g, ModeField))
        and all(_mode_product_ok(a, b) for a in ft for b in gt)
    ):
        out = None
        for a in ft:
            for b in gt:
                piece = _product_field(a, b)
                out = piece if out is None else _sum_field(out, piece)
        return out
    rule = None
    order = 0
    if f._rule is not None and g._rule is not None:
        order = min(f.exact_order, g.exact_order)

        def rule(alpha, pts):
            total = np.zeros(pts.shape[0])
            for beta in _multiindices_upto(alpha):
                rest = tuple(a - b for a, b in zip(alpha, beta))
                total += (
                    _multi_binom(alpha, beta)
                    * f.derivative_values(beta, pts)
                    * g.derivative_values(rest, pts)
                )
            return total

    return ScalarField(
        f.dimension,
        lambda pts: f._evaluator(pts) * g._evaluator(pts),
        rule=rule,
        exact_order=order,
        support=_support_intersection(f.support, g.support),
        singularities=f.singularities + g.singularities,
        singular_radius=max(f.singular_radius, g.singular_radius),
        name=f"({f.name}*{g.name})",
    )


# -- mode fields ---------------------------------------------------------------

def _polar_data(arr: np.ndarray):
    r = np.sqrt(np.sum(arr * arr, axis=1))
    with np.errstate(divide="ignore"):
        v = -np.log(r)
    return r, v


class ModeField(ScalarField):
    """``R(|x|) * cos(p θ)`` or ``R(|x|) * sin(p θ)`` on the disk, or a plain
    radial field in dimension 2 or 3 (mode 0).

    The radial factor is a log-radius :class:`~bergman_lab.profiles.Profile`,
    so the rotation field, the radial field, Laplacians, radial-weight
    multiplications and backward-flow averages all act on it exactly.  The
    generic Cartesian derivative rule (orders 1 and 2, polar chain rule) can
    be overridden with a ``cartesian_rule`` when a sharper closed form exists
    (holomorphic monomials do this).
    """

    def __init__(self, dimension, mode, parity, profile: Profile, name="mode",
                 singularities=(), singular_radius=0.0,
                 cartesian_rule=None, cartesian_order=None, smoothness_note=""):
        if parity not in ("cos", "sin"):
            raise UsageError(f"parity must be 'cos' or 'sin', got {parity!r}")
        if mode < 0:
            raise UsageError(f"mode must be >= 0, got {mode}")
        if mode > 0 and dimension != 2:
            raise UsageError("nonzero angular modes exist only on the disk")
        self.mode = int(mode)
        self.parity = parity
        self.profile = profile
        self._custom_rule = cartesian_rule
        if cartesian_rule is not None:
            order = UNLIMITED if cartesian_order is None else cartesian_order
            rule = cartesian_rule
        else:
            order = min(2, profile.max_order)
            rule = self._polar_rule if order > 0 else None
        cutoff = profile.upper_cutoff
        support = Support(inner=math.exp(-cutoff), outer=1.0) if cutoff is not None else Support()
        super().__init__(
            dimension, self._eval, rule=rule, exact_order=order,
            support=support, singularities=singularities,
            singular_radius=singular_radius, name=name,
            smoothness_note=smoothness_note,
        )

    # mode == 0 with parity "sin" is the zero field; keep it representable
    # so rotation images of radial fields stay in the class.

    def _angular(self, arr: np.ndarray, flips: int = 0):
        """cos/sin(p θ) after ``flips`` quarter-phase flips from T."""
        if self.mode == 0:
            kind = self.parity if flips % 2 == 0 else ("sin" if self.parity == "cos" else "cos")
            ones = np.ones(arr.shape[0])
            return ones if kind == "cos" else np.zeros(arr.shape[0])
        theta = np.arctan2(arr[:, 1], arr[:, 0])
        kind = self.parity
        if flips % 2 == 1:
            kind = "sin" if kind == "cos" else "cos"
        return np.cos(self.mode * theta) if kind == "cos" else np.sin(self.mode * theta)

    def radial_values(self, r, order: int = 0) -> np.ndarray:
        """Profile (or its v-derivative) at radii ``r``; r = 0 maps to v = inf."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            v = -np.log(r)
        return self.profile.derivative(order, v)

    def _profile_at(self, arr: np.ndarray, order: int = 0):
        r = np.sqrt(np.sum(arr * arr, axis=1))
        if r.size > 512:
            uniq, inverse = np.unique(r, return_inverse=True)
            return self.radial_values(uniq, order)[inverse], r
        return self.radial_values(r, order), r

    def _eval(self, arr: np.ndarray) -> np.ndarray:
        vals, _ = self._profile_at(arr)
        if self.mode == 0 and self.parity == "cos":
            return vals
        return vals * self._angular(arr)

    def _polar_rule(self, alpha, arr: np.ndarray):
        """Cartesian derivatives (|alpha| <= 2) by the polar chain rule."""
        total = _total(alpha)
        if total == 0:
            return self._eval(arr)
        s0, r = self._profile_at(arr, 0)
        s1, _ = self._profile_at(arr, 1)
        p = self.mode
        ang = self._angular(arr)
        dang = self._angular(arr, flips=1)  # d/dθ of ang is ±p·dang; sign below
        # chain rule in v: R(ρ)=S(v), v=-log ρ  =>  ρ R' = -S', ρ² R'' = S'' + S'
        sgn = -1.0 if self.parity == "cos" else 1.0  # d/dθ cos = -sin, d/dθ sin = +cos
        if np.any(r == 0.0) and self.profile.upper_cutoff is None:
            raise DomainError(
                f"polar derivative rule for {self.name!r} is undefined at the "
                f"origin; evaluate at r > 0 instead"
            )
        # remaining origin rows belong to profiles that vanish identically
        # near 0, where every term below is exactly zero: 1/r never enters
        inv_r = np.where(r > 0.0, 1.0 / np.where(r > 0.0, r, 1.0), 0.0)
        f_r = -s1 * inv_r * ang                      # R'(ρ) ang
        f_t = sgn * p * s0 * dang                    # ∂θ
        if self.dimension == 3:
            if p != 0:
                raise UsageError("angular modes are disk-only")
            if total == 1:
                axis = alpha.index(1)
                return f_r * arr[:, axis] * inv_r
            s2, _ = self._profile_at(arr, 2)
            rpp = (s2 + s1) * inv_r**2              # R''(ρ)
            i = next(k for k, a in enumerate(alpha) if a > 0)
            j = next(k for k, a in enumerate(reversed(alpha)) if a > 0)
            j = len(alpha) - 1 - j
            xi, xj = arr[:, i], arr[:, j]
            delta = 1.0 if i == j else 0.0
            return (
                rpp * xi * xj * inv_r**2
                + (-s1 * inv_r) * (delta * inv_r - xi * xj * inv_r**3)
            )
        x, y = arr[:, 0], arr[:, 1]
        ct, st = x * inv_r, y * inv_r
        if total == 1:
            if alpha == (1, 0):
                return ct * f_r - st * inv_r * f_t
            return st * f_r + ct * inv_r * f_t
        s2, _ = self._profile_at(arr, 2)
        f_rr = (s2 + s1) * inv_r**2 * ang
        f_rt = sgn * p * (-s1 * inv_r) * dang
        f_tt = -(p**2) * s0 * ang
        if alpha == (2, 0):
            return (
                ct**2 * f_rr
                - 2.0 * st * ct * inv_r * f_rt
                + st**2 * inv_r**2 * f_tt
                + st**2 * inv_r * f_r
                + 2.0 * st * ct * inv_r**2 * f_t
            )
        if alpha == (0, 2):
            return (
                st**2 * f_rr
                + 2.0 * st * ct * inv_r * f_rt
                + ct**2 * inv_r**2 * f_tt
                + ct**2 * inv_r * f_r
                - 2.0 * st * ct * inv_r**2 * f_t
            )
        # mixed (1, 1)
        return (
            st * ct * f_rr
            + (ct**2 - st**2) * inv_r * f_rt
            - st * ct * inv_r**2 * f_tt
            - st * ct * inv_r * f_r
            - (ct**2 - st**2) * inv_r**2 * f_t
        )


# -- built-in families --------------------------------------------------------

def constant_field(value: float, n: int = 2) -> ScalarField:
    """The constant field on the ball in n variables."""
    if n == 2 or n == 3:
        return ModeField(n, 0, "cos", ExpProfile(0.0, scale=value), name=f"const{value}")
    return ScalarField(n, lambda pts: np.full(pts.shape[0], float(value)),
                       rule=lambda alpha, pts: np.full(pts.shape[0], float(value))
                       if _total(alpha) == 0 else np.zeros(pts.shape[0]),
                       exact_order=UNLIMITED, name=f"const{value}")


def monomial_field(alpha, coeff: float = 1.0) -> ScalarField:
    """``coeff * x^alpha`` with exact derivatives of every order."""
    alpha = tuple(int(a) for a in alpha)
    n = len(alpha)

    def evaluator(pts):
        out = np.full(pts.shape[0], float(coeff))
        for i, a in enumerate(alpha):
            if a:
                out *= pts[:, i] ** a
        return out

    def rule(beta, pts):
        scale = float(coeff)
        for a, b in zip(alpha, beta):
            if b > a:
                return np.zeros(pts.shape[0])
            scale *= math.perm(a, b)
        out = np.full(pts.shape[0], scale)
        for i, (a, b) in enumerate(zip(alpha, beta)):
            if a - b:
                out *= pts[:, i] ** (a - b)
        return out

    return ScalarField(n, evaluator, rule=rule, exact_order=UNLIMITED,
                       name=f"x^{alpha}")


def polynomial_field(terms: dict, n: int) -> ScalarField:
    """Polynomial from a {multi-index: coefficient} map."""
    if not terms:
        return constant_field(0.0, n)
    parts = [monomial_field(a, c) for a, c in sorted(terms.items())]
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def _holomorphic_rule(m: int, part: str):
    """Exact Cartesian derivatives of Re/Im z^m via falling factorials."""

    def rule(alpha, pts):
        a, b = alpha
        k = a + b
        if k > m:
            return np.zeros(pts.shape[0])
        z = pts[:, 0] + 1j * pts[:, 1]
        scale = (1j) ** b * math.perm(m, k)
        w = scale * z ** (m - k)
        return np.real(w) if part == "real" else np.imag(w)

    return rule


def harmonic_monomial(m: int, part: str = "real") -> ModeField:
    """Harmonic polynomial Re z^m or Im z^m on the disk."""
    if m < 0:
        raise UsageError(f"degree must be >= 0, got {m}")
    if part not in ("real", "imag"):
        raise UsageError(f"part must be 'real' or 'imag', got {part!r}")
    parity = "cos" if part == "real" else "sin"
    return ModeField(
        2, m, parity, ExpProfile(-float(m)),
        name=f"{'Re' if part == 'real' else 'Im'}z^{m}",
        cartesian_rule=_holomorphic_rule(m, part),
        cartesian_order=UNLIMITED,
    )


def build_counterexample(k: int) -> ModeField:
    """k-th member of the slow-mode family: |x| * cos((k+1)θ) in polar form.

    Degree-(k+1) angular oscillation over a linear radial profile.  Smooth
    away from the origin, continuous but not differentiable at it; the
    origin is flagged and Cartesian finite differences refuse to operate
    within 0.05 of it (the exact polar rule is used instead).
    """
    if k < 1:
        raise UsageError(f"family index must be >= 1, got {k}")
    return ModeField(
        2, k + 1, "cos", ExpProfile(-1.0),
        name=f"witness{k}",
        singularities=(np.zeros(2),),
        singular_radius=0.05,
        smoothness_note=(
            "continuous but not differentiable at the origin; exact polar "
            "rules hold away from it, Cartesian finite differences are "
            "refused within 0.05"
        ),
    )


def build_bump_cutoff(rho0: float = 0.5, rho1: float = 0.7, n: int = 2) -> ModeField:
    """Radial cutoff: 0 for |x| <= rho0, 1 for |x| >= rho1, smooth between."""
    if n not in (2, 3):
        raise UsageError("bump cutoff implemented for dimensions 2 and 3")
    return ModeField(
        n, 0, "cos", SmoothStepProfile(rho0, rho1),
        name=f"bump({rho0},{rho1})",
    )


# -- operators ----------------------------------------------------------------

def apply_partial(f: ScalarField, alpha) -> ScalarField:
    """The field D^alpha f (exact where f's rule reaches, FD beyond)."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != f.dimension or any(a < 0 for a in alpha):
        raise UsageError(f"bad multi-index {alpha} for dimension {f.dimension}")
    if _total(alpha) > MAX_DERIVATIVE_ORDER:
        raise UsageError(
            f"derivative order {_total(alpha)} exceeds maximum {MAX_DERIVATIVE_ORDER}"
        )
    if _total(alpha) == 0:
        return f

    rule = None
    order = 0
    if f._rule is not None and f.exact_order >= _total(alpha):
        order = f.exact_order - _total(alpha)

        def rule(beta, pts):
            gamma = tuple(a + b for a, b in zip(alpha, beta))
            return f.derivative_values(gamma, pts)

    return ScalarField(
        f.dimension,
        lambda pts: f.derivative_values(alpha, pts),
        rule=rule,
        exact_order=order,
        support=f.support,
        singularities=f.singularities,
        singular_radius=f.singular_radius,
        name=f"D{alpha}{f.name}",
    )


def _unit_alpha(n: int, axis: int) -> tuple[int, ...]:
    return tuple(1 if i == axis else 0 for i in range(n))


def apply_vector_field(f: ScalarField, field_spec: VectorFieldSpec) -> ScalarField:
    """First-order operator ``sum_j c_j(x) ∂_j f`` for a vector field spec.

    Mode fields dispatch to exact polar actions: the radial field acts on
    the profile, the disk rotation field acts on the angular factor, and
    rotations annihilate radial fields in any dimension.
    """
    if field_spec.dimension != f.dimension:
        raise UsageError("vector field and scalar field dimensions differ")

    terms = mode_terms(f)
    if (
        terms is not None
        and len(terms) > 1
        and field_spec.kind in ("radial", "rotation")
    ):
        out = apply_vector_field(terms[0], field_spec)
        for part in terms[1:]:
            out = out + apply_vector_field(part, field_spec)
        out.name = f"{field_spec.label()}[{f.name}]"
        return out

    if isinstance(f, ModeField):
        if field_spec.kind == "radial":
            return ModeField(
                f.dimension, f.mode, f.parity,
                DerivativeProfile(f.profile, 1, scale=-1.0),  # N = -d/dv
                name=f"N[{f.name}]",
                singularities=f.singularities, singular_radius=f.singular_radius,
            )
        if field_spec.kind == "rotation":
            if f.mode == 0:
                return ModeField(f.dimension, 0, "cos", ExpProfile(0.0, scale=0.0),
                                 name=f"T[{f.name}]")
            # n == 2, pair (1, 2): d/dθ; cos -> -p sin, sin -> +p cos
            parity = "sin" if f.parity == "cos" else "cos"
            scale = -float(f.mode) if f.parity == "cos" else float(f.mode)
            return ModeField(
                2, f.mode, parity, SumProfile((f.profile,), (scale,)),
                name=f"T[{f.name}]",
                singularities=f.singularities, singular_radius=f.singular_radius,
            )

    n = f.dimension
    if field_spec.kind == "radial":
        parts = [monomial_field(_unit_alpha(n, j)) * apply_partial(f, _unit_alpha(n, j))
                 for j in range(n)]
    elif field_spec.kind == "rotation":
        i, j = field_spec.pair  # 1-based: x_i ∂_j - x_j ∂_i
        parts = [
            monomial_field(_unit_alpha(n, i - 1)) * apply_partial(f, _unit_alpha(n, j - 1)),
            monomial_field(_unit_alpha(n, j - 1), coeff=-1.0) * apply_partial(f, _unit_alpha(n, i - 1)),
        ]
    else:
        def evaluator(pts, _f=f, _spec=field_spec):
            coeffs = _spec.coefficients(pts)
            out = np.zeros(pts.shape[0])
            for axis in range(n):
                out += coeffs[:, axis] * _f.derivative_values(_unit_alpha(n, axis), pts)
            return out

        return ScalarField(n, evaluator, support=f.support,
                           singularities=f.singularities,
                           singular_radius=f.singular_radius,
                           name=f"{field_spec.label()}[{f.name}]")

    out = parts[0]
    for p in parts[1:]:
        out = out + p
    out.name = f"{field_spec.label()}[{f.name}]"
    return out


def apply_tuple(f: ScalarField, indices, spanning_set=None) -> ScalarField:
    """Composition T_{j1} ∘ ... ∘ T_{jℓ} applied to f (innermost last index).

    ``indices`` is a tuple drawn from 1..m against the lexicographic
    tangential spanning set; the empty tuple is the identity.
    """
    sset = spanning_set if spanning_set is not None else spanning_set_for_ball(f.dimension)
    out = f
    for j in reversed(tuple(indices)):
        out = apply_vector_field(out, sset[j])
    return out


def laplacian(f: ScalarField) -> ScalarField:
    """The Laplacian of f, exact for mode fields and rule-bearing fields."""
    terms = mode_terms(f)
    if terms is not None and len(terms) > 1:
        out = laplacian(terms[0])
        for part in terms[1:]:
            out = out + laplacian(part)
        out.name = f"lap[{f.name}]"
        return out
    if isinstance(f, ModeField):
        # Δ(S·ang) has profile e^{2v} (S'' + (2-n) S' - p² S)
        core = SumProfile(
            (DerivativeProfile(f.profile, 2),
             DerivativeProfile(f.profile, 1),
             f.profile),
            (1.0, float(2 - f.dimension), -float(f.mode**2)),
        )
        return ModeField(
            f.dimension, f.mode, f.parity, ProductProfile(ExpProfile(2.0), core),
            name=f"lap[{f.name}]",
            singularities=f.singularities, singular_radius=f.singular_radius,
        )
    parts = []
    for axis in range(f.dimension):
        two = tuple(2 if i == axis else 0 for i in range(f.dimension))
        parts.append(apply_partial(f, two))
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    out.name = f"lap[{f.name}]"
    return out


def harmonicity_residual(f: ScalarField, points) -> float:
    """max |Δf| over the sample points."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        raise UsageError("harmonicity residual needs at least one sample point")
    vals = laplacian(f).evaluate(arr)
    return float(np.max(np.abs(np.atleast_1d(vals))))
