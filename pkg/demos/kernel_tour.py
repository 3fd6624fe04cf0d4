"""Tour of the projection kernel: values, mean-value checks, three routes.

Run as ``python3 demos/kernel_tour.py``.  Everything prints next to the
closed-form value it should match, so the output reads as a small table of
evidence rather than a wall of numbers.
"""

import math

import numpy as np

from bergman_lab import (
    build_counterexample,
    disk_rule,
    harmonic_kernel,
    harmonic_monomial,
    kernel_decomposition_residual,
    project_basis_disk,
    project_kernel,
    project_via_analytic,
)


def center_values():
    print("== kernel at the center ==")
    for n in (2, 3):
        y = np.full(n, 0.4 / math.sqrt(n))
        val = float(harmonic_kernel(np.zeros(n), y, n))
        ref = 1.0 / math.pi if n == 2 else 3.0 / (4.0 * math.pi)
        print(f"  n={n}:  K(0, y) = {val:.12f}   expected {ref:.12f}   "
              f"gap {abs(val - ref):.2e}")


def analytic_split():
    print("== disk kernel vs its analytic part ==")
    rng = np.random.default_rng(7)
    r = 0.8 * np.sqrt(rng.uniform(size=500))
    th = rng.uniform(0, 2 * math.pi, size=500)
    xs = np.column_stack([r * np.cos(th), r * np.sin(th)])
    ys = xs[::-1].copy()
    res = kernel_decomposition_residual(list(zip(xs, ys)))
    print(f"  max |K - (2 Re K_analytic - 1/pi)| over 500 pairs: {res:.2e}")


def reproduce_harmonics():
    print("== the projection reproduces harmonic polynomials ==")
    rule = disk_rule(96, 192)
    x = np.array([0.3, -0.2])
    for m in (1, 2, 5):
        h = harmonic_monomial(m)
        val = project_kernel(h, x, rule)
        ref = float(h.evaluate(x))
        print(f"  Re z^{m}:  P h({x.tolist()}) = {val:+.10f}   "
              f"h = {ref:+.10f}   gap {abs(val - ref):.2e}")


def three_routes():
    print("== three routes to the same projection ==")
    rule = disk_rule(96, 192)
    f = build_counterexample(3)          # |x| cos(4 theta)
    b = project_basis_disk(f, 16, rule)
    c = project_via_analytic(f, 16, rule)
    x = np.array([0.25, 0.15])
    via_kernel = project_kernel(f, x, rule)
    via_basis = float(b.to_field().evaluate(x))
    via_analytic = float(c.to_field().evaluate(x))
    print(f"  kernel quadrature : {via_kernel:+.12f}")
    print(f"  orthonormal basis : {via_basis:+.12f}")
    print(f"  analytic route    : {via_analytic:+.12f}")
    coef_gap = max(abs(b.coefficient(m, p) - c.coefficient(m, p))
                   for m in range(17) for p in ("real", "imag"))
    print(f"  coefficient gap between basis and analytic routes: {coef_gap:.2e}")


if __name__ == "__main__":
    center_values()
    analytic_split()
    reproduce_harmonics()
    three_routes()
