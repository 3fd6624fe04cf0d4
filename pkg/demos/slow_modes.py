"""The slow-mode family: projection does not gain tangential derivatives.

Each member f_k = |x| cos((k+1) theta) has the same norm, yet its projection
P f_k picks up a tangential amplification factor of exactly k+1.  The table
below is the numerical version of that statement: every column matches its
closed form, and the last two columns grow without bound while the input
norms stay put.

Run as ``python3 demos/slow_modes.py``.
"""

import math

from bergman_lab import (
    apply_vector_field,
    build_counterexample,
    disk_rule,
    norm,
    project_basis_disk,
    rotation_field,
    sobolev_norm,
)

RULE = disk_rule(96, 192)
T = rotation_field(1, 2, 2)


def family_table(ks):
    print(f"  {'k':>3} {'norm f_k':>12} {'coef on Re z^(k+1)':>20} "
          f"{'constant':>10} {'|T P f|/|P f|':>14}")
    ref_norm = math.sqrt(math.pi) / 2.0
    for k in ks:
        f = build_counterexample(k)
        exp = project_basis_disk(f, max(20, k + 4), RULE)
        mode_norm = math.sqrt(math.pi / (2.0 * k + 4.0))
        coef = exp.coefficient(k + 1, "real")
        pf = exp.to_field()
        ratio = norm(apply_vector_field(pf, T), RULE) / norm(pf, RULE)
        print(f"  {k:>3} {norm(f, RULE):>12.9f} {coef:>20.12f} "
              f"{coef / mode_norm:>10.6f} {ratio:>14.9f}")
    print(f"  every norm should equal sqrt(pi)/2 = {ref_norm:.9f}; "
          f"the last column should equal k+1 exactly")


def growth():
    print("== unbounded growth of the derivative ratio ==")
    prev = 0.0
    for k in (1, 2, 4, 8, 16, 32):
        f = build_counterexample(k)
        pf = project_basis_disk(f, k + 4, RULE).to_field()
        h1 = sobolev_norm(pf, RULE, order=1).value
        tagged = (k + 1) * norm(pf, RULE)
        mark = "increasing" if tagged > prev else "NOT increasing"
        prev = tagged
        print(f"  k={k:>2}:  H1 norm of P f_k = {h1:9.5f},  "
              f"(k+1)*norm = {tagged:9.5f}  ({mark})")


if __name__ == "__main__":
    print("== the slow-mode table ==")
    family_table(range(1, 9))
    growth()
