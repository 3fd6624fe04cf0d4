"""Acceptance gate: the quantitative claims the package stands behind.

Each test covers one numbered criterion and prints a single summary line
``[PASS|FAIL] criterion N: <name>`` before asserting, so the run log reads as
a checklist.  Tolerances are pinned here on purpose — loosening them is a
behavior change, not a test fix.
"""

import math
import time

import numpy as np
import pytest

from bergman_lab import (
    FlowMap,
    apply_vector_field,
    build_bump_cutoff,
    build_counterexample,
    commutator_residual,
    disk_rule,
    ftc_residual,
    harmonic_kernel,
    harmonic_monomial,
    idempotence_residual,
    iterated_antiderivative_residual,
    kernel_decomposition_residual,
    laplace_split_residual,
    norm,
    polynomial_field,
    project_basis_disk,
    project_kernel,
    project_kernel_quadrature,
    project_via_analytic,
    prop_decompose,
    radial_field,
    rotation_field,
    self_adjointness_residual,
    sobolev_norm,
)
from bergman_lab.experiments import (
    ExperimentConfig,
    cmd_kernel_check,
    rows_to_csv,
    smoothing_family,
)
from bergman_lab.fields import ScalarField
from bergman_lab.quadrature import tangential_sobolev_norm


def _finish(num: int, name: str, failures: list):
    status = "PASS" if not failures else "FAIL"
    print(f"[{status}] criterion {num}: {name}")
    assert not failures, f"criterion {num} ({name}): " + " | ".join(failures[:8])


def _disk_pairs(rng, count, radius):
    r = radius * np.sqrt(rng.uniform(size=count))
    t = rng.uniform(0.0, 2.0 * math.pi, size=count)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def test_criterion_1_kernel_algebra():
    failures = []
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    xs, ys = _disk_pairs(rng, 10_000, 0.8), _disk_pairs(rng, 10_000, 0.8)
    abs_res = kernel_decomposition_residual(list(zip(xs, ys)))
    if abs_res >= 1e-12:
        failures.append(f"absolute split residual {abs_res:.3e} >= 1e-12")
    xs, ys = _disk_pairs(rng, 10_000, 0.95), _disk_pairs(rng, 10_000, 0.95)
    rel_res = kernel_decomposition_residual(list(zip(xs, ys)), relative=True)
    if rel_res >= 1e-9:
        failures.append(f"relative split residual {rel_res:.3e} >= 1e-9")
    sym = float(np.max(np.abs(harmonic_kernel(xs, ys) - harmonic_kernel(ys, xs))))
    if sym >= 1e-13:
        failures.append(f"symmetry gap {sym:.3e} >= 1e-13")
    elapsed = time.perf_counter() - t0
    if elapsed >= 5.0:
        failures.append(f"kernel algebra block took {elapsed:.2f}s >= 5s")
    _finish(1, "kernel algebra on 10^4 point pairs", failures)


def test_criterion_2_reproducing_property(disk, ball3):
    failures = []
    rng = np.random.default_rng(102)
    pts = np.vstack([np.zeros((1, 2)), _disk_pairs(rng, 12, 0.5)])
    fields = [harmonic_monomial(0)]
    fields += [harmonic_monomial(m, p) for m in range(1, 9)
               for p in ("real", "imag")]
    for h in fields:
        proj = project_kernel_quadrature(h, disk)
        gap = float(np.max(np.abs(proj(pts) - h.evaluate(pts))))
        if gap >= 1e-6:
            failures.append(f"{h.name}: quadrature projection gap {gap:.3e} >= 1e-6")
    harmonics3 = [
        polynomial_field({(1, 0, 0): 1.0}, 3),
        polynomial_field({(0, 1, 0): 2.0, (0, 0, 1): -1.0}, 3),
        polynomial_field({(2, 0, 0): 1.0, (0, 2, 0): -1.0}, 3),
        polynomial_field({(1, 1, 0): 1.0}, 3),
        polynomial_field({(0, 0, 0): 0.7}, 3),
    ]
    for h in harmonics3:
        gap = abs(project_kernel(h, np.zeros(3), ball3)
                  - float(h.evaluate(np.zeros((1, 3)))[0]))
        if gap >= 1e-8:
            failures.append(f"{h.name}: center mean-value gap {gap:.3e} >= 1e-8")
    _finish(2, "projection reproduces harmonic inputs", failures)


def test_criterion_3_counterexample_table(disk):
    failures = []
    T = rotation_field(1, 2, 2)
    growth = []
    constant_report = []
    for k in range(1, 17):
        f = build_counterexample(k)
        nf = norm(f, disk)
        if abs(nf - math.sqrt(math.pi) / 2.0) >= 1e-10:
            failures.append(f"k={k}: input norm {nf:.12f} off sqrt(pi)/2")
        mode_ref = math.sqrt(math.pi / (2.0 * k + 4.0))
        nh = norm(harmonic_monomial(k + 1), disk)
        if abs(nh - mode_ref) >= 1e-10:
            failures.append(f"k={k}: mode norm {nh:.12f} off sqrt(pi/(2k+4))")
        b = project_basis_disk(f, 64, disk)
        c = project_via_analytic(f, 64, disk)
        off = b.off_mode_norm({(k + 1, "real")})
        if off >= 1e-8:
            failures.append(f"k={k}: off-mode mass {off:.3e} >= 1e-8")
        coef_gap = max(abs(b.coefficient(m, p) - c.coefficient(m, p))
                       for m in range(65) for p in ("real", "imag"))
        recon = b.to_field()
        spots = np.array([[0.0, 0.0], [0.2, 0.35], [-0.4, 0.1], [0.3, -0.3]])
        proj = project_kernel_quadrature(f, disk)
        point_gap = float(np.max(np.abs(proj(spots) - recon.evaluate(spots))))
        if max(coef_gap, point_gap) >= 1e-8:
            failures.append(f"k={k}: projection routes disagree "
                            f"({coef_gap:.3e}, {point_gap:.3e})")
        pf_norm = norm(recon, disk)
        ratio = norm(apply_vector_field(recon, T), disk) / pf_norm
        if abs(ratio - (k + 1.0)) >= 1e-6:
            failures.append(f"k={k}: amplification {ratio:.9f} off k+1")
        growth.append((k + 1.0) * pf_norm)
        constant_report.append(
            (k, b.coefficient(k + 1, "real") / mode_ref, 4.0 * (k + 2.0) / (k + 4.0)))
    if not all(a < b for a, b in zip(growth, growth[1:])):
        failures.append("(k+1)*norm(P f_k) is not strictly increasing")
    k, measured, stated = constant_report[-1]
    print(f"    leading constant at k={k}: measured {measured:.6f}, "
          f"stated closed form gives {stated:.6f} (reported, not asserted)")
    _finish(3, "slow-mode family table, k = 1..16", failures)


def test_criterion_4_family_smoothing_bound(disk):
    failures = []
    ratios = {}
    for name, f in smoothing_family():
        pf = project_basis_disk(f.evaluate(disk.points), 64, disk).to_field()
        ratios[name] = (sobolev_norm(pf, disk, order=1).value
                        / tangential_sobolev_norm(f, disk, order=1).value)
    values = np.array(list(ratios.values()))
    if len(values) != 30:
        failures.append(f"family has {len(values)} members, expected 30")
    vmax, med = float(values.max()), float(np.median(values))
    if vmax > 2.0 * med:
        failures.append(f"max ratio {vmax:.4f} exceeds 2x median {med:.4f}")
    N = radial_field(2)
    fit = []
    for k in (4, 8, 16, 32):
        f = build_counterexample(k)
        pf = project_basis_disk(f.evaluate(disk.points), 64, disk).to_field()
        fit.append(sobolev_norm(pf, disk, order=1).value
                   / (norm(apply_vector_field(f, N), disk) + norm(f, disk)))
    slope = float(np.polyfit(np.log([4.0, 8.0, 16.0, 32.0]), np.log(fit), 1)[0])
    if abs(slope - 0.5) >= 0.1:
        failures.append(f"growth exponent {slope:.4f} outside 0.5 +/- 0.1")
    _finish(4, "smoothing ratios bounded over the 30-member family", failures)


def _collar_inputs():
    zeta = build_bump_cutoff()
    fields = [zeta]
    fields += [zeta * harmonic_monomial(m) for m in (1, 2, 3, 4, 5)]
    fields += [zeta * harmonic_monomial(m, "imag") for m in (1, 2, 3, 4)]
    return fields


def test_criterion_5_flow_identities(disk, ball3):
    failures = []
    for i, g in enumerate(_collar_inputs()):
        res = ftc_residual(g, disk)
        if res >= 1e-6:
            failures.append(f"input {i}: FTC residual {res:.3e} >= 1e-6")
        for k in (1, 2, 3):
            res = iterated_antiderivative_residual(g, k, disk)
            if res >= 1e-6:
                failures.append(f"input {i}, k={k}: iterated residual "
                                f"{res:.3e} >= 1e-6")
    rng = np.random.default_rng(105)
    for n, rule in ((2, disk), (3, ball3)):
        alphas = ([(a, t - a) for t in range(4) for a in range(t + 1)] if n == 2
                  else [(a, b, t - a - b) for t in range(3)
                        for a in range(t + 1) for b in range(t - a + 1)])
        for i in range(10):
            poly = polynomial_field(
                dict(zip(alphas, rng.uniform(-1, 1, size=len(alphas)))), n)
            res = laplace_split_residual(poly, n, rule)
            if res >= 1e-8:
                failures.append(f"n={n} poly {i}: elliptic split {res:.3e} >= 1e-8")
    flow = FlowMap(radial_field(2), integrator="rk4", step=1.0 / 512.0)
    pts = rng.uniform(-0.6, 0.6, size=(20, 2))
    worst = max(float(np.max(np.abs(flow(s, flow(t, pts)) - flow(s + t, pts))))
                for s, t in ((-0.25, -0.5), (-0.4, -0.1), (-0.5, -0.5)))
    if worst >= 1e-10:
        failures.append(f"flow group property gap {worst:.3e} >= 1e-10")
    _finish(5, "integrate-back identities and elliptic split", failures)


def test_criterion_6_tangential_decomposition(disk):
    failures = []
    zeta = build_bump_cutoff()
    diag = {k: {} for k in (1, 2, 3)}
    for k in (1, 2, 3):
        for m in (0, 5, 8, 16, 32, 64):
            res = prop_decompose(harmonic_monomial(m), k, zeta, disk)
            if res.residual >= 1e-6:
                failures.append(f"m={m}, k={k}: decomposition residual "
                                f"{res.residual:.3e} >= 1e-6")
            diag[k][m] = res.term_norms[(1,) * k] / res.weighted_input_norm
    for k in (1, 2, 3):
        ms = [8, 16, 32, 64]
        slope = float(np.polyfit(np.log(ms), np.log([diag[k][m] for m in ms]), 1)[0])
        print(f"    norm-diagnostic slope, k={k}: {slope:+.4f} (limit 0.1)")
        if abs(slope) > 0.1:
            failures.append(
                f"k={k}: norm-diagnostic slope {slope:+.4f} exceeds 0.1 — the "
                f"ratio's preasymptotic drift at this k only flattens for mode "
                f"degrees well beyond 64, so the stated bound is not reachable "
                f"on the stated grid")
    _finish(6, "tangential decomposition residuals and slope", failures)


def test_criterion_7_operator_properties(disk):
    failures = []
    zeta = build_bump_cutoff()
    smooth_inputs = [zeta * harmonic_monomial(m) for m in (1, 2, 3, 4, 5, 6)]
    smooth_inputs += [
        ScalarField(2, lambda pts: np.sin(3 * pts[:, 0]) *
                    (pts[:, 0] ** 2 + pts[:, 1] ** 2) ** 2, name="sin*r4"),
        ScalarField(2, lambda pts: np.exp(pts[:, 1]) * np.sin(pts[:, 0]),
                    name="exp*sin"),
        ScalarField(2, lambda pts: np.cos(2 * pts[:, 0]) * np.cos(pts[:, 1]),
                    name="cos*cos"),
        ScalarField(2, lambda pts: pts[:, 0] ** 3 - 3 * pts[:, 0] *
                    pts[:, 1] ** 2 + pts[:, 1], name="cubic"),
    ]
    for f in smooth_inputs:
        res = commutator_residual(f, rule=disk)
        if res >= 1e-8:
            failures.append(f"{f.name}: commutator residual {res:.3e} >= 1e-8")
    res = self_adjointness_residual(smooth_inputs[0], smooth_inputs[6], rule=disk)
    if res >= 1e-8:
        failures.append(f"self-adjointness gap {res:.3e} >= 1e-8")
    res = idempotence_residual(smooth_inputs[1], rule=disk)
    if res >= 1e-10:
        failures.append(f"idempotence drift {res:.3e} >= 1e-10")
    cfg = ExperimentConfig(seed=77)
    if rows_to_csv(cmd_kernel_check(cfg)) != rows_to_csv(cmd_kernel_check(cfg)):
        failures.append("kernel report not byte-identical across two runs")
    rule_a, rule_b = disk_rule(48, 96), disk_rule(48, 96)
    if (rule_a.points.tobytes() != rule_b.points.tobytes()
            or rule_a.weights.tobytes() != rule_b.weights.tobytes()):
        failures.append("quadrature nodes not byte-identical across two builds")
    _finish(7, "projection operator properties and determinism", failures)
