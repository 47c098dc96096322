"""The nine acceptance criteria, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL ...`` line straight to the
terminal before asserting, so a plain ``pytest -v`` run shows the verdicts.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from vortexsheets import oracle
from vortexsheets.fourier import EvenSeries, strip_norm
from vortexsheets.functionals import SheetConfig, SheetState, closure_speed
from vortexsheets.linear import block, block_inverse, numerical_jacobian, reduced_base_matrix
from vortexsheets.quadrature import PVGrid, pv_mean
from vortexsheets.solver import newton_solve, spectral_diagnostics

EPS = (0.005, 0.01, 0.02)
CASES = [("co-rotating", 2), ("co-rotating", 3), ("co-rotating", 4), ("traveling", 2)]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


@pytest.fixture(scope="module")
def family(solutions):
    return {(mode, m, e): solutions.get(e, m=m, mode=mode) for mode, m in CASES for e in EPS}


def test_criterion_1_speed_anchors(report):
    t0 = time.perf_counter()
    worst = 0.0
    state = SheetState.trivial(16)
    for m in range(2, 6):
        for d in (1.5, 2.0, 4.0):
            sp = closure_speed(SheetConfig(m=m, d=d, N=16, Q=128), state).total
            worst = max(worst, abs(sp - (m - 1) / (2 * d * d)))
    for d in (1.5, 2.0, 4.0):
        sp = closure_speed(SheetConfig(mode="traveling", d=d, N=16, Q=128), state).total
        worst = max(worst, abs(sp - 1 / (2 * d)))
    anchor = closure_speed(SheetConfig(m=3, d=2.0, N=16, Q=128), state).total
    dt = time.perf_counter() - t0
    ok = worst <= 1e-13 and abs(anchor - 0.25) <= 1e-13 and dt < 1
    assert report(1, ok, f"max speed error {worst:.2e}, m=3 d=2 -> {anchor!r}, {dt:.2f}s")


def test_criterion_2_pv_identities(report):
    t0 = time.perf_counter()
    g = PVGrid(256)
    worst = 0.0
    for j in range(1, 9):
        for x in g.nodes[::8]:
            cot = pv_mean(lambda y: np.sin(x - y) / (4 * np.sin((x - y) / 2) ** 2) * np.cos(j * y), x, g)
            lap = pv_mean(lambda y: (np.cos(j * x) - np.cos(j * y)) / (4 * np.sin((x - y) / 2) ** 2), x, g)
            worst = max(worst, abs(cot - 0.5 * np.sin(j * x)), abs(lap - 0.5 * j * np.cos(j * x)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 1
    assert report(2, ok, f"max identity error {worst:.2e}, {dt:.2f}s")


def test_criterion_3_blocks_and_jacobian(report):
    t0 = time.perf_counter()
    exact = True
    for j in range(1, 65):
        b = block(j)
        exact &= b.exact == (Fraction(-j, 2), Fraction(1, 2), Fraction(2 - j, 2), Fraction(-1, 2))
        exact &= b.det == Fraction(j - 1, 2)
        if j > 1:
            inv = np.array([[-1, -1], [j - 2, -j]], float) / (j - 1)
            exact &= bool(np.max(np.abs(block_inverse(j) - inv)) <= 1e-15)
    worst = 0.0
    for mode, m in CASES:
        J = numerical_jacobian(SheetConfig(mode=mode, m=m, d=2.0, N=8, Q=64), SheetState.trivial(8))
        worst = max(worst, float(np.max(np.abs(J.entries - reduced_base_matrix(8)))))
    dt = time.perf_counter() - t0
    ok = exact and worst <= 1e-5 and dt < 10
    assert report(3, ok, f"blocks match={exact}, Jacobian error {worst:.2e}, {dt:.2f}s")


def test_criterion_4_nontrivial_equilibria(report):
    t0 = time.perf_counter()
    lines, ok = [], True
    for m in (2, 3, 4):
        for e in EPS:
            sol = newton_solve(SheetConfig(m=m, d=2.0, N=32, Q=256), e)
            h = sol.history
            quad = all(b <= 1e-2 * a or b <= sol.config.newton_tol for a, b in zip(h, h[1:]) if a < 1e-4)
            good = sol.residual_sup <= 1e-11 and strip_norm(sol.f) > 0 and quad
            ok &= good
            lines.append(f"m={m} eps={e}: {sol.newton_iters} it, res {sol.residual_sup:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    assert report(4, ok, f"{'; '.join(lines)}; {dt:.1f}s")


def test_criterion_5_linear_speed_law(report, family):
    ok, parts = True, []
    for mode, m in CASES:
        base = SheetConfig(mode=mode, m=m, d=2.0).base_speed
        s1 = abs(family[(mode, m, 0.01)].speed.total - base) / 0.01
        s2 = abs(family[(mode, m, 0.02)].speed.total - base) / 0.02
        rel = abs(s2 - s1) / s1
        ok &= rel <= 0.25
        parts.append(f"{mode} m={m}: {s1:.2e} -> {s2:.2e} (rel change {rel:.2f})")
    assert report(5, ok, "; ".join(parts))


def test_criterion_6_birkhoff_rott_oracle(report, family):
    worst_n = worst_t = 0.0
    for sol in family.values():
        rep = oracle.equilibrium_residual(sol, 1024)
        worst_n = max(worst_n, rep.normal_residual_sup)
        worst_t = max(worst_t, rep.tangential_constancy)
    sol = family[("co-rotating", 2, 0.01)]
    bumped = type(sol)(sol.config, sol.epsilon, sol.speed, sol.f + 1e-3 * EvenSeries.mode(2, sol.config.N),
                       sol.g, 0.0, 0.0, 0)
    perturbed = oracle.equilibrium_residual(bumped, 1024).normal_residual_sup
    ok = worst_n <= 1e-6 and worst_t <= 1e-6 and perturbed >= 1e2 * 1e-6
    assert report(6, ok, f"normal {worst_n:.2e}, tangential {worst_t:.2e}, perturbed {perturbed:.2e}")


def test_criterion_7_convexity(report, family):
    lo, dev = np.inf, 0.0
    for sol in family.values():
        k = oracle.curvature_values(sol.epsilon, sol.f.coeffs)
        lo = min(lo, k.min())
        dev = max(dev, float(np.max(np.abs(k - 1))))
    ok = lo > 0 and dev <= 0.1
    assert report(7, ok, f"min eps*kappa {lo:.6f}, max |eps*kappa - 1| {dev:.2e}")


def test_criterion_8_mirror_symmetry(report, family):
    worst = max(oracle.mirror_check(s) for s in family.values())
    tol = 10 * SheetConfig().newton_tol
    half = max(oracle.mirror_check(s, half_turn=True) for s in family.values())
    assert report(8, worst <= tol, f"residual at (-eps, f, g) {worst:.2e} vs {tol:.0e} "
                                   f"(half-turn reparametrized mirror {half:.2e})")


def test_criterion_9_resolution(report, solutions):
    dspeed = dcoef = tail = 0.0
    for mode, m in CASES:
        coarse = solutions.get(0.02, m=m, mode=mode)
        fine = solutions.get(0.02, m=m, mode=mode, N=64, Q=512)
        dspeed = max(dspeed, abs(fine.speed.total - coarse.speed.total))
        dcoef = max(dcoef, float(np.max(np.abs(fine.f.coeffs[:8] - coarse.f.coeffs[:8]))),
                    float(np.max(np.abs(fine.g.coeffs[:8] - coarse.g.coeffs[:8]))))
        tail = max(tail, spectral_diagnostics(coarse)[0], spectral_diagnostics(fine)[0])
    ok = dspeed <= 1e-9 and dcoef <= 1e-10 and tail < 1e-8
    assert report(9, ok, f"speed change {dspeed:.2e}, low modes {dcoef:.2e}, tail ratio {tail:.2e}")
