"""The ten release criteria, one test each.

Every test records a one-line verdict that is printed in the terminal
summary, whether it passes or not.
"""

import math
import time

import numpy as np
import pytest

from conftest import NINE, P_ZERO, record_verdict
from isorec import (Box, DistinctReal, FoolingFunction, G_eval, build_xi_star, delta_threshold, exact_error, ext1, ext2,
                    t_zero, upper_bound, verify_fooling_class)
from isorec.cli import main
from isorec.covering import auto_resolution
from isorec.oracle import antiderivative_quadrature, l1_best_approx, sign_pattern_check

SQUARE = Box((0.0, 0.0), (1.0, 1.0))
# boundary-layer ratio used for the node-set criteria
THETA = 0.65
D2, D2M1, D2P1 = P_ZERO
NAMES = {D2: "D^2", D2M1: "D^2-1", D2P1: "D^2+1"}


def verdict(number: int, ok: bool, detail: str) -> None:
    record_verdict(number, ok, detail)
    assert ok, detail


@pytest.fixture(scope="module")
def xi_star():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = build_xi_star(SQUARE, n, theta=THETA, seed=0)
        return cache[n]
    return get


def test_criterion_01_kernel_vs_quadrature():
    start = time.perf_counter()
    worst = 0.0
    for op in NINE:
        top = min(delta_threshold(op), 10.0)
        ts = top * (np.arange(1, 1001) / 1001)
        G = G_eval(op, ts)
        worst = max(worst, float(np.max(np.abs(G - antiderivative_quadrature(op, ts)) / np.maximum(1.0, G))))
    secs = time.perf_counter() - start
    verdict(1, worst <= 1e-10 and secs < 10, f"max scaled |G - quad| = {worst:.2e}, {secs:.1f} s")


def test_criterion_02_l1_oracle():
    start = time.perf_counter()
    worst, signs = 0.0, True
    for op in NINE:
        for a in (0.1, 0.5, 0.9 * min(delta_threshold(op), 2.0)):
            approx = l1_best_approx(op, a)
            worst = max(worst, abs(approx.value - ext2(op, a)))
            signs = signs and sign_pattern_check(op, a, approx.c0)
    secs = time.perf_counter() - start
    verdict(2, worst <= 1e-6 and signs and secs < 30,
            f"max |l1 - ext2| = {worst:.2e}, sign patterns {'ok' if signs else 'BROKEN'}, {secs:.1f} s")


def test_criterion_03_d2_constants():
    worst = 0.0
    worst_t0 = 0.0
    for a in (1e-3, 0.1, 0.5, 1.0, 2.0, 7.5):
        worst = max(worst, abs(ext1(D2, a) - a * a / 2), abs(ext2(D2, a) - a * a / 4))
        worst_t0 = max(worst_t0, abs(t_zero(D2, a) - a / 2))
    verdict(3, worst <= 1e-12 and worst_t0 <= 1e-14, f"ext error {worst:.1e}, t0 error {worst_t0:.1e}")


def test_criterion_04_d2_minus_beta2_closed_form():
    worst = 0.0
    for b in (0.5, 1.0, 2.0):
        for a in (0.3, 1.0):
            c = math.cosh(b * a)
            closed = (1 + c - math.sqrt(c * c + 3)) / b**2
            worst = max(worst, abs(ext2(DistinctReal(-b, b), a) - closed))
    verdict(4, worst <= 1e-10, f"max |ext2 - closed form| = {worst:.1e}")


def test_criterion_05_small_a_universality():
    a = 1e-3
    worst = max(abs(ext2(op, a) / (a * a / 4) - 1) for op in NINE)
    verdict(5, worst <= 0.01, f"max |ext2/(a^2/4) - 1| = {worst:.1e}")


def test_criterion_06_fooling_membership():
    start = time.perf_counter()
    lines, ok = [], True
    for op in P_ZERO:
        a = 0.8 * min(delta_threshold(op), 1.5)
        f0 = abs(op.q * ext2(op, a))
        for d in (2, 3):
            f = FoolingFunction(tuple(np.zeros(d)), a, op)
            chk = verify_fooling_class(f, n_points=200, n_dirs=10, step=a / 400, seed=d)
            good = chk.max_residual <= 1 + 1e-3 and f0 <= 1
            ok = ok and good
            lines.append(f"{NAMES[op]} d={d}: {chk.max_residual:.4f}")
    secs = time.perf_counter() - start
    verdict(6, ok and secs < 60, f"max residuals {'; '.join(lines)}, {secs:.1f} s")


def test_criterion_07_exactness_sandwich(xi_star):
    lines, ok = [], True
    for n in (64, 256):
        nodes = xi_star(n).nodes
        res = auto_resolution(SQUARE, n)
        for op in P_ZERO:
            rep = exact_error(op, SQUARE, nodes, res)
            rel = (rep.upper - rep.lower) / rep.upper
            good = rep.lower <= rep.upper and rep.boundary_condition_ok and rel <= 0.02
            ok = ok and good
            lines.append(f"n={n} {NAMES[op]}: gap {100 * rel:.2f}%{'' if rep.boundary_condition_ok else ' (condition fails)'}")
    verdict(7, ok, "; ".join(lines))


def test_criterion_08_node_quality(xi_star):
    lines, ok, shares = [], True, []
    for n in (64, 256, 1024):
        rep = xi_star(n)
        ref = math.sqrt(1 / (math.pi * n))
        ratio = rep.e_omega.value / ref
        ok = ok and 0.98 <= ratio and rep.e_omega.upper <= 1.5 * ref
        shares.append(rep.k_n / n)
        lines.append(f"n={n}: e/ref={ratio:.3f}, k/n={rep.k_n / n:.3f}")
    decreasing = all(b < a for a, b in zip(shares, shares[1:]))
    verdict(8, ok and decreasing, "; ".join(lines))


def test_criterion_09_asymptotic_constant(xi_star):
    start = time.perf_counter()
    n = 1024
    nodes = xi_star(n).nodes
    res = auto_resolution(SQUARE, n)
    target = 1 / (2 * math.sqrt(27))
    lines, ok = [], True
    for op in P_ZERO:
        value = upper_bound(op, SQUARE, nodes, res).upper * n / target
        ok = ok and 0.8 <= value <= 1.25
        lines.append(f"{NAMES[op]}: {value:.3f}")
    secs = time.perf_counter() - start
    verdict(9, ok and secs < 300, f"upper*n / (1/(2 sqrt 27)) {'; '.join(lines)}")


def test_criterion_10_determinism_and_verify(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        assert main(["kernel", "--q", "-1", "--steps", "50", "--out", str(d)]) == 0
        assert main(["nodes", "--n", "64", "--theta", str(THETA), "--out", str(d)]) == 0
        assert main(["error", "--nodes", str(d / "nodes.csv"), "--q", "1", "--out", str(d)]) == 0
    names = ["kernel.csv", "kernel.json", "nodes.csv", "nodes.json", "error.csv", "error.json"]
    same = all((dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes() for f in names)
    code = main(["verify", "--out", str(tmp_path / "v")])
    capsys.readouterr()
    verdict(10, same and code == 0, f"outputs identical: {same}, verify exit code {code}")
