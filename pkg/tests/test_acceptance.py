"""Acceptance gates: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polybalance.cheb_core import ChebPoly, cheb_basis, signed_sum
from polybalance.discrepancy import (
    SOLVERS,
    default_beta,
    potential_bound,
    solve,
    solve_brute,
    solve_greedy_potential,
)
from polybalance.grids import extrema_grid, gauss_cheb_quadrature, roots_grid, sample_matrix
from polybalance.pipeline import balance_l2, balance_sup, random_instance, random_l2_instance
from polybalance.rudin_shapiro import flatness_report, l2_identity, lower_bound_check
from polybalance.sup_norm import certified_sup, dense_sup_estimate

DENSE = 100_000


@pytest.fixture
def report(request):
    term = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        if term is not None:
            term.write_line("")
            term.write_line(line)
        else:
            print(line)
        assert ok, line

    return emit


def test_criterion_1_certificate_soundness(report):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst, failures = 0.0, 0
    for _ in range(500):
        deg = int(rng.integers(1, 65))
        p = ChebPoly(rng.standard_normal(deg + 1))
        cert = certified_sup(p, deg, extrema_grid(deg, 9), dense_points=DENSE)
        failures += cert.dense_estimate > cert.certified_bound
        worst = max(worst, cert.dense_estimate / cert.certified_bound)
    elapsed = time.perf_counter() - start
    report(
        "1 certificate soundness",
        failures == 0 and elapsed < 30,
        f"500 polys, violations={failures}, max dense/certified={worst:.4f}, {elapsed:.1f}s (<30s)",
    )


def test_criterion_2_sqrt_n_headline(report):
    start = time.perf_counter()
    worst, fails, runs = 0.0, [], 0
    for n in (4, 8, 16, 32, 64):
        for seed in range(10):
            polys = random_instance(n, seed)
            for solver in SOLVERS:
                if solver == "brute" and n > 16:
                    continue
                res = balance_sup(polys, solver=solver, seed=seed)
                runs += 1
                const = res.certificate.certified_bound / math.sqrt(n)
                worst = max(worst, const)
                if not (res.certificate.certified_bound < 30 * math.sqrt(n)):
                    fails.append((n, seed, solver))
                if not res.certificate.dense_estimate <= res.certificate.certified_bound:
                    fails.append((n, seed, solver, "unsound"))
    elapsed = time.perf_counter() - start
    report(
        "2 certified bound < 30 sqrt(n)",
        not fails and elapsed < 120,
        f"{runs} runs, failures={fails[:3]}, max certified/sqrt(n)={worst:.3f}, {elapsed:.1f}s (<120s)",
    )


def test_criterion_3_quadrature(report):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    worst = 0.0
    for N in range(1, 65):
        for _ in range(5):
            deg = int(rng.integers(0, 2 * N))
            c = rng.standard_normal(deg + 1)
            exact = math.pi * c[0]
            err = abs(gauss_cheb_quadrature(ChebPoly(c), N) - exact) / abs(exact)
            worst = max(worst, err)
    sharp = max(abs(gauss_cheb_quadrature(cheb_basis(2 * N), N) + math.pi) for N in range(1, 65))
    elapsed = time.perf_counter() - start
    report(
        "3 quadrature exactness",
        worst <= 1e-10 and sharp <= 1e-10 and elapsed < 5,
        f"max rel err={worst:.2e} (<=1e-10), T_2N vs -pi err={sharp:.2e}, {elapsed:.2f}s (<5s)",
    )


def test_criterion_4_lower_bound(report):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    ratios = []
    for n in range(1, 11):
        ratios.append(lower_bound_check(n) / math.sqrt(n / 2))
    l2_err = 0.0
    for n in range(1, 17):
        for _ in range(50):
            signs = tuple(int(s) for s in rng.choice([-1, 1], n))
            l2_err = max(l2_err, abs(l2_identity(n, signs) - n / 2))
    elapsed = time.perf_counter() - start
    report(
        "4 sqrt(n/2) lower bound",
        min(ratios) >= 1 - 1e-6 and l2_err <= 1e-10 and elapsed < 60,
        f"min(min_sup/sqrt(n/2)) over n<=10={min(ratios):.4f}, l2 identity err={l2_err:.1e}, {elapsed:.1f}s (<60s)",
    )


def _unit_matrices():
    # sample matrices of random certified-unit instances, n <= 12
    for n in (2, 4, 6, 8, 10, 12):
        for seed in range(10):
            yield n, seed, sample_matrix(random_instance(n, seed), extrema_grid(n, 9))


def test_criterion_5_brute_dominance(report):
    bad = []
    count = 0
    for n, seed, mat in _unit_matrices():
        best = solve_brute(mat).discrepancy
        for solver in SOLVERS[1:]:
            count += 1
            if solve(mat, solver, seed=seed).discrepancy < best:
                bad.append((n, seed, solver))
    report("5 brute-force dominance", not bad, f"{count} comparisons over n<=12 x 10 seeds, violations={bad}")


def test_criterion_6_greedy_bound(report):
    worst, bad, count = 0.0, [], 0
    mats = [mat for _, _, mat in _unit_matrices()]
    for n in (16, 32, 64):
        for seed in range(10):
            mats.append(sample_matrix(random_instance(n, seed), extrema_grid(n, 9)))
    for n in (4, 8, 16):
        for seed in range(10):
            mats.append(sample_matrix(random_l2_instance(n, seed), roots_grid(9 * n, 9)).scaled(1 / math.sqrt(9 * n / math.pi)))
    for mat in mats:
        beta = default_beta(mat)
        disc = solve_greedy_potential(mat).discrepancy
        # rows have l-infinity norm <= 1, so the generic guarantee is at most the unit-row one
        unit = math.log(2 * mat.m) / beta + beta * mat.n / 2
        bound = min(potential_bound(mat, beta), unit)
        count += 1
        worst = max(worst, disc / bound)
        if disc > bound:
            bad.append((mat.n, mat.m))
    report("6 greedy potential bound", not bad, f"{count} instances, max disc/bound={worst:.3f}, violations={bad}")


def test_criterion_7_rudin_shapiro(report):
    start = time.perf_counter()
    ratios = {2**k: flatness_report(2**k).ratio for k in range(15)}
    elapsed = time.perf_counter() - start
    worst = max(ratios.values())
    report(
        "7 Rudin-Shapiro flatness",
        worst <= 6 and elapsed < 60,
        f"max circle_max/sqrt(n) over n=2^0..2^14 = {worst:.4f} (<=6), {elapsed:.2f}s (<60s)",
    )


_l2_log = []


@settings(max_examples=15, deadline=None, derandomize=True)
@given(n=st.sampled_from([4, 8, 16]), seed=st.integers(0, 2**32 - 1))
def _l2_property(n, seed):
    polys = random_l2_instance(n, seed)
    mat = sample_matrix(polys, roots_grid(9 * n, 9))
    target = math.sqrt(9 * n / math.pi)
    row_err = float(np.max(np.abs(mat.row_l2_norms / target - 1)))
    res = balance_l2(polys, seed=seed)
    q = signed_sum(polys, res.signs)
    sound = dense_sup_estimate(q, DENSE) <= res.certificate.certified_bound
    _l2_log.append((n, row_err, sound, res.measured_constant))
    assert row_err <= 1e-9 and sound


def test_criterion_8_l2_pipeline(report):
    _l2_log.clear()
    ok = True
    try:
        _l2_property()
    except AssertionError:
        ok = False
    for n in (4, 8, 16):
        res = balance_l2(random_l2_instance(n, 0))
        _l2_log.append((n, 0.0, res.certificate.dense_estimate <= res.certificate.certified_bound, res.measured_constant))
    per_n = {n: [c for m, _, _, c in _l2_log if m == n] for n in (4, 8, 16)}
    c_text = ", ".join(f"n={n}: C_hat mean {np.mean(v):.3f} max {np.max(v):.3f}" for n, v in per_n.items())
    ok = ok and all(s for _, _, s, _ in _l2_log)
    row_err = max(e for _, e, _, _ in _l2_log)
    report("8 L2 pipeline", ok, f"{len(_l2_log)} runs, max row-norm rel err={row_err:.1e}, {c_text}")


def _cli(argv, threads):
    env = dict(os.environ, OPENBLAS_NUM_THREADS=threads, OMP_NUM_THREADS=threads, MKL_NUM_THREADS=threads)
    subprocess.run([sys.executable, "-m", "polybalance.cli", *argv], env=env, check=True)


def test_criterion_9_determinism(report, tmp_path):
    commands = [
        ("gen", ["--n", "12", "--seed", "9"]),
        ("gen-l2", ["--n", "8", "--seed", "9", "--kind", "l2"]),
        ("rs", ["--n", "128"]),
        ("lower-bound", ["--n", "5"]),
    ]
    payloads = {}
    for threads, rep in (("1", "a"), ("1", "b"), ("4", "c")):
        inst, l2inst = tmp_path / f"i{rep}.json", tmp_path / f"l{rep}.json"
        runs = []
        for name, argv in commands:
            cmd = "gen" if name == "gen-l2" else name
            out = {"gen": inst, "gen-l2": l2inst}.get(name, tmp_path / f"{name}{rep}.json")
            _cli([cmd, *argv, "--out", str(out)], threads)
            runs.append(out)
        for solver in SOLVERS:
            out = tmp_path / f"bal-{solver}{rep}.json"
            _cli(["balance", "--in", str(inst), "--solver", solver, "--seed", "3", "--out", str(out)], threads)
            runs.append(out)
        out = tmp_path / f"l2{rep}.json"
        _cli(["balance-l2", "--in", str(l2inst), "--solver", "komlos", "--seed", "3", "--out", str(out)], threads)
        runs.append(out)
        payloads[rep] = [p.read_bytes() for p in runs]
    same_run = payloads["a"] == payloads["b"]
    same_threads = payloads["a"] == payloads["c"]
    json.loads(payloads["a"][-1])
    report(
        "9 determinism",
        same_run and same_threads,
        f"{len(payloads['a'])} payloads, rerun identical={same_run}, 1 vs 4 threads identical={same_threads}",
    )
