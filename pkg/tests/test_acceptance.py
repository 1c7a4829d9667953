"""Acceptance criteria 1-10, each at its stated tolerance.

Every check records a line through ``record``; the terminal summary prints
one PASS/FAIL line per criterion.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import CRITERIA
from saddlemin import bank
from saddlemin.errors import BracketFailure
from saddlemin.minimax import MinimaxInstance, brute_force_gap, is_counterexample, random_instances
from saddlemin.multiplier import (
    SaddlePointResult,
    default_lambda_grid,
    limit_at_zero,
    solve_level,
    solve_level_dual,
    trace_curve,
    verify_monotone,
)
from saddlemin.wellposed import continuity_scan, minimizing_sequences
from saddlemin.window import compute_gamma_delta, compute_window

R_TOL = 1e-8


def record(number: int, ok: bool, detail: str) -> None:
    CRITERIA.setdefault(number, []).append((bool(ok), detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_c1_closed_form_saddle():
    res = solve_level(bank.quad2d_c34(), 4.0, R_TOL)
    x = np.asarray(res.x_hat)
    ok = (
        abs(res.lambda_hat - 1.5) <= 1e-6
        and np.all(np.abs(x - [1.2, 1.6]) <= 1e-6)
        and abs(res.j_value - 9.0) <= 1e-6
        and res.constraint_residual <= 1e-8
    )
    record(1, ok, f"lambda={res.lambda_hat:.10g} x={x.tolist()} J={res.j_value:.10g} res={res.constraint_residual:.2e}")


def test_c2_windows():
    w1 = compute_window(bank.quad1d())
    w3 = compute_window(bank.finite3())
    got = [w1.alpha.to_json(), w1.beta.to_json(), w3.alpha.to_json(), w3.beta.to_json()]
    record(2, got == [0.0, 1.0, 0.0, 2.0], f"quad1d ]{got[0]},{got[1]}[ finite3 ]{got[2]},{got[3]}[")


@pytest.mark.parametrize("name", list(bank.BANK))
def test_c3_monotone_curves(name):
    p = bank.get(name)
    curve = trace_curve(p, default_lambda_grid(p, 100))
    rep = verify_monotone(curve, p, mono_tol=1e-9)
    ok = not rep.violations and not rep.strict_violations
    record(3, ok, f"{name}: {len(rep.violations)}+{len(rep.strict_violations)} violations")


def _quad1d_gap(nx: int, nl: int):
    inst = MinimaxInstance.from_problem(
        bank.quad1d(), 0.25, np.linspace(-2.0, 2.0, nx)[:, None], np.linspace(0.01, 100.0, nl)
    )
    return brute_force_gap(inst)


def test_c4_brute_force_values():
    rep = _quad1d_gap(4001, 2001)
    ok = abs(rep.sup_inf - 0.25) <= 2e-3 and abs(rep.inf_sup - 0.25) <= 2e-3
    record(4, ok, f"sup_inf={rep.sup_inf:.8g} inf_sup={rep.inf_sup:.8g}")


def test_c4_gap_halves_when_grids_double():
    coarse = _quad1d_gap(4001, 2001).gap
    fine = _quad1d_gap(8001, 4001).gap
    ratio = coarse / fine if fine > 0 else math.inf
    record(4, 0.8 * 2 <= ratio <= 1.2 * 2, f"gap {coarse:.4e} -> {fine:.4e}, ratio {ratio:.3f} (want 2 +-20%)")


def test_c4_random_finite_instances():
    worst = math.inf
    counterexamples = 0
    for _, rep in random_instances(500, seed=42):
        worst = min(worst, rep.gap)
        counterexamples += is_counterexample(rep)
    record(4, worst >= -1e-12 and counterexamples == 0, f"500 instances: min gap {worst:.3e}, {counterexamples} counterexamples")


def test_c5_dual_consistency():
    p = bank.quad2d_c34()
    res = solve_level_dual(p, 9.0, R_TOL)
    dw = compute_gamma_delta(p)
    x = np.asarray(res.x_hat)
    ok = (
        abs(res.phi_value - 4.0) <= 1e-6
        and np.all(np.abs(x - [1.2, 1.6]) <= 1e-6)
        and dw.gamma.to_json() == 0.0
        and dw.delta.to_json() == 25.0
    )
    record(5, ok, f"Phi={res.phi_value:.10g} x={x.tolist()} ]{dw.gamma.to_json()},{dw.delta.to_json()}[")


def test_c6_limit_at_zero():
    l1 = limit_at_zero(bank.quad1d()).limit
    l2 = limit_at_zero(bank.quad2d_c34()).limit
    tied = limit_at_zero(bank.finite3_tied())
    ok = abs(l1 - 1.0) <= 1e-4 and abs(l2 - 25.0) <= 1e-4 and tied.limit == tied.inf_M_phi
    record(6, ok, f"quad1d {l1:.10g}, quad2d {l2:.10g}, tied {tied.limit!r} vs inf_M {tied.inf_M_phi!r}")


def test_c7_wellposedness_pass():
    p = bank.quad2d_c34()
    res = solve_level(p, 4.0, R_TOL)
    rep = minimizing_sequences(p, res, trial_count=32)
    near_but_far = [
        (d, g) for t in rep.sequence_trials for d, g in zip(t.distances, t.gaps) if g <= 1e-7 and d > 1e-3
    ]
    ok = rep.verdict == "pass" and len(rep.sequence_trials) == 32 and not near_but_far
    record(7, ok, f"quad2d r=4: {rep.verdict}, {len(rep.sequence_trials)} trials, {len(near_but_far)} stray elements")


def test_c7_twin_minima_fail():
    p = bank.twin_minima()
    # One of the two minimizers of J on the ellipse Phi = 1.
    x_hat = np.array([0.0, 1.0])
    candidate = SaddlePointResult(1.0, math.nan, x_hat, p.J(x_hat), p.Phi(x_hat), 0.0, math.nan, 0, (0.0, 0.0), None)
    rep = minimizing_sequences(p, candidate, trial_count=32)
    ok = rep.verdict == "fail" and rep.uniqueness_on_levelset == "Suspect"
    record(7, ok, f"twin minima: {rep.verdict}/{rep.uniqueness_on_levelset}")


def test_c8_continuity():
    p = bank.quad2d_c34()
    s9 = continuity_scan(p, 9)
    s17 = continuity_scan(p, 17)
    ratio = s9.max_x_jump / s17.max_x_jump
    ok = 1.6 <= ratio <= 2.4 and s9.lambdas_non_increasing and s17.lambdas_non_increasing
    record(8, ok, f"max_x_jump {s9.max_x_jump:.4g} -> {s17.max_x_jump:.4g}, ratio {ratio:.3f}")


def test_c9_doublewell_surfacing():
    p = bank.doublewell1d()
    window = compute_window(p)
    outcomes = {"Unique": 0, "Suspect": 0, "BracketFailure": 0}
    bad = []
    for r in np.linspace(0.05, 0.95, 20):
        try:
            res = solve_level(p, float(r), R_TOL, window=window, uniqueness_starts=8)
        except BracketFailure:
            outcomes["BracketFailure"] += 1
            continue
        outcomes[res.uniqueness.verdict] += 1
        if res.constraint_residual > R_TOL:
            bad.append(float(r))
    record(9, not bad, f"{outcomes}, residual > r_tol at {bad}")


CLI_RUNS = [
    ["problems"],
    ["window", "--problem", "quad2d_c34"],
    ["dual-window", "--problem", "quad2d_c34"],
    ["curve", "--problem", "grid_variational", "--points", "100"],
    ["solve", "--problem", "quad2d_c34", "--r", "4", "--tol", "1e-8"],
    ["dual-solve", "--problem", "quad2d_c34", "--r", "9"],
    ["verify-minimax", "--problem", "quad1d", "--r", "0.25", "--x-grid", "-2:2:4001", "--lambda-grid", "0.01:100:2001"],
    ["wellposed", "--problem", "quad2d_c34", "--r", "4"],
    ["scan", "--problem", "quad2d_c34", "--points", "9"],
    ["limit-zero", "--problem", "quad1d"],
]


def _artifacts(out_dir):
    for argv in CLI_RUNS:
        subprocess.run(
            [sys.executable, "-m", "saddlemin", *argv, "--seed", "11", "--out", str(out_dir)]
            if argv[0] != "problems"
            else [sys.executable, "-m", "saddlemin", "problems", "--out", str(out_dir)],
            check=True, capture_output=True,
        )
    return {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}


def test_c10_determinism(tmp_path):
    first = _artifacts(tmp_path / "run1")
    second = _artifacts(tmp_path / "run2")
    differing = [name for name in first if first[name] != second.get(name)]
    ok = set(first) == set(second) and not differing and len(first) == len(CLI_RUNS) + 2
    record(10, ok, f"{len(first)} artifacts, differing: {differing}")
