"""Trace lambda -> Phi(y_lambda) on the discretized variational problem.

Phi of the unconstrained minimizer never increases with lambda; the trace is
written to CSV so it can be plotted with any tool.
"""

from pathlib import Path

from saddlemin import bank, trace_curve, verify_monotone
from saddlemin.multiplier import default_lambda_grid
from saddlemin.serialize import CURVE_HEADER, write_csv

problem = bank.grid_variational()
grid = default_lambda_grid(problem, 40)
curve = trace_curve(problem, grid, seed=0)
report = verify_monotone(curve, problem)

print(f"{'lambda':>12} {'Phi':>12} {'J':>12}")
for s in curve.samples[::5]:
    print(f"{s.lam:12.5g} {s.phi_at_argmin:12.6g} {s.j_at_argmin:12.6g}")
print(f"monotonicity violations: {len(report.violations)}, strict-decrease violations: {len(report.strict_violations)}")

out = write_csv(Path("demo_out") / "curve.csv", CURVE_HEADER, curve.rows())
print(f"wrote {out}")
