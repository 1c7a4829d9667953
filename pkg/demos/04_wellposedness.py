"""Feasible minimizing sequences: one problem where they all converge, one where they split.

On the circle problem every sequence whose J approaches the minimum also
approaches the minimizer. J=|x|^2 on the ellipse x1^2/4 + x2^2 = 1 has two
minimizers (0, 1) and (0, -1), so sequences can approach the wrong one.
"""

import math

import numpy as np

from saddlemin import bank, continuity_scan, minimizing_sequences, solve_level
from saddlemin.multiplier import SaddlePointResult

circle = bank.quad2d_c34()
res = solve_level(circle, 4.0, r_tol=1e-8)
rep = minimizing_sequences(circle, res, trial_count=16)
worst = max(t.final_distance for t in rep.sequence_trials)
print(f"circle: verdict={rep.verdict}, uniqueness={rep.uniqueness_on_levelset}, worst final distance {worst:.2e}")

twin = bank.twin_minima()
x_hat = np.array([0.0, 1.0])
guess = SaddlePointResult(1.0, math.nan, x_hat, twin.J(x_hat), twin.Phi(x_hat), 0.0, math.nan, 0, (0.0, 0.0), None)
rep = minimizing_sequences(twin, guess, trial_count=16)
far = [t.final_point for t in rep.sequence_trials if t.final_distance > 1e-3]
print(f"ellipse: verdict={rep.verdict}, uniqueness={rep.uniqueness_on_levelset}; {len(far)} trials ended elsewhere, e.g. {np.round(far[0], 6) if far else '-'}")

scan = continuity_scan(circle, 9)
print("r -> x_hat on the circle problem:")
for r, x in zip(scan.r_grid, scan.x_hats):
    print(f"  r={r:7.4f}  x={np.round(x, 6)}")
print(f"largest jump between neighbours: {scan.max_x_jump:.4f}")
