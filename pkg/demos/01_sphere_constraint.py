"""Minimize the squared distance to (3, 4) on circles |x|^2 = r.

The answer is known in closed form: x = (3, 4) * sqrt(r) / 5 with multiplier
5 / sqrt(r) - 1. We let the multiplier search find it and compare.
"""

import math

import numpy as np

from saddlemin import bank, compute_window, solve_level, solve_level_dual

problem = bank.quad2d_c34()
window = compute_window(problem)
print(f"levels reachable through an interior multiplier: ]{window.alpha.to_json()}, {window.beta.to_json()}[")

for r in (1.0, 4.0, 16.0):
    res = solve_level(problem, r, r_tol=1e-10, window=window)
    exact_x = np.array([3.0, 4.0]) * math.sqrt(r) / 5.0
    exact_lam = 5.0 / math.sqrt(r) - 1.0
    print(
        f"r={r:5}: lambda={res.lambda_hat:.9f} (exact {exact_lam:.9f})  "
        f"x={np.round(res.x_hat, 9)} (exact {exact_x})  bisection steps={res.bisection_steps}"
    )

# The same point solves the dual question: the smallest |x|^2 at distance^2 = 9 from (3, 4).
d = solve_level_dual(problem, 9.0, r_tol=1e-10)
print(f"dual: minimal |x|^2 on J = 9 is {d.phi_value:.9f} at {np.round(d.x_hat, 9)}")
