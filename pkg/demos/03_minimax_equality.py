"""Compare sup-inf and inf-sup of the saddle function on a grid.

For J=(x-1)^2, Phi=x^2 and r=0.25 both equal 0.25. A finite table with a
level that no point attains shows a strict gap, and the hypothesis checks say why.
"""

import numpy as np

from saddlemin import MinimaxInstance, bank, verify_minimax

quad = bank.quad1d()
inst = MinimaxInstance.from_problem(quad, 0.25, np.linspace(-2, 2, 801)[:, None], np.linspace(0.01, 100, 401))
rep = verify_minimax(inst)
print(f"quad1d r=0.25: sup_inf={rep.sup_inf:.6f} inf_sup={rep.inf_sup:.6f} verdict={rep.verdict}")

table = bank.finite3()
inst = MinimaxInstance.from_problem(table, 1.5, None, np.linspace(-5, 5, 201))
rep = verify_minimax(inst)
print(f"finite3 r=1.5: sup_inf={rep.sup_inf:.6g} inf_sup={rep.inf_sup} verdict={rep.verdict}")
labels = {
    "connectedness in lambda": rep.hypothesis_i,
    "compactness": rep.hypothesis_ii,
    "low path through x": rep.hypothesis_iii,
}
for label, check in labels.items():
    print(f"  {label}: {'ok' if check.passed else 'fails'}  {check.note}")
