"""Admissible constraint windows ]alpha, beta[ and their dual ]gamma, delta[.

    alpha = max(inf_X Phi, sup_{M_b} Phi)     beta = min(sup_X Phi, inf_{M_a} Phi)

where M_a, M_b are the global minimizer sets of J + a*Phi and J + b*Phi (empty
at an infinite endpoint), with sup of the empty set = -inf and inf = +inf.
Every bound carries a provenance tag: ``exact`` (table scan or empty-set
convention) or ``probed`` (multi-start estimate on a continuous domain).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import Diverged, DualInapplicable, WindowEmpty
from .extended import NEG_INF, POS_INF, ExtReal, ext_max, ext_min
from .inner import DEFAULT_OPTIONS, SolverOptions, fd_noise, multistart, optimal_set
from .problem import ConstrainedProblem, Point, gradient

Provenance = Literal["exact", "probed"]

MB_HAT_NOTE = (
    "for b = +inf the set hat-M_b is read as the set of global minima of Phi, "
    "i.e. Phi^-1(inf_X Phi)"
)


@dataclass(frozen=True)
class FeasibilityWindow:
    alpha: ExtReal
    beta: ExtReal
    inf_phi: ExtReal
    sup_phi: ExtReal
    sup_phi_on_Mb: ExtReal
    inf_phi_on_Ma: ExtReal
    endpoint_minima: Optional[tuple[list, list]] = None
    provenance: dict = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not self.alpha < self.beta

    def contains(self, r: float) -> bool:
        return self.alpha < ExtReal.of(r) < self.beta

    def to_json(self) -> dict:
        out = {
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "inf_phi": self.inf_phi.to_json(),
            "sup_phi": self.sup_phi.to_json(),
            "sup_phi_on_Mb": self.sup_phi_on_Mb.to_json(),
            "inf_phi_on_Ma": self.inf_phi_on_Ma.to_json(),
            "provenance": dict(self.provenance),
        }
        if self.endpoint_minima is not None:
            out["endpoint_minima"] = {
                "M_a": [_point_json(p) for p in self.endpoint_minima[0]],
                "M_b": [_point_json(p) for p in self.endpoint_minima[1]],
            }
        return out


@dataclass(frozen=True)
class DualWindow:
    gamma: ExtReal
    delta: ExtReal
    hatMa_used: bool
    hatMb_used: bool
    provenance: dict = field(default_factory=dict)
    note: str = ""

    @property
    def is_empty(self) -> bool:
        return not self.gamma < self.delta

    def contains(self, r: float) -> bool:
        return self.gamma < ExtReal.of(r) < self.delta

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "delta": self.delta.to_json(),
            "hatMa_used": self.hatMa_used,
            "hatMb_used": self.hatMb_used,
            "provenance": dict(self.provenance),
            "note": self.note,
        }


def _point_json(p: Point):
    return p if isinstance(p, str) else [float(v) for v in p]


def _extreme_phi(problem: ConstrainedProblem, sign: float, budget: int, seed: int, opts: SolverOptions):
    """inf_X Phi (sign=+1) or sup_X Phi (sign=-1) and its provenance tag."""
    if problem.is_finite:
        vals = problem.domain.phi_values
        return ExtReal.of(min(vals) if sign > 0 else max(vals)), "exact"
    Phi = problem.objectives.Phi

    def f(x):
        return sign * float(Phi(x))

    def grad(x):
        return sign * gradient(problem, "Phi", x)

    hess = None
    hp = problem.objectives.hessPhi
    if hp is not None and problem.objectives.smoothness_hint == "twice_differentiable":
        def hess(x):
            return sign * np.asarray(hp(x), float)

    try:
        noise = fd_noise(Phi) if problem.objectives.gradPhi is None else None
        results = multistart(f, grad, problem.domain, seed, opts, hess=hess, k=budget, noise=noise)
    except Diverged:
        return (NEG_INF if sign > 0 else POS_INF), "probed"
    best = min(r.value for r in results)
    return ExtReal.of(sign * best), "probed"


def _endpoint_minima(problem, endpoint: ExtReal, budget, seed, opts):
    if not endpoint.is_finite:
        return [], "exact"
    try:
        found = optimal_set(problem, endpoint.value, seed, opts, k=budget)
    except Diverged:
        # J + a*Phi unbounded below: no global minima at this endpoint.
        return [], "probed"
    return [p for p, _ in found], ("exact" if problem.is_finite else "probed")


def compute_window(
    problem: ConstrainedProblem,
    probe_budget: int = 8,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    check: bool = True,
) -> FeasibilityWindow:
    """Primal window ]alpha, beta[. Raises WindowEmpty if alpha >= beta and ``check``."""
    inf_phi, inf_tag = _extreme_phi(problem, +1.0, probe_budget, seed, opts)
    sup_phi, sup_tag = _extreme_phi(problem, -1.0, probe_budget, seed, opts)
    Ma, ma_tag = _endpoint_minima(problem, problem.interval.a, probe_budget, seed, opts)
    Mb, mb_tag = _endpoint_minima(problem, problem.interval.b, probe_budget, seed, opts)
    sup_on_Mb = ext_max(NEG_INF, *(problem.Phi(p) for p in Mb))
    inf_on_Ma = ext_min(POS_INF, *(problem.Phi(p) for p in Ma))
    alpha = ext_max(inf_phi, sup_on_Mb)
    beta = ext_min(sup_phi, inf_on_Ma)
    provenance = {
        "inf_phi": inf_tag,
        "sup_phi": sup_tag,
        "sup_phi_on_Mb": mb_tag,
        "inf_phi_on_Ma": ma_tag,
        "alpha": inf_tag if alpha == inf_phi else mb_tag,
        "beta": sup_tag if beta == sup_phi else ma_tag,
    }
    win = FeasibilityWindow(alpha, beta, inf_phi, sup_phi, sup_on_Mb, inf_on_Ma, (Ma, Mb), provenance)
    if check and win.is_empty:
        raise WindowEmpty(
            f"alpha={alpha.to_json()} >= beta={beta.to_json()} for {problem.name}: "
            "no admissible constraint level"
        )
    return win


def compute_gamma_delta(
    problem: ConstrainedProblem,
    probe_budget: int = 8,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    check: bool = True,
) -> DualWindow:
    """Dual window ]gamma, delta[ for minimizing Phi over J^-1(r); needs a >= 0.

    Computed as the primal window of the role-swapped problem on ]1/b, 1/a[:
    its right endpoint 1/a gives hat-M_a (empty when a = 0) and its left
    endpoint 1/b gives hat-M_b (the minima of Phi when b = +inf).
    """
    a = problem.interval.a
    if a < ExtReal.of(0.0):
        raise DualInapplicable(f"dual window needs a >= 0, got a={a.to_json()}")
    w = compute_window(problem.swap_roles(), probe_budget, seed, opts, check=False)
    b_infinite = problem.interval.b == POS_INF
    dual = DualWindow(
        gamma=w.alpha,
        delta=w.beta,
        hatMa_used=a.value > 0.0,
        hatMb_used=True,
        provenance={
            "gamma": w.provenance["alpha"],
            "delta": w.provenance["beta"],
            "inf_J": w.provenance["inf_phi"],
            "sup_J": w.provenance["sup_phi"],
        },
        note=MB_HAT_NOTE if b_infinite else "",
    )
    if check and dual.is_empty:
        raise WindowEmpty(
            f"gamma={dual.gamma.to_json()} >= delta={dual.delta.to_json()} for {problem.name}"
        )
    return dual
