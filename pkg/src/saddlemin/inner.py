"""Global minimization of J + lam*Phi over the domain.

Finite domains are scanned exactly. Continuous domains use multi-start local
descent: damped Newton when the problem is twice differentiable (analytic or
finite-difference Hessian), projected gradient descent with backtracking
otherwise. Starts come from a scrambled Halton sequence seeded by the caller,
so every call is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np
from scipy.stats import qmc

from .errors import Diverged
from .problem import (
    EPS,
    ConstrainedProblem,
    FiniteSet,
    Point,
    family_gradient,
    family_hessian,
)

Status = Literal["Converged", "MaxIterations", "Stalled"]


@dataclass(frozen=True)
class SolverOptions:
    g_tol: float = 1e-10
    max_iter: int = 10_000
    k_starts: int = 4
    start_radius: float = 10.0
    divergence_bound: float = 1e8
    newton: bool = True
    sep_tol: float = 1e-6
    val_tol: float = 1e-9
    armijo: float = 1e-4


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class MinimizerRecord:
    lam: float
    argmin: Point
    value: float
    phi_at_argmin: float
    j_at_argmin: float
    iterations: int
    status: Status

    def to_json(self) -> dict:
        x = self.argmin if isinstance(self.argmin, str) else [float(v) for v in self.argmin]
        return {
            "lambda": self.lam,
            "argmin": x,
            "value": self.value,
            "phi": self.phi_at_argmin,
            "j": self.j_at_argmin,
            "iterations": self.iterations,
            "status": self.status,
        }


@dataclass(frozen=True)
class UniquenessReport:
    lam: float
    verdict: Literal["Unique", "Suspect"]
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lambda": self.lam,
            "verdict": self.verdict,
            "witnesses": [
                {"point": p if isinstance(p, str) else [float(v) for v in p], "value": v}
                for p, v in self.witnesses
            ],
        }


@dataclass(frozen=True)
class LocalResult:
    x: np.ndarray
    value: float
    iterations: int
    status: Status
    start_index: int


def start_points(domain, k: int, seed: int, radius: float) -> np.ndarray:
    """k deterministic starts: Halton points in the box, or in a ball around 0."""
    n = domain.dimension
    u = qmc.Halton(d=n, scramble=True, rng=np.random.default_rng(seed)).random(k)
    if domain.bounded:
        lo = np.asarray(domain.lower)
        hi = np.asarray(domain.upper)
        return lo + u * (hi - lo)
    z = 2.0 * u - 1.0
    # Map the cube onto the ball by rescaling each ray (inf-norm -> 2-norm).
    norms2 = np.linalg.norm(z, axis=1)
    normsinf = np.max(np.abs(z), axis=1)
    scale = np.divide(normsinf, norms2, out=np.zeros_like(norms2), where=norms2 > 0)
    return radius * z * scale[:, None]


def local_descent(
    f: Callable[[np.ndarray], float],
    grad: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    opts: SolverOptions,
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
    start_index: int = 0,
    noise: Optional[Callable[[np.ndarray], float]] = None,
) -> LocalResult:
    """Descend from x0 until the (projected) gradient norm is <= g_tol*(1+|f|),
    plus ``noise(x)`` when the gradient is only known to that accuracy.

    Raises Diverged as soon as an iterate leaves the ball of radius
    ``opts.divergence_bound``.
    """
    boxed = lower is not None
    x = np.clip(x0, lower, upper) if boxed else np.array(x0, dtype=float)
    fx = f(x)
    g = grad(x)
    t_prev = 1.0
    status: Status = "MaxIterations"
    it = 0
    use_newton = hess is not None and not boxed
    for it in range(1, opts.max_iter + 1):
        crit = np.linalg.norm(x - np.clip(x - g, lower, upper)) if boxed else np.linalg.norm(g)
        if crit <= opts.g_tol * (1.0 + abs(fx)) + (noise(x) if noise is not None else 0.0):
            status = "Converged"
            it -= 1
            break
        newton_step = False
        d = -g
        if use_newton:
            H = hess(x)
            try:
                np.linalg.cholesky(H)
                dn = np.linalg.solve(H, -g)
                if np.all(np.isfinite(dn)) and float(g @ dn) < 0.0:
                    d = dn
                    newton_step = True
            except np.linalg.LinAlgError:
                pass
        t = 1.0 if newton_step else min(2.0 * t_prev, 1e12)
        slack = 4.0 * EPS * abs(fx)
        band = 16.0 * EPS * (1.0 + abs(fx))
        gnorm = float(np.linalg.norm(g))
        accepted = False
        gn = None
        for _ in range(80):
            xn = x + t * d
            if boxed:
                xn = np.clip(xn, lower, upper)
            fn = f(xn)
            if math.isfinite(fn):
                if not boxed and not newton_step and abs(fn - fx) <= band:
                    # f is flat to rounding here; let the gradient decide.
                    gn = grad(xn)
                    if np.linalg.norm(gn) < gnorm:
                        accepted = True
                        break
                    gn = None
                elif fn <= fx + opts.armijo * float(g @ (xn - x)) + (slack if newton_step else 0.0):
                    accepted = True
                    break
            t *= 0.5
        if not accepted or np.array_equal(xn, x):
            status = "Stalled"
            break
        if not newton_step:
            t_prev = t
        x, fx = xn, fn
        if np.linalg.norm(x) > opts.divergence_bound:
            raise Diverged(f"iterate norm exceeded {opts.divergence_bound:g}")
        g = grad(x) if gn is None else gn
    if status == "Converged" and use_newton:
        x, fx = _polish(f, grad, hess, x, fx)
    return LocalResult(x, fx, it, status, start_index)


def _polish(f, grad, hess, x, fx, steps: int = 3):
    """A few extra full Newton steps, each kept only if it does not raise f."""
    for _ in range(steps):
        g = grad(x)
        try:
            xn = x + np.linalg.solve(hess(x), -g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(xn)) or np.array_equal(xn, x):
            break
        fn = f(xn)
        if not fn <= fx:
            break
        x, fx = xn, fn
    return x, fx


def fd_noise(*parts: Callable[[np.ndarray], float]) -> Callable[[np.ndarray], float]:
    """Rounding error of central differences: about eps^(2/3) times the size
    of the summed terms, with a safety factor."""
    scale = 16.0 * EPS ** (2.0 / 3.0)
    return lambda x: scale * (1.0 + sum(abs(float(p(x))) for p in parts))


def uses_fd(objectives) -> bool:
    return objectives.gradJ is None or objectives.gradPhi is None


def _family_callables(problem: ConstrainedProblem, lam: float):
    J = problem.objectives.J
    Phi = problem.objectives.Phi

    def f(x):
        return float(J(x)) + lam * float(Phi(x))

    def grad(x):
        return family_gradient(problem, x, lam)

    hess = None
    if problem.objectives.smoothness_hint == "twice_differentiable":
        def hess(x):
            return family_hessian(problem, x, lam)

    noise = fd_noise(J, lambda x: lam * Phi(x)) if uses_fd(problem.objectives) else None
    return f, grad, hess, noise


def multistart(
    f, grad, domain, seed: int, opts: SolverOptions, hess=None, k: Optional[int] = None, noise=None
) -> list[LocalResult]:
    """Run one local descent per start point; results in start order."""
    k = opts.k_starts if k is None else k
    starts = start_points(domain, k, seed, opts.start_radius)
    lower = np.asarray(domain.lower) if domain.bounded else None
    upper = np.asarray(domain.upper) if domain.bounded else None
    if not opts.newton:
        hess = None
    return [
        local_descent(f, grad, s, opts, hess=hess, lower=lower, upper=upper, start_index=i, noise=noise)
        for i, s in enumerate(starts)
    ]


def best_of(results: list[LocalResult]) -> LocalResult:
    """Lowest value; earliest start wins ties."""
    best = results[0]
    for res in results[1:]:
        if res.value < best.value:
            best = res
    return best


def _scan(problem: ConstrainedProblem, lam: float) -> tuple[int, np.ndarray]:
    d: FiniteSet = problem.domain
    values = np.asarray(d.j_values) + lam * np.asarray(d.phi_values)
    return int(np.argmin(values)), values


def minimize_at(
    problem: ConstrainedProblem, lam: float, seed: int = 0, opts: SolverOptions = DEFAULT_OPTIONS
) -> MinimizerRecord:
    """Like :func:`minimize` but without the interval check (endpoints, probes)."""
    lam = float(lam)
    if problem.is_finite:
        i, values = _scan(problem, lam)
        d = problem.domain
        return MinimizerRecord(
            lam, d.labels[i], float(values[i]), d.phi_values[i], d.j_values[i], 0, "Converged"
        )
    f, grad, hess, noise = _family_callables(problem, lam)
    try:
        results = multistart(f, grad, problem.domain, seed, opts, hess=hess, noise=noise)
    except Diverged as exc:
        raise Diverged(f"{exc} at lambda={lam!r}", lam=lam) from None
    best = best_of(results)
    x = best.x
    j = problem.J(x)
    phi = problem.Phi(x)
    return MinimizerRecord(lam, x, j + lam * phi, phi, j, best.iterations, best.status)


def minimize(
    problem: ConstrainedProblem, lam: float, seed: int = 0, opts: SolverOptions = DEFAULT_OPTIONS
) -> MinimizerRecord:
    """Global minimizer of J + lam*Phi for lam inside the open interval."""
    if not problem.interval.contains(lam):
        raise ValueError(f"lambda={lam!r} is outside {problem.interval}")
    return minimize_at(problem, lam, seed, opts)


def cluster(points: list, problem: ConstrainedProblem, sep_tol: float) -> list[int]:
    """Indices of cluster representatives (first member of each cluster)."""
    reps: list[int] = []
    for i, p in enumerate(points):
        if all(problem.distance(p, points[j]) > sep_tol for j in reps):
            reps.append(i)
    return reps


def optimal_set(
    problem: ConstrainedProblem, lam: float, seed: int, opts: SolverOptions, k: Optional[int] = None
) -> list[tuple[Point, float]]:
    """Distinct (point, value) pairs attaining the minimum of J + lam*Phi.

    Exact on finite domains; on continuous domains, the value-optimal local
    results clustered by ``opts.sep_tol``.
    """
    if problem.is_finite:
        _, values = _scan(problem, lam)
        best = values.min()
        tol = opts.val_tol * (1.0 + abs(best))
        return [
            (problem.domain.labels[i], float(values[i]))
            for i in range(len(values))
            if values[i] <= best + tol
        ]
    f, grad, hess, noise = _family_callables(problem, float(lam))
    results = multistart(f, grad, problem.domain, seed, opts, hess=hess, k=k, noise=noise)
    best = min(r.value for r in results)
    tol = opts.val_tol * (1.0 + abs(best))
    good = [r for r in results if r.value <= best + tol]
    reps = cluster([r.x for r in good], problem, opts.sep_tol)
    return [(good[i].x, good[i].value) for i in reps]


def uniqueness_probe(
    problem: ConstrainedProblem,
    lam: float,
    k_starts: int = 8,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> UniquenessReport:
    """Heuristic falsifier of "J + lam*Phi has a unique global minimum"."""
    if k_starts < 2:
        raise ValueError("uniqueness_probe needs k_starts >= 2")
    if not problem.interval.contains(lam):
        raise ValueError(f"lambda={lam!r} is outside {problem.interval}")
    try:
        found = optimal_set(problem, lam, seed, opts, k=k_starts)
    except Diverged as exc:
        raise Diverged(f"{exc} at lambda={lam!r}", lam=lam) from None
    if len(found) > 1:
        return UniquenessReport(float(lam), "Suspect", found)
    return UniquenessReport(float(lam), "Unique", found)
