"""Root-finding on the multiplier curve lam -> Phi(y_lam).

y_lam is the global minimizer of J + lam*Phi. Along ]a, b[ the value
Phi(y_lam) is non-increasing, so a level r inside the window is found by
bracketing on the curve and bisecting. The minimizer at the root is the
constrained minimizer of J over Phi^-1(r), and (x, lam) is a saddle point
of the Lagrangian J(x) + lam*(Phi(x) - r).

Bracketing runs in t in ]0, 1[ (see :meth:`ParameterInterval.from_unit`) so
infinite endpoints need no special casing.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BracketFailure, Diverged, DualInapplicable, WindowViolation
from .extended import ExtReal, POS_INF
from .inner import (
    DEFAULT_OPTIONS,
    MinimizerRecord,
    SolverOptions,
    UniquenessReport,
    minimize,
    optimal_set,
    uniqueness_probe,
)
from .problem import ConstrainedProblem, Point, evaluate_saddle
from .window import DualWindow, FeasibilityWindow, compute_gamma_delta, compute_window

MONO_TOL = 1e-9
LAM_TOL = 1e-10
S_TOL = 1e-7
MAX_EXPANSIONS = 60


def default_r_tol(r: float) -> float:
    return 1e-8 * max(1.0, abs(r))


@dataclass(frozen=True)
class MultiplierCurve:
    samples: list[MinimizerRecord]
    interval: object
    warnings: list[str] = field(default_factory=list)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([s.lam for s in self.samples])

    @property
    def phis(self) -> np.ndarray:
        return np.array([s.phi_at_argmin for s in self.samples])

    @property
    def js(self) -> np.ndarray:
        return np.array([s.j_at_argmin for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])

    def rows(self) -> list[tuple[float, float, float, float]]:
        """(lambda, phi, j, m) per sample, the columns of curve.csv."""
        return [(s.lam, s.phi_at_argmin, s.j_at_argmin, s.value) for s in self.samples]


@dataclass(frozen=True)
class MonotonicityReport:
    violations: list[tuple[int, int]]
    strict_violations: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.strict_violations


@dataclass(frozen=True)
class SaddlePointResult:
    """Constrained minimizer and its multiplier.

    In a dual solve ``r`` is a level of J, ``lambda_hat`` is the multiplier of
    J in Phi + mu*J, and the residual is |J(x) - r|.
    """

    r: float
    lambda_hat: float
    x_hat: Point
    j_value: float
    phi_value: float
    constraint_residual: float
    saddle_residual: float
    bisection_steps: int
    bracket: tuple[float, float]
    record: MinimizerRecord
    dual: bool = False
    uniqueness: Optional[UniquenessReport] = None

    def to_json(self) -> dict:
        x = self.x_hat if isinstance(self.x_hat, str) else [float(v) for v in self.x_hat]
        out = {
            "r": self.r,
            "lambda_hat": self.lambda_hat,
            "x_hat": x,
            "j_value": self.j_value,
            "phi_value": self.phi_value,
            "constraint_residual": self.constraint_residual,
            "saddle_residual": self.saddle_residual,
            "bisection_steps": self.bisection_steps,
            "bracket": list(self.bracket),
            "dual": self.dual,
        }
        if self.uniqueness is not None:
            out["uniqueness"] = self.uniqueness.to_json()
        return out


@dataclass(frozen=True)
class LambdaSet:
    """Plateau [lam_min, lam_max] of multipliers whose minimizer lies on Phi^-1(r)."""

    r: float
    lam_min: float
    lam_max: float


@dataclass(frozen=True)
class LimitReport:
    limit: float
    raw_tail: float
    lambdas: list[float]
    phis: list[float]
    inf_M_phi: Optional[float]
    discrepancy: Optional[float]
    below_sup_phi: Optional[bool]

    def to_json(self) -> dict:
        return {
            "limit": self.limit,
            "raw_tail": self.raw_tail,
            "lambdas": self.lambdas,
            "phis": self.phis,
            "inf_M_phi": self.inf_M_phi,
            "discrepancy": self.discrepancy,
            "below_sup_phi": self.below_sup_phi,
        }


def default_lambda_grid(problem: ConstrainedProblem, n: int, margin: float = 0.01) -> np.ndarray:
    """n multipliers equally spaced in t-space, strictly inside ]a, b[."""
    ts = np.linspace(margin, 1.0 - margin, n) if n > 1 else np.array([0.5])
    return np.array([problem.interval.from_unit(float(t)) for t in ts])


def trace_curve(
    problem: ConstrainedProblem,
    lambda_grid: Sequence[float],
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    mono_tol: float = MONO_TOL,
    jobs: int = 1,
) -> MultiplierCurve:
    """One minimizer record per grid multiplier."""
    grid = [float(l) for l in lambda_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    for lam in grid:
        if not problem.interval.contains(lam):
            raise ValueError(f"lambda={lam!r} is outside {problem.interval}")
    solve = lambda lam: minimize(problem, lam, seed, opts)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            samples = list(pool.map(solve, grid))
    else:
        samples = [solve(lam) for lam in grid]
    curve = MultiplierCurve(samples, problem.interval)
    for s in samples:
        if s.status != "Converged":
            curve.warnings.append(f"lambda={s.lam!r}: inner solve {s.status}")
    report = verify_monotone(curve, problem, mono_tol)
    for i, j in report.violations:
        curve.warnings.append(
            f"Phi increases between lambda={grid[i]!r} and lambda={grid[j]!r}: "
            "uniqueness or compactness fails"
        )
    return curve


def verify_monotone(
    curve: MultiplierCurve,
    problem: Optional[ConstrainedProblem] = None,
    mono_tol: float = MONO_TOL,
    sep_tol: float = DEFAULT_OPTIONS.sep_tol,
) -> MonotonicityReport:
    """Adjacent pairs breaking Phi(y_{i+1}) <= Phi(y_i) (+ mono_tol), and pairs
    with distinct minimizers (distance > sep_tol) that fail to decrease strictly."""
    violations = []
    strict = []
    s = curve.samples
    for i in range(len(s) - 1):
        p0, p1 = s[i].phi_at_argmin, s[i + 1].phi_at_argmin
        if p1 > p0 + mono_tol:
            violations.append((i, i + 1))
            continue
        if _distance(problem, s[i].argmin, s[i + 1].argmin) > sep_tol and not p1 < p0:
            strict.append((i, i + 1))
    return MonotonicityReport(violations, strict)


def _distance(problem, x, y) -> float:
    if problem is not None:
        return problem.distance(x, y)
    if isinstance(x, str) or isinstance(y, str):
        return 0.0 if x == y else math.inf
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))


def _resolve_window(problem, window, seed, opts):
    if window is None:
        window = compute_window(problem, seed=seed, opts=opts)
    return window


def solve_level(
    problem: ConstrainedProblem,
    r: float,
    r_tol: Optional[float] = None,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    window: Union[FeasibilityWindow, DualWindow, None] = None,
    mono_tol: float = MONO_TOL,
    max_expansions: int = MAX_EXPANSIONS,
    probe_budget: int = 8,
    uniqueness_starts: int = 0,
) -> SaddlePointResult:
    """Minimize J over Phi^-1(r) by bisection on the multiplier curve.

    The returned ``x_hat`` is bit-for-bit ``minimize(problem, lambda_hat, seed).argmin``.
    Raises WindowViolation for r outside the window and BracketFailure when
    the curve cannot be bracketed or jumps over r. With ``uniqueness_starts``
    > 1 the result also carries a uniqueness probe at lambda_hat.
    """
    r = float(r)
    r_tol = default_r_tol(r) if r_tol is None else float(r_tol)
    window = _resolve_window(problem, window, seed, opts)
    if not window.contains(r):
        lo, hi = _window_bounds(window)
        raise WindowViolation(f"r={r!r} is outside the window ]{lo}, {hi}[")
    interval = problem.interval
    samples: list[tuple[float, float]] = []
    cache: dict[float, MinimizerRecord] = {}

    def at(t: float) -> MinimizerRecord:
        if t not in cache:
            lam = interval.from_unit(t)
            if not interval.contains(lam):
                raise BracketFailure(
                    f"bracket expansion reached the end of {interval} while seeking r={r!r}", samples
                )
            cache[t] = minimize(problem, lam, seed, opts)
            samples.append((lam, cache[t].phi_at_argmin))
        return cache[t]

    def done(rec: MinimizerRecord, t_lo: float, t_hi: float, steps: int) -> SaddlePointResult:
        result = _make_result(problem, r, rec, (interval.from_unit(t_lo), interval.from_unit(t_hi)), steps)
        s_res = verify_saddle(problem, result, probe_budget, seed)
        probe = None
        if uniqueness_starts > 1:
            probe = uniqueness_probe(problem, rec.lam, uniqueness_starts, seed, opts)
        return _with(result, saddle_residual=s_res, uniqueness=probe)

    # Bracket: anchor at t = 1/2, approach the far end geometrically.
    t_anchor = 0.5
    rec = at(t_anchor)
    if abs(rec.phi_at_argmin - r) <= r_tol:
        return done(rec, t_anchor, t_anchor, 0)
    if rec.phi_at_argmin > r:
        t_lo, t_hi = t_anchor, None
        for k in range(1, max_expansions + 1):
            t = 1.0 - 0.5 * 2.0 ** (-k)
            if t >= 1.0:
                break
            rec = at(t)
            if abs(rec.phi_at_argmin - r) <= r_tol:
                return done(rec, t_lo, t, 0)
            if rec.phi_at_argmin < r:
                t_hi = t
                break
            t_lo = t
    else:
        t_lo, t_hi = None, t_anchor
        for k in range(1, max_expansions + 1):
            t = 0.5 * 2.0 ** (-k)
            rec = at(t)
            if abs(rec.phi_at_argmin - r) <= r_tol:
                return done(rec, t, t_hi, 0)
            if rec.phi_at_argmin > r:
                t_lo = t
                break
            t_hi = t
    if t_lo is None or t_hi is None:
        raise BracketFailure(
            f"no bracket for r={r!r} after {max_expansions} expansions "
            "(window misestimate or hypothesis failure)",
            samples,
        )

    # Bisect until the residual is met or the bracket has no interior float:
    # only then is a miss evidence of a jump rather than of a coarse bracket.
    steps = 0
    while True:
        t_mid = 0.5 * (t_lo + t_hi)
        if t_mid <= t_lo or t_mid >= t_hi:
            break
        rec = at(t_mid)
        steps += 1
        phi_lo, phi_mid, phi_hi = at(t_lo).phi_at_argmin, rec.phi_at_argmin, at(t_hi).phi_at_argmin
        if not (phi_hi - mono_tol <= phi_mid <= phi_lo + mono_tol):
            raise BracketFailure(
                f"multiplier curve is not monotone near lambda={interval.from_unit(t_mid)!r}", samples
            )
        if abs(phi_mid - r) <= r_tol:
            return done(rec, t_lo, t_hi, steps)
        if phi_mid > r:
            t_lo = t_mid
        else:
            t_hi = t_mid
        # Bracket invariant.
        if not (at(t_lo).phi_at_argmin >= r - r_tol and at(t_hi).phi_at_argmin <= r + r_tol):
            raise BracketFailure("bracket invariant broken", samples)

    rec_lo, rec_hi = at(t_lo), at(t_hi)
    best = min((rec_lo, rec_hi), key=lambda rc: abs(rc.phi_at_argmin - r))
    if abs(best.phi_at_argmin - r) <= r_tol:
        return done(best, t_lo, t_hi, steps)
    raise BracketFailure(
        f"Phi(y_lambda) jumps over r={r!r} between lambda={interval.from_unit(t_lo)!r} "
        f"(Phi={rec_lo.phi_at_argmin!r}) and lambda={interval.from_unit(t_hi)!r} "
        f"(Phi={rec_hi.phi_at_argmin!r})",
        samples,
    )


def _window_bounds(window):
    if isinstance(window, DualWindow):
        return window.gamma.to_json(), window.delta.to_json()
    return window.alpha.to_json(), window.beta.to_json()


def _make_result(problem, r, rec: MinimizerRecord, bracket, steps, dual=False) -> SaddlePointResult:
    return SaddlePointResult(
        r=r,
        lambda_hat=rec.lam,
        x_hat=rec.argmin,
        j_value=rec.j_at_argmin,
        phi_value=rec.phi_at_argmin,
        constraint_residual=abs(rec.phi_at_argmin - r),
        saddle_residual=math.nan,
        bisection_steps=steps,
        bracket=bracket,
        record=rec,
        dual=dual,
    )


def _with(result: SaddlePointResult, **changes) -> SaddlePointResult:
    return replace(result, **changes)


def verify_saddle(
    problem: ConstrainedProblem, result: SaddlePointResult, probe_budget: int = 8, seed: int = 0
) -> float:
    """Gap on the inf side of the saddle identity.

    Returns max(f(x, lam) - inf_x f(., lam), 0) for the Lagrangian
    f(x, lam) = J(x) + lam*(Phi(x) - r), with the infimum from an independent
    multi-start solve (different seed, ``probe_budget`` starts). The sup side,
    lam -> lam*(Phi(x) - r) peaking at lambda_hat, holds iff the
    constraint residual vanishes.
    """
    lam, r = result.lambda_hat, result.r
    if result.dual:
        problem = problem.swap_roles()
    f_here = evaluate_saddle(problem, result.x_hat, lam, r)
    if problem.is_finite:
        m = min(
            evaluate_saddle(problem, p, lam, r) for p in problem.domain.labels
        )
    else:
        opts = DEFAULT_OPTIONS
        found = optimal_set(problem, lam, seed + 1, opts, k=probe_budget)
        m = min(evaluate_saddle(problem, p, lam, r) for p, _ in found)
        # The candidate itself also bounds the infimum from above.
        m = min(m, f_here)
    return max(f_here - m, 0.0)


def solve_level_dual(
    problem: ConstrainedProblem,
    r: float,
    r_tol: Optional[float] = None,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    window: Optional[DualWindow] = None,
    **kwargs,
) -> SaddlePointResult:
    """Minimize Phi over J^-1(r) by solving the swapped problem on ]1/b, 1/a[."""
    if problem.interval.a < ExtReal.of(0.0):
        raise DualInapplicable(f"dual solve needs a >= 0, got a={problem.interval.a.to_json()}")
    if window is None:
        window = compute_gamma_delta(problem, seed=seed, opts=opts)
    swapped = problem.swap_roles()
    res = solve_level(swapped, r, r_tol, seed, opts, window=window, **kwargs)
    return _with(
        res,
        j_value=res.phi_value,
        phi_value=res.j_value,
        dual=True,
    )


def lambda_set(
    problem: ConstrainedProblem,
    result: SaddlePointResult,
    r_tol: Optional[float] = None,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    lam_tol: float = LAM_TOL,
) -> LambdaSet:
    """Plateau of the curve at level r around lambda_hat: each edge is
    bracketed by stepping outward geometrically in t-space, then located by
    bisection on the predicate |Phi(y_lam) - r| <= r_tol."""
    r = result.r
    r_tol = default_r_tol(r) if r_tol is None else r_tol
    interval = problem.interval
    on = lambda t: abs(minimize(problem, interval.from_unit(t), seed, opts).phi_at_argmin - r) <= r_tol  # noqa: E731
    t_hat = interval.to_unit(result.lambda_hat)

    def edge(upward: bool) -> float:
        t_in, t_out = t_hat, t_hat
        for _ in range(MAX_EXPANSIONS):
            t_out = 1.0 - 0.5 * (1.0 - t_out) if upward else 0.5 * t_out
            if t_out in (0.0, 1.0) or not on(t_out):
                break
            t_in = t_out
        else:
            return interval.from_unit(t_in)
        if t_out in (0.0, 1.0):
            return interval.from_unit(t_in)
        while abs(t_out - t_in) > lam_tol:
            mid = 0.5 * (t_in + t_out)
            if mid in (t_in, t_out):
                break
            if on(mid):
                t_in = mid
            else:
                t_out = mid
        return interval.from_unit(t_in)

    return LambdaSet(r, edge(False), edge(True))


def _infimum_on_J_minima(problem: ConstrainedProblem, seed: int, opts: SolverOptions, budget: int):
    """inf of Phi over the set M of global minima of J (exact on tables)."""
    if problem.is_finite:
        d = problem.domain
        js = np.asarray(d.j_values)
        best = js.min()
        return float(min(p for j, p in zip(d.j_values, d.phi_values) if j == best))
    found = optimal_set(problem, 0.0, seed, opts, k=budget)
    return float(min(problem.Phi(p) for p, _ in found))


def limit_at_zero(
    problem: ConstrainedProblem,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
    lam0: Optional[float] = None,
    q: float = 0.5,
    steps: int = 20,
    probe_budget: int = 8,
) -> LimitReport:
    """Estimate lim_{lam -> 0+} Phi(y_lam) and compare it with inf_M Phi.

    Samples lam_k = lam0 * q**k and applies one step of Richardson
    extrapolation (first-order in lam) to the last two samples. If the two
    tail samples agree exactly the raw value is returned unchanged.
    """
    interval = problem.interval
    if not ExtReal.of(0.0) < interval.b:
        raise ValueError("limit at zero needs b > 0")
    if ExtReal.of(0.0) < interval.a:
        raise ValueError("limit at zero needs the interval to reach down to 0")
    if lam0 is None:
        lam0 = 1.0 if interval.b == POS_INF else min(1.0, 0.5 * interval.b.value)
    lams = [lam0 * q**k for k in range(steps)]
    phis = []
    for lam in lams:
        rec = minimize(problem, lam, seed, opts)
        phis.append(rec.phi_at_argmin)
    tail, prev = phis[-1], phis[-2]
    if tail == prev:
        limit = tail
    else:
        limit = (tail - q * prev) / (1.0 - q)
    try:
        inf_M = _infimum_on_J_minima(problem, seed, opts, probe_budget)
    except Diverged:
        inf_M = None
    try:
        w = compute_window(problem, probe_budget, seed, opts, check=False)
        below = ExtReal.of(limit) < w.sup_phi
    except Diverged:
        below = None
    return LimitReport(
        limit=float(limit),
        raw_tail=float(tail),
        lambdas=lams,
        phis=phis,
        inf_M_phi=inf_M,
        discrepancy=None if inf_M is None else abs(limit - inf_M),
        below_sup_phi=below,
    )
