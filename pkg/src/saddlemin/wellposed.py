"""Falsification diagnostics for well-posedness of min J over Phi^-1(r).

Well-posed means: J restricted to the level set has a unique minimizer x_hat
and every minimizing sequence in the level set converges to it. Neither part
can be proven from finitely many trials; these routines look for
counterexamples under a budget.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import RetractionFailure
from .inner import DEFAULT_OPTIONS, SolverOptions, cluster, fd_noise, minimize, multistart
from .multiplier import SaddlePointResult, default_r_tol, solve_level
from .problem import ConstrainedProblem, Point, gradient
from .window import compute_window

SEQ_EPS = 1e-7
SEQ_DELTA = 1e-3


@dataclass(frozen=True)
class SequenceTrial:
    label: str
    final_distance: float
    final_gap: float
    distances: list[float] = field(repr=False, default_factory=list)
    gaps: list[float] = field(repr=False, default_factory=list)
    final_point: Optional[np.ndarray] = field(repr=False, default=None)


@dataclass(frozen=True)
class WellPosednessReport:
    r: float
    x_hat: Point
    sequence_trials: list[SequenceTrial]
    uniqueness_on_levelset: Literal["Unique", "Suspect"]
    verdict: Literal["pass", "fail"]
    seq_eps: float = SEQ_EPS
    seq_delta: float = SEQ_DELTA
    note: str = ""

    def to_json(self) -> dict:
        x = self.x_hat if isinstance(self.x_hat, str) else [float(v) for v in self.x_hat]
        return {
            "r": self.r,
            "x_hat": x,
            "sequence_trials": [
                {"label": t.label, "final_distance": t.final_distance, "final_gap": t.final_gap}
                for t in self.sequence_trials
            ],
            "uniqueness_on_levelset": self.uniqueness_on_levelset,
            "verdict": self.verdict,
            "seq_eps": self.seq_eps,
            "seq_delta": self.seq_delta,
            "note": self.note,
        }


@dataclass(frozen=True)
class ContinuityScan:
    r_grid: list[float]
    x_hats: list[Point]
    j_values: list[float]
    max_x_jump: float
    max_j_jump: float
    lambda_hats: list[float]
    results: list[SaddlePointResult] = field(repr=False, default_factory=list)

    @property
    def lambdas_non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.lambda_hats, self.lambda_hats[1:]))

    def rows(self) -> list[list[float]]:
        """r, lambda_hat, x_hat components..., j_value per scanned level."""
        out = []
        for r, lam, x, j in zip(self.r_grid, self.lambda_hats, self.x_hats, self.j_values):
            xs = [x] if isinstance(x, str) else [float(v) for v in x]
            out.append([r, lam, *xs, j])
        return out

    def to_json(self) -> dict:
        return {
            "r_grid": self.r_grid,
            "lambda_hats": self.lambda_hats,
            "x_hats": [x if isinstance(x, str) else [float(v) for v in x] for x in self.x_hats],
            "j_values": self.j_values,
            "max_x_jump": self.max_x_jump,
            "max_j_jump": self.max_j_jump,
            "lambdas_non_increasing": self.lambdas_non_increasing,
        }


@dataclass(frozen=True)
class PlateauReport:
    passed: bool
    argmins: list
    note: str = ""


class LevelSetRetraction:
    """Maps points onto Phi^-1(r).

    Uses exact radial scaling x * sqrt(r / Phi(x)) when a three-point probe
    shows Phi(t*x) == t^2 * Phi(x); otherwise a safeguarded Newton solve of
    Phi(anchor + s*(x - anchor)) = r for s > 0, where the anchor is a global
    minimizer of Phi.
    """

    def __init__(self, problem: ConstrainedProblem, r: float, seed: int = 0,
                 opts: SolverOptions = DEFAULT_OPTIONS, r_tol: Optional[float] = None):
        self.problem = problem
        self.r = float(r)
        self.r_tol = default_r_tol(r) if r_tol is None else r_tol
        n = problem.domain.dimension
        probe = np.random.default_rng(seed).standard_normal(n)
        self.homogeneous = self._is_quadratic_homogeneous(probe)
        if self.homogeneous:
            self.anchor = np.zeros(n)
        else:
            self.anchor = self._phi_anchor(seed, opts)
            if problem.Phi(self.anchor) >= self.r:
                raise RetractionFailure("level r is not above the minimum of Phi")

    def _is_quadratic_homogeneous(self, x: np.ndarray) -> bool:
        Phi = self.problem.Phi
        base = Phi(x)
        if base == 0.0:
            return False
        for t in (0.5, 2.0, 3.0):
            if not math.isclose(Phi(t * x), t * t * base, rel_tol=1e-12, abs_tol=0.0):
                return False
        return True

    def _phi_anchor(self, seed, opts) -> np.ndarray:
        problem = self.problem
        Phi = problem.objectives.Phi
        hp = problem.objectives.hessPhi
        hess = (lambda x: np.asarray(hp(x), float)) if hp is not None else None
        noise = fd_noise(Phi) if problem.objectives.gradPhi is None else None
        results = multistart(
            lambda x: float(Phi(x)), lambda x: gradient(problem, "Phi", x), problem.domain, seed, opts,
            hess=hess, noise=noise,
        )
        return min(results, key=lambda res: res.value).x

    def __call__(self, x: np.ndarray) -> np.ndarray:
        Phi = self.problem.Phi
        if self.homogeneous:
            val = Phi(x)
            if not val > 0.0:
                raise RetractionFailure("cannot scale a point with Phi <= 0 onto the level set")
            return x * math.sqrt(self.r / val)
        d = x - self.anchor
        if not np.any(d):
            raise RetractionFailure("direction from the anchor is zero")
        g = lambda s: Phi(self.anchor + s * d) - self.r  # noqa: E731
        lo, hi = 0.0, 1.0
        for _ in range(200):
            if g(hi) >= 0.0:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise RetractionFailure("Phi does not cross the level along the ray")
        s = hi
        for _ in range(200):
            val = g(s)
            if abs(val) <= self.r_tol:
                return self.anchor + s * d
            if val > 0:
                hi = s
            else:
                lo = s
            slope = float(gradient(self.problem, "Phi", self.anchor + s * d) @ d)
            s_new = s - val / slope if slope != 0.0 else 0.5 * (lo + hi)
            if not (lo < s_new < hi):
                s_new = 0.5 * (lo + hi)
            s = s_new
        raise RetractionFailure("retraction Newton iteration stalled")


def _descend_on_level(problem, retract, x0, x_hat, j_hat, horizon):
    J = problem.J
    x = x0
    jx = J(x)
    dists = [problem.distance(x, x_hat)]
    gaps = [jx - j_hat]
    step = 1.0
    for _ in range(horizon):
        g = gradient(problem, "J", x)
        n = gradient(problem, "Phi", x)
        nn = float(n @ n)
        gt = g - (float(g @ n) / nn) * n if nn > 0 else g
        gnorm2 = float(gt @ gt)
        if gnorm2 <= (1e-14 * (1.0 + abs(jx))) ** 2:
            break
        step = min(2.0 * step, 1e6)
        moved = False
        for _ in range(60):
            y = retract(x - step * gt)
            jy = J(y)
            if jy <= jx - 1e-4 * step * gnorm2:
                moved = True
                break
            step *= 0.5
        if not moved:
            break
        x, jx = y, jy
        dists.append(problem.distance(x, x_hat))
        gaps.append(jx - j_hat)
    return x, dists, gaps


def minimizing_sequences(
    problem: ConstrainedProblem,
    result: SaddlePointResult,
    trial_count: int = 32,
    horizon: int = 200,
    seed: int = 0,
    seq_eps: float = SEQ_EPS,
    seq_delta: float = SEQ_DELTA,
    starts: Optional[Sequence[np.ndarray]] = None,
    r_tol: Optional[float] = None,
    jobs: int = 1,
) -> WellPosednessReport:
    """Build feasible minimizing sequences and check they approach x_hat.

    Each trial starts from a random point moved onto Phi^-1(r), then takes
    ``horizon`` projected-gradient steps on J, re-retracting after every
    step. Verdict ``pass`` requires every sequence element with J-gap
    <= seq_eps to lie within seq_delta of x_hat, and no element with J below
    J(x_hat) - seq_eps.
    """
    r = float(result.r)
    x_hat = result.x_hat
    if problem.is_finite:
        return _finite_wellposed(problem, result, r_tol, seq_eps)
    x_hat = np.asarray(x_hat, float)
    r_tol = default_r_tol(r) if r_tol is None else r_tol
    retract = LevelSetRetraction(problem, r, seed, r_tol=r_tol)
    j_hat = problem.J(x_hat)
    n = problem.domain.dimension
    if starts is None:
        rng = np.random.default_rng(seed)
        scale = max(1.0, float(np.linalg.norm(x_hat)))
        starts = [scale * rng.standard_normal(n) for _ in range(trial_count)]

    def run(k_x):
        k, x0 = k_x
        x0 = np.asarray(x0, float)
        if abs(problem.Phi(x0) - r) > r_tol:
            x0 = retract(x0)
        xf, dists, gaps = _descend_on_level(problem, retract, x0, x_hat, j_hat, horizon)
        return SequenceTrial(f"trial-{k}", dists[-1], gaps[-1], dists, gaps, xf)

    items = list(enumerate(starts))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trials = list(pool.map(run, items))
    else:
        trials = [run(it) for it in items]

    ok = True
    notes = []
    for t in trials:
        for d, gap in zip(t.distances, t.gaps):
            if gap < -seq_eps:
                ok = False
                notes.append(f"{t.label} found J below J(x_hat) by {-gap:.3g}")
                break
            if gap <= seq_eps and d > seq_delta:
                ok = False
                notes.append(f"{t.label}: J-gap {gap:.3g} at distance {d:.3g}")
                break
    near_optimal = [t.final_point for t in trials if t.final_gap <= seq_eps]
    reps = cluster([x_hat] + near_optimal, problem, seq_delta)
    uniqueness = "Unique" if len(reps) == 1 else "Suspect"
    return WellPosednessReport(
        r, x_hat, trials, uniqueness, "pass" if ok and uniqueness == "Unique" else "fail",
        seq_eps, seq_delta, "; ".join(notes),
    )


def _finite_wellposed(problem, result, r_tol, seq_eps) -> WellPosednessReport:
    # Sequences in a finite set that converge are eventually constant.
    r = float(result.r)
    r_tol = default_r_tol(r) if r_tol is None else r_tol
    d = problem.domain
    level = [i for i, p in enumerate(d.phi_values) if abs(p - r) <= r_tol]
    if not level:
        return WellPosednessReport(r, result.x_hat, [], "Suspect", "fail", note="level set is empty")
    best = min(d.j_values[i] for i in level)
    minima = [d.labels[i] for i in level if d.j_values[i] <= best + seq_eps]
    unique = len(minima) == 1 and minima[0] == result.x_hat
    return WellPosednessReport(
        r, result.x_hat, [], "Unique" if len(minima) == 1 else "Suspect",
        "pass" if unique else "fail", note=f"minimizers on the level set: {minima}",
    )


def continuity_scan(
    problem: ConstrainedProblem,
    r_count: int,
    margin_fraction: float = 0.05,
    seed: int = 0,
    r_tol: Optional[float] = None,
    opts: SolverOptions = DEFAULT_OPTIONS,
    window=None,
    jobs: int = 1,
) -> ContinuityScan:
    """Solve at r_count equally spaced levels of the trimmed window and record
    the largest jumps of r -> x_hat and r -> J(x_hat) between neighbours."""
    if r_count < 3:
        raise ValueError("continuity scan needs r_count >= 3")
    window = compute_window(problem, seed=seed, opts=opts) if window is None else window
    if not (window.alpha.is_finite and window.beta.is_finite):
        raise ValueError("continuity scan needs a bounded window")
    lo, hi = window.alpha.value, window.beta.value
    pad = margin_fraction * (hi - lo)
    r_grid = [float(r) for r in np.linspace(lo + pad, hi - pad, r_count)]

    def solve(r):
        return solve_level(problem, r, r_tol, seed, opts, window=window)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve, r_grid))
    else:
        results = [solve(r) for r in r_grid]
    xs = [res.x_hat for res in results]
    js = [res.j_value for res in results]
    x_jumps = [problem.distance(a, b) for a, b in zip(xs, xs[1:])]
    j_jumps = [abs(b - a) for a, b in zip(js, js[1:])]
    return ContinuityScan(
        r_grid, xs, js, max(x_jumps), max(j_jumps), [res.lambda_hat for res in results], results
    )


def plateau_constancy(
    problem: ConstrainedProblem,
    r: float,
    probe_lambdas: Sequence[float],
    r_tol: Optional[float] = None,
    sep_tol: Optional[float] = None,
    seed: int = 0,
    opts: SolverOptions = DEFAULT_OPTIONS,
) -> PlateauReport:
    """Minimizers at multipliers on the level-r plateau must all coincide."""
    r_tol = default_r_tol(r) if r_tol is None else r_tol
    sep_tol = opts.sep_tol if sep_tol is None else sep_tol
    recs = [minimize(problem, lam, seed, opts) for lam in probe_lambdas]
    argmins = [rec.argmin for rec in recs]
    off = [rec.lam for rec in recs if abs(rec.phi_at_argmin - r) > r_tol]
    if off:
        return PlateauReport(False, argmins, f"probes off the level-r plateau: {off}")
    for i in range(len(argmins)):
        for j in range(i + 1, len(argmins)):
            if problem.distance(argmins[i], argmins[j]) > sep_tol:
                return PlateauReport(
                    False, argmins,
                    f"minimizers at lambda={recs[i].lam!r} and {recs[j].lam!r} differ",
                )
    return PlateauReport(True, argmins)
