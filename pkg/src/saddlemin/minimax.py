"""Brute-force minimax checks on finite or discretized instances.

For a table f[i, j] = f(x_i, lam_j) the verifier computes

    sup_inf = max_j min_i f[i, j]      inf_sup = min_i max_j f[i, j]

(weak duality: sup_inf <= inf_sup always) and tests finite proxies for the
three hypotheses that make sup_inf and inf_sup equal:

(i)   for every x and rho, {lam : f(x, lam) > rho} is one contiguous run of
      grid indices;
(ii)  sub-level sets are closed and compact: vacuous on finite sets; on a
      discretized continuum, the sub-level set at lambda_hat must stay off the
      edge of the point grid;
(iii) for every run T of grid multipliers with sup_T inf_x f < rho there is a
      path lam -> x(lam) with f(x(lam), lam) < rho whose consecutive points
      are at most ``path_jump_tol`` apart (0 on a finite set: the path must be
      constant, since a continuous map from an interval into a discrete
      space is).

The proxies falsify; they never prove the hypotheses.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Literal, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .problem import ConstrainedProblem

Verdict = Literal["EqualityHolds", "GapFound", "HypothesisViolated"]

WEAK_DUALITY_TOL = 1e-12


@dataclass(frozen=True)
class MinimaxInstance:
    """A finite table of f over points x lambda_grid.

    ``discrete`` marks a genuinely finite X (paths must be constant); otherwise
    ``points`` is a sampling of a continuum (rows of coordinates).
    """

    points: np.ndarray
    lambda_grid: np.ndarray
    values: np.ndarray
    rho_star: float
    lambda_hat: float
    discrete: bool = True
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        grid = np.asarray(self.lambda_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lambda_grid", grid)
        object.__setattr__(self, "values", vals)
        if pts.shape[0] == 0 or grid.size == 0:
            raise ValueError("minimax instance needs non-empty grids")
        if vals.shape != (pts.shape[0], grid.size):
            raise ValueError(f"values must have shape {(pts.shape[0], grid.size)}, got {vals.shape}")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("lambda grid must be strictly increasing")
        if not np.any(grid == self.lambda_hat):
            raise ValueError("lambda_hat must be a member of the lambda grid")
        sup_inf = float(vals.min(axis=0).max())
        if not self.rho_star > sup_inf:
            raise ValueError(f"rho_star={self.rho_star!r} must exceed sup_inf={sup_inf!r}")

    @classmethod
    def from_function(
        cls,
        points: Sequence,
        lambda_grid: Sequence[float],
        f: Callable[[np.ndarray, float], float],
        rho_star: Optional[float] = None,
        lambda_hat: Optional[float] = None,
        discrete: bool = True,
    ) -> "MinimaxInstance":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        grid = np.asarray(lambda_grid, dtype=float)
        vals = np.array([[f(x, lam) for lam in grid] for x in pts], dtype=float)
        return cls._with_defaults(pts, grid, vals, rho_star, lambda_hat, discrete)

    @classmethod
    def from_problem(
        cls,
        problem: ConstrainedProblem,
        r: float,
        x_grid: Sequence,
        lambda_grid: Sequence[float],
        rho_star: Optional[float] = None,
        lambda_hat: Optional[float] = None,
    ) -> "MinimaxInstance":
        """Lagrangian J(x) + lam*(Phi(x) - r) of a problem on sampled points.

        On a finite problem ``x_grid`` is ignored and every label is used.
        """
        grid = np.asarray(lambda_grid, dtype=float)
        if problem.is_finite:
            d = problem.domain
            J = np.asarray(d.j_values)
            P = np.asarray(d.phi_values)
            pts = np.arange(len(d.labels), dtype=float)[:, None]
            labels = d.labels
            discrete = True
        else:
            pts = np.asarray(x_grid, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
            J = np.array([problem.J(x) for x in pts])
            P = np.array([problem.Phi(x) for x in pts])
            labels = None
            discrete = False
        vals = J[:, None] + grid[None, :] * (P[:, None] - float(r))
        inst = cls._with_defaults(pts, grid, vals, rho_star, lambda_hat, discrete)
        if labels is not None:
            object.__setattr__(inst, "labels", tuple(labels))
        return inst

    @classmethod
    def _with_defaults(cls, pts, grid, vals, rho_star, lambda_hat, discrete):
        sup_inf = float(vals.min(axis=0).max())
        if rho_star is None:
            rho_star = sup_inf + max(1.0, abs(sup_inf))
        if lambda_hat is None:
            lambda_hat = float(grid[int(np.argmax(vals.min(axis=0)))])
        return cls(pts, grid, vals, float(rho_star), float(lambda_hat), discrete)

    def x_spacing(self) -> float:
        """Smallest positive distance between distinct points (1-D grids: the mesh)."""
        if self.points.shape[0] < 2:
            return 0.0
        if self.points.shape[1] == 1:
            d = np.diff(np.sort(self.points[:, 0]))
            d = d[d > 0]
            return float(d.min()) if d.size else 0.0
        uniq = np.unique(self.points, axis=0)
        if uniq.shape[0] < 2:
            return 0.0
        dist, _ = cKDTree(uniq).query(uniq, k=2)
        return float(dist[:, 1].min())

    def to_json(self) -> dict:
        return {
            "points": self.points.tolist(),
            "labels": list(self.labels) if self.labels is not None else None,
            "lambda_grid": self.lambda_grid.tolist(),
            "values": self.values.tolist(),
            "rho_star": self.rho_star,
            "lambda_hat": self.lambda_hat,
            "discrete": self.discrete,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class HypothesisCheck:
    passed: bool
    witness: Optional[dict] = None
    note: str = ""
    path: Optional[str] = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "witness": self.witness, "note": self.note, "path": self.path}


@dataclass(frozen=True)
class MinimaxReport:
    sup_inf: float
    inf_sup: float
    gap: float
    hypothesis_i: Optional[HypothesisCheck] = None
    hypothesis_ii: Optional[HypothesisCheck] = None
    hypothesis_iii: Optional[HypothesisCheck] = None
    verdict: Optional[Verdict] = None
    gap_tol: float = 0.0

    @property
    def hypotheses_pass(self) -> bool:
        checks = (self.hypothesis_i, self.hypothesis_ii, self.hypothesis_iii)
        return all(c is not None and c.passed for c in checks)

    def to_json(self) -> dict:
        return {
            "sup_inf": self.sup_inf,
            "inf_sup": self.inf_sup,
            "gap": self.gap,
            "gap_tol": self.gap_tol,
            "hypothesis_i": self.hypothesis_i.to_json() if self.hypothesis_i else None,
            "hypothesis_ii": self.hypothesis_ii.to_json() if self.hypothesis_ii else None,
            "hypothesis_iii": self.hypothesis_iii.to_json() if self.hypothesis_iii else None,
            "verdict": self.verdict,
        }


def brute_force_gap(instance: MinimaxInstance) -> MinimaxReport:
    """Exact sup-inf and inf-sup over the table; no hypothesis checks."""
    v = instance.values
    sup_inf = float(v.min(axis=0).max())
    inf_sup = float(v.max(axis=1).min())
    return MinimaxReport(sup_inf, inf_sup, inf_sup - sup_inf)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs [start, stop) of True in a 1-D boolean array."""
    runs = []
    start = None
    for j, m in enumerate(mask):
        if m and start is None:
            start = j
        elif not m and start is not None:
            runs.append((start, j))
            start = None
    if start is not None:
        runs.append((start, len(mask)))
    return runs


def check_connected(instance: MinimaxInstance, rho_grid: Sequence[float]) -> HypothesisCheck:
    for rho in rho_grid:
        above = instance.values > rho
        for i in range(above.shape[0]):
            if len(_runs(above[i])) > 1:
                return HypothesisCheck(
                    False, witness={"point_index": i, "rho": float(rho)},
                    note="super-level set in lambda is not contiguous",
                )
    return HypothesisCheck(True, note="every super-level set is one contiguous run")


def check_compactness(instance: MinimaxInstance, rho_grid: Sequence[float]) -> HypothesisCheck:
    if instance.discrete:
        return HypothesisCheck(
            True, note="vacuous on a finite set: every subset is closed and compact (proxy)"
        )
    j_hat = int(np.flatnonzero(instance.lambda_grid == instance.lambda_hat)[0])
    pts = instance.points
    edge = np.any((pts == pts.min(axis=0)) | (pts == pts.max(axis=0)), axis=1)
    for rho in list(rho_grid) + [instance.rho_star]:
        sub = instance.values[:, j_hat] <= rho
        if np.any(sub & edge):
            i = int(np.flatnonzero(sub & edge)[0])
            return HypothesisCheck(
                False, witness={"point_index": i, "rho": float(rho)},
                note="sub-level set at lambda_hat reaches the edge of the point grid "
                "(boundedness proxy for compactness)",
            )
    return HypothesisCheck(
        True, note="sub-level sets at lambda_hat stay inside the point grid "
        "(boundedness proxy; closedness for every lambda is not distinguishable on a grid)"
    )


def _step_tolerances(instance: MinimaxInstance, idx: np.ndarray, base: float) -> np.ndarray:
    """Allowed jump between consecutive lambdas of a run.

    A sampled continuous path moves by about |dx/dlam| * dlam per grid step, so
    each step is compared with the median of up to four neighbouring argmin
    steps; an isolated jump far above its neighbours is a discontinuity.
    """
    steps = np.linalg.norm(np.diff(instance.points[idx], axis=0), axis=1)
    tol = np.full(steps.size, base)
    for k in range(steps.size):
        nb = np.concatenate([steps[max(0, k - 2):k], steps[k + 1:k + 3]])
        if nb.size:
            tol[k] = max(base, 5.0 * float(np.median(nb)))
    return tol


def _reachable_path(instance: MinimaxInstance, low: np.ndarray, tols: np.ndarray) -> bool:
    """Is there a sequence of points, one per column of ``low``, each with
    low[i, j] true and consecutive points at most tols[j - 1] apart?"""
    pts = instance.points
    reach = np.flatnonzero(low[:, 0])
    for j in range(1, low.shape[1]):
        if reach.size == 0:
            return False
        cand = np.flatnonzero(low[:, j])
        if cand.size == 0:
            return False
        dist, _ = cKDTree(pts[reach]).query(pts[cand], k=1)
        reach = cand[dist <= tols[j - 1]]
    return bool(reach.size)


def check_low_path(
    instance: MinimaxInstance, rho_grid: Sequence[float], path_jump_tol: Optional[float] = None
) -> HypothesisCheck:
    """Proxy for (iii). On a finite set paths must be constant; on a sampled
    continuum jumps up to ``path_jump_tol`` (default: 5 mesh widths, widened
    to the local step scale of the argmin path) count as continuous."""
    fixed = instance.discrete or path_jump_tol is not None
    if instance.discrete:
        base = 0.0
    else:
        base = 5.0 * instance.x_spacing() if path_jump_tol is None else path_jump_tol
    v = instance.values
    col_min = v.min(axis=0)
    argmin_path = v.argmin(axis=0)
    used = "argmin"
    for rho in rho_grid:
        for start, stop in _runs(col_min < rho):
            idx = argmin_path[start:stop]
            if stop - start < 2:
                continue
            steps = np.linalg.norm(np.diff(instance.points[idx], axis=0), axis=1)
            tols = np.full(steps.size, base) if fixed else _step_tolerances(instance, idx, base)
            if np.all(steps <= tols):
                continue
            # The argmin path jumps; search every admissible path instead.
            used = "reachability"
            if not _reachable_path(instance, v[:, start:stop] < rho, tols):
                return HypothesisCheck(
                    False,
                    witness={
                        "rho": float(rho),
                        "lambda_run": [float(instance.lambda_grid[start]), float(instance.lambda_grid[stop - 1])],
                    },
                    note="no path with f < rho and admissible jumps exists over this run of lambdas",
                    path=used,
                )
    return HypothesisCheck(True, note=f"base path jump tolerance {base:g}", path=used)


def default_rho_grid(instance: MinimaxInstance, count: int = 8, eps: float = 1e-9) -> list[float]:
    """Levels just above sup_inf (down to ``eps``) up to rho_star."""
    sup_inf = float(instance.values.min(axis=0).max())
    span = instance.rho_star - sup_inf
    steps = [eps * max(1.0, abs(sup_inf))] + list(np.geomspace(span / 2 ** (count - 2), span, count - 1))
    return [sup_inf + s for s in steps]


def check_hypotheses(
    instance: MinimaxInstance,
    rho_grid: Optional[Sequence[float]] = None,
    path_jump_tol: Optional[float] = None,
) -> tuple[HypothesisCheck, HypothesisCheck, HypothesisCheck]:
    rho_grid = default_rho_grid(instance) if rho_grid is None else list(rho_grid)
    if any(rho > instance.rho_star for rho in rho_grid):
        raise ValueError("rho values must not exceed rho_star")
    return (
        check_connected(instance, rho_grid),
        check_compactness(instance, rho_grid),
        check_low_path(instance, rho_grid, path_jump_tol),
    )


def _lambda_cell_error(instance: MinimaxInstance) -> float:
    """How much lam -> inf_x f moves across one grid cell at its maximum: the
    sampling error of sup_inf when the true maximizer sits between nodes."""
    col_min = instance.values.min(axis=0)
    j = int(np.argmax(col_min))
    nb = [col_min[k] for k in (j - 1, j + 1) if 0 <= k < col_min.size]
    return float(max((col_min[j] - c for c in nb), default=0.0))


def verify_minimax(
    instance: MinimaxInstance,
    rho_grid: Optional[Sequence[float]] = None,
    path_jump_tol: Optional[float] = None,
    gap_tol: Optional[float] = None,
) -> MinimaxReport:
    """Values plus hypothesis checks and a verdict.

    ``gap_tol`` defaults to the resolution of the rho grid just above
    sup_inf, widened on sampled continua by the one-cell sampling error of
    sup_inf.
    """
    rho_grid = default_rho_grid(instance) if rho_grid is None else sorted(rho_grid)
    base = brute_force_gap(instance)
    h1, h2, h3 = check_hypotheses(instance, rho_grid, path_jump_tol)
    if gap_tol is None:
        above = [rho - base.sup_inf for rho in rho_grid if rho > base.sup_inf]
        gap_tol = min(above) if above else 0.0
        if not instance.discrete:
            gap_tol = max(gap_tol, _lambda_cell_error(instance))
    if not (h1.passed and h2.passed and h3.passed):
        verdict: Verdict = "HypothesisViolated"
    elif base.gap > gap_tol:
        verdict = "GapFound"
    else:
        verdict = "EqualityHolds"
    return MinimaxReport(base.sup_inf, base.inf_sup, base.gap, h1, h2, h3, verdict, float(gap_tol))


@dataclass
class GeneratorParams:
    max_points: int = 6
    max_lambdas: int = 6
    lambda_range: tuple[float, float] = (-3.0, 3.0)


def random_instance(rng: np.random.Generator, params: GeneratorParams) -> MinimaxInstance:
    """Finite table with f affine in lambda: f(x, lam) = c0[x] + c1[x]*lam."""
    n = int(rng.integers(1, params.max_points + 1))
    m = int(rng.integers(1, params.max_lambdas + 1))
    lo, hi = params.lambda_range
    grid = np.sort(rng.uniform(lo, hi, size=m))
    grid = np.unique(grid)
    c0 = rng.normal(size=n)
    c1 = rng.normal(size=n)
    if rng.random() < 0.3:
        c1[rng.integers(n)] = 0.0
    vals = c0[:, None] + c1[:, None] * grid[None, :]
    return MinimaxInstance._with_defaults(np.arange(n, dtype=float), grid, vals, None, None, True)


def random_instances(
    count: int,
    seed: int,
    generator_params: Optional[GeneratorParams] = None,
    corpus_dir: Optional[Path] = None,
) -> Iterator[tuple[MinimaxInstance, MinimaxReport]]:
    """Stream of random affine instances with their full reports.

    An instance whose hypothesis proxies all pass but whose gap exceeds the
    rho-grid resolution is a counterexample; it is written to ``corpus_dir``
    as ``<sha256-prefix>.json``.
    """
    params = generator_params or GeneratorParams()
    rng = np.random.default_rng(seed)
    for _ in range(count):
        inst = random_instance(rng, params)
        report = verify_minimax(inst)
        if is_counterexample(report) and corpus_dir is not None:
            corpus_dir = Path(corpus_dir)
            corpus_dir.mkdir(parents=True, exist_ok=True)
            payload = {"instance": inst.to_json(), "report": report.to_json()}
            (corpus_dir / f"{inst.digest()}.json").write_text(json.dumps(payload, indent=1))
        yield inst, report


def is_counterexample(report: MinimaxReport) -> bool:
    return report.hypotheses_pass and report.gap > report.gap_tol
