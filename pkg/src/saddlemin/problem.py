"""Problem data: domain, the objective pair (J, Phi) and the multiplier interval.

A point is a ``str`` label on a :class:`FiniteSet` and a 1-D float64 array on
the continuous domains. Problems are frozen and hold only pure callables, so
they can be shared between worker threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np

from .errors import DomainMismatch, UnsupportedDomain
from .extended import ParameterInterval

Point = Union[str, np.ndarray]
Smoothness = Literal["black_box", "differentiable", "twice_differentiable"]

EPS = np.finfo(float).eps
FD_STEP = EPS ** (1.0 / 3.0)


@dataclass(frozen=True)
class FiniteSet:
    """Ordered labelled points, each carrying its own J and Phi value."""

    labels: tuple[str, ...]
    j_values: tuple[float, ...]
    phi_values: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("FiniteSet needs at least one point")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("FiniteSet labels must be unique")
        if not (len(self.labels) == len(self.j_values) == len(self.phi_values)):
            raise ValueError("FiniteSet columns have different lengths")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @classmethod
    def from_rows(cls, rows: Sequence[tuple[str, float, float]]) -> "FiniteSet":
        labels, js, phis = zip(*rows) if rows else ((), (), ())
        return cls(tuple(str(l) for l in labels), tuple(map(float, js)), tuple(map(float, phis)))

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise DomainMismatch(f"unknown point label {label!r}") from None

    def __len__(self):
        return len(self.labels)

    is_continuous = False


@dataclass(frozen=True)
class EuclideanSpace:
    dimension: int
    lower: Optional[tuple[float, ...]] = None
    upper: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("EuclideanSpace dimension must be >= 1")
        if (self.lower is None) != (self.upper is None):
            raise ValueError("box bounds need both lower and upper")
        if self.lower is not None:
            lo = tuple(float(v) for v in self.lower)
            hi = tuple(float(v) for v in self.upper)
            if len(lo) != self.dimension or len(hi) != self.dimension:
                raise ValueError("box bounds must match the dimension")
            if not all(l < h for l, h in zip(lo, hi)):
                raise ValueError("box bounds need low < high in every coordinate")
            object.__setattr__(self, "lower", lo)
            object.__setattr__(self, "upper", hi)

    @property
    def bounded(self) -> bool:
        return self.lower is not None

    is_continuous = True


@dataclass(frozen=True)
class GridFunctionSpace:
    """Nodal values of a function on ``nodes`` interior points of [0, 1].

    Boundary values are zero and not stored; ``h = 1 / (nodes + 1)``.
    """

    nodes: int

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("GridFunctionSpace needs at least 2 interior nodes")

    @property
    def dimension(self) -> int:
        return self.nodes

    @property
    def h(self) -> float:
        return 1.0 / (self.nodes + 1)

    @property
    def mesh(self) -> np.ndarray:
        return np.arange(1, self.nodes + 1) * self.h

    bounded = False
    lower = None
    upper = None
    is_continuous = True

    def trapezoid(self, values: np.ndarray) -> float:
        """Trapezoidal integral of nodal values with zero boundary values."""
        return float(self.h * np.sum(values))


DomainSpec = Union[FiniteSet, EuclideanSpace, GridFunctionSpace]

Evaluator = Callable[[Point], float]
GradEvaluator = Callable[[np.ndarray], np.ndarray]
HessEvaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ObjectivePair:
    J: Evaluator
    Phi: Evaluator
    gradJ: Optional[GradEvaluator] = None
    gradPhi: Optional[GradEvaluator] = None
    hessJ: Optional[HessEvaluator] = None
    hessPhi: Optional[HessEvaluator] = None
    smoothness_hint: Smoothness = "differentiable"

    def __post_init__(self):
        if self.smoothness_hint not in ("black_box", "differentiable", "twice_differentiable"):
            raise ValueError(f"bad smoothness_hint {self.smoothness_hint!r}")
        no_grad = self.gradJ is None or self.gradPhi is None
        if no_grad and self.smoothness_hint == "twice_differentiable":
            raise ValueError("finite-difference gradients cap smoothness at 'differentiable'")

    def swapped(self) -> "ObjectivePair":
        return ObjectivePair(
            J=self.Phi, Phi=self.J, gradJ=self.gradPhi, gradPhi=self.gradJ,
            hessJ=self.hessPhi, hessPhi=self.hessJ, smoothness_hint=self.smoothness_hint,
        )


@dataclass(frozen=True)
class ConstrainedProblem:
    domain: DomainSpec
    objectives: ObjectivePair
    interval: ParameterInterval
    name: str = "problem"
    # Closed-form reference data for bank problems (used by tests and demos only).
    notes: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def is_finite(self) -> bool:
        return isinstance(self.domain, FiniteSet)

    def check_point(self, x: Point) -> Point:
        if isinstance(self.domain, FiniteSet):
            if not isinstance(x, str):
                raise DomainMismatch(f"finite domain expects a label, got {type(x).__name__}")
            self.domain.index(x)
            return x
        if isinstance(x, str):
            raise DomainMismatch("continuous domain expects a vector, got a label")
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1 or arr.shape[0] != self.domain.dimension:
            raise DomainMismatch(
                f"expected a vector of length {self.domain.dimension}, got shape {arr.shape}"
            )
        return arr

    def J(self, x: Point) -> float:
        return float(self.objectives.J(self.check_point(x)))

    def Phi(self, x: Point) -> float:
        return float(self.objectives.Phi(self.check_point(x)))

    def distance(self, x: Point, y: Point) -> float:
        """Euclidean nodal distance; 0 or +inf between labels."""
        if self.is_finite:
            return 0.0 if x == y else math.inf
        return float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))

    def points(self) -> list[Point]:
        if not self.is_finite:
            raise UnsupportedDomain("only finite domains can enumerate their points")
        return list(self.domain.labels)

    def swap_roles(self) -> "ConstrainedProblem":
        """Problem with J and Phi exchanged on ]1/b, 1/a[ (requires a >= 0)."""
        if isinstance(self.domain, FiniteSet):
            d = self.domain
            domain = FiniteSet(d.labels, d.phi_values, d.j_values)
        else:
            domain = self.domain
        return ConstrainedProblem(
            domain=domain,
            objectives=self.objectives.swapped(),
            interval=self.interval.reciprocal(),
            name=f"swap({self.name})",
        )

    def with_interval(self, interval: ParameterInterval) -> "ConstrainedProblem":
        return replace(self, interval=interval)


def evaluate_family(problem: ConstrainedProblem, x: Point, lam: float) -> float:
    """Value of J + lam*Phi at x.

    Evaluated as ``J(x) + (lam * Phi(x))``: one product, one sum, in that
    order, so results are reproducible to the last bit.
    """
    x = problem.check_point(x)
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError("multiplier must be finite")
    return problem.J(x) + lam * problem.Phi(x)


def evaluate_saddle(problem: ConstrainedProblem, x: Point, lam: float, r: float) -> float:
    """Lagrangian J(x) + lam*(Phi(x) - r)."""
    x = problem.check_point(x)
    lam = float(lam)
    if not math.isfinite(lam):
        raise ValueError("multiplier must be finite")
    return problem.J(x) + lam * (problem.Phi(x) - float(r))


def finite_difference_gradient(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    """Central differences with step cbrt(eps) * max(1, |x_i|) per coordinate."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = FD_STEP * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (xp[i] - xm[i])
    return g


def gradient(problem: ConstrainedProblem, which: str, x: Point) -> np.ndarray:
    """Gradient of J (``which='J'``) or Phi (``which='Phi'``) at x."""
    if problem.is_finite:
        raise UnsupportedDomain("gradients are not defined on a finite domain")
    x = problem.check_point(x)
    obj = problem.objectives
    if which == "J":
        f, g = obj.J, obj.gradJ
    elif which == "Phi":
        f, g = obj.Phi, obj.gradPhi
    else:
        raise ValueError(f"which must be 'J' or 'Phi', not {which!r}")
    if g is not None:
        return np.asarray(g(x), dtype=float)
    return finite_difference_gradient(lambda y: float(f(y)), x)


def family_gradient(problem: ConstrainedProblem, x: np.ndarray, lam: float) -> np.ndarray:
    return gradient(problem, "J", x) + lam * gradient(problem, "Phi", x)


def family_hessian(problem: ConstrainedProblem, x: np.ndarray, lam: float) -> np.ndarray:
    """Hessian of J + lam*Phi; analytic when both parts are supplied, else
    central differences of the gradient, symmetrized."""
    obj = problem.objectives
    if obj.hessJ is not None and obj.hessPhi is not None:
        return np.asarray(obj.hessJ(x), float) + lam * np.asarray(obj.hessPhi(x), float)
    n = x.size
    H = np.empty((n, n))
    for i in range(n):
        h = FD_STEP * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        H[:, i] = (family_gradient(problem, xp, lam) - family_gradient(problem, xm, lam)) / (xp[i] - xm[i])
    return 0.5 * (H + H.T)


def finite_problem(
    rows: Sequence[tuple[str, float, float]],
    interval: ParameterInterval,
    name: str = "finite",
) -> ConstrainedProblem:
    """Problem on a finite table of (label, J, Phi) rows."""
    domain = FiniteSet.from_rows(rows)
    jmap = dict(zip(domain.labels, domain.j_values))
    pmap = dict(zip(domain.labels, domain.phi_values))
    objectives = ObjectivePair(J=jmap.__getitem__, Phi=pmap.__getitem__, smoothness_hint="black_box")
    return ConstrainedProblem(domain, objectives, interval, name)


def load_table_csv(path: Union[str, Path]) -> list[tuple[str, float, float]]:
    """Read a finite table from CSV with header ``label,J,Phi``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"label", "J", "Phi"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing CSV columns {sorted(missing)}")
        rows = []
        for line in reader:
            rows.append((line["label"].strip(), float(line["J"]), float(line["Phi"])))
    return rows
