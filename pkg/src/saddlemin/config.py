"""JSON problem configuration.

A config file describes one problem::

    {
      "name": "sphere",
      "domain": {"kind": "euclidean", "dimension": 2},
      "objectives": {"J": "(x1-3)^2 + (x2-4)^2", "Phi": "x1^2 + x2^2"},
      "interval": {"a": 0, "b": "inf"},
      "solver": {"seed": 0, "r_tol": 1e-8}
    }

``objectives`` may instead be ``{"builtin": "<bank name>"}``, in which case
``domain`` and ``interval`` default to the built-in ones. Finite domains take
their J and Phi columns from ``domain.table`` (a CSV path, relative to the
config file) or inline ``domain.rows``. Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

from . import bank
from .errors import ConfigError, ExpressionError
from .expr import compile_expression
from .extended import ParameterInterval
from .inner import SolverOptions
from .problem import (
    ConstrainedProblem,
    EuclideanSpace,
    GridFunctionSpace,
    ObjectivePair,
    finite_problem,
    load_table_csv,
)

TOP_KEYS = {"name", "domain", "objectives", "interval", "solver"}
DOMAIN_KEYS = {"kind", "dimension", "lower", "upper", "table", "rows", "nodes"}
OBJECTIVE_KEYS = {"builtin", "J", "Phi"}
INTERVAL_KEYS = {"a", "b"}


@dataclass(frozen=True)
class SolverSettings:
    """Tunables shared by every subcommand."""

    seed: int = 0
    r_tol: Optional[float] = None
    g_tol: float = 1e-10
    max_iter: int = 10_000
    k_starts: int = 4
    start_radius: float = 10.0
    sep_tol: float = 1e-6
    val_tol: float = 1e-9
    probe_budget: int = 8
    uniqueness_starts: int = 0
    seq_eps: float = 1e-7
    seq_delta: float = 1e-3
    trials: int = 32
    horizon: int = 200
    margin_fraction: float = 0.05

    def options(self) -> SolverOptions:
        return SolverOptions(
            g_tol=self.g_tol, max_iter=self.max_iter, k_starts=self.k_starts,
            start_radius=self.start_radius, sep_tol=self.sep_tol, val_tol=self.val_tol,
        )


SOLVER_KEYS = {f.name for f in fields(SolverSettings)}


@dataclass(frozen=True)
class ProblemConfig:
    name: str
    problem: ConstrainedProblem
    solver: SolverSettings


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    for key in obj:
        if key not in allowed:
            path = f"{where}.{key}" if where else key
            raise ConfigError(f"unknown key; allowed: {sorted(allowed)}", path)


def _require_dict(obj: Any, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError("expected a JSON object", where)
    return obj


def _interval(spec: Any) -> ParameterInterval:
    spec = _require_dict(spec, "interval")
    _reject_unknown(spec, INTERVAL_KEYS, "interval")
    for key in ("a", "b"):
        if key not in spec:
            raise ConfigError("missing endpoint", f"interval.{key}")
        v = spec[key]
        if isinstance(v, bool) or not isinstance(v, (int, float, str)):
            raise ConfigError("endpoint must be a number, 'inf' or '-inf'", f"interval.{key}")
        if isinstance(v, str) and v.strip().lower() not in ("inf", "+inf", "-inf"):
            raise ConfigError(f"bad endpoint literal {v!r}", f"interval.{key}")
    try:
        return ParameterInterval(spec["a"], spec["b"])
    except ValueError as exc:
        raise ConfigError(str(exc), "interval") from None


def _solver(spec: Any) -> SolverSettings:
    spec = _require_dict(spec, "solver")
    _reject_unknown(spec, SOLVER_KEYS, "solver")
    settings = SolverSettings()
    types = {f.name: f.type for f in fields(SolverSettings)}
    for key, value in spec.items():
        want_int = types[key] == "int"
        if isinstance(value, bool) or not isinstance(value, (int, float)) or (want_int and not isinstance(value, int)):
            raise ConfigError("expected an integer" if want_int else "expected a number", f"solver.{key}")
        settings = replace(settings, **{key: value})
    return settings


def _int_field(spec: dict, key: str, where: str, minimum: int) -> int:
    if key not in spec:
        raise ConfigError("missing field", f"{where}.{key}")
    v = spec[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"expected an integer >= {minimum}", f"{where}.{key}")
    return v


def _finite_rows(spec: dict, base_dir: Path) -> list:
    if "table" in spec and "rows" in spec:
        raise ConfigError("give either a table path or inline rows, not both", "domain.table")
    if "table" in spec:
        path = base_dir / spec["table"]
        try:
            return load_table_csv(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc), "domain.table") from None
    if "rows" in spec:
        rows = spec["rows"]
        if not isinstance(rows, list) or not all(isinstance(r, list) and len(r) == 3 for r in rows):
            raise ConfigError("rows must be a list of [label, J, Phi]", "domain.rows")
        try:
            return [(str(l), float(j), float(p)) for l, j, p in rows]
        except (TypeError, ValueError):
            raise ConfigError("J and Phi must be numbers", "domain.rows") from None
    raise ConfigError("finite domain needs 'table' or 'rows'", "domain")


def _continuous_domain(spec: dict):
    kind = spec["kind"]
    if kind == "grid":
        return GridFunctionSpace(_int_field(spec, "nodes", "domain", 2))
    dim = _int_field(spec, "dimension", "domain", 1)
    lower, upper = spec.get("lower"), spec.get("upper")
    try:
        return EuclideanSpace(dim, lower, upper)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), "domain.lower") from None


def _expression_objectives(spec: dict, dimension: int) -> ObjectivePair:
    compiled = {}
    for key in ("J", "Phi"):
        if key not in spec:
            raise ConfigError("missing expression", f"objectives.{key}")
        if not isinstance(spec[key], str):
            raise ConfigError("expression must be a string", f"objectives.{key}")
        try:
            compiled[key] = compile_expression(spec[key], dimension)
        except ExpressionError as exc:
            raise ConfigError(f"{exc.code}: {exc}", f"objectives.{key}") from None
    # No symbolic derivatives: gradients come from finite differences.
    return ObjectivePair(J=compiled["J"], Phi=compiled["Phi"], smoothness_hint="differentiable")


def problem_from_dict(data: Any, base_dir: Union[str, Path] = ".") -> ProblemConfig:
    data = _require_dict(data, "(root)")
    _reject_unknown(data, TOP_KEYS, "")
    base_dir = Path(base_dir)
    solver = _solver(data.get("solver", {}))
    objectives = _require_dict(data.get("objectives", {}), "objectives")
    _reject_unknown(objectives, OBJECTIVE_KEYS, "objectives")

    if "builtin" in objectives:
        if set(objectives) != {"builtin"}:
            raise ConfigError("builtin objectives cannot be mixed with expressions", "objectives.J")
        name = objectives["builtin"]
        if name not in bank.BANK:
            raise ConfigError(f"no built-in problem {name!r}; have {sorted(bank.BANK)}", "objectives.builtin")
        if "domain" in data:
            raise ConfigError("a built-in problem brings its own domain", "domain")
        problem = bank.get(name)
        if "interval" in data:
            problem = problem.with_interval(_interval(data["interval"]))
        label = data.get("name", name)
        return ProblemConfig(str(label), replace(problem, name=str(label)), solver)

    if "domain" not in data:
        raise ConfigError("missing domain", "domain")
    if "interval" not in data:
        raise ConfigError("missing interval", "interval")
    dom = _require_dict(data["domain"], "domain")
    _reject_unknown(dom, DOMAIN_KEYS, "domain")
    kind = dom.get("kind")
    if kind not in ("finite", "euclidean", "grid"):
        raise ConfigError("kind must be 'finite', 'euclidean' or 'grid'", "domain.kind")
    interval = _interval(data["interval"])
    label = str(data.get("name", "problem"))
    if kind == "finite":
        if objectives:
            raise ConfigError("finite domains take J and Phi from the table", "objectives")
        try:
            problem = finite_problem(_finite_rows(dom, base_dir), interval, label)
        except ValueError as exc:
            raise ConfigError(str(exc), "domain.rows") from None
        return ProblemConfig(label, problem, solver)
    domain = _continuous_domain(dom)
    problem = ConstrainedProblem(domain, _expression_objectives(objectives, domain.dimension), interval, label)
    return ProblemConfig(label, problem, solver)


def load_config(path: Union[str, Path]) -> ProblemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return problem_from_dict(data, path.parent)


def resolve_problem(ref: str) -> ProblemConfig:
    """A config file path, or the name of a built-in problem."""
    if ref in bank.BANK and not Path(ref).exists():
        return ProblemConfig(ref, bank.get(ref), SolverSettings())
    if not Path(ref).exists():
        raise ConfigError(f"{ref!r} is neither a config file nor a built-in problem {sorted(bank.BANK)}", "--problem")
    return load_config(ref)

