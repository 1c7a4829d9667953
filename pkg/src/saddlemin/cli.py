"""Command-line driver: ``saddlemin <subcommand> --problem <config|builtin> ...``.

Each subcommand writes ``<out>/<subcommand>.json`` (plus ``curve.csv`` or
``scan.csv``) and echoes the JSON to stdout. Exit status: 0 on success, 2
when the run reports that a hypothesis of the method fails on the instance
(empty window, r outside the window, a minimax gap, a failed well-posedness
verdict, ...), 1 on any other error. Errors are written to the same JSON file
as ``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bank
from .config import ProblemConfig, SolverSettings, resolve_problem
from .errors import ConfigError, HypothesisViolation, SaddleminError
from .minimax import MinimaxInstance, verify_minimax
from .multiplier import (
    default_lambda_grid,
    limit_at_zero,
    solve_level,
    solve_level_dual,
    trace_curve,
    verify_monotone,
)
from .serialize import CURVE_HEADER, dumps, scan_header, write_csv, write_json
from .wellposed import continuity_scan, minimizing_sequences
from .window import compute_gamma_delta, compute_window

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALSIFIED = 2

MAX_GRID_POINTS = 1_000_000


def parse_grid(text: str, flag: str) -> np.ndarray:
    """``lo:hi:count`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return np.linspace(float(lo), float(hi), n)
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}; use lo:hi:count or a comma list", flag) from None


class _Run:
    """Resolved inputs shared by the subcommand handlers."""

    def __init__(self, args: argparse.Namespace, cfg: ProblemConfig):
        self.args = args
        self.cfg = cfg
        self.problem = cfg.problem
        s: SolverSettings = cfg.solver
        self.settings = s
        self.seed = s.seed if args.seed is None else args.seed
        self.r_tol = s.r_tol if args.tol is None else args.tol
        self.opts = s.options()
        self.jobs = max(1, args.jobs)

    def window(self):
        return compute_window(self.problem, self.settings.probe_budget, self.seed, self.opts)


def _need_r(args) -> float:
    if args.r is None:
        raise ConfigError("this subcommand needs a constraint level", "--r")
    return float(args.r)


def cmd_window(run: _Run):
    return {"window": run.window().to_json()}, EXIT_OK


def cmd_dual_window(run: _Run):
    w = compute_gamma_delta(run.problem, run.settings.probe_budget, run.seed, run.opts)
    return {"dual_window": w.to_json()}, EXIT_OK


def cmd_curve(run: _Run):
    args = run.args
    if args.grid is not None:
        grid = parse_grid(args.grid, "--grid")
    else:
        grid = default_lambda_grid(run.problem, args.points or 100)
    curve = trace_curve(run.problem, grid, run.seed, run.opts, jobs=run.jobs)
    mono = verify_monotone(curve, run.problem, sep_tol=run.opts.sep_tol)
    write_csv(Path(args.out) / "curve.csv", CURVE_HEADER, curve.rows())
    doc = {
        "samples": [s.to_json() for s in curve.samples],
        "monotonicity": {
            "violations": [list(p) for p in mono.violations],
            "strict_violations": [list(p) for p in mono.strict_violations],
            "ok": mono.ok,
        },
        "warnings": list(curve.warnings),
    }
    return doc, EXIT_OK


def _solve(run: _Run, r: float):
    return solve_level(
        run.problem, r, run.r_tol, run.seed, run.opts, window=run.window(),
        probe_budget=run.settings.probe_budget, uniqueness_starts=run.settings.uniqueness_starts,
    )


def cmd_solve(run: _Run):
    res = _solve(run, _need_r(run.args))
    return {"result": res.to_json()}, EXIT_OK


def cmd_dual_solve(run: _Run):
    res = solve_level_dual(run.problem, _need_r(run.args), run.r_tol, run.seed, run.opts)
    return {"result": res.to_json()}, EXIT_OK


def _x_points(run: _Run) -> Optional[np.ndarray]:
    if run.problem.is_finite:
        return None
    axis = parse_grid(run.args.x_grid, "--x-grid")
    dim = run.problem.domain.dimension
    if axis.size ** dim > MAX_GRID_POINTS:
        raise ConfigError(f"x-grid has {axis.size}^{dim} points, more than {MAX_GRID_POINTS}", "--x-grid")
    if dim == 1:
        return axis[:, None]
    return np.array(list(itertools.product(axis, repeat=dim)))


def cmd_verify_minimax(run: _Run):
    r = _need_r(run.args)
    if run.args.lambda_grid is not None:
        lam = parse_grid(run.args.lambda_grid, "--lambda-grid")
    else:
        lam = default_lambda_grid(run.problem, 201)
    inst = MinimaxInstance.from_problem(run.problem, r, _x_points(run), lam)
    rep = verify_minimax(inst)
    code = EXIT_OK if rep.verdict == "EqualityHolds" else EXIT_FALSIFIED
    return {"r": r, "report": rep.to_json()}, code


def cmd_wellposed(run: _Run):
    r = _need_r(run.args)
    res = _solve(run, r)
    rep = minimizing_sequences(
        run.problem, res, run.settings.trials, run.settings.horizon, run.seed,
        run.settings.seq_eps, run.settings.seq_delta, r_tol=run.r_tol, jobs=run.jobs,
    )
    code = EXIT_OK if rep.verdict == "pass" else EXIT_FALSIFIED
    return {"result": res.to_json(), "report": rep.to_json()}, code


def cmd_scan(run: _Run):
    scan = continuity_scan(
        run.problem, run.args.points or 9, run.settings.margin_fraction, run.seed, run.r_tol,
        run.opts, window=run.window(), jobs=run.jobs,
    )
    dim = 1 if run.problem.is_finite else run.problem.domain.dimension
    write_csv(Path(run.args.out) / "scan.csv", scan_header(dim), scan.rows())
    return {"scan": scan.to_json()}, EXIT_OK


def cmd_limit_zero(run: _Run):
    rep = limit_at_zero(run.problem, run.seed, run.opts, probe_budget=run.settings.probe_budget)
    return {"limit": rep.to_json()}, EXIT_OK


HANDLERS = {
    "window": cmd_window,
    "dual-window": cmd_dual_window,
    "curve": cmd_curve,
    "solve": cmd_solve,
    "dual-solve": cmd_dual_solve,
    "verify-minimax": cmd_verify_minimax,
    "wellposed": cmd_wellposed,
    "scan": cmd_scan,
    "limit-zero": cmd_limit_zero,
}


def _problems_doc() -> dict:
    return {
        "problems": [
            {"name": name, "description": bank.DESCRIPTIONS[name], "interval": bank.get(name).interval.to_json()}
            for name in bank.BANK
        ]
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True, help="config JSON path or built-in problem name")
    common.add_argument("--r", type=float, help="constraint level")
    common.add_argument("--grid", help="multiplier grid: lo:hi:count or comma list")
    common.add_argument("--points", type=int, help="number of grid points")
    common.add_argument("--seed", type=int, help="seed for start points (default: config or 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--tol", type=float, help="constraint residual tolerance r_tol")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--x-grid", default="-2:2:401", help="per-coordinate x grid for verify-minimax")
    common.add_argument("--lambda-grid", help="multiplier grid for verify-minimax")

    parser = argparse.ArgumentParser(prog="saddlemin", description="Level-set constrained minimization by multiplier search.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sub.add_parser(name, parents=[common])
    plist = sub.add_parser("problems", help="list built-in problems")
    plist.add_argument("--out", default="out")
    return parser


GRID_FLAGS = ("--grid", "--x-grid", "--lambda-grid")


def _attach_grid_values(argv: Sequence[str]) -> list[str]:
    """Rewrite ``--x-grid -2:2:9`` as ``--x-grid=-2:2:9`` so a leading minus is not read as a flag."""
    out: list[str] = []
    items = iter(argv)
    for item in items:
        if item in GRID_FLAGS:
            value = next(items, None)
            out.append(item if value is None else f"{item}={value}")
        else:
            out.append(item)
    return out


def _error_doc(exc: Exception) -> dict:
    err = {"code": getattr(exc, "code", type(exc).__name__), "message": str(exc)}
    if isinstance(exc, ConfigError) and exc.key is not None:
        err["key"] = exc.key
    return {"error": err}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_attach_grid_values(argv))
    out = Path(args.out)
    target = out / f"{args.command}.json"
    if args.command == "problems":
        doc = _problems_doc()
        write_json(target, doc)
        sys.stdout.write(dumps(doc))
        return EXIT_OK
    head = {"command": args.command, "problem": args.problem}
    try:
        cfg = resolve_problem(args.problem)
        run = _Run(args, cfg)
        head["seed"] = run.seed
        body, code = HANDLERS[args.command](run)
    except (SaddleminError, ValueError) as exc:
        body = _error_doc(exc)
        code = EXIT_FALSIFIED if isinstance(exc, HypothesisViolation) else EXIT_ERROR
        sys.stderr.write(f"{body['error']['code']}: {exc}\n")
    doc = {**head, **body}
    write_json(target, doc)
    sys.stdout.write(dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
