"""Built-in problems, looked up by name.

The smooth problems ship analytic gradients and Hessians. ``notes`` carries
closed-form facts (minimizer curve, window) where they exist; solvers never
read them.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .extended import ParameterInterval
from .problem import ConstrainedProblem, EuclideanSpace, GridFunctionSpace, ObjectivePair, finite_problem

FINITE3_ROWS = [("p0", 0.0, 2.0), ("p1", 1.0, 1.0), ("p2", 4.0, 0.0)]
FINITE3_TIED_ROWS = [("p0", 0.0, 2.0), ("p1", 0.0, 1.0), ("p2", 4.0, 0.0)]


def quad1d() -> ConstrainedProblem:
    """J = (x-1)^2, Phi = x^2 on R over ]0, +inf[."""
    obj = ObjectivePair(
        J=lambda x: (x[0] - 1.0) ** 2,
        Phi=lambda x: x[0] ** 2,
        gradJ=lambda x: np.array([2.0 * (x[0] - 1.0)]),
        gradPhi=lambda x: np.array([2.0 * x[0]]),
        hessJ=lambda x: np.array([[2.0]]),
        hessPhi=lambda x: np.array([[2.0]]),
        smoothness_hint="twice_differentiable",
    )
    notes = {
        "argmin": lambda lam: np.array([1.0 / (1.0 + lam)]),
        "inf_value": lambda lam: lam / (1.0 + lam),
        "lambda_hat": lambda r: 1.0 / math.sqrt(r) - 1.0,
        "alpha": 0.0,
        "beta": 1.0,
        "limit_at_zero": 1.0,
    }
    return ConstrainedProblem(EuclideanSpace(1), obj, ParameterInterval(0.0, "inf"), "quad1d", notes)


def quad2d_c34() -> ConstrainedProblem:
    """J = |x - (3,4)|^2, Phi = |x|^2 on R^2 over ]0, +inf[."""
    c = np.array([3.0, 4.0])
    eye = np.eye(2)
    obj = ObjectivePair(
        J=lambda x: float(np.dot(x - c, x - c)),
        Phi=lambda x: float(np.dot(x, x)),
        gradJ=lambda x: 2.0 * (x - c),
        gradPhi=lambda x: 2.0 * x,
        hessJ=lambda x: 2.0 * eye,
        hessPhi=lambda x: 2.0 * eye,
        smoothness_hint="twice_differentiable",
    )
    norm_c = 5.0
    notes = {
        "argmin": lambda lam: c / (1.0 + lam),
        "inf_value": lambda lam: 25.0 * lam / (1.0 + lam),
        "lambda_hat": lambda r: norm_c / math.sqrt(r) - 1.0,
        "x_hat": lambda r: math.sqrt(r) * c / norm_c,
        "alpha": 0.0,
        "beta": 25.0,
        "gamma": 0.0,
        "delta": 25.0,
        "limit_at_zero": 25.0,
    }
    return ConstrainedProblem(EuclideanSpace(2), obj, ParameterInterval(0.0, "inf"), "quad2d_c34", notes)


def finite3() -> ConstrainedProblem:
    return finite_problem(FINITE3_ROWS, ParameterInterval("-inf", "inf"), "finite3")


def finite3_tied() -> ConstrainedProblem:
    """Two global minima of J (p0, p1) with different Phi values."""
    return finite_problem(FINITE3_TIED_ROWS, ParameterInterval(0.0, "inf"), "finite3_tied")


def doublewell1d() -> ConstrainedProblem:
    """J = (x^2-1)^2, Phi = x^2 over ]0, +inf[.

    J + lam*Phi has two global minima for lam < 2, so the uniqueness
    hypothesis fails on part of the interval.
    """
    obj = ObjectivePair(
        J=lambda x: (x[0] ** 2 - 1.0) ** 2,
        Phi=lambda x: x[0] ** 2,
        gradJ=lambda x: np.array([4.0 * x[0] * (x[0] ** 2 - 1.0)]),
        gradPhi=lambda x: np.array([2.0 * x[0]]),
        hessJ=lambda x: np.array([[12.0 * x[0] ** 2 - 4.0]]),
        hessPhi=lambda x: np.array([[2.0]]),
        smoothness_hint="twice_differentiable",
    )
    notes = {"alpha": 0.0, "beta": 1.0, "lambda_hat": lambda r: 2.0 - 2.0 * r}
    return ConstrainedProblem(EuclideanSpace(1), obj, ParameterInterval(0.0, "inf"), "doublewell1d", notes)


def grid_variational(nodes: int = 16) -> ConstrainedProblem:
    """Discretized sin-Gordon type energy on a sphere of H^1_0(0, 1).

    J(u) = sum_i h*(0.5*((u[i+1]-u[i])/h)^2 - sin(u[i])) with zero boundary
    values, Phi(u) = sum_i h*u[i]^2. J + lam*Phi is strictly convex for
    lam > -(pi^2 - 1)/2, so the interval is ]-4, +inf[.
    """
    space = GridFunctionSpace(nodes)
    h = space.h
    lap = (np.diag(np.full(nodes, 2.0)) - np.diag(np.ones(nodes - 1), 1) - np.diag(np.ones(nodes - 1), -1)) / h

    def J(u):
        padded = np.concatenate(([0.0], u, [0.0]))
        diff = np.diff(padded) / h
        return float(h * (0.5 * np.sum(diff**2) - np.sum(np.sin(u))))

    def gradJ(u):
        return lap @ u - h * np.cos(u)

    def hessJ(u):
        return lap + np.diag(h * np.sin(u))

    obj = ObjectivePair(
        J=J,
        Phi=lambda u: float(h * np.dot(u, u)),
        gradJ=gradJ,
        gradPhi=lambda u: 2.0 * h * u,
        hessJ=hessJ,
        hessPhi=lambda u: 2.0 * h * np.eye(nodes),
        smoothness_hint="twice_differentiable",
    )
    return ConstrainedProblem(space, obj, ParameterInterval(-4.0, "inf"), "grid_variational")


def twin_minima() -> ConstrainedProblem:
    """J = |x|^2, Phi = x1^2/4 + x2^2 on R^2 over ]-1, +inf[.

    Every level set of Phi is an ellipse on which J has two minima (0, +-sqrt(r)),
    so minimizing J over it is not well-posed. Not part of the bank.
    """
    w = np.array([0.25, 1.0])
    obj = ObjectivePair(
        J=lambda x: float(np.dot(x, x)),
        Phi=lambda x: float(np.dot(w, x * x)),
        gradJ=lambda x: 2.0 * x,
        gradPhi=lambda x: 2.0 * w * x,
        hessJ=lambda x: 2.0 * np.eye(2),
        hessPhi=lambda x: 2.0 * np.diag(w),
        smoothness_hint="twice_differentiable",
    )
    return ConstrainedProblem(EuclideanSpace(2), obj, ParameterInterval(-1.0, "inf"), "twin_minima")


BANK: dict[str, Callable[[], ConstrainedProblem]] = {
    "quad1d": quad1d,
    "quad2d_c34": quad2d_c34,
    "finite3": finite3,
    "doublewell1d": doublewell1d,
    "grid_variational": grid_variational,
}

DESCRIPTIONS = {
    "quad1d": "J=(x-1)^2, Phi=x^2 on R, ]0,+inf[",
    "quad2d_c34": "J=|x-(3,4)|^2, Phi=|x|^2 on R^2, ]0,+inf[",
    "finite3": "3-point table {p0:(0,2), p1:(1,1), p2:(4,0)}, ]-inf,+inf[",
    "doublewell1d": "J=(x^2-1)^2, Phi=x^2 on R, ]0,+inf[ (non-unique minima for lam<2)",
    "grid_variational": "J(u)=sum h(0.5 u'^2 - sin u), Phi(u)=sum h u^2 on a 16-node grid, ]-4,+inf[",
}


def get(name: str) -> ConstrainedProblem:
    try:
        return BANK[name]()
    except KeyError:
        raise KeyError(f"no built-in problem named {name!r}; have {sorted(BANK)}") from None
