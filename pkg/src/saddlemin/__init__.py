"""Minimize J over the level set Phi^-1(r) through the multiplier family J + lam*Phi."""

from . import bank
from .config import ProblemConfig, SolverSettings, load_config, problem_from_dict
from .errors import (
    ArityError,
    BracketFailure,
    ConfigError,
    DomainMismatch,
    Diverged,
    DualInapplicable,
    EvaluationError,
    ExpressionSyntaxError,
    HypothesisViolation,
    RetractionFailure,
    SaddleminError,
    UnknownIdentifier,
    UnsupportedDomain,
    WindowEmpty,
    WindowViolation,
)
from .expr import compile_expression, evaluate, parse_expression, to_text
from .extended import NEG_INF, POS_INF, ExtReal, ParameterInterval
from .inner import (
    DEFAULT_OPTIONS,
    MinimizerRecord,
    SolverOptions,
    UniquenessReport,
    minimize,
    uniqueness_probe,
)
from .minimax import (
    MinimaxInstance,
    MinimaxReport,
    brute_force_gap,
    check_hypotheses,
    random_instances,
    verify_minimax,
)
from .multiplier import (
    LambdaSet,
    LimitReport,
    MultiplierCurve,
    SaddlePointResult,
    lambda_set,
    limit_at_zero,
    solve_level,
    solve_level_dual,
    trace_curve,
    verify_monotone,
    verify_saddle,
)
from .problem import (
    ConstrainedProblem,
    EuclideanSpace,
    FiniteSet,
    GridFunctionSpace,
    ObjectivePair,
    evaluate_family,
    evaluate_saddle,
    finite_problem,
    load_table_csv,
)
from .wellposed import (
    ContinuityScan,
    WellPosednessReport,
    continuity_scan,
    minimizing_sequences,
    plateau_constancy,
)
from .window import DualWindow, FeasibilityWindow, compute_gamma_delta, compute_window

__version__ = "0.1.0"
