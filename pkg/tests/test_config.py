import json

import numpy as np
import pytest

from saddlemin.config import SolverSettings, load_config, problem_from_dict, resolve_problem
from saddlemin.errors import ConfigError
from saddlemin.extended import NEG_INF, POS_INF, ExtReal
from saddlemin.problem import EuclideanSpace, FiniteSet, GridFunctionSpace

SPHERE = {
    "name": "sphere",
    "domain": {"kind": "euclidean", "dimension": 2},
    "objectives": {"J": "(x1-3)^2 + (x2-4)^2", "Phi": "x1^2 + x2^2"},
    "interval": {"a": 0, "b": "inf"},
}


def with_changes(base, **patch):
    doc = json.loads(json.dumps(base))
    doc.update(patch)
    return doc


def key_of(doc):
    with pytest.raises(ConfigError) as info:
        problem_from_dict(doc)
    return info.value.key


def test_expression_problem():
    cfg = problem_from_dict(SPHERE)
    p = cfg.problem
    assert isinstance(p.domain, EuclideanSpace) and p.domain.dimension == 2
    assert p.J(np.array([1.2, 1.6])) == pytest.approx(9.0)
    assert p.Phi(np.array([1.2, 1.6])) == pytest.approx(4.0)
    assert p.objectives.smoothness_hint == "differentiable"
    assert p.interval.b == POS_INF
    assert cfg.solver == SolverSettings()


def test_builtin_and_interval_override():
    cfg = problem_from_dict({"objectives": {"builtin": "quad1d"}, "interval": {"a": "-inf", "b": 3}})
    assert cfg.name == "quad1d"
    assert cfg.problem.interval.a == NEG_INF
    assert cfg.problem.interval.b == ExtReal.of(3.0)


def test_grid_domain():
    doc = with_changes(SPHERE, domain={"kind": "grid", "nodes": 5}, objectives={"J": "x1+x5", "Phi": "x3^2"})
    p = problem_from_dict(doc).problem
    assert isinstance(p.domain, GridFunctionSpace) and p.domain.dimension == 5


def test_finite_rows_and_table(tmp_path):
    rows = [["a", 1, 0], ["b", 0, 2], ["c", 3, 1]]
    doc = {"domain": {"kind": "finite", "rows": rows}, "interval": {"a": "-inf", "b": "inf"}}
    p = problem_from_dict(doc).problem
    assert isinstance(p.domain, FiniteSet) and len(p.domain) == 3

    (tmp_path / "t.csv").write_text("label,J,Phi\na,1,0\nb,0,2\nc,3,1\n")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"domain": {"kind": "finite", "table": "t.csv"}, "interval": {"a": "-inf", "b": "inf"}}))
    q = load_config(cfg_path).problem
    assert [q.J(x) for x in q.points()] == [p.J(x) for x in p.points()]


def test_solver_settings_flow_into_options():
    cfg = problem_from_dict(with_changes(SPHERE, solver={"seed": 7, "g_tol": 1e-9, "k_starts": 6}))
    assert cfg.solver.seed == 7
    opts = cfg.solver.options()
    assert opts.g_tol == 1e-9 and opts.k_starts == 6


@pytest.mark.parametrize(
    "patch,key",
    [
        ({"colour": 1}, "colour"),
        ({"domain": {"kind": "euclidean", "dimension": 2, "size": 3}}, "domain.size"),
        ({"solver": {"tolerance": 1}}, "solver.tolerance"),
        ({"solver": {"k_starts": 2.5}}, "solver.k_starts"),
        ({"solver": {"g_tol": "small"}}, "solver.g_tol"),
        ({"interval": {"a": 0, "b": "infinity"}}, "interval.b"),
        ({"interval": {"a": 0}}, "interval.b"),
        ({"interval": {"a": 0, "b": 1, "c": 2}}, "interval.c"),
        ({"objectives": {"J": "x1 +", "Phi": "x1^2"}}, "objectives.J"),
        ({"objectives": {"J": "x1", "Phi": "x3"}}, "objectives.Phi"),
        ({"objectives": {"J": "x1"}}, "objectives.Phi"),
        ({"domain": {"kind": "torus"}}, "domain.kind"),
        ({"domain": {"kind": "euclidean", "dimension": 0}}, "domain.dimension"),
    ],
)
def test_errors_point_at_the_offending_key(patch, key):
    assert key_of(with_changes(SPHERE, **patch)) == key


def test_builtin_rejects_domain():
    assert key_of({"objectives": {"builtin": "quad1d"}, "domain": {"kind": "euclidean", "dimension": 1}}) == "domain"
    assert key_of({"objectives": {"builtin": "nope"}}) == "objectives.builtin"


def test_resolve_problem(tmp_path):
    assert resolve_problem("quad2d_c34").name == "quad2d_c34"
    path = tmp_path / "s.json"
    path.write_text(json.dumps(SPHERE))
    assert resolve_problem(str(path)).name == "sphere"
    with pytest.raises(ConfigError) as info:
        resolve_problem(str(tmp_path / "missing.json"))
    assert info.value.key == "--problem"


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(path)
