import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from saddlemin import bank
from saddlemin.errors import Diverged
from saddlemin.extended import ParameterInterval
from saddlemin.inner import (
    DEFAULT_OPTIONS,
    local_descent,
    minimize,
    optimal_set,
    start_points,
    uniqueness_probe,
)
from saddlemin.problem import ConstrainedProblem, EuclideanSpace, ObjectivePair


def _doublewell_zero_phi():
    obj = ObjectivePair(
        J=lambda x: (x[0] ** 2 - 1.0) ** 2,
        Phi=lambda x: 0.0,
        gradJ=lambda x: np.array([4.0 * x[0] * (x[0] ** 2 - 1.0)]),
        gradPhi=lambda x: np.zeros(1),
    )
    return ConstrainedProblem(EuclideanSpace(1), obj, ParameterInterval(0.0, "inf"))


def _concave():
    obj = ObjectivePair(
        J=lambda x: -2.0 * x[0] ** 2,
        Phi=lambda x: x[0] ** 2,
        gradJ=lambda x: np.array([-4.0 * x[0]]),
        gradPhi=lambda x: np.array([2.0 * x[0]]),
    )
    return ConstrainedProblem(EuclideanSpace(1), obj, ParameterInterval(0.0, "inf"))


class TestMinimizeExamples:
    def test_quad1d(self, quad1d):
        rec = minimize(quad1d, 1.0)
        assert rec.argmin[0] == pytest.approx(0.5, abs=1e-12)
        assert rec.value == pytest.approx(0.5, abs=1e-12)
        assert rec.status == "Converged"

    def test_quad2d(self, quad2d):
        rec = minimize(quad2d, 1.5)
        assert np.allclose(rec.argmin, [1.2, 1.6], atol=1e-12)
        assert rec.phi_at_argmin == pytest.approx(4.0, abs=1e-12)

    def test_finite_scan(self, finite3):
        rec = minimize(finite3, 2.0)
        assert rec.argmin == "p1" and rec.value == 3.0

    def test_outside_interval_rejected(self, quad1d):
        with pytest.raises(ValueError):
            minimize(quad1d, -0.5)

    def test_unbounded_family_diverges(self):
        with pytest.raises(Diverged) as info:
            minimize(_concave(), 1.0)
        assert info.value.lam == 1.0


@pytest.mark.parametrize("name", ["quad1d", "quad2d_c34"])
def test_closed_form_curve(name):
    p = bank.get(name)
    for t in np.linspace(0.02, 0.98, 50):
        lam = p.interval.from_unit(float(t))
        rec = minimize(p, lam)
        assert np.max(np.abs(rec.argmin - p.notes["argmin"](lam))) <= 1e-8
        assert abs(rec.value - p.notes["inf_value"](lam)) <= 1e-10 * max(1.0, abs(rec.value))


@given(lam=st.floats(0.001, 1e3))
def test_record_value_is_j_plus_lam_phi(lam):
    rec = minimize(bank.quad2d_c34(), lam)
    assert abs(rec.value - (rec.j_at_argmin + lam * rec.phi_at_argmin)) <= 4 * np.finfo(float).eps * (
        1 + abs(rec.j_at_argmin) + abs(lam * rec.phi_at_argmin)
    )


@given(
    l1=st.floats(0.01, 50.0),
    l2=st.floats(0.01, 50.0),
    t=st.sampled_from([0.25, 0.5, 0.75]),
)
def test_infimum_is_concave_in_lambda(l1, l2, t):
    p = bank.quad2d_c34()
    m = lambda lam: minimize(p, lam).value  # noqa: E731
    mid = t * l1 + (1 - t) * l2
    assert m(mid) >= t * m(l1) + (1 - t) * m(l2) - 1e-9


def test_concavity_on_grid_problem():
    p = bank.grid_variational()
    lams = np.linspace(-3.5, 10.0, 8)
    ms = [minimize(p, lam).value for lam in lams]
    for i in range(1, len(lams) - 1):
        assert ms[i] >= 0.5 * (ms[i - 1] + ms[i + 1]) - 1e-9


def test_restart_determinism():
    a = minimize(bank.doublewell1d(), 0.7, seed=5)
    b = minimize(bank.doublewell1d(), 0.7, seed=5)
    assert a.lam == b.lam and np.array_equal(a.argmin, b.argmin) and a.value == b.value
    assert a.iterations == b.iterations and a.status == b.status


class TestUniqueness:
    def test_convex_is_unique(self, quad1d):
        assert uniqueness_probe(quad1d, 1.0, 8).verdict == "Unique"

    def test_symmetric_wells_are_suspect(self):
        rep = uniqueness_probe(_doublewell_zero_phi(), 1.0, 8)
        assert rep.verdict == "Suspect"
        xs = sorted(float(p[0]) for p, _ in rep.witnesses)
        assert xs[0] == pytest.approx(-1.0, abs=1e-4) and xs[-1] == pytest.approx(1.0, abs=1e-4)

    def test_table_tie_is_suspect(self, finite3):
        rep = uniqueness_probe(finite3, 1.0)
        assert rep.verdict == "Suspect"
        assert sorted(p for p, _ in rep.witnesses) == ["p0", "p1"]

    def test_needs_two_starts(self, quad1d):
        with pytest.raises(ValueError):
            uniqueness_probe(quad1d, 1.0, 1)


def test_start_points_are_reproducible_and_in_box():
    from saddlemin.problem import EuclideanSpace as E

    box = E(2, (-1.0, 0.0), (1.0, 2.0))
    a = start_points(box, 16, 3, 10.0)
    assert np.array_equal(a, start_points(box, 16, 3, 10.0))
    assert np.all(a >= [-1.0, 0.0]) and np.all(a <= [1.0, 2.0])
    ball = start_points(E(3), 16, 3, 10.0)
    assert np.all(np.linalg.norm(ball, axis=1) <= 10.0 + 1e-12)


def test_projected_descent_respects_box():
    f = lambda x: float((x[0] - 5.0) ** 2)  # noqa: E731
    g = lambda x: np.array([2.0 * (x[0] - 5.0)])  # noqa: E731
    res = local_descent(f, g, np.array([0.0]), DEFAULT_OPTIONS, lower=np.array([-1.0]), upper=np.array([1.0]))
    assert res.x[0] == 1.0 and res.status == "Converged"


def test_optimal_set_on_table(finite3):
    assert [p for p, _ in optimal_set(finite3, 3.0, 0, DEFAULT_OPTIONS)] == ["p1", "p2"]
