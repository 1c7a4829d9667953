import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from saddlemin import bank
from saddlemin.errors import DomainMismatch, UnsupportedDomain
from saddlemin.extended import NEG_INF, POS_INF, ExtReal, ParameterInterval, ext_max, ext_min
from saddlemin.problem import (
    EPS,
    EuclideanSpace,
    FiniteSet,
    GridFunctionSpace,
    ObjectivePair,
    evaluate_family,
    evaluate_saddle,
    finite_difference_gradient,
    gradient,
    load_table_csv,
)



class TestExtReal:
    def test_ordering_places_infinities_at_the_ends(self):
        assert NEG_INF < ExtReal.of(-1e300) < ExtReal.of(0) < ExtReal.of(1e300) < POS_INF

    def test_parse_literals(self):
        assert ExtReal.of("inf") == POS_INF
        assert ExtReal.of("-inf") == NEG_INF
        assert ExtReal.of(math.inf) == POS_INF
        assert ExtReal.of(2) == ExtReal("finite", 2.0)

    def test_reciprocal_conventions(self):
        assert POS_INF.reciprocal() == ExtReal.of(0.0)
        assert ExtReal.of(0.0).reciprocal() == POS_INF
        assert ExtReal.of(4.0).reciprocal() == ExtReal.of(0.25)

    def test_json_form(self):
        assert POS_INF.to_json() == "inf"
        assert NEG_INF.to_json() == "-inf"
        assert ExtReal.of(1.5).to_json() == 1.5

    def test_empty_set_conventions(self):
        assert ext_max(NEG_INF) == NEG_INF
        assert ext_min(POS_INF, 3.0) == ExtReal.of(3.0)


class TestParameterInterval:
    def test_open_membership(self):
        iv = ParameterInterval(0.0, "inf")
        assert not iv.contains(0.0)
        assert iv.contains(1e-300)
        assert not iv.contains(math.inf)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            ParameterInterval(1.0, 1.0)

    @pytest.mark.parametrize("a,b", [(0.0, "inf"), ("-inf", 2.0), ("-inf", "inf"), (-1.0, 3.0)])
    @given(t=st.floats(0.01, 0.99))
    def test_unit_map_round_trips(self, a, b, t):
        iv = ParameterInterval(a, b)
        lam = iv.from_unit(t)
        assert iv.contains(lam)
        assert abs(iv.to_unit(lam) - t) <= 1e-12

    @given(t1=st.floats(0.01, 0.98), dt=st.floats(0.001, 0.01))
    def test_unit_map_is_increasing(self, t1, dt):
        iv = ParameterInterval("-inf", "inf")
        assert iv.from_unit(t1) < iv.from_unit(t1 + dt)

    def test_reciprocal(self):
        iv = ParameterInterval(0.0, "inf").reciprocal()
        assert iv.a == ExtReal.of(0.0) and iv.b == POS_INF
        iv = ParameterInterval(2.0, 4.0).reciprocal()
        assert iv.a == ExtReal.of(0.25) and iv.b == ExtReal.of(0.5)


class TestDomains:
    def test_finite_set_validation(self):
        with pytest.raises(ValueError):
            FiniteSet((), (), ())
        with pytest.raises(ValueError):
            FiniteSet(("a", "a"), (0.0, 1.0), (0.0, 1.0))

    def test_box_bounds_need_low_below_high(self):
        with pytest.raises(ValueError):
            EuclideanSpace(2, (0.0, 1.0), (1.0, 1.0))
        with pytest.raises(ValueError):
            EuclideanSpace(0)

    def test_grid_mesh(self):
        g = GridFunctionSpace(3)
        assert g.h == 0.25
        assert np.allclose(g.mesh, [0.25, 0.5, 0.75])
        with pytest.raises(ValueError):
            GridFunctionSpace(1)

    def test_second_order_hint_needs_gradients(self):
        with pytest.raises(ValueError):
            ObjectivePair(J=lambda x: 0.0, Phi=lambda x: 0.0, smoothness_hint="twice_differentiable")


class TestEvaluation:
    def test_family_examples(self, quad1d, finite3):
        assert evaluate_family(quad1d, [0.5], 1.0) == 0.5
        assert evaluate_family(quad1d, [0.3], 0.0) == quad1d.J([0.3])
        assert evaluate_family(finite3, "p1", 3.0) == 4.0

    def test_saddle_examples(self, quad1d):
        assert evaluate_saddle(quad1d, [0.5], 1.0, 0.25) == 0.25
        assert evaluate_saddle(quad1d, [0.7], 123.0, 0.49) == pytest.approx(quad1d.J([0.7]), abs=1e-12)
        assert evaluate_saddle(quad1d, [0.7], 0.0, 3.0) == quad1d.J([0.7])

    def test_domain_mismatch(self, quad2d, finite3):
        with pytest.raises(DomainMismatch):
            evaluate_family(quad2d, [1.0], 1.0)
        with pytest.raises(DomainMismatch):
            evaluate_family(finite3, "p9", 1.0)
        with pytest.raises(DomainMismatch):
            evaluate_family(finite3, np.zeros(1), 1.0)

    @pytest.mark.parametrize("name", list(bank.BANK))
    def test_family_matches_parts(self, name):
        p = bank.get(name)
        rng = np.random.default_rng(7)
        for _ in range(100):
            lam = float(rng.uniform(-3.0, 3.0))
            if p.is_finite:
                x = p.domain.labels[rng.integers(len(p.domain))]
            else:
                x = rng.normal(size=p.domain.dimension)
            j, phi = p.objectives.J(x), p.objectives.Phi(x)
            tol = 4 * EPS * (1 + abs(j) + abs(lam * phi))
            assert abs(evaluate_family(p, x, lam) - (j + lam * phi)) <= tol
            assert abs(evaluate_saddle(p, x, lam, 0.3) - (evaluate_family(p, x, lam) - lam * 0.3)) <= tol


class TestGradient:
    def test_examples(self, quad1d, quad2d):
        assert gradient(quad1d, "J", [0.5])[0] == pytest.approx(-1.0, abs=1e-7)
        assert abs(gradient(quad1d, "Phi", [0.0])[0]) <= 1e-9
        assert np.allclose(gradient(quad2d, "J", [0.0, 0.0]), [-6.0, -8.0], atol=1e-6)

    def test_finite_domain_has_no_gradient(self, finite3):
        with pytest.raises(UnsupportedDomain):
            gradient(finite3, "J", "p0")

    @pytest.mark.parametrize("name", ["quad1d", "quad2d_c34", "doublewell1d", "grid_variational"])
    def test_finite_differences_match_analytic(self, name):
        p = bank.get(name)
        rng = np.random.default_rng(3)
        for _ in range(10):
            x = rng.normal(size=p.domain.dimension)
            for which, f, g in (("J", p.objectives.J, p.objectives.gradJ), ("Phi", p.objectives.Phi, p.objectives.gradPhi)):
                exact = g(x)
                fd = finite_difference_gradient(f, x)
                assert np.linalg.norm(fd - exact) <= 1e-5 * max(1.0, np.linalg.norm(exact)), which


def test_swap_roles_exchanges_columns(finite3):
    p = bank.finite3_tied().swap_roles()
    assert p.J("p0") == 2.0 and p.Phi("p0") == 0.0
    assert p.interval.a == ExtReal.of(0.0) and p.interval.b == POS_INF


def test_table_csv(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("label,J,Phi\np0,0,2\np1,1,1\n")
    assert load_table_csv(path) == [("p0", 0.0, 2.0), ("p1", 1.0, 1.0)]
    bad = tmp_path / "bad.csv"
    bad.write_text("label,J\np0,0\n")
    with pytest.raises(ValueError):
        load_table_csv(bad)
