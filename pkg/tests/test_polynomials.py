import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saddlenode.polynomials import BivariatePoly, UnivariatePoly

coeff = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
monomial = st.tuples(st.integers(0, 6), st.integers(0, 6))
bivariate = st.dictionaries(monomial, coeff, max_size=12).map(lambda d: BivariatePoly(d, 12))


def test_univariate_strips_trailing_zeros_and_evaluates():
    p = UnivariatePoly([1.0, 2.0, 0.0, 0.0])
    assert p.coefficients == (1.0, 2.0)
    assert p.degree == 1
    assert p(3.0) == 7.0
    assert UnivariatePoly().degree == -1


def test_univariate_derivative_and_bound():
    p = UnivariatePoly([2.0, 0.0, -1.0])  # 2 - x^2
    assert p.derivative() == UnivariatePoly([0.0, -2.0])
    assert p.abs_bound(1.0) == 3.0


def test_univariate_arithmetic():
    p = UnivariatePoly([1.0, 1.0])
    assert p * p == UnivariatePoly([1.0, 2.0, 1.0])
    assert p - p == UnivariatePoly()
    assert (p + 1.0)(2.0) == 4.0


def test_bivariate_drops_zeros_and_degree_bound():
    p = BivariatePoly({(0, 0): 1.0, (1, 1): 0.0, (2, 0): 3.0}, 4)
    assert dict(p.coefficients) == {(0, 0): 1.0, (2, 0): 3.0}
    assert p.degree == 2 and p.max_degree == 4
    with pytest.raises(ValueError):
        BivariatePoly({(3, 2): 1.0}, 4)
    with pytest.raises(ValueError):
        BivariatePoly({(-1, 0): 1.0})


def test_bivariate_evaluation_matches_direct_sum():
    rng = random.Random(4)
    terms = {(rng.randint(0, 5), rng.randint(0, 5)): rng.uniform(-2, 2) for _ in range(15)}
    p = BivariatePoly(terms)
    for _ in range(20):
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        direct = sum(c * x**i * y**j for (i, j), c in terms.items())
        assert p(x, y) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_product_truncates_at_bound():
    x = BivariatePoly({(1, 0): 1.0}, 2)
    y = BivariatePoly({(0, 1): 1.0}, 2)
    assert dict((x * y).coefficients) == {(1, 1): 1.0}
    assert dict((x * y * y).coefficients) == {}


def test_restrict_shift_scale():
    p = BivariatePoly({(0, 0): 2.0, (0, 1): 3.0, (1, 2): 1.0})
    assert p.restrict_y0() == UnivariatePoly([2.0])
    assert dict(p.shift(1, 0).coefficients) == {(1, 0): 2.0, (1, 1): 3.0, (2, 2): 1.0}
    with pytest.raises(ValueError):
        p.shift(-1, 0)
    assert p.scale_variables(2.0, 3.0)(1.0, 1.0) == p(2.0, 3.0)
    assert p.truncate(1) == BivariatePoly({(0, 0): 2.0, (0, 1): 3.0})


def test_json_schema():
    p = BivariatePoly({(0, 0): 1.5, (2, 1): -0.25}, 5)
    obj = json.loads(p.to_json())
    assert obj["terms"] == [{"i": 0, "j": 0, "c": 1.5}, {"i": 2, "j": 1, "c": -0.25}]
    assert BivariatePoly.from_json(p.to_json()) == p
    u = UnivariatePoly([1.0, 0.0, 2.0])
    assert UnivariatePoly.from_json_obj(u.to_json_obj()) == u
    with pytest.raises(ValueError):
        UnivariatePoly.from_json_obj({"terms": [{"i": 0, "j": 1, "c": 1.0}]})


@settings(max_examples=100, deadline=None)
@given(bivariate)
def test_json_round_trip_is_exact(p):
    assert BivariatePoly.from_json(p.to_json()) == p


@settings(max_examples=100, deadline=None)
@given(bivariate, bivariate)
def test_addition_commutes_and_subtraction_cancels(p, q):
    assert p + q == q + p
    assert dict((p - p).coefficients) == {}
