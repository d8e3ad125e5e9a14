import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saddlenode.numerics import (
    Derivative,
    extrapolate_to_zero,
    richardson_derivative,
    richardson_to_zero,
)


def test_richardson_derivative_is_fourth_order():
    d = richardson_derivative(math.sin, 0.3, 1e-2)
    assert d.value == pytest.approx(math.cos(0.3), abs=1e-10)
    assert abs(d.coarse - math.cos(0.3)) > abs(d.fine - math.cos(0.3))
    assert d.consistent and d.sign_stable and d.sign == 1


def test_sign_stability_flags():
    assert not Derivative(1.0, 1.0, -1.0, 0.1).sign_stable
    assert not Derivative(0.0, 0.0, 0.0, 0.1).sign_stable
    assert Derivative(-2.0, -2.1, -2.02, 0.1).sign == -1
    assert not Derivative(1.0, 1.5, 1.0, 0.1).consistent


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(1e-3, 1), st.floats(1e-3, 1))
def test_linear_extrapolation_exact_on_lines(c, k, s1, s2):
    if abs(s1 - s2) < 1e-3:
        return
    assert richardson_to_zero(s1, c + k * s1, s2, c + k * s2) == pytest.approx(c, abs=1e-9)


def test_neville_exact_on_quadratics():
    f = lambda s: 1.5 - 2 * s + 7 * s * s  # noqa: E731
    s = [0.1, 0.05, 0.025]
    assert extrapolate_to_zero(s, [f(v) for v in s]) == pytest.approx(1.5, abs=1e-12)
