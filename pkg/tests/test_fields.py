import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saddlenode.charts import from_projective, to_projective
from saddlenode.errors import DomainError, ParameterBoxError, SingularLocusError
from saddlenode.fields import (
    LoudParams,
    Unfolding,
    build_loud_unfolding,
    eval_bar_field,
    eval_loud,
    eval_normal_field,
    loud_normal_U,
    loud_series_radius,
    rescale_unfolding,
    weierstrass_split,
)
from saddlenode.polynomials import BivariatePoly, UnivariatePoly

admissible = st.builds(LoudParams, st.floats(-0.99, -0.01), st.floats(-0.49, 0.49))
finite = st.floats(-10, 10, allow_nan=False)


def unf(mu=2, eps=0.0, U=None, V=None, radius=1.0):
    return Unfolding(mu, eps, U or BivariatePoly.constant(1.0), V or UnivariatePoly([1.0]),
                     radius)


def test_loud_params_box():
    assert LoudParams(-0.5, 0.1).is_admissible()
    assert not LoudParams(0.5, 0.1).is_admissible()
    assert not LoudParams(-0.5, 0.5).is_admissible()
    with pytest.raises(ParameterBoxError):
        LoudParams(-1.0, 0.0).require_admissible()
    with pytest.raises(ValueError):
        LoudParams(math.nan, 0.0)
    assert LoudParams(-0.5, 0.1).eps == -0.2


def test_eval_loud_examples():
    a = LoudParams(-0.3, 0.2)
    assert eval_loud(a, (0.0, 1.0)) == (-1.0, 0.2)
    du, dv = eval_loud(LoudParams(-0.5, 0.1), (0.2, 0.3))
    assert du == pytest.approx(-0.24, abs=1e-15)
    assert dv == pytest.approx(0.2 - 0.02 + 0.009, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(admissible, finite, finite)
def test_reversed_is_exact_negation(a, u, v):
    f = eval_loud(a, (u, v))
    r = eval_loud(a, (u, v), reversed=True)
    assert r == (-f[0], -f[1])


def test_u_equals_one_is_invariant():
    rng = random.Random(0)
    a = LoudParams(-0.4, 0.2)
    for _ in range(100):
        assert eval_loud(a, (1.0, rng.uniform(-5, 5)))[0] == 0.0


def test_bar_field_examples():
    a = LoudParams(-0.5, 0.1)
    assert eval_bar_field(a, (1.0, 0.0), include_polar_factor=False) == pytest.approx((0.6, 0.0))
    rng = random.Random(1)
    for _ in range(100):
        assert eval_bar_field(a, (rng.uniform(-3, 3), 0.0), include_polar_factor=False)[1] == 0.0
    with pytest.raises(SingularLocusError):
        eval_bar_field(a, (0.0, 0.5))


def test_bar_field_is_pushforward_of_reversed_loud():
    # oracle: chart map Jacobian applied to -L_a, then times the polar factor 1/z
    a = LoudParams(-0.5, 0.1)
    z, w = 0.5, 0.2
    u, v = from_projective((z, w))
    du, dv = eval_loud(a, (u, v), reversed=True)
    dz = -dv / v**2
    dw = (-du * v - (1.0 - u) * dv) / v**2
    bz, bw = eval_bar_field(a, (z, w), include_polar_factor=False)
    # polynomial part is z times the full field, which equals the push-forward
    assert bz / z == pytest.approx(dz, rel=1e-13)
    assert bw / z == pytest.approx(dw, rel=1e-13)
    assert to_projective((u, v)) == pytest.approx((z, w))


def test_normal_field_examples():
    assert eval_normal_field(unf(), (0.5, 1.0), include_polar_factor=False) == (0.125, -1.0)
    u = unf(eps=0.04, V=UnivariatePoly([2.0]))
    px, py = eval_normal_field(u, (0.3, 0.5), include_polar_factor=False)
    assert px == pytest.approx(0.015, abs=1e-15) and py == -1.0
    full = eval_normal_field(u, (0.3, 0.5))
    assert full == pytest.approx((0.015 / 0.3, -1.0 / 0.3))


@pytest.mark.parametrize("eps", [e / 100 for e in range(-20, 21, 4)])
def test_saddle_is_zero_of_polynomial_part(eps):
    th = eps ** 0.5 if eps > 0 else 0.0
    u = unf(eps=eps, V=UnivariatePoly([1.5, 0.0, -1.0]))
    px, py = eval_normal_field(u, (th, 0.0), include_polar_factor=False)
    assert abs(px) < 1e-15 and py == 0.0


def test_unfolding_validation():
    with pytest.raises(DomainError):
        unf(U=BivariatePoly.constant(-1.0))
    with pytest.raises(DomainError):
        unf(V=UnivariatePoly([0.5, 0.0, -1.0]))  # vanishes at 0.707
    with pytest.raises(ParameterBoxError):
        unf(eps=1.0)
    with pytest.raises(ValueError):
        unf(mu=0)


def test_unfolding_json_round_trip():
    u = build_loud_unfolding(LoudParams(-0.5, 0.1), 6)
    assert Unfolding.from_json(u.to_json()) == u


def test_loud_normal_U_examples():
    assert loud_normal_U(LoudParams(-0.5, 0.3), (0.0, 0.0)) == pytest.approx(2.0)
    assert loud_normal_U(LoudParams(-0.2, 0.1), (0.0, 0.0)) == pytest.approx(1.5811388, abs=1e-7)
    with pytest.raises(DomainError):
        loud_normal_U(LoudParams(-0.8, 0.05), (0.0, 1.0))


def test_build_loud_unfolding_examples():
    u = build_loud_unfolding(LoudParams(-0.5, 0.0))
    assert u.mu == 2 and u.eps == 0.0
    assert u.V == UnivariatePoly([2.0, 0.0, -1.0])
    assert u.U(0.0, 0.0) == pytest.approx(2.0)
    u = build_loud_unfolding(LoudParams(-0.5, 0.1))
    assert u.eps == pytest.approx(-0.2)
    assert u.V == UnivariatePoly([1.8, 0.0, -1.0])


def test_build_loud_unfolding_matches_finite_difference_taylor():
    # oracle: central-difference Taylor coefficients of the closed form
    a = LoudParams(-0.5, 0.1)
    u = build_loud_unfolding(a, 6)
    U = lambda x, y: loud_normal_U(a, (x, y))  # noqa: E731
    h = 1e-3
    checks = {
        (0, 0): U(0, 0),
        (0, 2): (U(0, h) - 2 * U(0, 0) + U(0, -h)) / (2 * h * h),
        (1, 1): (U(h, h) - U(h, -h) - U(-h, h) + U(-h, -h)) / (4 * h * h),
        (1, 0): (U(h, 0) - U(-h, 0)) / (2 * h),
        (0, 1): (U(0, h) - U(0, -h)) / (2 * h),
    }
    for key, val in checks.items():
        assert u.U[key] == pytest.approx(val, abs=1e-6 if key != (0, 0) else 1e-14)
    assert u.U(0.05, 0.05) == pytest.approx(U(0.05, 0.05), rel=1e-8)


@settings(max_examples=100, deadline=None)
@given(admissible)
def test_loud_unfolding_constant_terms(a):
    u = build_loud_unfolding(a)
    assert u.U(0.0, 0.0) == pytest.approx(((a.D + 1) / 2) ** -0.5, rel=1e-14)
    assert u.V(0.0) == pytest.approx(2 - 2 * a.F) and u.V(0.0) > 0


def test_weierstrass_examples():
    U0, Uh = weierstrass_split(BivariatePoly.constant(1.0))
    assert U0 == UnivariatePoly([1.0]) and dict(Uh.coefficients) == {}
    U0, Uh = weierstrass_split(BivariatePoly({(0, 0): 1.0, (1, 1): 1.0}))
    assert U0 == UnivariatePoly([1.0]) and dict(Uh.coefficients) == {(2, 0): 1.0}
    U = BivariatePoly({(0, 0): 2.0, (0, 1): 3.0, (1, 2): 1.0})
    U0, Uh = weierstrass_split(U)
    assert U0 == UnivariatePoly([2.0])
    assert dict(Uh.coefficients) == {(1, 0): 3.0, (2, 1): 1.0}
    xU0 = BivariatePoly({(i + 1, 0): c for i, c in enumerate(U0.coefficients)})
    assert U.shift(1, 0) == xU0 + Uh.shift(0, 1)


@settings(max_examples=200, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 12), st.integers(0, 12)),
                       st.floats(-1e6, 1e6, allow_nan=False), max_size=30))
def test_weierstrass_reconstruction_exact(terms):
    terms = {k: c for k, c in terms.items() if sum(k) <= 12}
    U = BivariatePoly(terms, 12)
    U0, Uh = weierstrass_split(U)
    xU0 = BivariatePoly({(i + 1, 0): c for i, c in enumerate(U0.coefficients)})
    assert U.shift(1, 0) == xU0 + Uh.shift(0, 1)


def test_series_radius():
    assert loud_series_radius(LoudParams(-0.8, 0.05)) < 0.5
    assert loud_series_radius(LoudParams(-0.5, 0.05)) > 1.0


def test_rescale_preserves_orbits():
    # X'(p) = X(r p) / r, so the fields agree after the substitution
    u = build_loud_unfolding(LoudParams(-0.8, -0.05))
    r = 0.4
    v = rescale_unfolding(u, r)
    assert v.eps == pytest.approx(u.eps / r**2)
    assert v.radius == pytest.approx(1 / r)
    for p in [(0.3, 0.2), (0.7, 0.9)]:
        fx, fy = eval_normal_field(v, p)
        gx, gy = eval_normal_field(u, (r * p[0], r * p[1]))
        assert fx == pytest.approx(gx / r, rel=1e-12)
        assert fy == pytest.approx(gy / r, rel=1e-12)
