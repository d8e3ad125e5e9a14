"""Vector fields of the Loud family, its projective extension and the saddle-node normal form.

Three fields are represented exactly:

* the dehomogenized Loud center ``L_a = (-v + uv) d/du + (u + D u^2 + F v^2) d/dv``;
* its meromorphic extension to the projective chart ``(z, w) = (1/v, (1-u)/v)``
  (the time-reversed field ``-L_a`` written in that chart);
* the unfolding ``X = (x (x^mu - eps) d/dx - V(x) y d/dy) / (x U(x, y))``.

Plain ``(float, float)`` tuples are used for planar points and vectors.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import dataclass, field

from .errors import DomainError, ParameterBoxError, SingularLocusError
from .polynomials import BivariatePoly, UnivariatePoly

__all__ = [
    "ADMISSIBLE_BOX",
    "LoudParams",
    "Unfolding",
    "Vec2",
    "build_loud_unfolding",
    "eval_bar_field",
    "eval_loud",
    "eval_normal_field",
    "loud_normal_U",
    "loud_radicand",
    "loud_series_radius",
    "rescale_unfolding",
    "weierstrass_split",
]

Vec2 = tuple[float, float]

# open box for (D, F) where the normal form applies
ADMISSIBLE_BOX: tuple[tuple[float, float], tuple[float, float]] = ((-1.0, 0.0), (-0.5, 0.5))


@dataclass(frozen=True)
class LoudParams:
    """Parameter ``a = (D, F)`` of the Loud family (``B`` fixed to 1)."""

    D: float
    F: float

    def __post_init__(self):
        if not (math.isfinite(self.D) and math.isfinite(self.F)):
            raise ValueError(f"non-finite Loud parameters {(self.D, self.F)}")

    def is_admissible(self, box=ADMISSIBLE_BOX) -> bool:
        (dlo, dhi), (flo, fhi) = box
        return dlo < self.D < dhi and flo < self.F < fhi

    def require_admissible(self, box=ADMISSIBLE_BOX) -> LoudParams:
        if not self.is_admissible(box):
            raise ParameterBoxError(
                f"a=(D={self.D}, F={self.F}) outside the admissible box "
                f"D in {box[0]}, F in {box[1]}")
        return self

    @property
    def eps(self) -> float:
        """Unfolding parameter of the normal form, ``-2F``."""
        return -2.0 * self.F + 0.0  # no signed zero


def eval_loud(a: LoudParams, p: Vec2, reversed: bool = False) -> Vec2:
    """Evaluate ``L_a`` (or ``-L_a`` when ``reversed``) at ``p = (u, v)``."""
    u, v = p
    du = -v + u * v
    dv = u + a.D * u * u + a.F * v * v
    if reversed:
        return (-du, -dv)
    return (du, dv)


def eval_bar_field(a: LoudParams, p: Vec2, include_polar_factor: bool = True) -> Vec2:
    """Time-reversed Loud field in the projective chart ``(z, w)``.

    The polynomial part is ``(z P, w (P - 1))`` with
    ``P = F + (D+1) z^2 - (2D+1) z w + D w^2``; the full field divides it by ``z``.
    """
    z, w = p
    D, F = a.D, a.F
    P = F + (D + 1.0) * z * z - (2.0 * D + 1.0) * z * w + D * w * w
    if not include_polar_factor:
        return (z * P, w * (P - 1.0))
    if z == 0.0:
        raise SingularLocusError("projective field has a pole on z = 0")
    return (P, w * (P - 1.0) / z)


@dataclass(frozen=True)
class Unfolding:
    """Normal-form data ``(mu, eps, U, V)`` of a saddle-node unfolding.

    ``U`` is a polynomial truncation of the analytic time factor; ``V`` the
    analytic hyperbolicity ratio (polynomial here). Construction validates
    ``U(0,0) > 0``, ``V > 0`` on ``[-radius, radius]`` and ``|eps| < radius**mu``.
    """

    mu: int
    eps: float
    U: BivariatePoly
    V: UnivariatePoly
    radius: float = 1.0
    _split: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.mu) != self.mu or self.mu < 1:
            raise ValueError(f"mu must be a positive integer, got {self.mu!r}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if not math.isfinite(self.eps) or abs(self.eps) >= self.radius ** self.mu:
            raise ParameterBoxError(
                f"|eps|={abs(self.eps)} must be below radius**mu={self.radius ** self.mu}")
        if not self.U(0.0, 0.0) > 0.0:
            raise DomainError("U(0,0) must be positive")
        _check_positive_on_interval(self.V, self.radius)
        object.__setattr__(self, "_split", weierstrass_split(self.U))

    @property
    def U0(self) -> UnivariatePoly:
        """``x -> U(x, 0)`` from the Weierstrass split."""
        return self._split[0]

    @property
    def Uhat(self) -> BivariatePoly:
        return self._split[1]

    def to_json_obj(self) -> dict:
        return {"mu": self.mu, "eps": self.eps, "U": self.U.to_json_obj(),
                "V": self.V.to_json_obj(), "radius": self.radius}

    @classmethod
    def from_json_obj(cls, obj) -> Unfolding:
        return cls(mu=int(obj["mu"]), eps=float(obj["eps"]),
                   U=BivariatePoly.from_json_obj(obj["U"]),
                   V=UnivariatePoly.from_json_obj(obj["V"]),
                   radius=float(obj.get("radius", 1.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, text: str) -> Unfolding:
        return cls.from_json_obj(json.loads(text))


def _check_positive_on_interval(V: UnivariatePoly, r: float, max_points: int = 1 << 16):
    # sampled minimum minus derivative bound times half the sample spacing
    lip = V.derivative().abs_bound(r)
    n = 257
    while True:
        xs = [-r + 2.0 * r * k / (n - 1) for k in range(n)]
        m = min(V(x) for x in xs)
        if m <= 0.0:
            raise DomainError(f"V is not positive on [-{r}, {r}] (min sample {m})")
        if m > lip * r / (n - 1):
            return
        if n >= max_points:
            raise DomainError(f"could not certify V > 0 on [-{r}, {r}]")
        n = 2 * n - 1


def eval_normal_field(unf: Unfolding, p: Vec2, include_polar_factor: bool = True,
                      U: Callable[[float, float], float] | None = None) -> Vec2:
    """Evaluate the unfolding ``X`` at ``(x, y)``.

    ``U`` overrides the stored polynomial truncation (e.g. with a closed form).
    """
    x, y = p
    px = x * (x ** unf.mu - unf.eps)
    py = -unf.V(x) * y
    if not include_polar_factor:
        return (px, py)
    denom = x * (unf.U(x, y) if U is None else U(x, y))
    if denom == 0.0:
        raise SingularLocusError(f"polar locus x*U(x,y)=0 at {(x, y)}")
    return (px / denom, py / denom)


def _loud_U_coeffs(a: LoudParams) -> tuple[float, float, float]:
    D, F = a.D, a.F
    alpha = (2.0 * D + 1.0) / (2.0 * (2.0 * F - 1.0))
    beta = -D / (4.0 * (F - 1.0))
    c = (D + 1.0) / 2.0
    return alpha, beta, c


def loud_radicand(a: LoudParams, p: Vec2) -> float:
    alpha, beta, c = _loud_U_coeffs(a)
    x, y = p
    return alpha * x * y + beta * y * y + c


def loud_normal_U(a: LoudParams, p: Vec2) -> float:
    """Closed-form time factor ``U_a(x, y)`` of the normalized Loud unfolding."""
    r = loud_radicand(a, p)
    if not r > 0.0:
        raise DomainError(f"U_a radicand {r} is not positive at {p}")
    return 1.0 / math.sqrt(r)


def loud_series_radius(a: LoudParams) -> float:
    """Largest ``r`` with the Taylor series of ``U_a`` absolutely convergent on ``[-r, r]^2``.

    The monomials of ``(alpha x y + beta y^2)^k`` never collide across ``k``, so
    absolute convergence on the square holds iff ``(|alpha| + |beta|) r^2 < c``.
    """
    alpha, beta, c = _loud_U_coeffs(a)
    k = abs(alpha) + abs(beta)
    return math.inf if k == 0.0 else math.sqrt(c / k)


def build_loud_unfolding(a: LoudParams, degree: int = 8) -> Unfolding:
    """Normal form of the Loud saddle-node unfolding at infinity.

    ``mu = 2``, ``eps = -2F``, ``V(x) = 2 - 2F - x^2`` and ``U`` is the Taylor
    polynomial of ``U_a`` of total degree ``degree``, obtained from the
    binomial series of ``c^{-1/2} (1 + q/c)^{-1/2}`` with
    ``q = alpha x y + beta y^2``.
    """
    a.require_admissible()
    if degree < 2:
        raise ValueError("degree must be at least 2")
    alpha, beta, c = _loud_U_coeffs(a)
    coeffs: dict[tuple[int, int], float] = {}
    binom = 1.0  # binomial(-1/2, k)
    for k in range(degree // 2 + 1):
        if k > 0:
            binom *= (-0.5 - (k - 1)) / k
        lead = c ** -0.5 * binom / c ** k
        # (alpha x y + beta y^2)^k = sum_m C(k, m) alpha^m beta^(k-m) x^m y^(2k-m)
        for m in range(k + 1):
            term = lead * math.comb(k, m) * alpha ** m * beta ** (k - m)
            key = (m, 2 * k - m)
            coeffs[key] = coeffs.get(key, 0.0) + term
    U = BivariatePoly(coeffs, degree)
    V = UnivariatePoly([2.0 - 2.0 * a.F, 0.0, -1.0])
    return Unfolding(mu=2, eps=a.eps, U=U, V=V)


def weierstrass_split(U: BivariatePoly) -> tuple[UnivariatePoly, BivariatePoly]:
    """Split ``x U(x,y) = x U(x,0) + y Uhat(x,y)`` on coefficients.

    Every monomial ``x^i y^j`` of ``U`` with ``j >= 1`` becomes ``x^(i+1) y^(j-1)``
    in ``Uhat``; no arithmetic touches the coefficients.
    """
    U0 = U.restrict_y0()
    Uhat = BivariatePoly({(i + 1, j - 1): c for (i, j), c in U.coefficients.items() if j >= 1},
                         U.max_degree)
    return U0, Uhat


def rescale_unfolding(unf: Unfolding, r: float) -> Unfolding:
    """Substitute ``x -> r x``, ``y -> r y`` keeping the time variable.

    The new data are ``eps / r^mu``, ``V(r x) / r^mu`` and
    ``U(r x, r y) / r^(mu-1)``; the valid half-width becomes ``radius / r``.
    """
    if not r > 0:
        raise ValueError("rescaling factor must be positive")
    mu = unf.mu
    U = unf.U.scale_variables(r, r) * (1.0 / r ** (mu - 1))
    V = UnivariatePoly(c * r ** k / r ** mu for k, c in enumerate(unf.V.coefficients))
    return Unfolding(mu=mu, eps=unf.eps / r ** mu, U=U, V=V, radius=unf.radius / r)
