"""Projective chart, the normalizing change of coordinates and first integrals.

The chain of coordinates is

    (u, v)  --to_projective-->  (z, w)  --psi-->  (x, y)

where ``psi(z, w) = (z, w) / sqrt(g(z, w))`` conjugates the projective
extension of ``-L_a`` to the normal form ``X_a`` near the saddle-node at
infinity.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, SingularJacobianError, SingularLocusError
from .fields import LoudParams, Vec2, eval_bar_field, loud_normal_U

__all__ = [
    "Chart",
    "ChartPoint",
    "first_integral_bar",
    "first_integral_normal",
    "first_integral_normal_gradient",
    "from_projective",
    "g_eval",
    "g_gradient",
    "normal_field_loud",
    "psi",
    "psi_inverse",
    "psi_jacobian",
    "pullback_residual",
    "section_point",
    "to_projective",
]


class Chart(enum.Enum):
    AFFINE_UV = "AFFINE_UV"
    PROJECTIVE_ZW = "PROJECTIVE_ZW"
    NORMAL_XY = "NORMAL_XY"


@dataclass(frozen=True)
class ChartPoint:
    coords: Vec2
    chart: Chart

    def __post_init__(self):
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"non-finite coordinates {self.coords}")

    def to_json_obj(self) -> dict:
        return {"coords": [float(self.coords[0]), float(self.coords[1])],
                "chart": self.chart.value}

    @classmethod
    def from_json_obj(cls, obj) -> ChartPoint:
        c1, c2 = obj["coords"]
        return cls((float(c1), float(c2)), Chart(obj["chart"]))


def to_projective(p: Vec2) -> Vec2:
    u, v = p
    if v == 0.0:
        raise SingularLocusError("projective chart is singular on v = 0")
    return (1.0 / v, (1.0 - u) / v)


def from_projective(p: Vec2) -> Vec2:
    z, w = p
    if z == 0.0:
        raise SingularLocusError("z = 0 is the line at infinity")
    return (1.0 - w / z, 1.0 / z)


def _g_coeffs(a: LoudParams) -> tuple[float, float, float]:
    D, F = a.D, a.F
    kww = D / (2.0 * (F - 1.0) * (D + 1.0))
    kwz = -(2.0 * D + 1.0) / ((2.0 * F - 1.0) * (D + 1.0))
    k0 = 1.0 / (2.0 * (D + 1.0))
    return kww, kwz, k0


def g_eval(a: LoudParams, p: Vec2) -> float:
    a.require_admissible()
    z, w = p
    kww, kwz, k0 = _g_coeffs(a)
    return kww * w * w + kwz * w * z + k0


def g_gradient(a: LoudParams, p: Vec2) -> Vec2:
    """``(dg/dz, dg/dw)``."""
    z, w = p
    kww, kwz, _ = _g_coeffs(a)
    return (kwz * w, 2.0 * kww * w + kwz * z)


def psi(a: LoudParams, p: Vec2) -> Vec2:
    g = g_eval(a, p)
    if not g > 0.0:
        raise DomainError(f"g={g} is not positive at {p}")
    r = math.sqrt(g)
    return (p[0] / r, p[1] / r)


def psi_jacobian(a: LoudParams, p: Vec2) -> np.ndarray:
    """Analytic Jacobian ``[[dx/dz, dx/dw], [dy/dz, dy/dw]]`` of ``psi``."""
    z, w = p
    g = g_eval(a, p)
    if not g > 0.0:
        raise DomainError(f"g={g} is not positive at {p}")
    gz, gw = g_gradient(a, p)
    s = g ** -0.5
    t = -0.5 * g ** -1.5
    return np.array([[s + t * z * gz, t * z * gw],
                     [t * w * gz, s + t * w * gw]])


def psi_inverse(a: LoudParams, q: Vec2, guess: Vec2, tol: float = 1e-12,
                max_iter: int = 50) -> Vec2:
    """Solve ``psi(z, w) = q`` by Newton's method from ``guess``."""
    z, w = float(guess[0]), float(guess[1])
    for _ in range(max_iter):
        x, y = psi(a, (z, w))
        rx, ry = x - q[0], y - q[1]
        if max(abs(rx), abs(ry)) <= tol:
            return (z, w)
        J = psi_jacobian(a, (z, w))
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-14:
            raise SingularJacobianError(f"singular Jacobian of psi at {(z, w)}")
        dz = float((J[1, 1] * rx - J[0, 1] * ry) / det)
        dw = float((-J[1, 0] * rx + J[0, 0] * ry) / det)
        z, w = z - dz, w - dw
    x, y = psi(a, (z, w))
    if max(abs(x - q[0]), abs(y - q[1])) <= tol:
        return (z, w)
    raise ConvergenceError(f"Newton inversion of psi did not converge for q={q}")


def section_point(a: LoudParams, x: float, y: float, steps: int = 20) -> Vec2:
    """``psi^{-1}(x, y)`` by continuation from ``(x, 0)`` along the segment to ``(x, y)``.

    On ``y = 0``, ``psi`` reduces to ``z -> z * sqrt(2(D+1))`` so the start is exact.
    """
    guess = (x / math.sqrt(2.0 * (a.D + 1.0)), 0.0)
    for k in range(1, steps + 1):
        guess = psi_inverse(a, (x, y * k / steps), guess)
    return guess


def normal_field_loud(a: LoudParams, q: Vec2,
                      U: Callable[[float, float], float] | None = None) -> Vec2:
    """Full normal-form field ``X_a`` at ``(x, y)`` (polar factor included)."""
    x, y = q
    Uval = loud_normal_U(a, q) if U is None else U(x, y)
    denom = x * Uval
    if denom == 0.0:
        raise SingularLocusError(f"polar locus of X_a at {q}")
    k = x * x + 2.0 * a.F
    return (x * k / denom, y * (k - 2.0) / denom)


def pullback_residual(a: LoudParams, p: Vec2,
                      U: Callable[[float, float], float] | None = None) -> float:
    """Relative defect of the conjugacy ``D psi . Xbar_a = X_a o psi`` at ``p = (z, w)``."""
    q = psi(a, p)
    J = psi_jacobian(a, p)
    bz, bw = eval_bar_field(a, p, include_polar_factor=True)
    lx = J[0, 0] * bz + J[0, 1] * bw
    ly = J[1, 0] * bz + J[1, 1] * bw
    rx, ry = normal_field_loud(a, q, U)
    return math.hypot(lx - rx, ly - ry) / (1.0 + math.hypot(rx, ry))


def _check_integral_domain(F: float, first: float):
    if F == 0.0:
        raise DomainError("first integral is only defined for F != 0")
    if first == 0.0:
        raise SingularLocusError("first integral is singular on the polar line")


def first_integral_bar(a: LoudParams, p: Vec2) -> float:
    """``(w/z) (1 + 2F g/z^2)^(-1/(2F))``, constant along orbits of the projective field."""
    z, w = p
    _check_integral_domain(a.F, z)
    base = 1.0 + 2.0 * a.F * g_eval(a, p) / (z * z)
    if not base > 0.0:
        raise DomainError(f"first integral base {base} is not positive at {p}")
    return (w / z) * base ** (-1.0 / (2.0 * a.F))


def first_integral_normal(a: LoudParams, q: Vec2) -> float:
    """``(y/x) (1 + 2F/x^2)^(-1/(2F))``."""
    x, y = q
    _check_integral_domain(a.F, x)
    base = 1.0 + 2.0 * a.F / (x * x)
    if not base > 0.0:
        raise DomainError(f"first integral base {base} is not positive at {q}")
    return (y / x) * base ** (-1.0 / (2.0 * a.F))


def first_integral_normal_gradient(a: LoudParams, q: Vec2) -> Vec2:
    """Analytic ``(dI/dx, dI/dy)`` of :func:`first_integral_normal`."""
    x, y = q
    F = a.F
    _check_integral_domain(F, x)
    base = 1.0 + 2.0 * F / (x * x)
    if not base > 0.0:
        raise DomainError(f"first integral base {base} is not positive at {q}")
    p = base ** (-1.0 / (2.0 * F))
    # d/dx log(base^(-1/2F)) = (-1/2F) * (-4F/x^3) / base = 2 / (x^3 base)
    dIdx = y * p * (-1.0 / (x * x) + 2.0 / (x ** 4 * base))
    dIdy = p / x
    return (dIdx, dIdy)
