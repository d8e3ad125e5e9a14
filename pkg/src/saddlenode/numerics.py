"""Finite-difference derivatives with one Richardson step, and small grid helpers."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

__all__ = ["Derivative", "extrapolate_to_zero", "richardson_derivative", "richardson_to_zero"]


@dataclass(frozen=True)
class Derivative:
    """Central differences at steps ``h`` (coarse) and ``h/2`` (fine), and their extrapolation."""

    value: float
    coarse: float
    fine: float
    h: float

    @property
    def consistent(self) -> bool:
        """Coarse and fine estimates agree within 1% of the extrapolated value."""
        return abs(self.coarse - self.fine) <= 0.01 * abs(self.value)

    @property
    def sign_stable(self) -> bool:
        return self.coarse != 0.0 and math.copysign(1.0, self.coarse) == math.copysign(
            1.0, self.fine) == math.copysign(1.0, self.value) and self.fine != 0.0

    @property
    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)


def richardson_derivative(f: Callable[[float], float], x: float, h: float) -> Derivative:
    """``f'(x)`` from central differences at ``h`` and ``h/2`` (error O(h^4) after extrapolation)."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    h2 = 0.5 * h
    d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2)
    return Derivative((4.0 * d2 - d1) / 3.0, d1, d2, h)


def richardson_to_zero(s1: float, f1: float, s2: float, f2: float) -> float:
    """Linear extrapolation to ``s = 0`` of ``f(s) = c + k s`` through two samples."""
    return (s1 * f2 - s2 * f1) / (s1 - s2)


def extrapolate_to_zero(s: Sequence[float], f: Sequence[float]) -> float:
    """Value at ``s = 0`` of the interpolating polynomial through ``(s_i, f_i)`` (Neville)."""
    p = [float(v) for v in f]
    s = [float(v) for v in s]
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (s[i] * p[i + 1] - s[i + m] * p[i]) / (s[i] - s[i + m])
    return p[0]
