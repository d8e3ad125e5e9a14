"""Seeded verification sweeps: conjugacy, first integrals and the Weierstrass split."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .charts import first_integral_bar, first_integral_normal, pullback_residual
from .errors import DomainError
from .fields import LoudParams, eval_bar_field, weierstrass_split
from .integrator import IntegratorConfig, integrate_span
from .polynomials import BivariatePoly

__all__ = [
    "CheckResult",
    "D_GRID",
    "F_GRID",
    "check_first_integrals",
    "check_pullback",
    "check_weierstrass",
    "random_bivariate",
    "run_checks",
]

D_GRID = (-0.8, -0.5, -0.2)
F_GRID = (-0.3, -0.1, 0.1, 0.3)

PULLBACK_TOL = 1e-9
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    max_residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.samples > 0 and self.max_residual <= self.threshold


def check_pullback(points: int = 100, seed: int = 0, D_grid=D_GRID, F_grid=F_GRID,
                   box: float = 0.2) -> CheckResult:
    """Max conjugacy residual over ``points`` random ``(z, w)``, ``0 < z <= box``, ``|w| <= box``."""
    rng = random.Random(seed)
    worst, n = 0.0, 0
    for D in D_grid:
        for F in F_grid:
            a = LoudParams(D, F)
            for _ in range(points):
                p = (rng.uniform(1e-3, box), rng.uniform(-box, box))
                worst = max(worst, pullback_residual(a, p))
                n += 1
    return CheckResult("pullback", n, worst, PULLBACK_TOL)


def _arc_drift(rhs, start, integral, duration, config):
    orbit = integrate_span(rhs, 0.0, duration, start, config)
    i0 = integral(start)
    drift = 0.0
    for state in orbit.states[1:]:
        drift = max(drift, abs(integral(state) - i0) / abs(i0))
    return drift


def _bar_start(a, rng):
    while True:
        p = (rng.uniform(0.05, 2.0), rng.choice((-1.0, 1.0)) * rng.uniform(0.05, 1.0))
        try:
            if abs(first_integral_bar(a, p)) > 1e-8:
                return p
        except DomainError:
            continue


def _normal_start(a, rng):
    x_min = math.sqrt(max(0.0, -2.0 * a.F)) + 0.05
    return (rng.uniform(x_min, x_min + 1.0), rng.uniform(0.05, 1.0))


def check_first_integrals(points: int = 10, seed: int = 0, D_grid=D_GRID, F_grid=F_GRID,
                          duration: float = 0.25, min_abs_F: float = 0.05,
                          config: IntegratorConfig | None = None) -> CheckResult:
    """Relative drift of the first integrals along integrated arcs.

    Arcs follow the polynomial parts of the projective field and of the normal
    form; dropping the polar factors reparametrizes time but keeps the orbits.
    Cells with ``|F| < min_abs_F`` are skipped since the integrals are
    singular at ``F = 0``.
    """
    rng = random.Random(seed)
    worst, n = 0.0, 0
    for D in D_grid:
        for F in F_grid:
            if abs(F) < min_abs_F:
                continue
            a = LoudParams(D, F)

            def bar_rhs(_t, p, a=a):
                return eval_bar_field(a, p, include_polar_factor=False)

            def normal_rhs(_t, q, F=F):
                x, y = q
                k = x * x + 2.0 * F
                return (x * k, y * (k - 2.0))

            for _ in range(points):
                worst = max(worst, _arc_drift(bar_rhs, _bar_start(a, rng),
                                              lambda p, a=a: first_integral_bar(a, p),
                                              duration, config))
                worst = max(worst, _arc_drift(normal_rhs, _normal_start(a, rng),
                                              lambda q, a=a: first_integral_normal(a, q),
                                              duration, config))
                n += 2
    return CheckResult("integral", n, worst, DRIFT_TOL)


def random_bivariate(rng: random.Random, max_degree: int = 12) -> BivariatePoly:
    deg = rng.randint(0, max_degree)
    monomials = [(i, d - i) for d in range(deg + 1) for i in range(d + 1)]
    chosen = rng.sample(monomials, rng.randint(1, len(monomials)))
    coeffs = {m: rng.uniform(-10.0, 10.0) for m in chosen}
    coeffs[(0, 0)] = coeffs.get((0, 0), 0.0)
    return BivariatePoly(coeffs, deg)


def check_weierstrass(count: int = 1000, seed: int = 0, max_degree: int = 12) -> CheckResult:
    """Count polynomials whose split fails ``x U = x U0 + y Uhat`` on coefficients."""
    rng = random.Random(seed)
    failures = 0
    for _ in range(count):
        U = random_bivariate(rng, max_degree)
        U0, Uhat = weierstrass_split(U)
        x_U0 = BivariatePoly({(i + 1, 0): c for i, c in enumerate(U0.coefficients)})
        if U.shift(1, 0) != x_U0 + Uhat.shift(0, 1):
            failures += 1
    return CheckResult("weierstrass", count, float(failures), 0.0)


CHECKS = ("pullback", "integral", "weierstrass")


def run_checks(names=CHECKS, points: int = 100, seed: int = 0) -> list[CheckResult]:
    out = []
    for name in names:
        if name == "pullback":
            out.append(check_pullback(points, seed))
        elif name == "integral":
            out.append(check_first_integrals(max(1, points // 10), seed))
        elif name == "weierstrass":
            out.append(check_weierstrass(10 * points, seed))
        else:
            raise ValueError(f"unknown check {name!r}")
    return out
