"""Period function of the center at the origin of the Loud family.

Orbits are parametrized by their crossing ``(u0, 0)`` with ``0 < u0 < 1`` of
the positive u-axis. By the symmetry ``(u, v) -> (u, -v)`` the period is
twice the transit time from ``(u0, 0)`` to the next crossing of ``v = 0``.
The outer boundary of the period annulus is approached as ``u0 -> 1``, where
the Dulac parameter ``s`` of the normal form tends to ``0``; the two
parametrizations run in opposite directions.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import OrbitNotClosedError, SaddleNodeError, UnresolvedBracketError
from .fields import LoudParams
from .integrator import Direction, EventSpec, IntegratorConfig, Status, integrate_until_event
from .numerics import Derivative, richardson_derivative

__all__ = [
    "CellError",
    "CriticalPeriod",
    "HalfPeriod",
    "Kind",
    "MonotonicityCell",
    "MonotonicityReport",
    "PeriodSample",
    "boundary_monotonicity_check",
    "critical_periods",
    "dperiod",
    "dperiod_estimate",
    "geometric_grid",
    "half_period",
    "orbit_period",
    "period_scan",
    "period_scan_csv",
]

U_MAX = 0.995
BRACKET_WIDTH = 1e-6


def _loud_field(a: LoudParams):
    D, F = a.D, a.F

    def field(p):
        u, v = p
        return (-v + u * v, u + D * u * u + F * v * v)

    return field


def _reversed_loud_field(a: LoudParams):
    D, F = a.D, a.F

    def field(p):
        u, v = p
        return (v - u * v, -u - D * u * u - F * v * v)

    return field


def _v_coordinate(p):
    return p[1]


_DOWN = EventSpec(_v_coordinate, Direction.DOWN)
_UP = EventSpec(_v_coordinate, Direction.UP)


def _check_u0(u0: float):
    if not 0.0 < u0 < 1.0:
        raise ValueError(f"u0 must lie in (0, 1), got {u0}")


@dataclass(frozen=True)
class HalfPeriod:
    time: float
    exit_u: float


def half_period(a: LoudParams, u0: float, config: IntegratorConfig | None = None) -> HalfPeriod:
    """Transit time of ``L_a`` from ``(u0, 0)`` to the next (downward) crossing of ``v = 0``."""
    a.require_admissible()
    _check_u0(u0)
    orbit = integrate_until_event(_loud_field(a), (u0, 0.0), _DOWN, config)
    if orbit.status is not Status.EVENT_HIT:
        raise OrbitNotClosedError(
            f"no return to v=0 from u0={u0} at a={a} ({orbit.status.value})",
            status=orbit.status.value)
    return HalfPeriod(orbit.event_time, orbit.event_state[0])


def half_period_reversed(a: LoudParams, exit_u: float,
                         config: IntegratorConfig | None = None) -> HalfPeriod:
    """Transit of ``-L_a`` from ``(exit_u, 0)`` back to the positive u-axis.

    Returns the time and the recovered ``u0``; used as a reversibility check
    of :func:`half_period`.
    """
    orbit = integrate_until_event(_reversed_loud_field(a), (exit_u, 0.0), _DOWN, config)
    if orbit.status is not Status.EVENT_HIT:
        raise OrbitNotClosedError(f"reversed orbit from {exit_u} did not return",
                                  status=orbit.status.value)
    return HalfPeriod(orbit.event_time, orbit.event_state[0])


@dataclass(frozen=True)
class PeriodSample:
    u0: float
    period: float
    dperiod_du0: float
    closure_residual: float
    full_period: float = math.nan
    dperiod_consistent: bool = True


@dataclass(frozen=True)
class CellError:
    u0: float
    status: str
    message: str


def _period(a, u0, config):
    return 2.0 * half_period(a, u0, config).time


def _step_for(u0: float) -> float:
    return min(1e-3, (1.0 - u0) / 50.0, u0 / 50.0)


def dperiod_estimate(a: LoudParams, u0: float,
                     config: IntegratorConfig | None = None) -> Derivative:
    """Richardson central difference of the period in ``u0``."""
    _check_u0(u0)
    return richardson_derivative(lambda u: _period(a, u, config), u0, _step_for(u0))


def dperiod(a: LoudParams, u0: float, config: IntegratorConfig | None = None) -> float:
    return dperiod_estimate(a, u0, config).value


def orbit_period(a: LoudParams, u0: float, config: IntegratorConfig | None = None,
                 derivative: bool = True) -> PeriodSample:
    """Period as twice the half-period, with a full-turn closure check.

    The full turn is integrated to the first upward crossing of ``v = 0``;
    its end point is compared with ``(u0, 0)`` and its duration is kept as
    ``full_period``.
    """
    half = half_period(a, u0, config)
    full = integrate_until_event(_loud_field(a), (u0, 0.0), _UP, config)
    if full.status is not Status.EVENT_HIT:
        raise OrbitNotClosedError(f"full turn from u0={u0} did not close",
                                  status=full.status.value)
    fu, fv = full.event_state
    residual = math.hypot(fu - u0, fv)
    if derivative:
        est = dperiod_estimate(a, u0, config)
        slope, ok = est.value, est.consistent
    else:
        slope, ok = math.nan, True
    return PeriodSample(u0, 2.0 * half.time, slope, residual, full.event_time, ok)


def _period_cell(args):
    a, u0, config = args
    try:
        return orbit_period(a, u0, config)
    except OrbitNotClosedError as exc:
        return CellError(u0, "ORBIT_NOT_CLOSED", f"{exc} [integrator: {exc.status}]")
    except SaddleNodeError as exc:
        return CellError(u0, getattr(exc, "status", None) or type(exc).__name__, str(exc))


def period_scan(a: LoudParams, u0_grid: Sequence[float], config: IntegratorConfig | None = None,
                workers: int | None = None) -> list[PeriodSample | CellError]:
    """Evaluate :func:`orbit_period` on every grid point; failures become :class:`CellError`."""
    cells = [(a, float(u), config) for u in u0_grid]
    return ordered_map(_period_cell, cells, workers)


PERIOD_COLUMNS = ("D", "F", "u0", "period", "dperiod", "closure_residual", "status")


def period_scan_csv(a: LoudParams, results: Sequence[PeriodSample | CellError]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PERIOD_COLUMNS)
    for r in results:
        if isinstance(r, CellError):
            w.writerow([repr(a.D), repr(a.F), repr(r.u0), "nan", "nan", "nan", r.status])
        else:
            status = "OK" if r.dperiod_consistent else "INCONSISTENT"
            w.writerow([repr(a.D), repr(a.F), repr(r.u0), repr(r.period), repr(r.dperiod_du0),
                        repr(r.closure_residual), status])
    return buf.getvalue()


class Kind(enum.Enum):
    MIN = "MIN"
    MAX = "MAX"


@dataclass(frozen=True)
class CriticalPeriod:
    u0: float
    period: float
    kind: Kind
    bracket: tuple[float, float]

    def to_json_obj(self) -> dict:
        return {"u0": self.u0, "period": self.period, "kind": self.kind.value,
                "bracket": list(self.bracket)}


def geometric_grid(lo: float, hi: float, n: int, ratio: float = 20.0) -> list[float]:
    """``n`` points from ``lo`` to ``hi`` whose gaps shrink geometrically toward ``hi``.

    The first gap is ``ratio`` times the last one.
    """
    if n < 2:
        return [lo] if n == 1 else []
    if n == 2:
        return [lo, hi]
    q = (1.0 / ratio) ** (1.0 / (n - 2))
    gaps = q ** np.arange(n - 1)
    pts = lo + (hi - lo) * np.concatenate([[0.0], np.cumsum(gaps) / gaps.sum()])
    pts[-1] = hi
    return [float(p) for p in pts]


def _certified_sign(est: Derivative, u: float) -> int:
    if not est.sign_stable:
        raise UnresolvedBracketError(
            f"sign of the period derivative at u0={u} is not stable under step halving "
            f"(h: {est.coarse}, h/2: {est.fine})")
    return est.sign


@dataclass
class _SignScan:
    grid: list[float]
    signs: list[int]
    values: list[float]
    critical: list[CriticalPeriod] = field(default_factory=list)

    @property
    def sign_changes(self) -> int:
        return sum(1 for s1, s2 in zip(self.signs, self.signs[1:]) if s1 != s2)


def _scan_critical(derivative: Callable[[float], Derivative], period: Callable[[float], float],
                   lo: float, hi: float, n_grid: int) -> _SignScan:
    grid = geometric_grid(lo, hi, n_grid)
    ests = [derivative(u) for u in grid]
    signs = [_certified_sign(e, u) for e, u in zip(ests, grid)]
    scan = _SignScan(grid, signs, [e.value for e in ests])
    for k in range(len(grid) - 1):
        sl, sr = signs[k], signs[k + 1]
        if sl == sr:
            continue
        ul, ur = grid[k], grid[k + 1]
        while ur - ul > BRACKET_WIDTH:
            um = 0.5 * (ul + ur)
            sm = _certified_sign(derivative(um), um)
            if sm == sl:
                ul = um
            else:
                ur = um
        u_star = 0.5 * (ul + ur)
        kind = Kind.MAX if sl > sr else Kind.MIN
        scan.critical.append(CriticalPeriod(u_star, period(u_star), kind, (ul, ur)))
    return scan


def critical_periods(a: LoudParams | None, interval: tuple[float, float],
                     config: IntegratorConfig | None = None, n_grid: int = 64,
                     period_fn: Callable[[float], float] | None = None) -> list[CriticalPeriod]:
    """Locate critical periods of the period function in ``interval``.

    The derivative sign is sampled on a grid refined geometrically toward the
    upper end; each sign change is bisected down to a bracket of width 1e-6.
    ``period_fn`` replaces the Loud period function (``a`` is then ignored).
    Raises :class:`UnresolvedBracketError` when a sign cannot be certified.
    """
    lo, hi = interval
    if not 0.0 < lo <= hi < 1.0:
        raise ValueError(f"interval {interval} must lie inside (0, 1)")
    if hi == lo:
        return []
    if period_fn is None:
        def period_fn(u):
            return _period(a, u, config)

    def deriv(u):
        return richardson_derivative(period_fn, u, _step_for(u))

    return _scan_critical(deriv, period_fn, lo, hi, n_grid).critical


@dataclass(frozen=True)
class MonotonicityCell:
    D: float
    F: float
    status: str
    signs: tuple[int, ...] = ()
    sign_changes: int = 0
    critical: tuple[CriticalPeriod, ...] = ()
    message: str = ""

    def to_json_obj(self) -> dict:
        return {"D": self.D, "F": self.F, "status": self.status, "signs": list(self.signs),
                "sign_changes": self.sign_changes,
                "critical_periods": [c.to_json_obj() for c in self.critical],
                "message": self.message}


@dataclass(frozen=True)
class MonotonicityReport:
    D0: float
    delta: float
    window: tuple[float, float]
    cells: tuple[MonotonicityCell, ...]

    @property
    def violations(self) -> list[MonotonicityCell]:
        return [c for c in self.cells if c.status == "VIOLATION"]

    @property
    def inconclusive(self) -> list[MonotonicityCell]:
        return [c for c in self.cells if c.status == "INCONCLUSIVE"]

    def to_json_obj(self) -> dict:
        return {"D0": self.D0, "delta": self.delta, "window": list(self.window),
                "violations": len(self.violations), "inconclusive": len(self.inconclusive),
                "cells": [c.to_json_obj() for c in self.cells]}


def _offsets(delta: float, n: int) -> list[float]:
    # n points strictly inside (-delta, delta), symmetric about 0
    return [float(v) for v in delta * np.linspace(-1.0, 1.0, n + 2)[1:-1]]


def _monotonicity_cell(args) -> MonotonicityCell:
    a, window, n_u, config = args
    if window[0] == window[1]:
        return MonotonicityCell(a.D, a.F, "OK")
    try:
        scan = _scan_critical(lambda u: dperiod_estimate(a, u, config),
                              lambda u: _period(a, u, config), window[0], window[1], n_u)
    except SaddleNodeError as exc:
        return MonotonicityCell(a.D, a.F, "INCONCLUSIVE", message=str(exc))
    status = "OK" if scan.sign_changes == 0 and not scan.critical else "VIOLATION"
    return MonotonicityCell(a.D, a.F, status, tuple(scan.signs), scan.sign_changes,
                            tuple(scan.critical))


def boundary_monotonicity_check(D0: float, delta: float, n_D: int = 3, n_F: int = 3,
                                window: tuple[float, float] = (0.95, U_MAX), n_u: int = 64,
                                config: IntegratorConfig | None = None,
                                workers: int | None = None) -> MonotonicityReport:
    """Check that the period derivative keeps its sign near the outer boundary.

    Cells are ``(D0 + dD, dF)`` with offsets strictly inside ``(-delta, delta)``.
    In each cell the derivative sign is certified on ``n_u`` points of
    ``window`` and critical periods are searched with the same grid. Cells
    whose signs cannot be certified, or whose orbits do not close, are
    reported as inconclusive instead of failing the check.
    """
    if not -1.0 < D0 < 0.0:
        raise ValueError("D0 must lie in (-1, 0)")
    if not delta > 0:
        raise ValueError("delta must be positive")
    cells = [(LoudParams(D0 + dD, dF), tuple(window), n_u, config)
             for dD in _offsets(delta, n_D) for dF in _offsets(delta, n_F)]
    results = ordered_map(_monotonicity_cell, cells, workers)
    return MonotonicityReport(D0, delta, tuple(window), tuple(results))
