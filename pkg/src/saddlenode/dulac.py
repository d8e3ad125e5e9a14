"""Dulac time and Dulac map of the saddle-node unfolding between ``{y=1}`` and ``{x=1}``.

The trajectory starting at ``(s + theta, 1)`` is integrated with ``x`` as the
independent variable. The augmented state is ``(log y, t, t1)``:

    d(log y)/dx = -V(x) / (x (x^mu - eps))
    dt/dx       = U(x, y) / (x^mu - eps)
    dt1/dx      = y Uhat(x, y) / (x (x^mu - eps))

so ``t(1)`` is the Dulac time, ``exp(log y(1))`` the Dulac map and ``t1(1)``
the part of the time carried by ``Uhat`` in the Weierstrass split. The Dulac
map is tracked in logarithmic form because it underflows double precision
already for moderate ``s`` when ``eps = 0``.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field, replace

from scipy.integrate import quad

from ._parallel import ordered_map
from .errors import (
    ConvergenceError,
    DomainError,
    IntegrationError,
    ParameterBoxError,
    SaddleNodeError,
)
from .fields import Unfolding
from .integrator import IntegratorConfig, integrate_ode_in_x
from .numerics import Derivative, extrapolate_to_zero, richardson_derivative, richardson_to_zero

__all__ = [
    "CoeffFit",
    "DEFAULT_S_FLOOR",
    "EPS0",
    "DulacSample",
    "MAP_CONFIG",
    "S0",
    "ScanRow",
    "SlopeScan",
    "T0_time",
    "dT0_ds",
    "dT_ds",
    "dT_ds_estimate",
    "dulac_map",
    "dulac_map_quadrature",
    "dulac_time",
    "fit_c0_c1",
    "slope_scan",
    "theta",
]

# smallest s resolved at the default tolerances
DEFAULT_S_FLOOR = 1e-3
# scan bounds for s and |eps|; small enough for the asymptotic regime, not claimed maximal
S0 = 0.25
EPS0 = 0.1
# log D is large near s = 0, so its absolute error scales with rel_tol * |log D|
MAP_CONFIG = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-14)

UFunc = Callable[[float, float], float]


def theta(eps: float, mu: int) -> float:
    """Largest real root of ``x (x^mu - eps)``: ``0`` for ``eps <= 0``, else ``eps^(1/mu)``."""
    if eps <= 0.0:
        return 0.0
    return eps ** (1.0 / mu)


@dataclass(frozen=True)
class DulacSample:
    s: float
    eps: float
    T: float
    Dmap: float
    dT_ds: float
    T0: float
    T1: float
    log_Dmap: float
    dT_ds_consistent: bool = True


def _start(unf: Unfolding, s: float, s_floor: float) -> float:
    if not s > 0.0:
        raise DomainError(f"section parameter must be positive, got s={s}")
    x0 = s + theta(unf.eps, unf.mu)
    if not x0 < 1.0:
        raise DomainError(f"s + theta = {x0} must be below the exit section x = 1")
    if s < s_floor:
        raise IntegrationError(
            f"s={s} is below the resolvable floor {s_floor} at these tolerances",
            status="STEP_UNDERFLOW")
    return x0


def _transit(unf: Unfolding, x0: float, config: IntegratorConfig | None,
             U: UFunc | None = None) -> tuple[float, float, float]:
    mu, eps, V = unf.mu, unf.eps, unf.V
    if U is None:
        Upoly, Uhat = unf.U, unf.Uhat

        def rhs(x, state):
            y = math.exp(state[0])
            d = x ** mu - eps
            return (-V(x) / (x * d), Upoly(x, y) / d, y * Uhat(x, y) / (x * d))
    else:
        def rhs(x, state):
            y = math.exp(state[0])
            d = x ** mu - eps
            return (-V(x) / (x * d), U(x, y) / d, (U(x, y) - U(x, 0.0)) / d)

    log_y, t, t1 = integrate_ode_in_x(rhs, x0, 1.0, (0.0, 0.0, 0.0), config)
    return t, log_y, t1


def _log_quad(fn: Callable[[float], float], x0: float, th: float, epsrel: float) -> float:
    # integrate over [x0, 1] in the variable tau = log(x - th) to tame the endpoint growth
    def g(tau):
        sig = math.exp(tau)
        return sig * fn(th + sig)

    val, _, info, *rest = quad(g, math.log(x0 - th), math.log(1.0 - th), epsabs=0.0,
                               epsrel=epsrel, limit=400, full_output=1)
    if rest:
        raise ConvergenceError(f"quadrature did not converge: {rest[0]}")
    return val


def T0_time(unf: Unfolding, s: float, U: UFunc | None = None,
            s_floor: float = DEFAULT_S_FLOOR) -> float:
    """Quadrature of ``U(x, 0) / (x^mu - eps)`` over ``[s + theta, 1]``."""
    x0 = _start(unf, s, s_floor)
    th = theta(unf.eps, unf.mu)
    U0 = unf.U0 if U is None else (lambda x: U(x, 0.0))
    mu, eps = unf.mu, unf.eps
    return _log_quad(lambda x: U0(x) / (x ** mu - eps), x0, th, 1e-13)


def dT0_ds(unf: Unfolding, s: float, U: UFunc | None = None) -> float:
    """Closed form ``-U(s + theta, 0) / ((s + theta)^mu - eps)``."""
    if not s > 0.0:
        raise DomainError("s must be positive")
    x = s + theta(unf.eps, unf.mu)
    u0 = unf.U0(x) if U is None else U(x, 0.0)
    return -u0 / (x ** unf.mu - unf.eps)


def dulac_map_quadrature(unf: Unfolding, s: float, log: bool = False,
                         s_floor: float = DEFAULT_S_FLOOR) -> float:
    """``exp(-int V / (x (x^mu - eps)))`` by adaptive quadrature (independent of the ODE path)."""
    x0 = _start(unf, s, s_floor)
    th = theta(unf.eps, unf.mu)
    mu, eps, V = unf.mu, unf.eps, unf.V
    val = -_log_quad(lambda x: V(x) / (x * (x ** mu - eps)), x0, th, 1e-13)
    return val if log else math.exp(val)


def dulac_map(unf: Unfolding, s: float, config: IntegratorConfig | None = None,
              log: bool = False, s_floor: float = DEFAULT_S_FLOOR) -> float:
    """Dulac map ``D(s)``: the height at which the orbit from ``(s + theta, 1)`` reaches ``x = 1``.

    Computed by integrating ``log y`` in ``x``; with ``log=True`` the logarithm
    is returned, which stays finite when ``D`` underflows. ``config`` defaults
    to :data:`MAP_CONFIG`.
    """
    x0 = _start(unf, s, s_floor)
    mu, eps, V = unf.mu, unf.eps, unf.V

    def rhs(x, state):
        return (-V(x) / (x * (x ** mu - eps)),)

    (log_y,) = integrate_ode_in_x(rhs, x0, 1.0, (0.0,), config or MAP_CONFIG)
    return log_y if log else math.exp(log_y)


def _derivative_step(s: float) -> float:
    return min(s / 20.0, 1e-3)


def dT_ds_estimate(unf: Unfolding, s: float, config: IntegratorConfig | None = None,
                   U: UFunc | None = None, s_floor: float = DEFAULT_S_FLOOR) -> Derivative:
    """Richardson-extrapolated central difference of the Dulac time in ``s``."""
    _start(unf, s, s_floor)
    th = theta(unf.eps, unf.mu)
    return richardson_derivative(lambda v: _transit(unf, v + th, config, U)[0], s,
                                 _derivative_step(s))


def dT_ds(unf: Unfolding, s: float, config: IntegratorConfig | None = None,
          U: UFunc | None = None, s_floor: float = DEFAULT_S_FLOOR) -> float:
    return dT_ds_estimate(unf, s, config, U, s_floor).value


def dulac_time(unf: Unfolding, s: float, config: IntegratorConfig | None = None,
               U: UFunc | None = None, derivative: bool = True,
               s_floor: float = DEFAULT_S_FLOOR) -> DulacSample:
    """Dulac time from ``(s + theta, 1)`` to ``{x = 1}`` with its decomposition.

    ``T0`` comes from quadrature, ``T1`` is integrated along the same
    trajectory; ``T - (T0 + T1)`` therefore measures the combined numerical
    error. ``derivative=False`` skips the four extra transits needed for ``dT_ds``.
    """
    x0 = _start(unf, s, s_floor)
    T, log_y, T1 = _transit(unf, x0, config, U)
    T0 = T0_time(unf, s, U, s_floor)
    if derivative:
        est = dT_ds_estimate(unf, s, config, U, s_floor)
        slope, ok = est.value, est.consistent
    else:
        slope, ok = math.nan, True
    return DulacSample(s=s, eps=unf.eps, T=T, Dmap=math.exp(log_y), dT_ds=slope, T0=T0, T1=T1,
                       log_Dmap=log_y, dT_ds_consistent=ok)


@dataclass(frozen=True)
class CoeffFit:
    c0: float
    c1: float
    remainder_profile: list[tuple[float, float]]
    stable: bool
    coarse: tuple[float, float] = field(default=(math.nan, math.nan))

    def to_json_obj(self) -> dict:
        return {"c0": self.c0, "c1": self.c1, "stable": self.stable,
                "coarse": list(self.coarse),
                "remainder_profile": [[s, h] for s, h in self.remainder_profile]}


def _extrapolate_c0_c1(s: Sequence[float], t1: Sequence[float]) -> tuple[float, float]:
    c0 = extrapolate_to_zero(s[-3:], t1[-3:])
    q = [(v - c0) / x for x, v in zip(s, t1)]
    c1 = richardson_to_zero(s[-2], q[-2], s[-1], q[-1])
    return c0, c1


def fit_c0_c1(unf: Unfolding, s_grid: Sequence[float], config: IntegratorConfig | None = None,
              U: UFunc | None = None, s_floor: float = DEFAULT_S_FLOOR) -> CoeffFit:
    """Extract ``c0, c1`` of ``T1(s) = c0 + c1 s + s h(s)`` on a decreasing grid.

    ``c0`` is the quadratic extrapolation of ``T1`` to ``s = 0`` through the
    three finest points and ``c1`` the linear extrapolation of ``(T1 - c0) / s``
    through the two finest.
    ``stable`` compares with the fit obtained without the finest point:
    the vector ``(c0, c1)`` must move by less than 1% of its norm.
    """
    s_grid = [float(v) for v in s_grid]
    if len(s_grid) < 4:
        raise ValueError("fit_c0_c1 needs at least four grid points")
    if any(b >= a for a, b in zip(s_grid, s_grid[1:])):
        raise ValueError("s_grid must be strictly decreasing")
    t1 = []
    for s in s_grid:
        x0 = _start(unf, s, s_floor)
        t1.append(_transit(unf, x0, config, U)[2])
    c0, c1 = _extrapolate_c0_c1(s_grid, t1)
    p0, p1 = _extrapolate_c0_c1(s_grid[:-1], t1[:-1])
    change = math.hypot(c0 - p0, c1 - p1)
    stable = change <= 0.01 * math.hypot(c0, c1)
    profile = [(s, (v - c0 - c1 * s) / s) for s, v in zip(s_grid, t1)]
    return CoeffFit(c0, c1, profile, stable, (p0, p1))


@dataclass(frozen=True)
class ScanRow:
    D: float
    F: float
    mu: int
    eps: float
    s: float
    T: float
    T0: float
    T1: float
    Dmap: float
    dT_ds: float
    status: str
    message: str = ""


SCAN_COLUMNS = ("D", "F", "mu", "eps", "s", "T", "T0", "T1", "Dmap", "dT_ds", "status")


@dataclass
class SlopeScan:
    rows: list[ScanRow]

    def row_minima(self) -> dict[float, float]:
        """``min over a of (-dT_ds)`` for each ``s``, over successful cells."""
        out: dict[float, float] = {}
        for r in self.rows:
            if r.status == "OK":
                out[r.s] = min(out.get(r.s, math.inf), -r.dT_ds)
        return out

    @property
    def failures(self) -> list[ScanRow]:
        return [r for r in self.rows if r.status != "OK"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SCAN_COLUMNS)
        for r in self.rows:
            d = asdict(r)
            w.writerow([d[c] if isinstance(d[c], (str, int)) else repr(float(d[c]))
                        for c in SCAN_COLUMNS])
        return buf.getvalue()


def _scan_cell(args) -> ScanRow:
    family, a, eps_rule, s, config, eps0 = args
    D, F = getattr(a, "D", math.nan), getattr(a, "F", math.nan)
    try:
        unf = family(a)
        if eps_rule is not None:
            unf = replace(unf, eps=eps_rule(a))
        if abs(unf.eps) > eps0:
            raise ParameterBoxError(f"|eps|={abs(unf.eps)} exceeds the scan bound {eps0}")
        smp = dulac_time(unf, s, config)
    except SaddleNodeError as exc:
        status = getattr(exc, "status", None) or type(exc).__name__
        nan = math.nan
        return ScanRow(D, F, 0, nan, s, nan, nan, nan, nan, nan, status, str(exc))
    status = "OK" if smp.dT_ds_consistent else "INCONSISTENT"
    return ScanRow(D, F, unf.mu, unf.eps, s, smp.T, smp.T0, smp.T1, smp.Dmap, smp.dT_ds, status)


def slope_scan(unf_family: Callable, a_box: Sequence, s_grid: Sequence[float],
               eps_rule: Callable | None = None, config: IntegratorConfig | None = None,
               workers: int | None = None, s0: float = S0, eps0: float = EPS0) -> SlopeScan:
    """Evaluate the Dulac time and its slope over ``a_box x s_grid``.

    Rows are ordered by parameter, then by ``s``, independently of ``workers``.
    ``eps_rule`` overrides the unfolding parameter chosen by ``unf_family``.
    Grid values of ``s`` above ``s0`` are rejected; cells with ``|eps| > eps0``
    and other cell failures are recorded in the row status and the scan continues.
    """
    if not a_box or not s_grid:
        raise ValueError("scan grids must be nonempty")
    if any(not 0.0 < s <= s0 for s in s_grid):
        raise ValueError(f"s values must lie in (0, {s0}]")
    cells = [(unf_family, a, eps_rule, float(s), config, eps0) for a in a_box for s in s_grid]
    return SlopeScan(ordered_map(_scan_cell, cells, workers))
