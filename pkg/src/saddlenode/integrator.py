"""Adaptive Dormand-Prince 5(4) integration with section-crossing events.

States are short tuples of floats; the planar problems handled here are too
small for array overhead to pay off. Event times are refined on the
continuous extension given by a partial Runge-Kutta step from the start of
the step in which the crossing was detected.
"""

from __future__ import annotations

import enum
import io
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .errors import IntegrationError

__all__ = [
    "Direction",
    "EventSpec",
    "IntegratorConfig",
    "Orbit",
    "Status",
    "integrate_ode_in_x",
    "integrate_span",
    "integrate_until_event",
]

State = tuple[float, ...]


class Status(enum.Enum):
    EVENT_HIT = "EVENT_HIT"
    MAX_STEPS = "MAX_STEPS"
    BLOWUP = "BLOWUP"
    STEP_UNDERFLOW = "STEP_UNDERFLOW"
    END_REACHED = "END_REACHED"


class Direction(enum.Enum):
    ANY = "ANY"
    UP = "UP"
    DOWN = "DOWN"


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1_000_000
    initial_step: float | None = None
    min_step: float = 1e-14
    blowup: float = 1e8

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.initial_step is not None and not self.min_step < self.initial_step:
            raise ValueError("min_step must be smaller than initial_step")

    def scaled(self, factor: float) -> IntegratorConfig:
        """Copy with both tolerances multiplied by ``factor``."""
        return IntegratorConfig(self.rel_tol * factor, self.abs_tol * factor, self.max_steps,
                                self.initial_step, self.min_step, self.blowup)


@dataclass(frozen=True)
class EventSpec:
    event_function: Callable[[State], float]
    direction: Direction = Direction.ANY
    refinement_tol: float = 1e-12
    count: int = 1

    def __post_init__(self):
        if not self.refinement_tol > 0:
            raise ValueError("refinement_tol must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")

    def crosses(self, g0: float, g1: float) -> bool:
        up = g0 < 0.0 <= g1
        down = g0 > 0.0 >= g1
        if self.direction is Direction.UP:
            return up
        if self.direction is Direction.DOWN:
            return down
        return up or down


@dataclass
class Orbit:
    times: list[float]
    states: list[State]
    status: Status
    event_time: float | None = None
    event_state: State | None = None
    steps: int = field(default=0, compare=False)

    @property
    def final_state(self) -> State:
        return self.states[-1]

    def to_csv(self) -> str:
        """CSV text with columns ``t, c1, c2, ...`` and a trailing status comment."""
        buf = io.StringIO()
        ncomp = len(self.states[0]) if self.states else 2
        buf.write(",".join(["t"] + [f"c{k + 1}" for k in range(ncomp)]) + "\n")
        for t, y in zip(self.times, self.states):
            buf.write(",".join(repr(float(v)) for v in (t, *y)) + "\n")
        et = "none" if self.event_time is None else repr(float(self.event_time))
        buf.write(f"# status={self.status.value} event_t={et}\n")
        return buf.getvalue()


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                                22 / 525, -1 / 40)


def _step(f, t, y, k1, h):
    """One Dormand-Prince step; returns ``(y_new, k7, err)`` where k7 = f(t+h, y_new)."""
    k2 = f(t + _C2 * h, tuple(yi + h * _A21 * a for yi, a in zip(y, k1)))
    k3 = f(t + _C3 * h, tuple(yi + h * (_A31 * a + _A32 * b) for yi, a, b in zip(y, k1, k2)))
    k4 = f(t + _C4 * h, tuple(yi + h * (_A41 * a + _A42 * b + _A43 * c)
                              for yi, a, b, c in zip(y, k1, k2, k3)))
    k5 = f(t + _C5 * h, tuple(yi + h * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
                              for yi, a, b, c, d in zip(y, k1, k2, k3, k4)))
    k6 = f(t + h, tuple(yi + h * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
                        for yi, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5)))
    y_new = tuple(yi + h * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * g)
                  for yi, a, c, d, e, g in zip(y, k1, k3, k4, k5, k6))
    k7 = f(t + h, y_new)
    err = tuple(h * (_E1 * a + _E3 * c + _E4 * d + _E5 * e + _E6 * g + _E7 * q)
                for a, c, d, e, g, q in zip(k1, k3, k4, k5, k6, k7))
    return y_new, k7, err


def _err_norm(err, y, y_new, cfg):
    acc = 0.0
    for e, a, b in zip(err, y, y_new):
        sc = cfg.abs_tol + cfg.rel_tol * max(abs(a), abs(b))
        acc += (e / sc) ** 2
    return math.sqrt(acc / len(err))


def _initial_step(f, t, y, k1, direction, cfg):
    # Hairer-Norsett-Wanner starting step heuristic
    sc = [cfg.abs_tol + cfg.rel_tol * abs(v) for v in y]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y, sc)) / len(y))
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(k1, sc)) / len(y))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = tuple(v + direction * h0 * k for v, k in zip(y, k1))
    k2 = f(t + direction * h0, y1)
    d2 = math.sqrt(sum(((b - a) / s) ** 2 for a, b, s in zip(k1, k2, sc)) / len(y)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return max(min(100 * h0, h1), 10 * cfg.min_step)


def _solve(f, t0, y0, t_end, cfg, event=None, record=True):
    """Core loop. ``t_end`` may be infinite when an event terminates the run."""
    cfg = cfg or IntegratorConfig()
    y = tuple(float(v) for v in y0)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    times, states = [t], [y]
    k1 = f(t, y)
    if not all(math.isfinite(v) for v in k1):
        raise IntegrationError(f"field is not finite at the start state {y}")
    if cfg.initial_step is not None:
        h = cfg.initial_step
    else:
        h = _initial_step(f, t, y, k1, direction, cfg)
    beta, expo1, safe = 0.04, 0.17, 0.9
    facold = 1e-4
    g_prev = event.event_function(y) if event else 0.0
    crossings = 0
    nsteps = 0
    last = False
    while True:
        if nsteps >= cfg.max_steps:
            return Orbit(times, states, Status.MAX_STEPS, steps=nsteps)
        if abs(h) < cfg.min_step:
            return Orbit(times, states, Status.STEP_UNDERFLOW, steps=nsteps)
        remaining = abs(t_end - t)
        if h >= remaining:
            h = remaining
            last = True
        else:
            last = False
        hs = direction * h
        y_new, k7, err = _step(f, t, y, k1, hs)
        nsteps += 1
        en = _err_norm(err, y, y_new, cfg)
        if not math.isfinite(en):
            h *= 0.2
            continue
        fac11 = en ** expo1 if en > 0 else 0.0
        if en <= 1.0:
            fac = fac11 / facold ** beta
            fac = min(10.0, max(0.2, fac / safe))
            facold = max(en, 1e-4)
            t_new = t_end if last else t + hs
            if event is not None:
                g_new = event.event_function(y_new)
                if event.crosses(g_prev, g_new):
                    crossings += 1
                    if crossings >= event.count:
                        te, ye = _refine_event(f, t, y, k1, hs, event)
                        times.append(te)
                        states.append(ye)
                        return Orbit(times, states, Status.EVENT_HIT, te, ye, steps=nsteps)
                g_prev = g_new
            t, y, k1 = t_new, y_new, k7
            if record or last:
                times.append(t)
                states.append(y)
            if any(abs(v) > cfg.blowup for v in y) or not all(math.isfinite(v) for v in k1):
                return Orbit(times, states, Status.BLOWUP, steps=nsteps)
            if last:
                return Orbit(times, states, Status.END_REACHED, steps=nsteps)
            h = h / fac
        else:
            h = h / min(5.0, fac11 / safe)


def _refine_event(f, t, y, k1, hs, event):
    g = event.event_function

    def phi(tau):
        if tau == 0.0:
            return g(y)
        return g(_step(f, t, y, k1, tau)[0])

    lo, hi = (0.0, hs) if hs > 0 else (hs, 0.0)
    tau = brentq(phi, lo, hi, xtol=event.refinement_tol, rtol=1e-15, maxiter=200)
    ye = _step(f, t, y, k1, tau)[0] if tau != 0.0 else y
    return t + tau, ye


def integrate_until_event(field: Callable[[State], Sequence[float]], start: Sequence[float],
                          event: EventSpec, config: IntegratorConfig | None = None,
                          backward: bool = False) -> Orbit:
    """Integrate the autonomous field from ``start`` until the ``event.count``-th crossing.

    Times are in the field's own time unit. ``backward`` integrates toward
    negative times (the returned times decrease).
    """
    def f(_t, y):
        return field(y)

    return _solve(f, 0.0, start, -math.inf if backward else math.inf, config, event)


def integrate_span(rhs: Callable[[float, State], Sequence[float]], t_start: float,
                   t_end: float, state0: Sequence[float],
                   config: IntegratorConfig | None = None, record: bool = True) -> Orbit:
    """Integrate a non-autonomous system over ``[t_start, t_end]`` and return the orbit."""
    return _solve(rhs, t_start, state0, t_end, config, None, record)


def integrate_ode_in_x(rhs: Callable[[float, State], Sequence[float]], x_start: float,
                       x_end: float, state0: Sequence[float],
                       config: IntegratorConfig | None = None) -> State:
    """Integrate ``d state / dx = rhs(x, state)`` from ``x_start`` to ``x_end``.

    Raises :class:`IntegrationError` (with the status name) when the end point
    is not reached, e.g. ``STEP_UNDERFLOW`` near a singular integrand.
    """
    orbit = _solve(rhs, x_start, state0, x_end, config, None, record=False)
    if orbit.status is not Status.END_REACHED:
        raise IntegrationError(
            f"integration stopped at x={orbit.times[-1]} with status {orbit.status.value}",
            status=orbit.status.value)
    return orbit.final_state
