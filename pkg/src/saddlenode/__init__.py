"""Saddle-node unfoldings at infinity of the Loud centers: Dulac times and period function.

Submodules: ``fields`` (vector fields and normal-form data), ``charts``
(coordinate changes and first integrals), ``integrator`` (adaptive RK with
events), ``dulac`` (Dulac time and map), ``period`` (period function and
critical periods), ``checks`` (verification sweeps) and ``cli``.
"""

__version__ = "0.1.0"

from .charts import psi, psi_inverse, pullback_residual, section_point
from .dulac import dT_ds, dulac_map, dulac_time, fit_c0_c1, slope_scan
from .errors import (
    ConvergenceError,
    DomainError,
    IntegrationError,
    OrbitNotClosedError,
    ParameterBoxError,
    SaddleNodeError,
    SingularJacobianError,
    SingularLocusError,
    UnresolvedBracketError,
)
from .fields import (
    LoudParams,
    Unfolding,
    build_loud_unfolding,
    eval_bar_field,
    eval_loud,
    eval_normal_field,
    weierstrass_split,
)
from .integrator import Direction, EventSpec, IntegratorConfig, Orbit, Status, integrate_until_event
from .period import (
    boundary_monotonicity_check,
    critical_periods,
    dperiod,
    half_period,
    orbit_period,
    period_scan,
)
from .polynomials import BivariatePoly, UnivariatePoly

__all__ = [
    "BivariatePoly",
    "ConvergenceError",
    "Direction",
    "DomainError",
    "EventSpec",
    "IntegrationError",
    "IntegratorConfig",
    "LoudParams",
    "Orbit",
    "OrbitNotClosedError",
    "ParameterBoxError",
    "SaddleNodeError",
    "SingularJacobianError",
    "SingularLocusError",
    "Status",
    "Unfolding",
    "UnivariatePoly",
    "UnresolvedBracketError",
    "boundary_monotonicity_check",
    "build_loud_unfolding",
    "critical_periods",
    "dT_ds",
    "dperiod",
    "dulac_map",
    "dulac_time",
    "eval_bar_field",
    "eval_loud",
    "eval_normal_field",
    "fit_c0_c1",
    "half_period",
    "integrate_until_event",
    "orbit_period",
    "period_scan",
    "psi",
    "psi_inverse",
    "pullback_residual",
    "section_point",
    "slope_scan",
    "weierstrass_split",
]
