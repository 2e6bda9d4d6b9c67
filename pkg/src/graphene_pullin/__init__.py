"""Dynamic pull-in analysis of a graphene lumped-mass MEMS oscillator."""

from .bifurcation import (
    LINEAR_THRESHOLD,
    STATIC_PULL_IN_K,
    NoAmplitudeError,
    Periodic,
    PullIn,
    Regime,
    Rest,
    RestStateError,
    amplitude_x_max,
    classify,
    critical_point_s1,
    kappa,
    pull_in_voltage,
    static_pull_in_reference,
)
from .model import (
    DeviceParams,
    ModelDomainError,
    OscParams,
    State,
    dimensional_forces,
    energy,
    f_envelope,
    h_cubic,
    nondimensionalize,
    rhs,
)
from .quadrature import (
    DivergentPeriodError,
    QuadResult,
    QuadratureError,
    RegimeError,
    integrate_endpoint_singular,
    period,
    pull_in_time,
)
from .simulator import (
    Completed,
    PullInDetected,
    SimConfig,
    Trajectory,
    detect_period,
    phase_portrait,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "amplitude_x_max",
    "classify",
    "Completed",
    "critical_point_s1",
    "detect_period",
    "DeviceParams",
    "dimensional_forces",
    "DivergentPeriodError",
    "energy",
    "f_envelope",
    "h_cubic",
    "integrate_endpoint_singular",
    "kappa",
    "LINEAR_THRESHOLD",
    "ModelDomainError",
    "NoAmplitudeError",
    "nondimensionalize",
    "OscParams",
    "period",
    "Periodic",
    "phase_portrait",
    "pull_in_time",
    "pull_in_voltage",
    "PullIn",
    "PullInDetected",
    "QuadratureError",
    "QuadResult",
    "Regime",
    "RegimeError",
    "Rest",
    "RestStateError",
    "rhs",
    "SimConfig",
    "simulate",
    "State",
    "STATIC_PULL_IN_K",
    "static_pull_in_reference",
    "Trajectory",
]
