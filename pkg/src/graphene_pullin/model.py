"""Lumped-mass model of an electrostatically actuated graphene strip.

Physical quantities are in SI units. The dimensionless problem is

    x'' + x - alpha*|x|*x = K / (1 - x)**2,

written as the first order system x' = v, v' = -x + alpha*|x|*x + K/(1-x)**2,
where x is the plate displacement divided by the gap d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional


class ModelDomainError(ValueError):
    """Raised when a model function is evaluated outside its domain."""


def _signed_square(x: float) -> float:
    # sign(x) * x**2 with sign(0) = 0
    return abs(x) * x


@dataclass(frozen=True)
class DeviceParams:
    """Physical description of the device.

    Supply either ``D`` or ``sigma_max``; the other is derived from
    D = E**2 / (4*sigma_max). A linear spring is ``D=0`` (then ``sigma_max``
    is infinite). A zero voltage is allowed and gives K = 0.
    """

    E: float
    A_c: float
    A: float
    L: float
    d: float
    m: float
    eps0: float
    V_dc: float
    D: Optional[float] = None
    sigma_max: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("E", "A_c", "A", "L", "d", "m", "eps0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelDomainError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.V_dc) and self.V_dc >= 0):
            raise ModelDomainError(f"V_dc must be non-negative, got {self.V_dc!r}")

        D, sigma_max = self.D, self.sigma_max
        if D is None and sigma_max is None:
            raise ModelDomainError("one of D or sigma_max is required")
        if sigma_max is not None and not sigma_max > 0:
            raise ModelDomainError(f"sigma_max must be positive, got {sigma_max!r}")
        if D is not None and not (math.isfinite(D) and D >= 0):
            raise ModelDomainError(f"D must be non-negative and finite, got {D!r}")

        derived = self.E**2 / (4.0 * sigma_max) if sigma_max is not None else None
        if D is None:
            object.__setattr__(self, "D", derived)
        elif derived is not None:
            if abs(D - derived) > 1e-12 * max(abs(derived), abs(D)):
                raise ModelDomainError(
                    f"D={D!r} inconsistent with E**2/(4*sigma_max)={derived!r}"
                )
        else:
            object.__setattr__(
                self, "sigma_max", self.E**2 / (4.0 * D) if D > 0 else math.inf
            )

    @property
    def time_scale(self) -> float:
        """Factor converting physical time to dimensionless time, sqrt(E*A_c/(m*L))."""
        return math.sqrt(self.E * self.A_c / (self.m * self.L))

    @property
    def length_scale(self) -> float:
        return self.d

    def with_voltage(self, V_dc: float) -> "DeviceParams":
        return DeviceParams(
            E=self.E, A_c=self.A_c, A=self.A, L=self.L, d=self.d, m=self.m,
            eps0=self.eps0, V_dc=V_dc, D=self.D,
        )


@dataclass(frozen=True)
class OscParams:
    """Dimensionless pair: restoring-force parameter alpha and forcing K."""

    alpha: float
    K: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ModelDomainError(f"alpha must be >= 0, got {self.alpha!r}")
        if not (math.isfinite(self.K) and self.K >= 0):
            raise ModelDomainError(f"K must be >= 0, got {self.K!r}")


class State(NamedTuple):
    x: float
    v: float


def nondimensionalize(p: DeviceParams) -> OscParams:
    """Map a device to (alpha, K).

    The time and length scales for converting back are ``p.time_scale`` and
    ``p.length_scale``.
    """
    K = p.eps0 * p.A * p.L * p.V_dc**2 / (2.0 * p.E * p.A_c * p.d**3)
    alpha = p.D * p.d / (p.E * p.L)
    return OscParams(alpha=alpha, K=K)


def dimensional_forces(p: DeviceParams, x: float) -> tuple[float, float]:
    """Return (restoring force, Coulomb force) in newtons at displacement ``x`` (m)."""
    if not x < p.d:
        raise ModelDomainError(f"displacement {x!r} must be below the gap {p.d!r}")
    strain = x / p.L
    F_res = -p.E * p.A_c * strain + p.D * p.A_c * _signed_square(strain)
    F_C = p.eps0 * p.A * p.V_dc**2 / (2.0 * (p.d - x) ** 2)
    return F_res, F_C


def dimensional_rhs(p: DeviceParams, x: float, v: float) -> tuple[float, float]:
    """Right-hand side of m*x'' = F_res + F_C in physical units."""
    F_res, F_C = dimensional_forces(p, x)
    return v, (F_res + F_C) / p.m


def rhs(s: State, q: OscParams) -> tuple[float, float]:
    x, v = s
    if not x < 1.0:
        raise ModelDomainError(f"x={x!r} at or beyond the fixed electrode")
    return v, -x + q.alpha * _signed_square(x) + q.K / (1.0 - x) ** 2


def energy(s: State, q: OscParams) -> float:
    """First integral of the motion (kinetic + elastic - electrostatic)."""
    x, v = s
    if not x < 1.0:
        raise ModelDomainError(f"x={x!r} at or beyond the fixed electrode")
    return 0.5 * v * v + 0.5 * x * x - q.alpha * _signed_square(x) * x / 3.0 - q.K / (1.0 - x)


def h_cubic(s: float, q: OscParams) -> float:
    """The cubic -2a/3 s^3 + (2a/3 + 1) s^2 - s + 2K whose roots bound the motion."""
    a = q.alpha
    return ((-2.0 * a / 3.0 * s + (2.0 * a / 3.0 + 1.0)) * s - 1.0) * s + 2.0 * q.K


def h_cubic_prime(s: float, q: OscParams) -> float:
    a = q.alpha
    return (-2.0 * a * s + 2.0 * (2.0 * a / 3.0 + 1.0)) * s - 1.0


def h_cubic_second(s: float, q: OscParams) -> float:
    a = q.alpha
    return -4.0 * a * s + 2.0 * (2.0 * a / 3.0 + 1.0)


def h_coefficients(q: OscParams) -> tuple[float, float, float, float]:
    """Coefficients (c3, c2, c1, c0) of h_cubic, highest power first."""
    a = q.alpha
    return -2.0 * a / 3.0, 2.0 * a / 3.0 + 1.0, -1.0, 2.0 * q.K


def f_envelope(s: float, q: OscParams) -> float:
    """Squared velocity as a function of displacement for motion started at rest at 0.

    Uses the factored form s*h(s)/(1-s) above s = 0.9 where the direct form
    cancels badly.
    """
    if not s < 1.0:
        raise ModelDomainError(f"s={s!r} must be below 1")
    if s > 0.9:
        return s * h_cubic(s, q) / (1.0 - s)
    return -s * s + 2.0 / 3.0 * q.alpha * _signed_square(s) * s + 2.0 * q.K / (1.0 - s) - 2.0 * q.K
