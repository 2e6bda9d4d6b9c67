"""Periodic versus pull-in threshold for motion started from rest at x = 0.

With zero initial conditions the plate oscillates iff the cubic ``h_cubic``
has a non-positive minimum on (0, 1). The minimum sits at the smaller
critical point s1 and the resulting threshold on K is ``kappa(alpha)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from scipy.optimize import brentq

from .model import (
    DeviceParams,
    ModelDomainError,
    OscParams,
    h_cubic,
    nondimensionalize,
)

#: Threshold on K for a linear spring (the alpha -> 0 limit of kappa).
LINEAR_THRESHOLD = 0.125
#: Static pull-in value of K for a linear spring.
STATIC_PULL_IN_K = 4.0 / 27.0
#: Limit of the critical point s1 as alpha -> 0.
S1_LINEAR_LIMIT = 0.5

# Below this the closed form loses digits to cancellation in (2a + 3 - mu).
_SMALL_ALPHA = 1e-4


class NoAmplitudeError(ValueError):
    """Raised when the cubic has no root in (0, 1), i.e. the motion pulls in."""


class RestStateError(ValueError):
    """Raised for K = 0: the plate stays at x = 0 and has no amplitude."""


@dataclass(frozen=True)
class Periodic:
    x_max: float
    margin: float
    kappa: float
    name = "periodic"


@dataclass(frozen=True)
class PullIn:
    margin: float
    kappa: float
    name = "pull-in"


@dataclass(frozen=True)
class Rest:
    kappa: float
    margin: float = 0.0
    name = "rest"


Regime = Union[Periodic, PullIn, Rest]


def _mu(alpha: float) -> float:
    return math.sqrt(4.0 * alpha * alpha - 6.0 * alpha + 9.0)


def _check_alpha(alpha: float) -> None:
    if not (math.isfinite(alpha) and alpha >= 0):
        raise ModelDomainError(f"alpha must be >= 0, got {alpha!r}")


def _s1_stable(alpha: float) -> float:
    # rationalized (b - sqrt(b^2 - 2a)) / (2a) with b = 2a/3 + 1
    return 3.0 / (2.0 * alpha + 3.0 + _mu(alpha))


def critical_point_s1(alpha: float) -> float:
    """Smaller critical point of ``h_cubic``, where it attains its minimum on (0, 1).

    Defined for alpha > 0; the alpha -> 0 limit is ``S1_LINEAR_LIMIT``.
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise ModelDomainError(f"critical point needs alpha > 0, got {alpha!r}")
    return _s1_stable(alpha)


def kappa(alpha: float) -> float:
    """Largest K for which motion from rest stays periodic."""
    _check_alpha(alpha)
    if alpha == 0:
        return LINEAR_THRESHOLD
    if alpha < _SMALL_ALPHA:
        # K such that h(s1) = 0, evaluated without the 0/0 closed form
        s = _s1_stable(alpha)
        h0 = ((-2.0 * alpha / 3.0 * s + (2.0 * alpha / 3.0 + 1.0)) * s - 1.0) * s
        return -0.5 * h0
    mu = _mu(alpha)
    return (
        (2.0 * alpha + 3.0 - mu)
        * (-4.0 * alpha * alpha + 24.0 * alpha - 9.0 + 2.0 * alpha * mu + 3.0 * mu)
        / (648.0 * alpha * alpha)
    )


def _s1_or_limit(alpha: float) -> float:
    return _s1_stable(alpha) if alpha > 0 else S1_LINEAR_LIMIT


def amplitude_x_max(q: OscParams) -> float:
    """Amplitude of the periodic orbit from rest: smallest root of h in (0, 1).

    At the threshold K = kappa(alpha) the root is double and equals s1.
    """
    if q.K == 0:
        raise RestStateError("K = 0: the plate stays at rest")
    k = kappa(q.alpha)
    if q.K > k:
        raise NoAmplitudeError(f"K={q.K!r} exceeds kappa={k!r}: pull-in, no amplitude")
    s1 = _s1_or_limit(q.alpha)
    if q.K == k:
        return s1
    h_s1 = h_cubic(s1, q)
    if h_s1 >= 0:
        # K within rounding of the threshold
        return s1
    return brentq(h_cubic, 0.0, s1, args=(q,), xtol=1e-15, rtol=4.0 * 2.220446049250313e-16, maxiter=200)


def classify(q: OscParams) -> Regime:
    """Regime of the motion started from rest at x = 0."""
    k = kappa(q.alpha)
    if q.K == 0:
        return Rest(kappa=k)
    if q.K <= k:
        return Periodic(x_max=amplitude_x_max(q), margin=k - q.K, kappa=k)
    return PullIn(margin=q.K - k, kappa=k)


def pull_in_voltage(p: DeviceParams) -> float:
    """Voltage at which K reaches kappa(alpha) for this device."""
    k = kappa(nondimensionalize(p).alpha)
    return math.sqrt(2.0 * p.E * p.A_c * p.d**3 * k / (p.eps0 * p.A * p.L))


def static_pull_in_reference() -> float:
    return STATIC_PULL_IN_K


def threshold_comparison(alpha: float) -> dict:
    """Dynamic threshold at ``alpha`` next to the linear static pull-in value."""
    k = kappa(alpha)
    return {
        "alpha": alpha,
        "kappa": k,
        "static_K_linear": STATIC_PULL_IN_K,
        "ratio": k / STATIC_PULL_IN_K,
        "dynamic_below_static": k < STATIC_PULL_IN_K,
    }
