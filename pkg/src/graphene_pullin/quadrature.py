"""Pull-in time and oscillation period as endpoint-singular integrals.

Both integrals have 1/sqrt singularities at one or both ends. The engine
removes them with a square-root (one end) or cosine (both ends) substitution
and integrates the smoothed integrand with tanh-sinh quadrature, halving the
step until successive estimates agree.

Integrands may ask for the exact distances to both endpoints
(``distances=True``); near a singular endpoint ``s`` alone rounds to the
endpoint long before the distance does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .bifurcation import NoAmplitudeError, RestStateError, amplitude_x_max, kappa
from .model import OscParams, h_coefficients

DEFAULT_TOL = 1e-10
# Nodes beyond |t| = 3.2 lie within ~1e-16 (relative) of the ends.
_T_MAX = 3.2
_HALF_PI = 0.5 * math.pi


class QuadratureError(RuntimeError):
    """Refinement did not reach the requested tolerance."""


class RegimeError(ValueError):
    """The integral does not exist for the given (alpha, K)."""


class DivergentPeriodError(RegimeError):
    """K sits on the threshold: the amplitude root is double and the period is infinite."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    level: int = 0


def _tanh_sinh_nodes(level: int, only_new: bool) -> Iterator[tuple[float, float, float, float]]:
    """Yield (t, weight, left, right) on [-1, 1] with ``left = 1 + y`` and ``right = 1 - y``.

    Step is h = 2**-level; with ``only_new`` only the odd multiples are produced.
    """
    h = 2.0**-level
    step = 2 if (only_new and level > 0) else 1
    start = 1 if (only_new and level > 0) else 0
    n_max = int(_T_MAX / h)
    for k in range(start, n_max + 1, step):
        t = k * h
        u = _HALF_PI * math.sinh(t)
        e = math.exp(-2.0 * u)
        # 1 - tanh(u) and 1 + tanh(u) without cancellation
        right = 2.0 * e / (1.0 + e)
        left = 2.0 / (1.0 + e)
        w = _HALF_PI * math.cosh(t) * 4.0 * e / (1.0 + e) ** 2
        yield t, w, left, right


def _tanh_sinh(G: Callable[[float, float, float], float], c: float) -> Iterator[tuple[float, float, int]]:
    """Successive tanh-sinh estimates of the integral of G over [0, c].

    G is called with (x, x, c - x). Yields (estimate, error estimate, evaluations).
    """
    half = 0.5 * c
    total = 0.0
    evaluations = 0
    previous = None
    level = 0
    while True:
        new = 0.0
        for t, w, left, right in _tanh_sinh_nodes(level, only_new=True):
            dl, dr = half * left, half * right
            g = G(dl, dl, dr)
            evaluations += 1
            if t != 0.0:
                g += G(dr, dr, dl)  # mirrored node: x = c - dl
                evaluations += 1
            if not math.isfinite(g):
                raise ValueError(f"integrand is not finite near x={dl!r} on [0, {c!r}]")
            new += w * g
        total += new
        estimate = total * half * 2.0**-level
        err = math.inf if previous is None else abs(estimate - previous)
        yield estimate, err, evaluations
        previous = estimate
        level += 1


def _mapped(
    g: Callable[..., float],
    a: float,
    b: float,
    singular_at_a: bool,
    singular_at_b: bool,
    distances: bool,
) -> tuple[Callable[[float, float, float], float], float]:
    """Smoothing substitution; returns (G, length of the new interval).

    Jacobians are expressed through the endpoint distances: 2*sqrt(da) for
    s = a + u**2, 2*sqrt(db) for s = b - u**2, sqrt(da*db) for the cosine map.
    For plain ``g(s)`` the distances are recomputed from the rounded ``s`` so
    that integrand and Jacobian stay consistent next to the endpoint.
    """
    length = b - a
    jac = _JACOBIANS[(singular_at_a, singular_at_b)]

    def call(s: float, da: float, db: float) -> float:
        if distances:
            return g(s, da, db) * jac(da, db)
        # a node that rounded onto an endpoint moves to the adjacent float;
        # the smoothed integrand barely changes over that distance
        if s == a:
            s = math.nextafter(a, b)
        elif s == b:
            s = math.nextafter(b, a)
        da, db = s - a, b - s
        return g(s) * jac(da, db)

    def place(da: float, db: float) -> float:
        return a + da if da <= db else b - db

    if singular_at_a and singular_at_b:
        # s = a + L*(1 - cos th)/2, th in [0, pi]
        def G(th: float, lo: float, hi: float) -> float:
            sa, sb = math.sin(0.5 * lo), math.sin(0.5 * hi)
            da, db = length * sa * sa, length * sb * sb
            return call(place(da, db), da, db)

        return G, math.pi

    root = math.sqrt(length)
    if singular_at_a:
        # s = a + u**2
        def G(u: float, lo: float, hi: float) -> float:
            da, db = lo * lo, hi * (root + u)
            return call(place(da, db), da, db)

        return G, root
    if singular_at_b:
        # s = b - u**2
        def G(u: float, lo: float, hi: float) -> float:
            db, da = lo * lo, hi * (root + u)
            return call(place(da, db), da, db)

        return G, root

    def G(x: float, lo: float, hi: float) -> float:
        return call(place(lo, hi), lo, hi)

    return G, length


_JACOBIANS = {
    (True, True): lambda da, db: math.sqrt(da * db),
    (True, False): lambda da, db: 2.0 * math.sqrt(da),
    (False, True): lambda da, db: 2.0 * math.sqrt(db),
    (False, False): lambda da, db: 1.0,
}


def refinements(
    g: Callable[..., float],
    a: float,
    b: float,
    singular_at_a: bool = False,
    singular_at_b: bool = False,
    *,
    distances: bool = False,
) -> Iterator[QuadResult]:
    """Unbounded sequence of estimates, one per halving of the tanh-sinh step."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a!r}, b={b!r}")
    G, c = _mapped(g, a, b, singular_at_a, singular_at_b, distances)
    for level, (value, err, n) in enumerate(_tanh_sinh(G, c)):
        yield QuadResult(value=value, abs_error_estimate=err, evaluations=n, level=level)


def integrate_endpoint_singular(
    g: Callable[..., float],
    a: float,
    b: float,
    singular_at_a: bool = False,
    singular_at_b: bool = False,
    tol: float = DEFAULT_TOL,
    *,
    distances: bool = False,
    max_level: int = 12,
) -> QuadResult:
    """Integrate ``g`` over (a, b) with optional inverse-square-root endpoint singularities.

    Parameters
    ----------
    g : callable
        Integrand ``g(s)``, or ``g(s, s - a, b - s)`` when ``distances`` is set.
    singular_at_a, singular_at_b : bool
        Flag endpoints where g behaves like 1/sqrt(distance).
    tol : float
        Absolute tolerance on the difference between successive refinements.

    Raises
    ------
    QuadratureError
        If ``max_level`` halvings do not bring the estimate below ``tol``.
    """
    last = None
    for result in refinements(g, a, b, singular_at_a, singular_at_b, distances=distances):
        last = result
        # the level-to-level difference overstates the error of the finer level
        if result.level >= 3 and result.abs_error_estimate <= tol:
            return result
        if result.level >= max_level:
            break
    raise QuadratureError(
        f"no convergence after {last.level} levels: estimate {last.value!r}, "
        f"error {last.abs_error_estimate!r} > tol {tol!r}"
    )


def _pull_in_integrand(q: OscParams) -> Callable[[float, float, float], float]:
    c3, c2, c1, c0 = h_coefficients(q)

    def g(s: float, da: float, db: float) -> float:
        h = ((c3 * s + c2) * s + c1) * s + c0
        return 1.0 / math.sqrt(da * h / db)

    return g


def pull_in_time(q: OscParams, tol: float = DEFAULT_TOL) -> float:
    """Time for the plate, released from rest at x = 0, to reach the electrode."""
    return pull_in_time_result(q, tol).value


def pull_in_time_result(q: OscParams, tol: float = DEFAULT_TOL) -> QuadResult:
    k = kappa(q.alpha)
    if not q.K > k:
        raise RegimeError(f"K={q.K!r} <= kappa={k!r}: motion is periodic, no pull-in")
    return integrate_endpoint_singular(
        _pull_in_integrand(q), 0.0, 1.0, singular_at_a=True, tol=tol, distances=True
    )


def _period_integrand(q: OscParams, r: float) -> Callable[[float, float, float], float]:
    # h(s) = (s - r) * quad(s); quad(r) = h'(r) < 0 sets the strength at s = r
    c3, c2, c1, _ = h_coefficients(q)
    b2 = c3
    b1 = c2 + c3 * r
    b0 = c1 + b1 * r

    def g(s: float, da: float, db: float) -> float:
        quad = (b2 * s + b1) * s + b0
        return 2.0 / math.sqrt(da * db * (-quad) / (1.0 - s))

    return g


def period(q: OscParams, tol: float = DEFAULT_TOL) -> float:
    """Period of the orbit started from rest at x = 0."""
    return period_result(q, tol).value


def period_result(q: OscParams, tol: float = DEFAULT_TOL) -> QuadResult:
    if q.K == 0:
        raise RestStateError("K = 0: the plate stays at rest")
    k = kappa(q.alpha)
    if q.K > k:
        raise RegimeError(f"K={q.K!r} > kappa={k!r}: pull-in, no period")
    if k - q.K < 1e-12:
        raise DivergentPeriodError(f"K={q.K!r} within 1e-12 of kappa={k!r}: period diverges")
    try:
        r = amplitude_x_max(q)
    except NoAmplitudeError as exc:  # pragma: no cover - guarded above
        raise RegimeError(str(exc)) from exc
    return integrate_endpoint_singular(
        _period_integrand(q, r), 0.0, r, singular_at_a=True, singular_at_b=True,
        tol=tol, distances=True,
    )
