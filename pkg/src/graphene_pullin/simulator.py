"""Time-domain integration of the dimensionless oscillator.

An explicit Dormand-Prince 5(4) pair with mixed absolute/relative error
control. The right-hand side is singular at x = 1, so integration stops at
the first crossing of x = 1 - delta (the pull-in event). Turning points
(zeros of v) are located during integration; they give the amplitude and
the period without resampling the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .bifurcation import Periodic, PullIn, Rest, classify
from .model import ModelDomainError, OscParams, State, rhs

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
DEFAULT_DELTA = 1e-6

# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# fifth-order minus embedded fourth-order weights
_E = (
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)


class StepSizeError(RuntimeError):
    """Step size underflow: the controller cannot make progress."""


class NoPeriodError(ValueError):
    """The trajectory does not contain a full oscillation."""


@dataclass(frozen=True)
class SimConfig:
    q: OscParams
    x0: float = 0.0
    v0: float = 0.0
    t_end: float = 100.0
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    pull_in_delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        if not self.x0 < 1.0:
            raise ModelDomainError(f"x0 must be below 1, got {self.x0!r}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 < self.pull_in_delta < 1:
            raise ValueError(f"pull_in_delta must lie in (0, 1), got {self.pull_in_delta!r}")
        if self.x0 >= 1.0 - self.pull_in_delta:
            raise ModelDomainError("x0 already past the pull-in threshold 1 - delta")


@dataclass(frozen=True)
class Completed:
    name = "completed"


@dataclass(frozen=True)
class PullInDetected:
    t_event: float
    name = "pull-in"


Outcome = Union[Completed, PullInDetected]


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    rhs_evaluations: int


@dataclass(frozen=True)
class Trajectory:
    """Samples at accepted steps plus refined turning points.

    ``a`` holds the acceleration at each sample so the solution can be
    reconstructed by cubic Hermite interpolation (``interpolate``).
    """

    config: SimConfig
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    outcome: Outcome
    stats: StepStats
    turning_points: tuple[tuple[float, float], ...] = field(default=())

    @property
    def samples(self) -> np.ndarray:
        """(n, 3) array of (t, x, v) rows."""
        return np.column_stack([self.t, self.x, self.v])

    def interpolate(self, t_query: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Cubic Hermite reconstruction of (x, v) at ``t_query`` within the sampled span."""
        tq = np.asarray(t_query, dtype=float)
        if tq.size and (tq.min() < self.t[0] or tq.max() > self.t[-1]):
            raise ValueError("query times outside the integrated span")
        i = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        h = self.t[i + 1] - self.t[i]
        th = (tq - self.t[i]) / h
        x = _hermite(th, h, self.x[i], self.x[i + 1], self.v[i], self.v[i + 1])
        v = _hermite(th, h, self.v[i], self.v[i + 1], self.a[i], self.a[i + 1])
        return x, v


def _hermite(th, h, y0, y1, d0, d1):
    th2 = th * th
    th3 = th2 * th
    return (
        (2 * th3 - 3 * th2 + 1) * y0
        + (th3 - 2 * th2 + th) * h * d0
        + (-2 * th3 + 3 * th2) * y1
        + (th3 - th2) * h * d1
    )


def _accel(x: float, alpha: float, K: float) -> float:
    return -x + alpha * abs(x) * x + K / ((1.0 - x) * (1.0 - x))


def _dopri_step(x, v, a0, h, alpha, K):
    """One Dormand-Prince step from (x, v) with acceleration a0.

    Returns (x1, v1, a1, err_x, err_v), or None if a stage reaches x >= 1.
    """
    kx = [v] + [0.0] * 6
    kv = [a0] + [0.0] * 6
    for i in range(1, 7):
        row = _A[i]
        xs = x + h * sum(row[j] * kx[j] for j in range(i))
        vs = v + h * sum(row[j] * kv[j] for j in range(i))
        if not xs < 1.0:
            return None
        kx[i] = vs
        kv[i] = _accel(xs, alpha, K)
    # the seventh stage is evaluated at the new point (FSAL)
    x1 = x + h * sum(_B[j] * kx[j] for j in range(6))
    v1 = v + h * sum(_B[j] * kv[j] for j in range(6))
    ex = h * sum(_E[j] * kx[j] for j in range(7))
    ev = h * sum(_E[j] * kv[j] for j in range(7))
    return x1, v1, kv[6], ex, ev


def simulate(c: SimConfig) -> Trajectory:
    """Integrate from (x0, v0) until ``t_end`` or the pull-in event x = 1 - delta."""
    alpha, K = c.q.alpha, c.q.K
    rtol, atol = c.rel_tol, c.abs_tol
    x_event = 1.0 - c.pull_in_delta

    t, x, v = 0.0, float(c.x0), float(c.v0)
    a = rhs(State(x, v), c.q)[1]
    ts, xs, vs, as_ = [t], [x], [v], [a]
    turning: list[tuple[float, float]] = []
    h = min(1e-3, c.t_end / 1000.0)
    accepted = rejected = 0
    evals = 1
    outcome: Outcome = Completed()

    while t < c.t_end:
        if t + h > c.t_end:
            h = c.t_end - t
        if h <= 16 * np.finfo(float).eps * max(abs(t), 1.0):
            raise StepSizeError(f"step size underflow at t={t!r}, x={x!r}")
        step = _dopri_step(x, v, a, h, alpha, K)
        evals += 6
        if step is None:
            rejected += 1
            h *= 0.25
            continue
        x1, v1, a1, ex, ev = step
        sx = atol + rtol * max(abs(x), abs(x1))
        sv = atol + rtol * max(abs(v), abs(v1))
        err = math.sqrt(0.5 * ((ex / sx) ** 2 + (ev / sv) ** 2))
        if not (math.isfinite(err) and x1 < 1.0):
            rejected += 1
            h *= 0.25
            continue
        if err > 1.0:
            rejected += 1
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        accepted += 1
        t1 = t + h
        if x1 >= x_event:
            te, xe, ve = _locate_event(t, x, v, a, t1, x1, v1, a1, x_event, alpha, K)
            _record_turning(turning, t, x, v, a, t1, x1, v1, a1, alpha, K, t_stop=te)
            ae = _accel(xe, alpha, K)
            ts.append(te); xs.append(xe); vs.append(ve); as_.append(ae)
            outcome = PullInDetected(t_event=te)
            break
        if v * v1 < 0.0 or (v1 == 0.0 and v != 0.0):
            _record_turning(turning, t, x, v, a, t1, x1, v1, a1, alpha, K)
        t, x, v, a = t1, x1, v1, a1
        ts.append(t); xs.append(x); vs.append(v); as_.append(a)
        h *= min(5.0, 0.9 * err ** -0.2) if err > 0 else 5.0

    arrays = [np.array(seq, dtype=float) for seq in (ts, xs, vs, as_)]
    for arr in arrays:
        arr.setflags(write=False)
    return Trajectory(
        config=c, t=arrays[0], x=arrays[1], v=arrays[2], a=arrays[3],
        outcome=outcome,
        stats=StepStats(accepted=accepted, rejected=rejected, rhs_evaluations=evals),
        turning_points=tuple(turning),
    )


def _substep(t0, x0, v0, a0, t, alpha, K):
    """Accurate state at t inside an accepted step, by a fresh step from its start."""
    if t == t0:
        return x0, v0
    step = _dopri_step(x0, v0, a0, t - t0, alpha, K)
    if step is None:
        return None
    return step[0], step[1]


def _locate_event(t0, x0, v0, a0, t1, x1, v1, a1, x_event, alpha, K):
    h = t1 - t0
    if x1 == x_event:
        return t1, x1, v1

    def gap(t):
        th = (t - t0) / h
        return _hermite(th, h, x0, x1, v0, v1) - x_event

    te = brentq(gap, t0, t1, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    sub = _substep(t0, x0, v0, a0, te, alpha, K)
    if sub is not None and sub[1] > 0:
        xs, vs = sub
        # one Newton correction against the accurate state
        te_new = te + (x_event - xs) / vs
        if t0 < te_new <= t1:
            te = te_new
            vs = vs + (x_event - xs) / vs * _accel(xs, alpha, K)
        return te, x_event, vs
    th = (te - t0) / h
    return te, x_event, _hermite(th, h, v0, v1, a0, a1)


def _record_turning(turning, t0, x0, v0, a0, t1, x1, v1, a1, alpha, K, t_stop=None):
    h = t1 - t0
    if v1 == 0.0:
        if t_stop is None or t1 <= t_stop:
            turning.append((t1, x1))
        return
    if v0 * v1 >= 0.0:
        return

    def vel(t):
        th = (t - t0) / h
        return _hermite(th, h, v0, v1, a0, a1)

    tc = brentq(vel, t0, t1, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    if t_stop is not None and tc > t_stop:
        return
    sub = _substep(t0, x0, v0, a0, tc, alpha, K)
    if sub is None:
        th = (tc - t0) / h
        turning.append((tc, _hermite(th, h, x0, x1, v0, v1)))
        return
    xs, vs = sub
    acc = _accel(xs, alpha, K)
    if acc != 0.0:
        dt = -vs / acc
        turning.append((tc + dt, xs - 0.5 * vs * vs / acc))
    else:
        turning.append((tc, xs))


def detect_period(traj: Trajectory) -> float:
    """Period from the return times to the starting turning point.

    The motion must start from rest (v0 = 0); every second turning point is a
    return to x0, and the period is averaged over all complete cycles.
    """
    c = traj.config
    if not isinstance(traj.outcome, Completed):
        raise NoPeriodError("trajectory ended in pull-in")
    if c.v0 != 0.0:
        raise NoPeriodError("period detection needs motion started from rest (v0 = 0)")
    returns = traj.turning_points[1::2]
    if not returns:
        raise NoPeriodError("fewer than two turning points in the trajectory")
    span = max(abs(x - c.x0) for _, x in traj.turning_points)
    for _, x in returns:
        if abs(x - c.x0) > 1e-6 + 1e-4 * span:
            raise NoPeriodError(f"turning point x={x!r} does not return to x0={c.x0!r}")
    return returns[-1][0] / len(returns)


def orbit_amplitude(traj: Trajectory) -> float:
    """Largest x over the trajectory, counting refined turning points."""
    best = float(traj.x.max())
    for _, x in traj.turning_points:
        best = max(best, x)
    return best


def extrapolated_pull_in_time(
    q: OscParams,
    deltas: Sequence[float] = (1e-4, 1e-6, 1e-8),
    t_end: float = 1000.0,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> float:
    """Pull-in event time extrapolated to delta -> 0.

    Near the electrode the remaining time behaves like delta**1.5, so the
    event times are fitted as t0 + c*delta**1.5 by least squares.
    """
    times = []
    for delta in deltas:
        traj = simulate(SimConfig(q=q, t_end=t_end, rel_tol=rel_tol, abs_tol=abs_tol, pull_in_delta=delta))
        if not isinstance(traj.outcome, PullInDetected):
            raise NoPeriodError(f"no pull-in event before t_end={t_end!r} for delta={delta!r}")
        times.append(traj.outcome.t_event)
    if len(deltas) == 1:
        return times[0]
    basis = np.column_stack([np.ones(len(deltas)), np.asarray(deltas, dtype=float) ** 1.5])
    coef, *_ = np.linalg.lstsq(basis, np.asarray(times), rcond=None)
    return float(coef[0])


@dataclass(frozen=True)
class PhaseCurve:
    K: float
    regime: Union[Periodic, PullIn, Rest]
    x: np.ndarray
    v: np.ndarray

    @property
    def closed(self) -> bool:
        return isinstance(self.regime, Periodic)


def phase_portrait(
    alpha: float,
    K_list: Sequence[float],
    n_points: int = 400,
    t_max: float = 200.0,
    pull_in_delta: float = DEFAULT_DELTA,
    rel_tol: float = DEFAULT_REL_TOL,
    abs_tol: float = DEFAULT_ABS_TOL,
) -> list[PhaseCurve]:
    """(x, v) curves from rest at the origin, one per K.

    Periodic curves cover one full period; pull-in curves stop at the event.
    Each curve holds ``n_points`` points evenly spaced in time.
    """
    from .quadrature import RegimeError, period

    curves = []
    for K in K_list:
        q = OscParams(alpha=alpha, K=K)
        regime = classify(q)
        if isinstance(regime, Rest):
            curves.append(PhaseCurve(K=K, regime=regime, x=np.zeros(1), v=np.zeros(1)))
            continue
        t_end = t_max
        if isinstance(regime, Periodic):
            try:
                t_end = min(period(q), t_max)
            except RegimeError:
                pass
        traj = simulate(SimConfig(q=q, t_end=t_end, rel_tol=rel_tol, abs_tol=abs_tol, pull_in_delta=pull_in_delta))
        tq = np.linspace(traj.t[0], traj.t[-1], n_points)
        x, v = traj.interpolate(tq)
        curves.append(PhaseCurve(K=K, regime=regime, x=x, v=v))
    return curves
