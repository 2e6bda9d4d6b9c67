"""Parameter sweeps over (alpha, K): regime maps, threshold curves, pull-in times."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bifurcation import Periodic, PullIn, classify, kappa
from .model import OscParams
from .quadrature import DivergentPeriodError, RegimeError, period, pull_in_time
from .simulator import extrapolated_pull_in_time

REGIME_ERROR = "regime-error"


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    K: float
    regime: str
    kappa: float
    margin: float
    x_max: Optional[float] = None
    period: Optional[float] = None
    pull_in_time: Optional[float] = None
    note: str = ""


@dataclass(frozen=True)
class SweepGrid:
    alpha_values: tuple[float, ...]
    K_values: tuple[float, ...]
    cells: tuple[SweepCell, ...]  # row-major: alpha outer, K inner

    def cell(self, i: int, j: int) -> SweepCell:
        return self.cells[i * len(self.K_values) + j]


def axis(lo: float, hi: float, n: int) -> list[float]:
    """Evenly spaced axis; a degenerate range gives the single value ``lo``."""
    if lo == hi:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, n)]


def analyze_cell(alpha: float, K: float) -> SweepCell:
    """Regime plus whichever of amplitude/period/pull-in time applies."""
    q = OscParams(alpha=alpha, K=K)
    r = classify(q)
    if isinstance(r, Periodic):
        try:
            T, note = period(q), ""
        except DivergentPeriodError:
            T, note = None, "divergent-period"
        return SweepCell(alpha, K, r.name, r.kappa, r.margin, x_max=r.x_max, period=T, note=note)
    if isinstance(r, PullIn):
        return SweepCell(alpha, K, r.name, r.kappa, r.margin, pull_in_time=pull_in_time(q))
    return SweepCell(alpha, K, r.name, r.kappa, r.margin)


def _analyze_pair(pair: tuple[float, float]) -> SweepCell:
    return analyze_cell(*pair)


def regime_grid(alpha_values: Sequence[float], K_values: Sequence[float], jobs: int = 1) -> SweepGrid:
    """Evaluate every (alpha, K) pair; cells are ordered by grid index regardless of ``jobs``."""
    pairs = [(float(a), float(k)) for a in alpha_values for k in K_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_analyze_pair, pairs, chunksize=max(1, len(pairs) // (4 * jobs))))
    else:
        cells = [_analyze_pair(p) for p in pairs]
    return SweepGrid(tuple(map(float, alpha_values)), tuple(map(float, K_values)), tuple(cells))


def kappa_curve(alpha_values: Sequence[float]) -> list[tuple[float, float]]:
    return [(float(a), kappa(a)) for a in alpha_values]


def pull_in_time_sweep(
    K: float, alpha_values: Sequence[float], method: str = "quadrature"
) -> list[tuple[float, Optional[float], str]]:
    """(alpha, pull-in time, status) rows; non-pull-in cells get ``REGIME_ERROR``."""
    if method not in ("quadrature", "simulate"):
        raise ValueError(f"unknown method {method!r}")
    rows = []
    for a in alpha_values:
        q = OscParams(alpha=float(a), K=K)
        if not K > kappa(q.alpha):
            rows.append((float(a), None, REGIME_ERROR))
            continue
        try:
            t = pull_in_time(q) if method == "quadrature" else extrapolated_pull_in_time(q)
        except RegimeError:
            rows.append((float(a), None, REGIME_ERROR))
            continue
        rows.append((float(a), t, "ok"))
    return rows
