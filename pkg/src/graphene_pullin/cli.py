"""Command-line interface.

Exit codes: 0 ok, 2 usage/validation, 3 pull-in detected (simulate),
4 I/O error, 5 config parse error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Optional, Sequence

from . import bifurcation, quadrature
from .model import ModelDomainError, OscParams, nondimensionalize
from .report import ConfigParseError, device_from_config, parse_device_config, write_csv, write_json
from .simulator import (
    DEFAULT_ABS_TOL,
    DEFAULT_DELTA,
    DEFAULT_REL_TOL,
    NoPeriodError,
    PullInDetected,
    SimConfig,
    detect_period,
    orbit_amplitude,
    simulate,
)
from .sweep import axis, kappa_curve, pull_in_time_sweep, regime_grid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PULL_IN = 3
EXIT_IO = 4
EXIT_PARSE = 5


class UsageError(Exception):
    pass


class Report:
    """Tabular result of one subcommand."""

    def __init__(self, params: dict, columns: list[str], rows: list[dict], outcome: Optional[dict] = None,
                 exit_code: int = EXIT_OK):
        self.params = params
        self.columns = columns
        self.rows = rows
        self.outcome = outcome or {}
        self.exit_code = exit_code

    def emit(self, out, fmt: str) -> None:
        if fmt == "json":
            write_json(out, self.params, self.columns, self.rows, self.outcome)
        else:
            write_csv(out, self.columns, self.rows, self.outcome)


def _nonneg(name: str, value: float) -> None:
    if not value >= 0:
        raise UsageError(f"{name} must be >= 0, got {value!r}")


def cmd_classify(alpha: float, K: float) -> Report:
    _nonneg("alpha", alpha)
    _nonneg("K", K)
    q = OscParams(alpha=alpha, K=K)
    r = bifurcation.classify(q)
    row: dict[str, Any] = {"alpha": alpha, "K": K, "regime": r.name, "kappa": r.kappa, "margin": r.margin}
    outcome = {"regime": r.name}
    if isinstance(r, bifurcation.Periodic):
        row["x_max"] = r.x_max
        try:
            row["period"] = quadrature.period(q)
        except quadrature.DivergentPeriodError:
            outcome["period"] = "divergent"
    elif isinstance(r, bifurcation.PullIn):
        row["pull_in_time"] = quadrature.pull_in_time(q)
    columns = ["alpha", "K", "regime", "kappa", "margin", "x_max", "period", "pull_in_time"]
    return Report({"alpha": alpha, "K": K}, columns, [row], outcome)


def cmd_kappa_curve(alpha_min: float, alpha_max: float, n: int) -> Report:
    _nonneg("alpha-min", alpha_min)
    if alpha_max < alpha_min:
        raise UsageError("alpha-max must not be below alpha-min")
    if alpha_max > alpha_min and n < 2:
        raise UsageError("n must be >= 2 for a non-degenerate range")
    rows = [{"alpha": a, "kappa": k} for a, k in kappa_curve(axis(alpha_min, alpha_max, n))]
    comparison = bifurcation.threshold_comparison(0.0)
    outcome = {
        "kappa_linear": comparison["kappa"],
        "static_K_linear": comparison["static_K_linear"],
        "dynamic_below_static": comparison["dynamic_below_static"],
    }
    return Report({"alpha_min": alpha_min, "alpha_max": alpha_max, "n": n}, ["alpha", "kappa"], rows, outcome)


def cmd_simulate(alpha: float, K: float, x0: float, v0: float, t_end: float,
                 rel_tol: float = DEFAULT_REL_TOL, abs_tol: float = DEFAULT_ABS_TOL,
                 delta: float = DEFAULT_DELTA) -> Report:
    _nonneg("alpha", alpha)
    _nonneg("K", K)
    try:
        config = SimConfig(q=OscParams(alpha, K), x0=x0, v0=v0, t_end=t_end,
                           rel_tol=rel_tol, abs_tol=abs_tol, pull_in_delta=delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    traj = simulate(config)
    rows = [{"t": t, "x": x, "v": v} for t, x, v in zip(traj.t.tolist(), traj.x.tolist(), traj.v.tolist())]
    outcome: dict[str, Any] = {"outcome": traj.outcome.name}
    code = EXIT_OK
    if isinstance(traj.outcome, PullInDetected):
        outcome["t_event"] = traj.outcome.t_event
        code = EXIT_PULL_IN
    outcome.update(
        steps_accepted=traj.stats.accepted,
        steps_rejected=traj.stats.rejected,
        rhs_evaluations=traj.stats.rhs_evaluations,
    )
    params = {"alpha": alpha, "K": K, "x0": x0, "v0": v0, "t_end": t_end,
              "rel_tol": rel_tol, "abs_tol": abs_tol, "pull_in_delta": delta}
    return Report(params, ["t", "x", "v"], rows, outcome, exit_code=code)


def cmd_pullin_time_sweep(K: float, alpha_min: float, alpha_max: float, n: int,
                          method: str = "quadrature") -> Report:
    _nonneg("K", K)
    _nonneg("alpha-min", alpha_min)
    if alpha_max < alpha_min or (alpha_max > alpha_min and n < 2):
        raise UsageError("need alpha-min <= alpha-max and n >= 2")
    rows = [{"alpha": a, "t_pull_in": t, "status": s}
            for a, t, s in pull_in_time_sweep(K, axis(alpha_min, alpha_max, n), method)]
    params = {"K": K, "alpha_min": alpha_min, "alpha_max": alpha_max, "n": n, "method": method}
    return Report(params, ["alpha", "t_pull_in", "status"], rows)


def cmd_period(alpha: float, K: float, method: str = "quadrature", t_end: float = 100.0) -> Report:
    _nonneg("alpha", alpha)
    _nonneg("K", K)
    q = OscParams(alpha, K)
    r = bifurcation.classify(q)
    row: dict[str, Any] = {"alpha": alpha, "K": K, "regime": r.name}
    if isinstance(r, bifurcation.Periodic):
        if method == "quadrature":
            row["x_max"] = r.x_max
            try:
                row["period"] = quadrature.period(q)
                row["status"] = "ok"
            except quadrature.DivergentPeriodError:
                row["status"] = "divergent-period"
        else:
            traj = simulate(SimConfig(q=q, t_end=t_end))
            try:
                row["period"] = detect_period(traj)
                row["x_max"] = orbit_amplitude(traj)
                row["status"] = "ok"
            except NoPeriodError:
                row["status"] = "no-period"
    else:
        row["status"] = "regime-error"
    params = {"alpha": alpha, "K": K, "method": method}
    return Report(params, ["alpha", "K", "regime", "x_max", "period", "status"], [row])


def cmd_sweep(alpha_values: Sequence[float], K_values: Sequence[float], jobs: int = 1) -> Report:
    for a in alpha_values:
        _nonneg("alpha", a)
    for k in K_values:
        _nonneg("K", k)
    grid = regime_grid(alpha_values, K_values, jobs=jobs)
    columns = ["alpha", "K", "regime", "kappa", "margin", "x_max", "period", "pull_in_time", "note"]
    rows = [vars(c) for c in grid.cells]
    params = {"n_alpha": len(grid.alpha_values), "n_K": len(grid.K_values)}
    return Report(params, columns, rows)


def cmd_voltage(config_text: str) -> Report:
    device = device_from_config(parse_device_config(config_text))
    q = nondimensionalize(device)
    k = bifurcation.kappa(q.alpha)
    v_pull = bifurcation.pull_in_voltage(device)
    if device.V_dc < v_pull:
        status = "below pull-in"
    elif device.V_dc == v_pull:
        status = "at pull-in"
    else:
        status = "above pull-in"
    comparison = bifurcation.threshold_comparison(q.alpha)
    row = {
        "alpha": q.alpha,
        "K": q.K,
        "kappa": k,
        "V_dc": device.V_dc,
        "V_pull_in": v_pull,
        "status": status,
        "static_K_linear": comparison["static_K_linear"],
        "dynamic_below_static": comparison["dynamic_below_static"],
    }
    columns = list(row)
    return Report({"time_scale": device.time_scale, "length_scale": device.length_scale}, columns, [row],
                  {"status": status})


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="graphene-pullin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="regime for one (alpha, K)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--K", type=float, required=True)

    p = sub.add_parser("kappa-curve", parents=[common], help="threshold kappa(alpha) on a grid")
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--n", type=int, default=101)

    p = sub.add_parser("simulate", parents=[common], help="integrate one trajectory")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--v0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--abs-tol", type=float, default=DEFAULT_ABS_TOL)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="pull-in event at x = 1 - delta")

    p = sub.add_parser("pullin-time", parents=[common], help="pull-in time over an alpha range")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--alpha-min", type=float, default=0.03)
    p.add_argument("--alpha-max", type=float, default=1.0)
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--method", choices=("quadrature", "simulate"), default="quadrature")

    p = sub.add_parser("period", parents=[common], help="oscillation period for one (alpha, K)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--method", choices=("quadrature", "simulate"), default="quadrature")
    p.add_argument("--t-end", type=float, default=100.0, help="simulation length for --method simulate")

    p = sub.add_parser("sweep", parents=[common], help="regime map over an (alpha, K) grid")
    p.add_argument("--alpha-values", type=_floats, help="comma-separated alpha axis")
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=1.0)
    p.add_argument("--n-alpha", type=int, default=11)
    p.add_argument("--K-values", type=_floats, help="comma-separated K axis")
    p.add_argument("--K-min", type=float, default=0.0)
    p.add_argument("--K-max", type=float, default=0.2)
    p.add_argument("--n-K", type=int, default=11)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("voltage", parents=[common], help="pull-in voltage of a device config")
    p.add_argument("--config", required=True, help="flat key = value file in SI units")
    return parser


def run(args: argparse.Namespace) -> Report:
    if args.command == "classify":
        return cmd_classify(args.alpha, args.K)
    if args.command == "kappa-curve":
        return cmd_kappa_curve(args.alpha_min, args.alpha_max, args.n)
    if args.command == "simulate":
        return cmd_simulate(args.alpha, args.K, args.x0, args.v0, args.t_end,
                            args.rel_tol, args.abs_tol, args.delta)
    if args.command == "pullin-time":
        return cmd_pullin_time_sweep(args.K, args.alpha_min, args.alpha_max, args.n, args.method)
    if args.command == "period":
        return cmd_period(args.alpha, args.K, args.method, args.t_end)
    if args.command == "sweep":
        alphas = args.alpha_values or axis(args.alpha_min, args.alpha_max, args.n_alpha)
        Ks = args.K_values or axis(args.K_min, args.K_max, args.n_K)
        return cmd_sweep(alphas, Ks, args.jobs)
    if args.command == "voltage":
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IOError(f"cannot read config: {exc}") from exc
        return cmd_voltage(text)
    raise UsageError(f"unknown command {args.command!r}")  # pragma: no cover


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, ModelDomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                report.emit(fh, args.format)
        else:
            report.emit(sys.stdout, args.format)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
