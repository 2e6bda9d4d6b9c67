"""Deterministic CSV/JSON emission and the flat device-config format."""

from __future__ import annotations

import json
import math
from typing import Any, Iterable, Mapping, Optional, TextIO

from .model import DeviceParams

# config key -> DeviceParams field
CONFIG_KEYS = {
    "E_pa": "E",
    "D_pa": "D",
    "sigma_max_pa": "sigma_max",
    "Ac_m2": "A_c",
    "A_m2": "A",
    "L_m": "L",
    "d_m": "d",
    "m_kg": "m",
    "eps0_f_per_m": "eps0",
    "Vdc_v": "V_dc",
}
REQUIRED_KEYS = ("E_pa", "Ac_m2", "A_m2", "L_m", "d_m", "m_kg", "eps0_f_per_m", "Vdc_v")


class ConfigParseError(ValueError):
    """Malformed device config file."""


def format_value(value: Any) -> str:
    """Text form of a cell; floats use the shortest repr that round-trips."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_csv(
    out: TextIO,
    columns: Iterable[str],
    rows: Iterable[Mapping[str, Any]],
    outcome: Optional[Mapping[str, Any]] = None,
) -> None:
    """Header, one line per row, then ``# key=value`` footer lines for the outcome."""
    columns = list(columns)
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(row.get(c)) for c in columns) + "\n")
    for key, value in (outcome or {}).items():
        out.write(f"# {key}={format_value(value)}\n")


def write_json(
    out: TextIO,
    params: Mapping[str, Any],
    columns: Iterable[str],
    rows: Iterable[Mapping[str, Any]],
    outcome: Optional[Mapping[str, Any]] = None,
) -> None:
    columns = list(columns)
    doc = {
        "params": {k: _json_value(v) for k, v in params.items()},
        "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows],
        "outcome": {k: _json_value(v) for k, v in (outcome or {}).items()},
    }
    json.dump(doc, out, indent=2, allow_nan=False)
    out.write("\n")


def parse_device_config(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in CONFIG_KEYS:
            raise ConfigParseError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigParseError(f"line {lineno}: {key} is not a number: {value!r}") from None
    return values


def device_from_config(values: Mapping[str, float]) -> DeviceParams:
    """Build DeviceParams; missing keys or bad values raise ``ValueError``."""
    missing = [k for k in REQUIRED_KEYS if k not in values]
    if missing:
        raise ValueError(f"missing config keys: {', '.join(missing)}")
    if "D_pa" not in values and "sigma_max_pa" not in values:
        raise ValueError("config needs D_pa or sigma_max_pa")
    return DeviceParams(**{CONFIG_KEYS[k]: v for k, v in values.items()})
