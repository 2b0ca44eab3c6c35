"""Flat key/value scenario configs and model construction.

Grammar: one ``key = value`` per line, ``#`` starts a comment, blank lines
are ignored, and dotted keys group related settings.  Sweep ranges use
``start:stop:count`` with inclusive endpoints.  Unknown keys are rejected so
typos fail loudly.

Recognized keys (defaults encode the static baseline: unit capacity and
sensitivity, unit demand shapes, cost 0.7, sharing congestion, reciprocal
gain):

    gain = reciprocal | exponential
    congestion = sharing | mm1
    user_demand.alpha = 1.0
    cp_demand.beta = 1.0
    cost = 0.7
    capacity = 1.0
    sensitivity = 1.0
    price.user = 0.3          # solve-eq evaluation point
    price.cp = 0.3
    sweep.parameter = alpha | beta | capacity | sensitivity (aliases mu, s)
    sweep.range = 0.5:3:26
    output.path = sweep.csv
    output.columns = all | prices
    verify = true | false
    threads = 1
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .curves import (CapacitySharing, CpPowerDemand, ExponentialGain,
                     MarketModel, MM1Queue, ReciprocalGain, UserPowerDemand)
from .errors import ConfigError

GAIN_FAMILIES = ("reciprocal", "exponential")
CONGESTION_FAMILIES = ("sharing", "mm1")
_PARAM_ALIASES = {"mu": "capacity", "s": "sensitivity",
                  "alpha": "alpha", "beta": "beta",
                  "capacity": "capacity", "sensitivity": "sensitivity"}


@dataclass(frozen=True)
class ScenarioConfig:
    gain: str = "reciprocal"
    congestion: str = "sharing"
    alpha: float = 1.0
    beta: float = 1.0
    cost: float = 0.7
    capacity: float = 1.0
    sensitivity: float = 1.0
    price_user: float | None = None
    price_cp: float | None = None
    sweep_parameter: str | None = None
    sweep_range: tuple[float, float, int] | None = None
    output_path: str | None = None
    output_columns: str = "all"
    verify: bool = False
    threads: int = 1
    source: str = field(default="<defaults>", compare=False)


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a number, got {raw!r}") from None


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key {key!r}: expected true/false, got {raw!r}")


def _parse_range(key: str, raw: str) -> tuple[float, float, int]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ConfigError(f"key {key!r}: ranges use start:stop:count, got {raw!r}")
    start = _parse_float(key, parts[0])
    stop = _parse_float(key, parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ConfigError(f"key {key!r}: count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise ConfigError(f"key {key!r}: count must be >= 1, got {count}")
    if count == 1 and start != stop:
        raise ConfigError(f"key {key!r}: a single-point range needs start == stop")
    return start, stop, count


def _apply(cfg: ScenarioConfig, key: str, raw: str) -> ScenarioConfig:
    value = raw.strip()
    if key == "gain":
        if value not in GAIN_FAMILIES:
            raise ConfigError(f"gain must be one of {GAIN_FAMILIES}, got {value!r}")
        return replace(cfg, gain=value)
    if key == "congestion":
        if value not in CONGESTION_FAMILIES:
            raise ConfigError(f"congestion must be one of {CONGESTION_FAMILIES}, got {value!r}")
        return replace(cfg, congestion=value)
    if key == "user_demand.alpha":
        return replace(cfg, alpha=_parse_float(key, value))
    if key == "cp_demand.beta":
        return replace(cfg, beta=_parse_float(key, value))
    if key == "cost":
        return replace(cfg, cost=_parse_float(key, value))
    if key == "capacity":
        return replace(cfg, capacity=_parse_float(key, value))
    if key == "sensitivity":
        return replace(cfg, sensitivity=_parse_float(key, value))
    if key == "price.user":
        return replace(cfg, price_user=_parse_float(key, value))
    if key == "price.cp":
        return replace(cfg, price_cp=_parse_float(key, value))
    if key == "sweep.parameter":
        canonical = _PARAM_ALIASES.get(value.lower())
        if canonical is None:
            raise ConfigError(
                f"sweep.parameter must be one of alpha, beta, capacity (mu), "
                f"sensitivity (s); got {value!r}")
        return replace(cfg, sweep_parameter=canonical)
    if key == "sweep.range":
        return replace(cfg, sweep_range=_parse_range(key, value))
    if key == "output.path":
        return replace(cfg, output_path=value)
    if key == "output.columns":
        if value not in ("all", "prices"):
            raise ConfigError(f"output.columns must be all or prices, got {value!r}")
        return replace(cfg, output_columns=value)
    if key == "verify":
        return replace(cfg, verify=_parse_bool(key, value))
    if key == "threads":
        try:
            threads = int(value)
        except ValueError:
            raise ConfigError(f"threads must be an integer, got {value!r}") from None
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        return replace(cfg, threads=threads)
    raise ConfigError(f"unknown config key {key!r}")


def parse_config(text: str, base: ScenarioConfig | None = None,
                 source: str = "<string>") -> ScenarioConfig:
    cfg = base if base is not None else ScenarioConfig()
    cfg = replace(cfg, source=source)
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        try:
            cfg = _apply(cfg, key.strip(), raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return cfg


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base=base, source=str(path))


def apply_overrides(cfg: ScenarioConfig, overrides: list[str]) -> ScenarioConfig:
    """Apply ``key=value`` strings (CLI --set) on top of a parsed config."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        cfg = _apply(cfg, key.strip(), raw)
    return cfg


def build_model(cfg: ScenarioConfig) -> MarketModel:
    gain = ReciprocalGain() if cfg.gain == "reciprocal" else ExponentialGain()
    congestion = CapacitySharing() if cfg.congestion == "sharing" else MM1Queue()
    try:
        return MarketModel(
            gain=gain,
            congestion=congestion,
            user_demand=UserPowerDemand(alpha=cfg.alpha),
            cp_demand=CpPowerDemand(beta=cfg.beta),
            cost=cfg.cost,
            capacity=cfg.capacity,
            sensitivity=cfg.sensitivity,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from None
