"""Config-driven parameter sweeps with deterministic CSV output.

Each sweep row rebuilds the model at one parameter value, computes all four
optima from scratch (no warm starts, so rows are independent and may run on
any number of worker threads without changing the result), and records
prices, objectives, growth rates, and the equilibrium state at the two
two-sided optima.  Numerical failures are captured per row in the ``error``
column rather than aborting the sweep.

CSV output is RFC-4180 style: comma separated, header row, LF line endings,
12 significant digits.  Identical configs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, build_model
from .curves import MarketModel
from .errors import ConfigError, NumericalError, VerificationError
from .optimize import GrowthRates, OptimumReport, growth_rates
from .oracle import GridOptimum, GridSpec, grid_optimize
from .sensitivity import _with_parameter

ALL_COLUMNS = (
    "param_value",
    "p_star", "q_star", "profit_two_sided", "profit_one_sided", "profit_growth",
    "p_welfare", "q_welfare", "welfare_two_sided", "welfare_one_sided",
    "welfare_growth",
    "congestion_profit_opt", "elasticity_profit_opt",
    "congestion_welfare_opt", "elasticity_welfare_opt",
    "error",
)
PRICE_COLUMNS = ("param_value", "p_star", "q_star", "p_welfare", "q_welfare", "error")


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    p_star: float | None = None
    q_star: float | None = None
    profit_two_sided: float | None = None
    profit_one_sided: float | None = None
    profit_growth: float | None = None
    p_welfare: float | None = None
    q_welfare: float | None = None
    welfare_two_sided: float | None = None
    welfare_one_sided: float | None = None
    welfare_growth: float | None = None
    congestion_profit_opt: float | None = None
    elasticity_profit_opt: float | None = None
    congestion_welfare_opt: float | None = None
    elasticity_welfare_opt: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    columns: tuple[str, ...]
    rows: tuple[SweepRow, ...]


def sweep_values(cfg: ScenarioConfig) -> list[float]:
    if cfg.sweep_parameter is None or cfg.sweep_range is None:
        raise ConfigError("sweep needs both sweep.parameter and sweep.range")
    start, stop, count = cfg.sweep_range
    if count == 1:
        return [start]
    values = np.linspace(start, stop, count)
    return sorted(float(v) for v in values)


def _row_from_rates(value: float, rates: GrowthRates) -> SweepRow:
    pt, wt = rates.profit_two_sided, rates.welfare_two_sided
    return SweepRow(
        param_value=value,
        p_star=pt.prices.user,
        q_star=pt.prices.cp,
        profit_two_sided=pt.objective,
        profit_one_sided=rates.profit_one_sided.objective,
        profit_growth=rates.profit_growth,
        p_welfare=wt.prices.user,
        q_welfare=wt.prices.cp,
        welfare_two_sided=wt.objective,
        welfare_one_sided=rates.welfare_one_sided.objective,
        welfare_growth=rates.welfare_growth,
        congestion_profit_opt=pt.equilibrium.congestion,
        elasticity_profit_opt=pt.equilibrium.elasticity,
        congestion_welfare_opt=wt.equilibrium.congestion,
        elasticity_welfare_opt=wt.equilibrium.elasticity,
    )


def _evaluate_row(base_model: MarketModel, parameter: str, value: float) -> SweepRow:
    try:
        model = _with_parameter(base_model, parameter, value)
        return _row_from_rates(value, growth_rates(model))
    except (NumericalError, ValueError) as exc:
        return SweepRow(param_value=value, error=f"{type(exc).__name__}: {exc}")


def run_sweep(cfg: ScenarioConfig, threads: int | None = None) -> SweepResult:
    """Evaluate the configured sweep; rows are assembled in parameter order."""
    parameter = cfg.sweep_parameter
    values = sweep_values(cfg)
    base_model = build_model(cfg)
    workers = threads if threads is not None else cfg.threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda v: _evaluate_row(base_model, parameter, v), values))
    else:
        rows = [_evaluate_row(base_model, parameter, v) for v in values]
    columns = ALL_COLUMNS if cfg.output_columns == "all" else PRICE_COLUMNS
    return SweepResult(parameter=parameter, columns=columns, rows=tuple(rows))


def price_trend_sweep(cfg: ScenarioConfig, threads: int | None = None) -> SweepResult:
    """Sweep restricted to the four optimal-price columns."""
    cfg = dataclasses.replace(cfg, output_columns="prices")
    return run_sweep(cfg, threads=threads)


def format_value(v: float | str | None) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v.replace(",", ";")
    return f"{v:.12g}"


def emit_csv(result: SweepResult, path: str | Path) -> Path:
    """Write the sweep table; header row always present, LF endings."""
    path = Path(path)
    try:
        lines = [",".join(result.columns)]
        for row in result.rows:
            lines.append(",".join(format_value(getattr(row, col))
                                  for col in result.columns))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from None
    return path


def parse_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.split("\n") if line]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


# ---------------------------------------------------------------------------
# Oracle verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationOutcome:
    max_price_gap: float
    max_value_shortfall: float

    def __str__(self) -> str:
        return (f"max price gap vs oracle {self.max_price_gap:.3e}, "
                f"max value shortfall {self.max_value_shortfall:.3e}")


def _check_against_grid(report: OptimumReport, grid_best: GridOptimum,
                        label: str) -> tuple[float, float]:
    gap_p = abs(report.prices.user - grid_best.price_user)
    gap_q = abs(report.prices.cp - grid_best.price_cp)
    cell = max(grid_best.cell_user, grid_best.cell_cp)
    shortfall = grid_best.value - report.objective
    if gap_p > cell or gap_q > cell:
        raise VerificationError(
            f"{label}: refined prices ({report.prices.user:.6g}, {report.prices.cp:.6g}) "
            f"sit more than one grid cell from the oracle's "
            f"({grid_best.price_user:.6g}, {grid_best.price_cp:.6g})")
    if shortfall > 1e-8:
        raise VerificationError(
            f"{label}: refined objective {report.objective:.12g} falls "
            f"{shortfall:.3e} below the grid oracle's {grid_best.value:.12g}")
    return max(gap_p, gap_q), max(0.0, shortfall)


def verify_optima(model: MarketModel, profit_report: OptimumReport,
                  welfare_report: OptimumReport,
                  grid: GridSpec | None = None) -> VerificationOutcome:
    """Cross-check refined optima against the exhaustive grid oracle."""
    grid = grid or GridSpec()
    price_gap = 0.0
    shortfall = 0.0
    for report, objective, label in ((profit_report, "profit", "profit optimum"),
                                     (welfare_report, "welfare", "welfare optimum")):
        best = grid_optimize(model, objective, grid)
        g, s = _check_against_grid(report, best, label)
        price_gap = max(price_gap, g)
        shortfall = max(shortfall, s)
    return VerificationOutcome(price_gap, shortfall)


def verify_sweep(cfg: ScenarioConfig, result: SweepResult,
                 grid: GridSpec | None = None) -> VerificationOutcome:
    """Re-run the grid oracle on every successful sweep row."""
    base_model = build_model(cfg)
    price_gap = 0.0
    shortfall = 0.0
    for row in result.rows:
        if row.error is not None or row.p_star is None:
            continue
        model = _with_parameter(base_model, result.parameter, row.param_value)
        grid_ = grid or GridSpec()
        profit_best = grid_optimize(model, "profit", grid_)
        gap_p = abs(row.p_star - profit_best.price_user)
        gap_q = abs(row.q_star - profit_best.price_cp)
        cell = max(profit_best.cell_user, profit_best.cell_cp)
        if gap_p > cell or gap_q > cell:
            raise VerificationError(
                f"row {row.param_value}: profit prices off the oracle by "
                f"({gap_p:.3e}, {gap_q:.3e}) with cell {cell:.3e}")
        short = profit_best.value - row.profit_two_sided
        if short > 1e-8:
            raise VerificationError(
                f"row {row.param_value}: profit value {short:.3e} below oracle")
        welfare_best = grid_optimize(model, "welfare", grid_)
        gap_pw = abs(row.p_welfare - welfare_best.price_user)
        if gap_pw > welfare_best.cell_user:
            raise VerificationError(
                f"row {row.param_value}: welfare price off the oracle by {gap_pw:.3e}")
        short_w = welfare_best.value - row.welfare_two_sided
        if short_w > 1e-8:
            raise VerificationError(
                f"row {row.param_value}: welfare value {short_w:.3e} below oracle")
        price_gap = max(price_gap, gap_p, gap_q, gap_pw)
        shortfall = max(shortfall, short, short_w, 0.0)
    return VerificationOutcome(price_gap, shortfall)
