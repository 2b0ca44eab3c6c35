"""Sweep engine and CSV emission: integrity, determinism, error capture."""

import dataclasses

import pytest

from netpricing import (ScenarioConfig, SweepResult, emit_csv, parse_config,
                        price_trend_sweep, run_sweep, verify_sweep)
from netpricing.errors import ConfigError
from netpricing.experiments import ALL_COLUMNS, PRICE_COLUMNS, format_value, parse_csv
from netpricing.oracle import GridSpec


def small_sweep_config(**overrides) -> ScenarioConfig:
    cfg = parse_config("sweep.parameter = alpha\nsweep.range = 0.5:2:4")
    return dataclasses.replace(cfg, **overrides)


def test_sweep_rows_sorted_and_nonnegative_growth():
    result = run_sweep(small_sweep_config())
    assert result.parameter == "alpha"
    values = [row.param_value for row in result.rows]
    assert values == sorted(values) and len(values) == 4
    for row in result.rows:
        assert row.error is None
        assert row.profit_growth >= -1e-10
        assert row.welfare_growth >= -1e-10
        assert row.p_welfare + row.q_welfare == pytest.approx(0.7, abs=1e-15)


def test_sweep_requires_sweep_block():
    with pytest.raises(ConfigError):
        run_sweep(ScenarioConfig())


def test_sweep_error_rows_do_not_abort():
    # cost above the user support bound: the one-sided welfare benchmark is
    # degenerate at every row, which must be captured, not raised
    cfg = small_sweep_config(cost=1.2)
    result = run_sweep(cfg)
    assert all(row.error is not None for row in result.rows)
    assert all(row.p_star is None for row in result.rows)


def test_price_trend_sweep_restricts_columns():
    result = price_trend_sweep(small_sweep_config())
    assert result.columns == PRICE_COLUMNS


def test_emit_csv_round_trip(tmp_path):
    result = run_sweep(small_sweep_config())
    path = emit_csv(result, tmp_path / "sweep.csv")
    header, rows = parse_csv(path)
    assert header == list(ALL_COLUMNS)
    assert len(rows) == 4
    for parsed, row in zip(rows, result.rows):
        for col, cell in zip(header, parsed):
            want = getattr(row, col)
            assert cell == format_value(want)
            if isinstance(want, float):
                # 12 significant digits survive the round trip
                assert float(cell) == pytest.approx(want, rel=1e-11)


def test_emit_csv_empty_sweep_header_only(tmp_path):
    empty = SweepResult(parameter="alpha", columns=ALL_COLUMNS, rows=())
    path = emit_csv(empty, tmp_path / "empty.csv")
    text = path.read_text()
    assert text == ",".join(ALL_COLUMNS) + "\n"


def test_emit_csv_deterministic_across_runs_and_threads(tmp_path):
    cfg = small_sweep_config()
    blobs = []
    for threads, name in ((1, "a.csv"), (1, "b.csv"), (4, "c.csv")):
        result = run_sweep(cfg, threads=threads)
        path = emit_csv(result, tmp_path / name)
        blobs.append(path.read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]
    assert b"\r" not in blobs[0]


def test_csv_uses_lf_and_12_digits(tmp_path):
    result = run_sweep(small_sweep_config())
    raw = emit_csv(result, tmp_path / "fmt.csv").read_bytes()
    assert raw.endswith(b"\n") and b"\r\n" not in raw
    assert format_value(1.0 / 3.0) == "0.333333333333"
    assert format_value(None) == ""
    assert format_value(1234567.0) == "1234567"


def test_error_rows_emit_blank_cells(tmp_path):
    result = run_sweep(small_sweep_config(cost=1.2))
    header, rows = parse_csv(emit_csv(result, tmp_path / "err.csv"))
    error_col = header.index("error")
    p_col = header.index("p_star")
    for parsed in rows:
        assert parsed[p_col] == ""
        assert "DegenerateBaselineError" in parsed[error_col]


def test_verify_sweep_against_small_grid():
    cfg = dataclasses.replace(
        parse_config("sweep.parameter = alpha\nsweep.range = 0.8:1.2:3"))
    result = run_sweep(cfg)
    outcome = verify_sweep(cfg, result, grid=GridSpec(401, 401))
    assert outcome.max_value_shortfall <= 1e-8
