"""Scenario config grammar, overrides, and model construction."""

import pytest

from netpricing import (CapacitySharing, ConfigError, MM1Queue,
                        ReciprocalGain, ScenarioConfig, apply_overrides,
                        build_model, load_config, parse_config)

SAMPLE = """
# experiment: content demand sweep
gain = exponential
congestion = mm1
user_demand.alpha = 1.5     # stiffer user competition
cp_demand.beta = 2
cost = 0.6
capacity = 2.5
sensitivity = 1.2

sweep.parameter = beta
sweep.range = 0.5:3:26
output.path = out.csv
output.columns = prices
verify = true
threads = 4
"""


def test_parse_full_sample():
    cfg = parse_config(SAMPLE)
    assert cfg.gain == "exponential"
    assert cfg.congestion == "mm1"
    assert cfg.alpha == 1.5 and cfg.beta == 2.0
    assert cfg.cost == 0.6 and cfg.capacity == 2.5 and cfg.sensitivity == 1.2
    assert cfg.sweep_parameter == "beta"
    assert cfg.sweep_range == (0.5, 3.0, 26)
    assert cfg.output_path == "out.csv"
    assert cfg.output_columns == "prices"
    assert cfg.verify is True
    assert cfg.threads == 4


def test_defaults_encode_baseline():
    cfg = ScenarioConfig()
    assert (cfg.gain, cfg.congestion) == ("reciprocal", "sharing")
    assert (cfg.alpha, cfg.beta, cfg.capacity, cfg.sensitivity) == (1.0, 1.0, 1.0, 1.0)
    assert cfg.cost == 0.7
    model = build_model(cfg)
    assert isinstance(model.gain, ReciprocalGain)
    assert isinstance(model.congestion, CapacitySharing)


def test_parameter_aliases():
    assert parse_config("sweep.parameter = mu").sweep_parameter == "capacity"
    assert parse_config("sweep.parameter = s").sweep_parameter == "sensitivity"


def test_unknown_key_rejected_with_location():
    with pytest.raises(ConfigError, match="line.cfg:2"):
        parse_config("cost = 0.7\nbogus.key = 1\n", source="line.cfg")


@pytest.mark.parametrize("text", [
    "cost = abc",
    "sweep.range = 1:2",
    "sweep.range = 1:2:0",
    "sweep.range = 1:2:x",
    "verify = maybe",
    "threads = 0",
    "gain = quadratic",
    "congestion = m/m/k",
    "output.columns = everything",
    "just a line without equals",
])
def test_malformed_values_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_single_point_range_needs_equal_endpoints():
    assert parse_config("sweep.range = 2:2:1").sweep_range == (2.0, 2.0, 1)
    with pytest.raises(ConfigError):
        parse_config("sweep.range = 1:2:1")


def test_overrides_apply_after_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(SAMPLE, encoding="utf-8")
    cfg = load_config(path)
    cfg = apply_overrides(cfg, ["capacity=4.0", "sweep.parameter=mu"])
    assert cfg.capacity == 4.0
    assert cfg.sweep_parameter == "capacity"
    assert cfg.gain == "exponential"    # untouched keys survive
    with pytest.raises(ConfigError):
        apply_overrides(cfg, ["capacity"])


def test_missing_file_is_config_error():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.cfg")


def test_invalid_model_parameters_surface_as_config_error():
    with pytest.raises(ConfigError):
        build_model(parse_config("cost = 2.5"))
    with pytest.raises(ConfigError):
        build_model(parse_config("capacity = -1"))


def test_mm1_model_construction():
    model = build_model(parse_config("congestion = mm1\ncapacity = 2"))
    assert isinstance(model.congestion, MM1Queue)
