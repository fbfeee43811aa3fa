from fractions import Fraction

import pytest

from config import Settings, load_config, load_params
from engine.errors import ConfigError
from models import SuiteConfig


def test_missing_config_file_gives_defaults(tmp_path):
    settings = load_config(str(tmp_path / "absent.yaml"))
    assert settings.np_order == 6
    assert settings.window == 8
    assert settings.relations_dir == "relations"


def test_yaml_sections_map_onto_settings(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "truncation:\n  np: 3\n  window: 5\n"
        "suite:\n  rank: 1\n  seeds: [4, 5]\n"
        "quadrature:\n  points: 256\n"
    )
    settings = load_config(str(path))
    assert (settings.np_order, settings.window, settings.rank) == (3, 5, 1)
    assert settings.seeds == [4, 5]
    assert settings.quadrature_points == 256
    assert settings.output_dir == "reports"


def test_environment_fills_what_the_file_leaves_out(tmp_path, monkeypatch):
    monkeypatch.setenv("NP_ORDER", "9")
    path = tmp_path / "config.yaml"
    path.write_text("suite:\n  rank: 3\n")
    settings = load_config(str(path))
    assert settings.np_order == 9
    assert settings.rank == 3


def test_environment_without_file(tmp_path, monkeypatch):
    monkeypatch.setenv("WINDOW", "12")
    assert load_config(str(tmp_path / "absent.yaml")).window == 12


def test_invalid_yaml_is_a_config_error(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("truncation: [np: 3\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_ill_typed_value_is_a_config_error(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("truncation:\n  np: lots\n")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_load_params(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("# explicit point\np = 1/9\nq1 = 11/10\nq2=107/100\n\nu1 = 4/5  # first root\n")
    values = load_params(str(path))
    assert values == {"p": Fraction(1, 9), "q1": Fraction(11, 10), "q2": Fraction(107, 100), "u1": Fraction(4, 5)}


def test_load_params_reports_the_line(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("p = 1/9\nq1 = 11/10\nq2 107/100\n")
    with pytest.raises(ConfigError, match=":3:"):
        load_params(str(path))


def test_load_params_rejects_non_rationals(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("p = 1/9\nq1 = e\n")
    with pytest.raises(ConfigError, match="not a rational"):
        load_params(str(path))


def test_load_params_requires_the_basic_parameters(tmp_path):
    path = tmp_path / "params.txt"
    path.write_text("p = 1/9\nq1 = 11/10\n")
    with pytest.raises(ConfigError, match="missing q2, u1"):
        load_params(str(path))


def test_load_params_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_params(str(tmp_path / "nope.txt"))


def test_shipped_params_example(repo_root):
    values = load_params("params.txt.example")
    assert values["x1"] == Fraction(17, 20)


@pytest.mark.parametrize("overrides", [
    {"suite": "quantum"},
    {"np": -1},
    {"window": 0},
    {"rank": 5},
])
def test_suite_config_validation(overrides):
    with pytest.raises(ValueError):
        SuiteConfig(**{"suite": "theta", **overrides})


def test_settings_defaults_match_suite_defaults():
    settings, config = Settings(), SuiteConfig(suite="theta")
    assert (settings.np_order, settings.window, settings.rank) == (config.np, config.window, config.rank)
