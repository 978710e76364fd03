"""Unit tests for config parsing and validation."""

import math

import pytest

from qkdlab import ConfigurationError, MenuMode, SimMode, parse_config
from qkdlab.config import SweepSpec


def test_empty_document_gives_defaults():
    config = parse_config("")
    assert config.beta_a == 0.0 and config.beta_b == 0.0
    assert config.bsm_phase_offset == 0.0
    assert config.noise.depol_a == 0.0 and config.noise.background_click == 0.0
    assert config.mode is SimMode.ANALYTIC
    assert config.alice_menu is MenuMode.SIX and config.bob_menu is MenuMode.SIX
    assert config.sweep is None
    assert config.emit_svg is True


def test_nested_sections_parse():
    config = parse_config(
        """
channel:
  beta_a: 0.5
  sweep_points: 11
noise:
  depol_a: 0.03
sim:
  mode: montecarlo
  shots: 5000
  seed: 42
protocol:
  alice_menu: two
output:
  directory: results
  emit_svg: false
"""
    )
    assert config.beta_a == 0.5
    assert config.sweep == SweepSpec(points=11)
    assert config.noise.depol_a == 0.03
    assert config.mode is SimMode.MONTECARLO and config.shots == 5000 and config.seed == 42
    assert config.alice_menu is MenuMode.TWO_CHECK
    assert str(config.out_dir) == "results"
    assert config.emit_svg is False


def test_flat_dotted_keys_parse():
    config = parse_config("channel.beta_b: 1.25\nnoise.background_click: 0.01\n")
    assert config.beta_b == 1.25
    assert config.noise.background_click == 0.01


def test_one_check_menu_name():
    config = parse_config("protocol.alice_menu: one_check\n")
    assert config.alice_menu is MenuMode.ONE_CHECK


def test_unknown_key_named_in_error():
    with pytest.raises(ConfigurationError, match="channel.beta_c"):
        parse_config("channel.beta_c: 0.1\n")


def test_out_of_range_value_named_in_error():
    with pytest.raises(ConfigurationError, match="noise.depol_a"):
        parse_config("noise.depol_a: 1.5\n")


def test_bad_mode_rejected():
    with pytest.raises(ConfigurationError, match="mode"):
        parse_config("sim.mode: exact\n")


def test_bob_reduced_menu_rejected():
    with pytest.raises(ConfigurationError, match="bob_menu"):
        parse_config("protocol.bob_menu: one\n")


def test_shots_floor():
    with pytest.raises(ConfigurationError, match="shots"):
        parse_config("sim.shots: 0\n")


def test_sweep_needs_two_points():
    with pytest.raises(ConfigurationError, match="sweep_points"):
        parse_config("channel.sweep_points: 1\n")


def test_sweep_range_must_be_increasing():
    with pytest.raises(ConfigurationError, match="sweep_start"):
        parse_config("channel.sweep_points: 5\nchannel.sweep_start: 2.0\nchannel.sweep_stop: 1.0\n")


def test_sweep_values_half_open():
    config = parse_config("channel.sweep_points: 4\nchannel.sweep_stop: 4.0\n")
    assert config.sweep.values() == pytest.approx([0.0, 1.0, 2.0, 3.0])


def test_non_mapping_document_rejected():
    with pytest.raises(ConfigurationError):
        parse_config("- a\n- b\n")


def test_malformed_yaml_rejected():
    with pytest.raises(ConfigurationError, match="malformed"):
        parse_config("channel: [unclosed\n")


def test_wrong_type_rejected():
    with pytest.raises(ConfigurationError, match="sim.shots"):
        parse_config("sim.shots: many\n")


def test_phase_theta_wraps():
    config = parse_config(f"protocol.phase_theta: {2 * math.pi + 0.25}\n")
    assert config.phase_theta == pytest.approx(0.25)
