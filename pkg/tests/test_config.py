import numpy as np
import pytest

from thrustwalk.config import ConfigError, SimConfig, dump_config, load_config


def test_defaults_are_the_nominal_scenario():
    cfg = SimConfig()
    cfg.validate()
    assert cfg.dt == 5e-4
    assert cfg.duration == 10.0
    assert np.allclose(cfg.desired_velocity, [0.2, 0.0, 0.0])
    assert cfg.ground.mu_static == 0.25
    assert cfg.observer.gain == 1000.0
    assert cfg.constraint.mu == 0.25


def test_load_overrides_nested_values(tmp_path):
    f = tmp_path / "scenario.yaml"
    f.write_text(
        "duration: 2.5\n"
        "desired_velocity: [0.1, 0.0, 0.0]\n"
        "ground:\n  mu_static: 0.4\n  mu_coulomb: 0.3\n"
        "gait:\n  schedule:\n    cycle_time: 0.6\n"
        "model:\n  mass: 9.5\n"
    )
    cfg = load_config(f)
    assert cfg.duration == 2.5
    assert cfg.model.mass == 9.5
    assert cfg.gait.schedule.cycle_time == 0.6
    # the governor constraint follows the surface unless set explicitly
    assert cfg.constraint.mu == 0.4


def test_explicit_constraint_override(tmp_path):
    f = tmp_path / "scenario.yaml"
    f.write_text("constraint:\n  mu: 0.18\n  min_normal: 2.0\n")
    cfg = load_config(f)
    assert cfg.constraint.mu == 0.18
    assert cfg.constraint.min_normal == 2.0


def test_unknown_key_rejected(tmp_path):
    f = tmp_path / "scenario.yaml"
    f.write_text("grund:\n  mu_static: 0.4\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(f)


def test_invalid_values_rejected(tmp_path):
    f = tmp_path / "scenario.yaml"
    f.write_text("dt: -1.0\n")
    with pytest.raises(ConfigError):
        load_config(f)
    f.write_text("ground:\n  mu_coulomb: 0.5\n  mu_static: 0.2\n")
    with pytest.raises(ConfigError):
        load_config(f)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.yaml")


def test_hash_stable_and_sensitive(tmp_path):
    a, b = SimConfig(), SimConfig()
    assert a.config_hash() == b.config_hash()
    b.duration = 5.0
    assert a.config_hash() != b.config_hash()


def test_dump_round_trips(tmp_path):
    cfg = SimConfig(duration=1.25)
    f = tmp_path / "eff.yaml"
    f.write_text(dump_config(cfg))
    again = load_config(f)
    assert again.config_hash() == cfg.config_hash()
