import numpy as np
import pytest

import ptvortex as pv
from ptvortex.config import config_from_mapping, parse_kv_text, serialize_config, validate


def test_g_from_physical_zero_scattering():
    assert pv.g_from_physical(1000, 0.0, 1.0) == 0.0


def test_g_from_physical_unit_value():
    # N = 1000 with a/r0 = 1/(8000 pi) gives g = 1
    r0 = 1.0
    a = r0 / (8000.0 * np.pi)
    assert pv.g_from_physical(1000, a, r0) == pytest.approx(1.0, rel=1e-14)


def test_g_from_physical_linear_in_n():
    a, r0 = 5e-4, 1.0
    assert pv.g_from_physical(2000, a, r0) == pytest.approx(
        2.0 * pv.g_from_physical(1000, a, r0), rel=1e-14)


def test_g_from_physical_rejects_bad_inputs():
    with pytest.raises(ValueError):
        pv.g_from_physical(0, 1e-3, 1.0)
    with pytest.raises(ValueError):
        pv.g_from_physical(10, 1e-3, 0.0)
    with pytest.raises(ValueError):
        pv.g_from_physical(10, -1e-3, 1.0)


def test_minimal_config_gets_paper_defaults(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("potential.kind = A\n")
    config = pv.load_config(path)
    assert config.n_max == 11
    assert config.grid.n_x == 128 and config.grid.n_y == 128
    assert config.grid.x_min == -5.0 and config.grid.x_max == 5.0
    assert config.propagation.dt == 1e-3
    assert config.g == 1.0


def test_parse_comments_and_blank_lines():
    kv = parse_kv_text("# comment\n\nrun.g = 2.0  # inline\n")
    assert kv == {"run.g": "2.0"}


def test_negative_dt_rejected(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("propagation.dt = -1e-3\n")
    with pytest.raises(pv.ConfigError, match="dt"):
        pv.load_config(path)


def test_unknown_potential_kind_names_key(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("potential.kind = Z\n")
    with pytest.raises(pv.ConfigError, match="potential.kind"):
        pv.load_config(path)


def test_unknown_key_rejected():
    with pytest.raises(pv.ConfigError, match="unknown key"):
        config_from_mapping({"runn.g": "1.0"})


def test_errors_aggregate_all_violations():
    with pytest.raises(pv.ConfigError) as err:
        config_from_mapping({"run.g": "-1", "propagation.dt": "0",
                             "potential.kind": "Q", "basis.n_max": "-3"})
    text = str(err.value)
    for key in ("run.g", "propagation.dt", "potential.kind", "basis.n_max"):
        assert key in text


def test_round_trip_identity(tmp_path):
    original = config_from_mapping({
        "run.g": "2.5", "run.seed": "42", "potential.kind": "C",
        "potential.d": "1.5", "potential.gamma": "0.8",
        "sweep.parameter": "d", "sweep.values": "0.5,1.0,1.5",
        "propagation.n_steps": "500",
    })
    text = serialize_config(original)
    again = config_from_mapping(parse_kv_text(text))
    assert serialize_config(again) == text
    assert again.g == original.g
    assert again.potential == original.potential
    assert again.sweep[0] == original.sweep[0]
    np.testing.assert_array_equal(again.sweep[1], original.sweep[1])
    assert again.propagation.n_steps == original.propagation.n_steps


def test_validate_round_trip_clean():
    config = config_from_mapping({"potential.kind": "B", "potential.gamma": "1.0"})
    assert validate(config) == []


def test_overrides_take_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("run.g = 1.0\npotential.kind = A\n")
    config = pv.load_config(path, overrides=["run.g=3.0"])
    assert config.g == 3.0


def test_negative_gamma_rejected_in_config():
    with pytest.raises(pv.ConfigError, match="gamma"):
        config_from_mapping({"potential.gamma": "-0.5"})
