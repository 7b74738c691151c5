import pytest

from phonolib import ConfigError
from phonolib.config import (
    ENV_VAR,
    SCHEMA,
    UNIT_SUFFIXES,
    build_lambda_system,
    build_linewidth_params,
    build_spectral_models,
    build_t1_params,
    default_config_text,
    load_config,
    parse_config,
)
from phonolib.dynamics import ground_relaxation_time


def test_every_key_has_a_unit_suffix():
    for section, body in SCHEMA.items():
        for key in body:
            assert key.endswith(UNIT_SUFFIXES), f"{section}.{key}"


def test_defaults_round_trip(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(default_config_text())
    assert load_config(p).values == load_config().values


def test_misspelled_key_suggestion():
    with pytest.raises(ConfigError, match="did you mean 'ground_splitting_ghz'"):
        parse_config({"doublets": {"ground_spliting_ghz": 40.0}})


def test_misspelled_section_suggestion():
    with pytest.raises(ConfigError, match="did you mean 'mott_seitz'"):
        parse_config({"mott_seitzz": {}})


@pytest.mark.parametrize(
    "doc",
    [
        {"doublets": {"ground_splitting_ghz": "50"}},
        {"doublets": {"ground_splitting_ghz": True}},
        {"doublets": {"ground_splitting_ghz": float("inf")}},
        {"doublets": 3},
        {"expansion": {"table_path": 1}},
    ],
)
def test_type_errors(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_bad_toml(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[bath\n")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")


def test_environment_default(tmp_path, monkeypatch):
    p = tmp_path / "c.toml"
    p.write_text("[lambda_system]\nt1_ns = 20\n")
    monkeypatch.setenv(ENV_VAR, str(p))
    cfg = load_config()
    assert cfg.get("lambda_system", "t1_ns") == 20.0
    assert cfg.source == str(p)
    assert ground_relaxation_time(build_lambda_system(cfg)) == pytest.approx(20.0)


def test_relative_table_path(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[expansion]\ntable_path = "alpha.csv"\n')
    assert load_config(p).get("expansion", "table_path") == str(tmp_path / "alpha.csv")


def test_hash_tracks_values():
    base = load_config()
    changed = base.override("bath", "t1_offset_k", 0.0)
    assert base.hash != changed.hash
    assert base.hash == load_config().hash
    with pytest.raises(ConfigError):
        base.override("bath", "t1_offset", 0.0)


def test_builders_follow_overrides():
    cfg = load_config().override("doublets", "excited_splitting_ghz", 300.0)
    assert build_linewidth_params(cfg).doublet_u.splitting == 300.0
    assert build_t1_params(cfg.override("bath", "t1_offset_k", 1.0)).temp_offset == 1.0
    models = build_spectral_models(cfg.override("fine_structure", "resolution_ghz", 0.0))
    assert models.resolution_ghz == 0.0
