import json

import pytest
import toml
import yaml

from tracesig.errors import ParameterError
from tracesig.storage.config import TraceSigConfig


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("TRACESIG_CONFIG", raising=False)
    monkeypatch.delenv("TRACESIG_KEYSTORE", raising=False)


@pytest.mark.parametrize("suffix,dump", [(".json", json.dumps), (".yaml", yaml.safe_dump), (".toml", toml.dumps)])
def test_every_format_loads(tmp_path, suffix, dump):
    path = tmp_path / f"config{suffix}"
    path.write_text(dump({"keystore": "/srv/group", "seed": 5, "params": {"group_size": 3, "kappa": 4}}))
    config = TraceSigConfig(str(path))
    assert config.keystore_path() == "/srv/group"
    assert config.seed() == 5
    assert config.param_overrides() == {"group_size": 3, "kappa": 4}


def test_missing_file_is_an_empty_configuration(tmp_path):
    config = TraceSigConfig(str(tmp_path / "absent.json"))
    assert config.config == {}
    assert config.seed() is None
    assert config.param_overrides() == {}


def test_keystore_precedence(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"keystore": "/from/config"}))
    config = TraceSigConfig(str(path))
    assert config.keystore_path() == "/from/config"
    monkeypatch.setenv("TRACESIG_KEYSTORE", "/from/env")
    assert config.keystore_path() == "/from/env"
    assert config.keystore_path("/explicit") == "/explicit"


def test_config_path_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "env.yaml"
    path.write_text("seed: 9\n")
    monkeypatch.setenv("TRACESIG_CONFIG", str(path))
    config = TraceSigConfig()
    assert config.config_path == str(path)
    assert config.seed() == 9
    assert config.seed(1) == 1


@pytest.mark.parametrize("content", ["{not json", "[1, 2]"])
def test_unusable_files_are_parameter_errors(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(ParameterError):
        TraceSigConfig(str(path))


def test_unknown_or_mistyped_overrides_are_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"params": {"colour": 1}}))
    with pytest.raises(ParameterError, match="unknown"):
        TraceSigConfig(str(path)).param_overrides()
    path.write_text(json.dumps({"params": {"kappa": "many"}}))
    with pytest.raises(ParameterError):
        TraceSigConfig(str(path)).param_overrides()


def test_updates_are_saved_in_the_file_format(tmp_path):
    path = tmp_path / "nested" / "config.toml"
    config = TraceSigConfig(str(path))
    config.set_param("kappa", "6")
    config.merge_config({"seed": 3, "params": {"p": 2}})
    reloaded = TraceSigConfig(str(path))
    assert reloaded.param_overrides() == {"kappa": 6, "p": 2}
    assert reloaded.seed() == 3
    with pytest.raises(ParameterError):
        config.set_param("colour", 1)
