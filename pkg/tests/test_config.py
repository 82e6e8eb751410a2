import pytest

from lattice.errors import ConfigError
from symsum.config import RunConfig, load_config
from tests.conftest import DESCRIPTORS


def test_defaults():
    config = load_config()
    assert config.degree_bound == 6
    assert config.coeff_bound == 10
    assert config.output_format == "text"
    assert config.oracle is False
    assert config.jobs >= 1


def test_file_environment_and_overrides(tmp_path, monkeypatch):
    path = tmp_path / "symsum.yml"
    path.write_text("run:\n  degree_bound: 7\n  coeff_bound: 4\n  oracle: true\n  log_level: info\n")
    config = load_config(path)
    assert (config.degree_bound, config.coeff_bound, config.oracle, config.log_level) == (7, 4, True, "INFO")
    monkeypatch.setenv("SYMSUM_COEFF_BOUND", "5")
    monkeypatch.setenv("SYMSUM_FORMAT", "structured")
    config = load_config(path, {"degree_bound": 9, "jobs": None})
    assert config.degree_bound == 9
    assert config.coeff_bound == 5
    assert config.output_format == "structured"


def test_workspace_config_loads():
    config = load_config(DESCRIPTORS.parent / "symsum.yml")
    assert config.splitting_bound == 8
    assert config.max_components == 1


def test_unknown_settings(tmp_path):
    path = tmp_path / "symsum.yml"
    path.write_text("run:\n  degre_bound: 7\n")
    with pytest.raises(ConfigError, match="degre_bound"):
        load_config(path)


def test_unreadable_files(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read"):
        load_config(tmp_path / "missing.yml")
    path = tmp_path / "broken.yml"
    path.write_text("run: [1, 2\n")
    with pytest.raises(ConfigError, match="not valid YAML"):
        load_config(path)
    path.write_text("run: 3\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(path)


@pytest.mark.parametrize(
    "overrides, message",
    [
        ({"degree_bound": 0}, "degree_bound must be a positive integer"),
        ({"jobs": "many"}, "jobs must be an integer"),
        ({"output_format": "json"}, "output_format must be one of"),
        ({"log_level": "loud"}, "log_level must be one of"),
        ({"oracle": "maybe"}, "oracle must be true or false"),
    ],
)
def test_bad_values(overrides, message):
    with pytest.raises(ConfigError, match=message):
        load_config(overrides=overrides)


def test_bad_environment(monkeypatch):
    monkeypatch.setenv("SYMSUM_SEED", "tomorrow")
    with pytest.raises(ConfigError, match="seed"):
        load_config()


def test_booleans_are_not_counts():
    with pytest.raises(ConfigError):
        RunConfig(jobs=True)
