import pytest

from fblmimo.core._config.config import config_init, get_config, get_setting
from fblmimo.exceptions.config_error import ConfigError


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.ini"
    path.write_text("[DEFAULT]\ntrials = 500\nseed = 7\nepsilon = 1e-5\n", encoding="utf-8")
    return str(path)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("FBLMIMO_SEED", "FBLMIMO_TRIALS", "FBLMIMO_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def test_flag_wins(config_file, monkeypatch):
    monkeypatch.setenv("FBLMIMO_TRIALS", "900")
    assert get_setting("trials", 10, config_file) == 10


def test_env_beats_file(config_file, monkeypatch):
    monkeypatch.setenv("FBLMIMO_TRIALS", "900")
    assert get_setting("trials", None, config_file) == 900


def test_file_beats_default(config_file):
    assert get_setting("trials", None, config_file) == 500
    assert get_setting("seed", None, config_file) == 7
    assert get_setting("epsilon", None, config_file) == 1e-5
    assert get_setting("workers", None, config_file) == 1


def test_defaults_without_a_file(tmp_path):
    missing = str(tmp_path / "missing.ini")
    assert get_config(missing) is None
    assert get_setting("trials", None, missing) == 100000
    assert get_setting("blocklength", None, missing) == 200
    assert get_setting("rate_fraction", None, missing) == 0.8


def test_environment_only_carries_run_settings(config_file, monkeypatch):
    monkeypatch.setenv("FBLMIMO_EPSILON", "0.1")
    assert get_setting("epsilon", None, config_file) == 1e-5


def test_blank_environment_is_ignored(config_file, monkeypatch):
    monkeypatch.setenv("FBLMIMO_SEED", "  ")
    assert get_setting("seed", None, config_file) == 7


def test_malformed_values(config_file, tmp_path, monkeypatch):
    monkeypatch.setenv("FBLMIMO_WORKERS", "two")
    with pytest.raises(ConfigError) as e:
        get_setting("workers", None, config_file)
    assert "FBLMIMO_WORKERS" in str(e.value)

    bad = tmp_path / "bad.ini"
    bad.write_text("[DEFAULT]\nseed = forty-two\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        get_setting("seed", None, str(bad))


def test_unparsable_file(tmp_path):
    broken = tmp_path / "broken.ini"
    broken.write_text("trials = 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        get_config(str(broken))


def test_unknown_setting(config_file):
    with pytest.raises(ConfigError):
        get_setting("colour", None, config_file)


def test_config_init_writes_every_default(tmp_path):
    path = str(tmp_path / "config.ini")
    config_init(path)
    assert get_setting("trials", None, path) == 100000
    assert get_setting("rate_fraction", None, path) == 0.8
