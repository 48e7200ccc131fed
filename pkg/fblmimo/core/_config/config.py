import os
import os.path
from configparser import ConfigParser, Error as ConfigParserError
from typing import Any, Optional

from fblmimo.core._config.constants import DEFAULT_CONFIG_FILE_PATH, ENV_PREFIX, ENV_SETTINGS, SETTINGS
from fblmimo.exceptions.config_error import ConfigError

__config: Optional[ConfigParser] = None
__config_path: Optional[str] = None
__updated = False


def config_init(config_file_path: str = DEFAULT_CONFIG_FILE_PATH):
    update_config(config_file_path, get_config_default())


def get_config_default() -> ConfigParser:
    config = ConfigParser()
    for key, (_, default) in SETTINGS.items():
        config["DEFAULT"][key] = str(default)
    return config


def update_config(config_file_path: str, config: ConfigParser):
    if config_file_path is None:
        raise ValueError("Config file path not set")

    with open(config_file_path, "w", encoding="utf-8") as config_file:
        config.write(config_file)

    global __updated
    __updated = True


def get_config(config_file_path: str = DEFAULT_CONFIG_FILE_PATH) -> Optional[ConfigParser]:
    """The parsed config file, or None when there is none"""
    if not os.path.exists(config_file_path):
        return None
    global __config, __config_path, __updated
    if __config is None or __updated or __config_path != config_file_path:
        config = ConfigParser()
        try:
            success = config.read(config_file_path, encoding="utf-8") != []
        except ConfigParserError as e:
            raise ConfigError(f"Cannot parse {config_file_path}: {e}") from e
        if not success:
            raise ConfigError(f"Cannot read {config_file_path}")
        __config, __config_path, __updated = config, config_file_path, False
    return __config


def _convert(key: str, raw: str, layer: str) -> Any:
    kind, _ = SETTINGS[key]
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{layer} value {raw!r} for {key!r} is not a valid {kind.__name__}") from None


def get_setting(key: str, flag: Any = None, config_file_path: str = DEFAULT_CONFIG_FILE_PATH) -> Any:
    """
    Value of a setting, first layer that has it wins:
    command-line flag > FBLMIMO_<KEY> environment variable > config.ini [DEFAULT] > built-in default
    """
    if key not in SETTINGS:
        raise ConfigError(f"Unknown setting {key!r}")
    if flag is not None:
        return flag

    env_name = f"{ENV_PREFIX}{key.upper()}"
    if key in ENV_SETTINGS and os.environ.get(env_name, "").strip():
        return _convert(key, os.environ[env_name], f"environment variable {env_name}")

    config = get_config(config_file_path)
    if config is not None and config.has_option("DEFAULT", key):
        return _convert(key, config.get("DEFAULT", key), f"{config_file_path} [DEFAULT]")

    return SETTINGS[key][1]
