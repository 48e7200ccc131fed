from os import path
from pathlib import Path

CONFIG_FILE_NAME = "config.ini"


def __determine_default_folder() -> bool:
    current = Path(path.abspath("."))
    # the config file lives either here or one folder up
    return (current / CONFIG_FILE_NAME).exists()


DEFAULT_FOLDER = "." if __determine_default_folder() else ".."

DEFAULT_CONFIG_FILE_PATH = path.join(DEFAULT_FOLDER, CONFIG_FILE_NAME)

ENV_PREFIX = "FBLMIMO_"

# setting -> (type, built-in default)
SETTINGS = {
    "seed": (int, 42),
    "trials": (int, 100000),
    "workers": (int, 1),
    "epsilon": (float, 1e-7),
    "blocklength": (int, 200),
    "rate_fraction": (float, 0.8),
}

# only these settings can come from the environment
ENV_SETTINGS = ("seed", "trials", "workers")
