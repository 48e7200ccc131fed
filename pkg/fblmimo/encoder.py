import math
from abc import ABC, abstractmethod
from enum import Enum
from numbers import Integral, Real

from fblmimo.constants import SIGNIFICANT_DIGITS


class Encoder(ABC):
    @abstractmethod
    def encode(self, value) -> str:
        """ Encode value to a string before writing it out """
        ...


class CsvEncoder(Encoder):
    def __init__(self, significant_digits: int = SIGNIFICANT_DIGITS):
        self.__float_format = f"%.{significant_digits}g"

    def encode(self, value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, Enum):
            return str(value.value)
        if isinstance(value, Integral):
            return str(int(value))
        if isinstance(value, Real):
            value = float(value)
            if not math.isfinite(value):
                return str(value)
            # + 0.0 turns -0.0 into 0.0
            return self.__float_format % (value + 0.0)
        return str(value)

    def encode_row(self, row: dict) -> dict:
        return {key: self.encode(value) for key, value in row.items()}


class KeyValueEncoder(CsvEncoder):
    """Single result line: `key=value key=value`"""

    def encode_line(self, row: dict) -> str:
        return " ".join(f"{key}={self.encode(value)}" for key, value in row.items())
