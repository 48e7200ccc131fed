from abc import ABC, abstractmethod
from typing import Any


class Decoder(ABC):
    @abstractmethod
    def decode(self, value: str) -> Any:
        """ Decode value from a string written by the matching encoder """
        ...


class CsvDecoder(Decoder):
    def __init__(self):
        pass

    def decode(self, value: str):
        if value == "":
            return None
        if value in ("true", "false"):
            return value == "true"
        try:
            return int(value)
        except ValueError:
            pass
        try:
            return float(value)
        except ValueError:
            return value

    def decode_row(self, row: dict) -> dict:
        return {key: self.decode(value) for key, value in row.items()}
