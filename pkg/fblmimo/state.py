import json
from dataclasses import fields, Field


class Record:
    """Result record that flattens to one `{column: value}` row"""

    def as_row(self, prefix: str = ""):
        if not hasattr(self, "__dataclass_fields__"):
            return {f"{prefix}{key}": val for key, val in self.__dict__.items()}

        def field_is_included(field: Field):
            # payloads such as raw arrays opt out with metadata={"as_row": False}
            return field.metadata.get("as_row", True)

        # noinspection PyDataclass
        return {f"{prefix}{field.name}": getattr(self, field.name) for field in fields(self) if
                field_is_included(field)}

    def __str__(self):
        return json.dumps(self.as_row(), indent=2, default=lambda v: getattr(v, "value", str(v)))
