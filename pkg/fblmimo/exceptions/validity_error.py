from typing import Any, Optional

from fblmimo.exceptions.fblmimo_error import FblMimoError


class ValidityError(FblMimoError):
    """The closed form exists but is outside the region where it holds"""

    def __init__(self, msg: str = "", advice: Optional[str] = None, terms: Any = None):
        if advice:
            msg = f"{msg} ({advice})"
        super(ValidityError, self).__init__(msg)
        self.advice = advice
        self.terms = terms
