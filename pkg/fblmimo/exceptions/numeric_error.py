from typing import Optional, Tuple

from fblmimo.exceptions.fblmimo_error import FblMimoError


class NumericError(FblMimoError, ArithmeticError):
    """A numeric routine failed on a specific channel draw"""

    def __init__(self, msg: str = "", lineage: Optional[Tuple[int, int, int]] = None):
        if lineage is not None:
            seed, block, index = lineage
            msg = f"{msg} [seed={seed} block={block} draw={index}]"
        super(NumericError, self).__init__(msg)
        self.lineage = lineage
