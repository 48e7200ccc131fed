class FblMimoError(Exception):
    def __init__(self, msg: str = ""):
        super(FblMimoError, self).__init__(msg)

    @classmethod
    def check(cls, condition: bool, msg: str, **kwargs):
        """Raise this error with `msg` when `condition` does not hold"""
        if not condition:
            raise cls(msg, **kwargs)
