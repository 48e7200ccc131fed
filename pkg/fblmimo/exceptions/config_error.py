from fblmimo.exceptions.fblmimo_error import FblMimoError


class ConfigError(FblMimoError):
    """A configuration layer holds a value that cannot be used"""
