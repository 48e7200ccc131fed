from fblmimo.exceptions.fblmimo_error import FblMimoError


class DomainError(FblMimoError, ValueError):
    """An argument lies outside the domain of the operation"""
