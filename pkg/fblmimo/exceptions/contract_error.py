from fblmimo.exceptions.fblmimo_error import FblMimoError


class ContractError(FblMimoError):
    """The caller broke the contract of an API (e.g. merging unrelated estimates)"""
