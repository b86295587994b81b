"""Exception hierarchy shared by every module."""


class IsingError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(IsingError, ValueError):
    """Spin vectors, sample sets or indices do not fit the model."""


class ContractError(IsingError, ValueError):
    """An argument violates an operation's precondition."""


class ParseError(IsingError, ValueError):
    """A file or JSON document is malformed.

    ``location`` points at the offending element, e.g. ``"couplers[3]"`` or
    ``"line 4, column 12"``.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
