"""Exception hierarchy shared by every module."""


class TwoLayerError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(TwoLayerError, ValueError):
    """An argument is outside the domain an operation accepts."""


class StructureError(TwoLayerError):
    """A graph or network violates a structural invariant."""


class EstimationError(TwoLayerError):
    """Estimator input is missing data or is empty."""


class NumericalError(TwoLayerError):
    """A linear system is singular or badly conditioned."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class IngestionError(TwoLayerError):
    """An input file is malformed."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line
