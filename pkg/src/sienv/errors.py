"""Exception types. Numerical failures map to CLI exit status 2."""


class NumericalError(RuntimeError):
    """A computation ran but could not produce a trustworthy result."""


class QuadratureError(NumericalError):
    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3g})")
        self.achieved = achieved


class InsufficientFringesError(NumericalError):
    pass


class ObserverError(ValueError):
    """Input too short for an envelope: at least three samples are required."""
