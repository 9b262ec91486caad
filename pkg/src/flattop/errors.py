"""Exception hierarchy shared by every flattop module."""


class FlatTopError(Exception):
    """Base class for all library errors."""


class InvalidConfig(FlatTopError, ValueError):
    """A configuration or model parameter violates its invariants."""


class InvalidSeries(FlatTopError, ValueError):
    pass


class ConstantSeries(FlatTopError, ValueError):
    """The series has zero sample variance, so autocorrelations are undefined."""


class LagOutOfRange(FlatTopError, ValueError):
    pass


class InsufficientLags(FlatTopError, ValueError):
    pass


class InvalidBreakpoint(InvalidConfig):
    pass


class DegenerateModel(FlatTopError, ValueError):
    pass


class EmbeddingFailure(FlatTopError, RuntimeError):
    """Circulant embedding produced significantly negative eigenvalues."""


class NonStationary(FlatTopError, ValueError):
    pass


class DegenerateFit(FlatTopError, ValueError):
    pass


class ExperimentQualityError(FlatTopError, RuntimeError):
    """Too many replicates were capped or failed for a sample size.

    ``result`` carries the partial experiment result when one was assembled.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
