"""Exception hierarchy shared by all pipeline stages."""


class P300Error(Exception):
    """Base class for data and numerical errors raised by the pipeline."""


class ParseError(P300Error):
    pass


class SchemaError(P300Error):
    pass


class RangeError(P300Error, ValueError):
    pass


class EmptyClassError(P300Error):
    pass


class SplitError(P300Error):
    pass


class DesignError(P300Error, ValueError):
    pass


class RateError(P300Error, ValueError):
    pass


class DegenerateRowError(P300Error):
    pass


class InsufficientDataError(P300Error):
    pass


class SingularCovarianceError(P300Error):
    """Raised when a class or pooled covariance matrix cannot be inverted."""


class DimError(P300Error, ValueError):
    pass


class TargetError(P300Error, ValueError):
    pass


class NumericalError(P300Error):
    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class GroupError(P300Error):
    pass
