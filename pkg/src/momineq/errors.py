"""Exception types raised by the inference engine."""


class ParameterError(ValueError):
    """An argument lies outside its admissible range."""


class ShapeError(ValueError):
    """Array dimensions or index ranges do not match the sample."""


class DegeneratePenaltyError(ParameterError):
    """The Lasso penalty formula has a non-positive radicand."""


class SampleTooSmallError(ParameterError):
    """The SN finite-sample correction is undefined for this sample size."""
