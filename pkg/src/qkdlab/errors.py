"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
estimation and domain problems with 3.
"""


class ConfigurationError(ValueError):
    """A config document, CLI flag, or menu combination is invalid."""


class DomainError(ValueError):
    """A numeric argument lies outside the formula's domain."""


class EstimationError(RuntimeError):
    """An estimator cannot be evaluated from the available counts."""


class InconsistentStatisticsError(EstimationError):
    """Counts imply mutually incompatible security parameters.

    Raised when the eavesdropper-information bound would need a
    conditional-correlation amplitude above 1, which no physical state
    can produce; the inputs are statistically inconsistent rather than
    merely noisy.
    """
