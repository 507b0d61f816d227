"""Exception hierarchy shared by all modules."""


class MCLabError(Exception):
    """Base class for every error raised by mclab."""


class InvalidArgument(MCLabError, ValueError):
    """An argument violates an operation's precondition."""


class DomainError(InvalidArgument):
    """A formula was evaluated outside the region where it is valid."""


class PreconditionViolation(InvalidArgument):
    """The inputs fall outside the regime where a bound is asserted."""


class InsufficientSamples(InvalidArgument):
    """Too few samples to satisfy a sample-size requirement.

    ``required_m`` carries the smallest total sample count that would work.
    """

    def __init__(self, message, required_m):
        super().__init__(message)
        self.required_m = required_m


class EnsembleContractViolation(MCLabError):
    """A random-matrix sampler produced a matrix outside its declared class."""


class NumericFailure(MCLabError, ArithmeticError):
    """An iterative routine did not converge.

    ``last_estimate`` holds the final iterate value when one is available.
    """

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate


class ConfigError(MCLabError, ValueError):
    """Experiment configuration is invalid. ``violations`` lists every problem."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
