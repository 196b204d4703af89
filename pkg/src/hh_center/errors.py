"""Exception hierarchy for hh-center.

Library code raises these; only the CLI maps them to exit codes.
"""


class HHCenterError(Exception):
    """Base class for all hh-center errors."""


class InputError(HHCenterError, ValueError):
    """Input violates a documented contract (exit code 2)."""


class OutOfRangeError(InputError):
    """A parameter lies outside its admissible range."""


class NonConcaveProfileError(InputError):
    """A radius profile fails the concavity test."""


class NegativeFunctionError(InputError):
    """A function that must be nonnegative on the body is negative."""


class InvalidGaugeError(InputError):
    """A gauge is not convex, or does not vanish at zero."""


class DegenerateBodyError(HHCenterError):
    """Body, slice or shadow has zero measure (exit code 3)."""


class RetryExhaustedError(HHCenterError):
    """Random instance generation kept producing degenerate bodies."""
