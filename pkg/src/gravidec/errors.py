"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
DomainError for bad physical inputs (out-of-range arguments, violated
preconditions) and NumericalInstabilityError when an evolution leaves its
validity envelope (trace or Hermiticity drift).
"""


class DomainError(ValueError):
    """An argument lies outside the physical or numerical domain of an operation."""


class NumericalInstabilityError(RuntimeError):
    """A time evolution violated its conservation tolerances and was aborted."""
