"""Exception hierarchy shared by all markov_jscc modules."""


class MarkovJsccError(Exception):
    """Base class for every error raised by this package."""


class ReducibleMatrixError(MarkovJsccError):
    """The support graph of a matrix is not strongly connected."""


class PeriodicChainError(MarkovJsccError):
    """An irreducible chain fails the aperiodicity requirement."""


class NonConvergenceError(MarkovJsccError):
    """The eigensolver hit its iteration cap before reaching tolerance."""


class AssumptionViolatedError(MarkovJsccError):
    """A channel chain does not satisfy the structural assumption an
    operation requires (non-hidden / strongly non-hidden / singleton)."""


class DomainError(MarkovJsccError):
    """A tilting or order parameter lies outside its admissible range."""


class OutOfRangeError(MarkovJsccError):
    """An inversion target lies outside the image of the monotone map."""


class RateOutOfRangeError(MarkovJsccError):
    """The requested rate violates the admissibility interval of a bound."""


class DegenerateDispersionError(MarkovJsccError):
    """Moderate-deviation formulas need strictly positive dispersion."""


class TooLargeError(MarkovJsccError):
    """A brute-force enumeration would exceed the oracle size cap."""


class SandwichViolationError(MarkovJsccError):
    """A two-sided correction-term inequality failed against enumeration."""

    def __init__(self, message, *, prop, theta, theta_prime, n, margin):
        super().__init__(message)
        self.prop = prop
        self.theta = theta
        self.theta_prime = theta_prime
        self.n = n
        self.margin = margin


class ConfigError(MarkovJsccError):
    """A run configuration document failed validation."""
