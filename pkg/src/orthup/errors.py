"""Exception types shared across the package.

Every failure mode callers are expected to handle gets its own class so
suites can distinguish "bad input" from "computation did not converge".
"""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible domain (beta <= 0, ...)."""


class DomainError(ValueError):
    """A point lies on or outside the orthant; no limiting evaluation is attempted."""


class CapabilityError(RuntimeError):
    """The requested computation needs data the input does not carry
    (oracle backend without an exact form, lifted dimension over budget, ...)."""


class EvaluationError(RuntimeError):
    """An integrand produced a non-finite value; carries the offending node."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class ConvergenceError(RuntimeError):
    """Order-doubling (or another refinement check) did not stabilise."""

    def __init__(self, message: str, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class DegenerateFieldError(ValueError):
    """A ratio or optimal parameter is undefined because a norm vanishes."""


class OptimizationError(RuntimeError):
    """A 1-D search failed (no interior bracket / boundary optimum); carries diagnostics."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConditioningError(RuntimeError):
    """A Gram system is numerically rank-deficient (condition number over threshold)."""


class CatalogError(KeyError):
    """Unknown catalogue entry name or inconsistent catalogue parameters."""
