"""Exception types shared across the package.

Every failure mode that a caller can reasonably act on gets its own
class; anything else is a plain AssertionError (a bug).
"""


class SchurlabError(Exception):
    """Base class for all package-specific errors."""


class ConsistencyFailure(SchurlabError):
    """Interpolated data failed its reserve-point or integrality check."""


class NonInteger(SchurlabError):
    """A half-integer statistic came out non-integral (invalid input parity)."""


class ScaleExceeded(SchurlabError):
    """Requested computation is beyond the desk-scale guards."""


class SymmetryViolation(SchurlabError):
    """An isotropic flag pair produced a non-symmetric invariant matrix."""


class RepresentativeDependence(SchurlabError):
    """Two representatives of the same orbit disagreed on a count."""


class CompositionMismatch(SchurlabError):
    """Row/column compositions do not chain in a product or coproduct."""


class MonomialUnavailable(SchurlabError):
    """No monomial/generator-word expression is available for an element."""


class TriangularityFailure(SchurlabError):
    """A constructed monomial failed to expand unitriangularly."""


class NoSolution(SchurlabError):
    """The bar-invariance system has no solution (bar matrix inconsistent)."""


class NotInChevalleyImage(SchurlabError):
    """Affine coproduct requested for an element without a generator word."""


class NotStabilized(SchurlabError):
    """Transfer chain did not stabilize within the tested range."""
