"""Shared error types.

Every failure mode a caller can react to programmatically gets its own
class.  All inherit from QDualError, so ``except QDualError`` catches any
domain or convergence problem while programming errors still surface.
"""


class QDualError(Exception):
    """Base class for all library-specific failures."""


class InvalidParams(QDualError):
    """A documented precondition on arguments is violated (bad base q,
    negative degree, missing termination parameter, malformed input)."""


class DomainViolation(InvalidParams):
    """Family parameters fall outside the validity region recorded in the
    registry.  The message names the violated constraint.  Subclasses
    InvalidParams: a domain violation is a precondition failure, but keeps
    its own type so callers can surface the constraint text."""


class InvalidBranch(QDualError):
    """Lattice or connection branch label not defined for the requested
    kind."""


class UnsupportedFamily(QDualError):
    """Operation not defined for this family (e.g. a q-difference residual
    requested for a family that has none registered)."""


class UnknownPoint(QDualError):
    """special_value called at a point with no tabulated closed form."""


class UnknownIdentity(QDualError):
    """Identity tag not present in the registry."""


class TermCapExceeded(QDualError):
    """A series or product failed to certify convergence within the
    configured max_terms."""


class DivergentSeries(QDualError):
    """Adaptive summation detected persistently non-decreasing terms; the
    series diverges at the given argument."""


class PoleInDenominator(QDualError):
    """A denominator q-shifted factorial vanishes before the series
    terminates (parameter of the form q^-j)."""


class TailNotBounded(QDualError):
    """No geometric tail bound small enough for the requested tolerance
    could be certified for a lattice sum."""


class InputNotOrthogonal(QDualError):
    """A finite duality check was given data that fails its primal
    orthogonality premise."""


class NegativeRadicand(QDualError):
    """A Jacobi-matrix coefficient needs the square root of a negative
    product; the parameters leave the positive-definite regime."""


class NoConvergence(QDualError):
    """The tridiagonal eigensolver gave up; the message reports the
    failing index reported by the backend."""
