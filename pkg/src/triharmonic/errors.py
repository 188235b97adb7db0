"""Exception types raised by the library."""


class TriharmonicError(Exception):
    """Base class for library errors."""


class SingularElement(TriharmonicError):
    """Element has no inverse.

    ``factor`` names what vanished: ``"plane"`` (coordinate sum is zero),
    ``"trisector"`` (x = y = z), ``"both"`` for the zero element, or
    ``"determinant"`` when detected through the representation matrix.
    """

    def __init__(self, message: str, factor: str = "determinant"):
        super().__init__(message)
        self.factor = factor


class DegenerateDivisor(TriharmonicError):
    """Divisor is zero or lies outside the nodal plane."""


class NotInPlane(TriharmonicError):
    """Element expected in the nodal plane x + y + z = 0."""


class NoSolutionFound(TriharmonicError):
    """No restart of a multistart solve produced a certified root."""

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class SingularDenominator(TriharmonicError):
    """Rational function evaluated where its denominator is singular."""


class EmptyGrid(TriharmonicError):
    """Grid spec with zero resolution along some axis."""
