from typing import Iterable, Optional


class SloccError(Exception):
    """Base class for all classifier errors."""

    exit_code = 2


class ParseError(SloccError):
    """Malformed literal, ket string or input file."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class IndexOutOfRange(SloccError):
    """Ket index outside the declared shape."""


class InvalidState(SloccError):
    """State with no nonzero amplitude."""


class Singular(SloccError):
    """Matrix expected to be invertible is singular."""


class IrreducibleFactor(SloccError):
    """Pencil eigenvalues leave the field of Gaussian rationals."""

    exit_code = 5


class DimensionMismatch(SloccError):
    """Operand dimensions do not fit together."""


class NoQubitAxis(SloccError):
    """Requested qubit axis does not have dimension 2."""


class ZeroPencil(SloccError):
    """Both matrices of the pair vanish."""


class DegenerateLambda(SloccError):
    """Cross-ratio value 0 or 1 has no six-element residual orbit."""


class ShapeMismatch(SloccError):
    """States compared under different shapes or arrangements."""


class MissingOmega(SloccError):
    """Census table lacks entries required by a count."""

    def __init__(self, entries: Iterable[tuple[int, int]]):
        self.entries = sorted(entries)
        listed = ", ".join(f"Omega[{L},{i}]" for L, i in self.entries)
        super().__init__(f"Missing census entries: {listed}")


class WitnessVerificationError(SloccError):
    """A constructed witness failed exact re-verification."""

    exit_code = 4
