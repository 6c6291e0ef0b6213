"""Exception hierarchy for the pic2ha engine."""
from typing import Any, Optional


class Pic2haError(Exception):
    pass


class IllFormed(Pic2haError):
    """A homomorphism, 1-morphism or 2-morphism fails its defining identity."""


class BoundaryMismatch(Pic2haError):
    pass


class NoSolution(Pic2haError):
    pass


class Incompatible(Pic2haError):
    pass


class NotEssentiallySurjective(Pic2haError):
    pass


class NotAnExtension(Pic2haError):
    pass


class UnsupportedFunctorKind(Pic2haError):
    pass


class IndexOutOfRange(Pic2haError):
    pass


class InvalidMorphism(Pic2haError):
    pass


class ParseError(Pic2haError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CertificateFailure(Pic2haError):
    """A certificate check failed; carries the violated invariant and its index."""

    def __init__(self, invariant: str, index: Any = None, residual: Any = None):
        self.invariant = invariant
        self.index = index
        self.residual = residual
        msg = invariant if index is None else f"{invariant} at index {index}"
        if residual is not None:
            msg = f"{msg} (residual {residual})"
        super().__init__(msg)