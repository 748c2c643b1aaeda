"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class PreconditionViolation(ValueError):
    """An input does not satisfy the promise an algorithm relies on."""


class OverCapError(RuntimeError):
    """An enumeration would exceed the configured element cap."""

    def __init__(self, message, reached=None, cap=None):
        super().__init__(message)
        self.reached = reached
        self.cap = cap


class OverBudget(RuntimeError):
    """A tuple computation would exceed the configured budget."""


class IncoherentInput(ValueError):
    """A color matrix fails one of the coherence axioms."""


class DegreeMismatch(ValueError):
    pass


class BaseNotFound(RuntimeError):
    pass


class NoGeneratingPair(RuntimeError):
    pass


class NotPrime(ValueError):
    pass


class BadParameters(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class NotAlgebraicIsomorphism(ValueError):
    """A color bijection does not preserve intersection numbers."""


@dataclass(frozen=True)
class OverCap:
    """Returned (not raised) when an enumeration passes its cap.

    ``reached`` is the number of elements seen (or the exact order, when
    it is known) at the moment the cap was exceeded.
    """

    reached: int
    cap: int

    def __bool__(self):
        return False
