"""Exception types shared across the package."""
from __future__ import annotations


class DevronError(Exception):
    """Base class for every error raised by this package."""


class InvalidPoint(DevronError, ValueError):
    pass


class DegenerateIncidence(DevronError, ValueError):
    pass


class NotCollinear(DevronError, ValueError):
    pass


class DegenerateLattice(DevronError, ValueError):
    pass


class InvalidFactors(DevronError, ValueError):
    pass


class LiftUndefined(DevronError, ArithmeticError):
    pass


class NotCorrugated(DevronError, ValueError):
    pass


class NotJittery(DevronError, ValueError):
    pass


class Indeterminate(DevronError, ArithmeticError):
    pass


class DegenerateConfiguration(DevronError, ArithmeticError):
    pass


class ParabolicPencil(DevronError, ArithmeticError):
    pass


class Singular(DevronError, ArithmeticError):
    """A rational map was evaluated on its singular locus.

    ``positions`` names the offending coordinates (cosets, vertex or column
    indices) so a report can say where the denominator vanished.
    """

    def __init__(self, message: str = "singular", positions=()):
        super().__init__(message)
        self.positions = tuple(positions)


class ZeroInversion(Singular):
    pass


class SingularBeforeV(DevronError):
    def __init__(self, step: int, cause: Singular):
        super().__init__(f"singular at step {step} before reaching V: {cause}")
        self.step = step
        self.cause = cause


class NotReached(DevronError):
    def __init__(self, max_steps: int):
        super().__init__(f"V not reached within {max_steps} steps")
        self.max_steps = max_steps
