"""Exception hierarchy shared by the library modules and the CLI."""

from typing import Any, Optional


class PilotError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(PilotError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class AliasingError(DomainError):
    """Pilot overhead below α_min: the decimated channel would be aliased."""


class ShapeError(DomainError):
    """Invalid spectral shape or tabulated spectrum file."""


class DivergenceError(PilotError, ArithmeticError):
    """An integral that must be finite turned out not to be."""


class OutOfRegimeError(PilotError, ArithmeticError):
    """An expansion was evaluated where its formula has no meaning."""


class ConvergenceError(PilotError, ArithmeticError):
    """Optimizer hit its iteration cap.

    `best` holds the best iterate found so far (an OverheadSolution or a bare
    float, depending on the caller).
    """

    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message)
        self.best = best
