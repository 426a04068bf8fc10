"""Exception and warning types shared across the package."""


class NonlocalError(Exception):
    """Base class for all package errors."""


# torus_field
class NegativeOrderNonzeroMean(NonlocalError, ValueError):
    pass


class ExactModeTooLarge(NonlocalError, ValueError):
    pass


# kernels
class BadEllipticity(NonlocalError, ValueError):
    pass


class DegenerateJacobian(NonlocalError, ValueError):
    pass


class EmptyCone(NonlocalError, ValueError):
    pass


# symbolics
class QuadratureNotConverged(NonlocalError, RuntimeError):
    pass


# const_solver
class SingularSymbol(NonlocalError, ValueError):
    pass


class NonzeroMeanWarning(UserWarning):
    pass


# frozen_solver
class BallTooLarge(NonlocalError, ValueError):
    pass


class NoContraction(NonlocalError, RuntimeError):
    pass


class MaxIter(NonlocalError, RuntimeError):
    pass


class LadderStalled(NonlocalError, RuntimeError):
    pass


# plap_lab
class OffGridShift(NonlocalError, ValueError):
    pass


class DegenerateGradient(NonlocalError, ValueError):
    pass


# estimate_verifier
class NotSubsolution(NonlocalError, ValueError):
    pass


class BadTruncation(NonlocalError, ValueError):
    pass


# cli
class ConfigError(NonlocalError, ValueError):
    """Invalid run configuration; ``field`` and ``line`` locate the problem."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
