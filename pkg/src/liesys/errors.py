"""Exception hierarchy.

Every error carries a short ``kind`` tag; the CLI prints it as the message
prefix (``error[<kind>]: ...``) so each failure mode is greppable.
"""

from __future__ import annotations


class LieSysError(Exception):
    kind = "error"


class UsageError(LieSysError):
    kind = "usage"


class ConfigError(UsageError):
    kind = "config"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(LieSysError):
    kind = "syntax"

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += "; expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    kind = "unknown-identifier"

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class NumericalError(LieSysError):
    """Base for failures that come out of a computation (CLI exit code 2)."""

    kind = "numerical"


class DomainError(NumericalError):
    kind = "domain"

    def __init__(self, message: str, t: float | None = None):
        self.t = None if t is None else float(t)
        if t is not None:
            message = f"{message} (t={self.t!r})"
        super().__init__(message)


class NonFiniteError(DomainError):
    kind = "non-finite"


class BlowUpError(NumericalError):
    kind = "blow-up"

    def __init__(self, t_last: float, bound: float):
        self.t_last = t_last = float(t_last)
        self.bound = bound
        super().__init__(f"solution exceeded {bound:g} in magnitude; last good t={t_last!r}")


class MaxStepsError(NumericalError):
    kind = "max-steps"

    def __init__(self, t_last: float, max_steps: int):
        self.t_last = t_last = float(t_last)
        super().__init__(f"max_steps={max_steps} exceeded at t={t_last!r}")


class StepSizeError(NumericalError):
    kind = "step-size"


class QuadratureError(NumericalError):
    kind = "quadrature"


class CoincidentSolutionsError(NumericalError):
    kind = "coincident-solutions"


class NotASolutionError(NumericalError):
    kind = "not-a-solution"

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        super().__init__(f"particular solution residual {residual:.3e} exceeds {tol:.1e}")


class DeterminantError(NumericalError):
    kind = "invalid-curve"


class ZeroCoefficientError(NumericalError):
    kind = "zero-coefficient"


class SignError(NumericalError):
    kind = "sign"


class DegenerateScaleError(NumericalError):
    kind = "degenerate-scale"


class ZeroCrossingError(NumericalError):
    kind = "zero-crossing"

    def __init__(self, t: float):
        self.t = t = float(t)
        super().__init__(f"solution passes within the guard radius of zero at t={t!r}")


class SingularityError(DomainError):
    kind = "singularity"


class DegenerateWronskianError(NumericalError):
    kind = "degenerate-wronskian"


class NegativeDiscriminantError(NumericalError):
    kind = "negative-discriminant"


class NegativeRadicandError(NumericalError):
    kind = "negative-radicand"


class GridMismatchError(NumericalError):
    kind = "grid-mismatch"
