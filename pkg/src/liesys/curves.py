"""Scalar coefficient curves t -> R and the Riccati coefficient triple."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, runtime_checkable

import numpy as np

from .errors import DomainError
from .expr import Expression, ExprCurve


@runtime_checkable
class ScalarCurve(Protocol):
    """Anything evaluable at ``t`` (scalar or array) with a ``derivative()``."""

    def __call__(self, t): ...

    def derivative(self) -> "ScalarCurve": ...


class ConstCurve:
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.value
        return np.full(np.shape(t), self.value)

    def derivative(self) -> "ConstCurve":
        return ConstCurve(0.0)

    def __repr__(self) -> str:
        return f"ConstCurve({self.value!r})"


class FuncCurve:
    """Wrap a Python callable.  Without ``deriv`` the derivative is a
    central difference with step ``h``."""

    def __init__(self, func: Callable, deriv: Callable | "ScalarCurve" | None = None, h: float = 1e-5):
        self.func = func
        self.deriv = deriv
        self.h = h

    def __call__(self, t):
        if np.ndim(t) == 0:
            return float(self.func(float(t)))
        return np.array([float(self.func(float(s))) for s in np.ravel(t)]).reshape(np.shape(t))

    def derivative(self) -> "ScalarCurve":
        if self.deriv is not None:
            return as_curve(self.deriv)
        h = self.h
        return FuncCurve(lambda t: (self.func(t + h) - self.func(t - h)) / (2.0 * h), h=h)


class SampledCurve:
    """Piecewise cubic Hermite curve through ``(times, values)`` with nodal
    ``slopes``; linear when no slopes are given.  No extrapolation."""

    def __init__(self, times, values, slopes=None):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.slopes = None if slopes is None else np.asarray(slopes, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        span = max(1.0, abs(lo), abs(hi)) * 1e-12
        if np.any(t < lo - span) or np.any(t > hi + span):
            bad = float(np.ravel(t)[np.argmax(np.ravel((t < lo - span) | (t > hi + span)))])
            raise DomainError("sampled curve evaluated outside its grid", bad)
        i = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2)
        return t, i

    def __call__(self, t):
        if len(self.times) == 1:
            return self.values[0] if np.ndim(t) == 0 else np.full(np.shape(t), self.values[0])
        t, i = self._locate(t)
        t0, t1 = self.times[i], self.times[i + 1]
        h = t1 - t0
        s = (t - t0) / h
        y0, y1 = self.values[i], self.values[i + 1]
        if self.slopes is None:
            out = y0 + s * (y1 - y0)
        else:
            m0, m1 = self.slopes[i] * h, self.slopes[i + 1] * h
            s2, s3 = s * s, s * s * s
            out = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1
        return float(out) if out.ndim == 0 else out

    def derivative(self) -> "ScalarCurve":
        def d(t):
            t, i = self._locate(t)
            t0, t1 = self.times[i], self.times[i + 1]
            h = t1 - t0
            s = (t - t0) / h
            y0, y1 = self.values[i], self.values[i + 1]
            if self.slopes is None:
                out = (y1 - y0) / h
            else:
                m0, m1 = self.slopes[i] * h, self.slopes[i + 1] * h
                out = ((6 * s * s - 6 * s) * (y0 - y1) + (3 * s * s - 4 * s + 1) * m0 + (3 * s * s - 2 * s) * m1) / h
            return float(out) if np.ndim(out) == 0 else out
        return FuncCurve(d)


def as_curve(obj) -> ScalarCurve:
    """Coerce a number, expression text, Expression or callable to a curve."""
    if isinstance(obj, (int, float, np.floating, np.integer)):
        return ConstCurve(float(obj))
    if isinstance(obj, str):
        return ExprCurve(obj)
    if isinstance(obj, Expression):
        return ExprCurve(obj)
    if hasattr(obj, "derivative") and callable(obj):
        return obj
    if callable(obj):
        return FuncCurve(obj)
    raise TypeError(f"cannot interpret {obj!r} as a scalar curve")


@dataclass(frozen=True)
class RiccatiCoeffs:
    """Coefficients of dx/dt = b0(t) + b1(t) x + b2(t) x^2."""

    b0: ScalarCurve
    b1: ScalarCurve
    b2: ScalarCurve

    def __post_init__(self):
        for name in ("b0", "b1", "b2"):
            object.__setattr__(self, name, as_curve(getattr(self, name)))

    @classmethod
    def of(cls, b0, b1, b2) -> "RiccatiCoeffs":
        return cls(b0, b1, b2)

    def __iter__(self):
        return iter((self.b0, self.b1, self.b2))

    def at(self, t):
        return self.b0(t), self.b1(t), self.b2(t)
