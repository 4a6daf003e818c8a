"""Concrete sl(2,R) / SL(2,R): basis, exponential, projective action and a
finite-difference check that vector fields close on a Lie algebra.

Matrices are plain ``(2, 2)`` float arrays ``[[alpha, beta], [gamma, delta]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import accel
from .numkit import VectorField

DET_TOL = 1e-9


@dataclass(frozen=True)
class Sl2Element:
    """``b0*a0 + b1*a1 + b2*a2``; matrix ``[[b1/2, b0], [-b2, -b1/2]]``."""

    b0: float
    b1: float
    b2: float

    def matrix(self) -> np.ndarray:
        return np.array([[0.5 * self.b1, self.b0], [-self.b2, -0.5 * self.b1]])

    @classmethod
    def from_matrix(cls, m) -> "Sl2Element":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 1]), float(m[0, 0] - m[1, 1]), float(-m[1, 0]))

    @property
    def mu2(self) -> float:
        """Eigenvalue square: ``M @ M == mu2 * I``."""
        return 0.25 * self.b1 * self.b1 - self.b0 * self.b2


@dataclass(frozen=True)
class ProjValue:
    """A point of the projective line: a finite real or the point at infinity."""

    x: float = 0.0
    is_inf: bool = False

    def __post_init__(self):
        if not self.is_inf and not math.isfinite(self.x):
            raise ValueError("finite ProjValue needs a finite x; use ProjValue.inf()")

    @classmethod
    def finite(cls, x: float) -> "ProjValue":
        return cls(float(x), False)

    @classmethod
    def inf(cls) -> "ProjValue":
        return cls(0.0, True)

    @classmethod
    def parse(cls, value) -> "ProjValue":
        if isinstance(value, ProjValue):
            return value
        if isinstance(value, str) and value.strip().lower() in {"inf", "+inf", "-inf", "infinity"}:
            return cls.inf()
        v = float(value)
        return cls.inf() if math.isinf(v) else cls.finite(v)

    @classmethod
    def from_homogeneous(cls, p: float, q: float) -> "ProjValue":
        if p == 0.0 and q == 0.0:
            raise ValueError("(0, 0) is not a projective point")
        if q == 0.0:
            return cls.inf()
        x = p / q
        return cls.inf() if math.isinf(x) else cls.finite(x)

    def homogeneous(self) -> tuple[float, float]:
        return (1.0, 0.0) if self.is_inf else (self.x, 1.0)

    def __float__(self) -> float:
        return math.inf if self.is_inf else self.x

    def __str__(self) -> str:
        return "inf" if self.is_inf else repr(self.x)


def chordal_distance(a, b) -> float:
    """Distance on the projective line seen as a circle (0 <= d <= 1)."""
    pa, qa = a.homogeneous() if isinstance(a, ProjValue) else ProjValue.parse(a).homogeneous()
    pb, qb = b.homogeneous() if isinstance(b, ProjValue) else ProjValue.parse(b).homogeneous()
    return abs(pa * qb - pb * qa) / (math.hypot(pa, qa) * math.hypot(pb, qb))


def basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``a0, a1, a2`` whose Mobius fundamental fields are d/dx, x d/dx, x^2 d/dx."""
    a0 = np.array([[0.0, 1.0], [0.0, 0.0]])
    a1 = np.array([[0.5, 0.0], [0.0, -0.5]])
    a2 = np.array([[0.0, 0.0], [-1.0, 0.0]])
    return a0, a1, a2


def check_sl2(m, tol: float = DET_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det - 1.0) > tol:
        raise ValueError(f"determinant {det!r} is not 1 within {tol:g}")
    return m


def renormalize(m) -> np.ndarray:
    """Scale a positive-determinant matrix to determinant 1."""
    m = np.asarray(m, dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det <= 0:
        raise ValueError(f"cannot renormalize matrix with determinant {det!r}")
    return m / math.sqrt(det)


def expm_sl2(m: Sl2Element, s: float) -> np.ndarray:
    """Closed-form ``exp(s * M)`` for traceless ``M`` (determinant renormalised)."""
    out = accel.expm_sl2_batch(
        np.array([m.b0], dtype=float), np.array([m.b1], dtype=float),
        np.array([m.b2], dtype=float), np.array([s], dtype=float),
    )
    return out[0]


def mobius(A, p: ProjValue) -> ProjValue:
    """Fractional linear action ``x -> (alpha x + beta) / (gamma x + delta)``."""
    a, b, c, d = float(A[0][0]), float(A[0][1]), float(A[1][0]), float(A[1][1])
    if p.is_inf:
        return ProjValue.inf() if c == 0.0 else ProjValue.finite(a / c + 0.0)
    den = c * p.x + d
    if den == 0.0:
        return ProjValue.inf()
    x = (a * p.x + b) / den
    return ProjValue.inf() if math.isinf(x) else ProjValue.finite(x)


def mobius_homogeneous(mats, hom) -> np.ndarray:
    """Batch action on normalised homogeneous coordinates ``hom[:, (p, q)]``."""
    mats = np.ascontiguousarray(mats, dtype=float)
    hom = np.asarray(hom, dtype=float)
    p, q = accel.mobius_batch(mats, np.ascontiguousarray(hom[:, 0]), np.ascontiguousarray(hom[:, 1]))
    return np.column_stack([p, q])


def commutator_fd(X: VectorField, Y: VectorField, t: float, x, h: float = 1e-5) -> np.ndarray:
    """``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`` with central-difference Jacobians."""
    if X.dim != Y.dim:
        raise ValueError("fields must share a dimension")
    x = np.asarray(x, dtype=float)
    n = X.dim
    JX = np.empty((n, n))
    JY = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        JX[:, j] = (X(t, x + e) - X(t, x - e)) / (2 * h)
        JY[:, j] = (Y(t, x + e) - Y(t, x - e)) / (2 * h)
    return JY @ X(t, x) - JX @ Y(t, x)


def verify_structure_constants(
    fields: Sequence[VectorField],
    c,
    points: Sequence[tuple[float, Sequence[float]]],
    h: float = 1e-5,
) -> float:
    """Max over points and pairs of ``|[X_a, X_b] - sum_g c[a][b][g] X_g|_inf``."""
    c = np.asarray(c, dtype=float)
    r = len(fields)
    if c.shape != (r, r, r):
        raise ValueError(f"structure-constant table must have shape {(r, r, r)}")
    if not points:
        raise ValueError("need at least one sample point")
    if len({f.dim for f in fields}) != 1:
        raise ValueError("fields must share a dimension")
    worst = 0.0
    for t, x in points:
        vals = [f(t, x) for f in fields]
        for a in range(r):
            for b in range(a + 1, r):
                lhs = commutator_fd(fields[a], fields[b], t, x, h)
                rhs = sum(c[a, b, g] * vals[g] for g in range(r))
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def sl2_table(pattern: str) -> np.ndarray:
    """Structure constants for the two sl(2,R) presentations used here.

    ``"riccati"``: [X0,X1] = X0, [X0,X2] = 2 X1, [X1,X2] = X2.
    ``"sode"``:    [L1,L2] = 2 L3, [L1,L3] = -L1, [L2,L3] = L2.
    """
    c = np.zeros((3, 3, 3))
    if pattern == "riccati":
        rules = {(0, 1): {0: 1.0}, (0, 2): {1: 2.0}, (1, 2): {2: 1.0}}
    elif pattern == "sode":
        rules = {(0, 1): {2: 2.0}, (0, 2): {0: -1.0}, (1, 2): {1: 1.0}}
    else:
        raise ValueError(f"unknown table {pattern!r}")
    for (a, b), terms in rules.items():
        for g, v in terms.items():
            c[a, b, g] = v
            c[b, a, g] = -v
    return c


def fundamental_field(m: Sl2Element) -> VectorField:
    """Vector field on the projective chart x generated by ``m``."""
    return VectorField(1, lambda t, x: np.array([m.b0 + m.b1 * x[0] + m.b2 * x[0] ** 2]))


class ProjTrajectory:
    """Time samples of projective points, stored as unit homogeneous pairs.

    ``sampler`` (optional) maps an array of times to homogeneous pairs so the
    path can be evaluated between samples.
    """

    def __init__(self, times, hom, sampler=None):
        self.times = np.asarray(times, dtype=float)
        hom = np.asarray(hom, dtype=float).reshape(-1, 2)
        norm = np.hypot(hom[:, 0], hom[:, 1])
        if np.any(norm == 0) or hom.shape[0] != self.times.shape[0]:
            raise ValueError("homogeneous coordinates must be non-zero and align with times")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        self.hom = hom / norm[:, None]
        self._sampler = sampler

    def __len__(self) -> int:
        return self.times.shape[0]

    @classmethod
    def from_values(cls, times, values) -> "ProjTrajectory":
        return cls(times, [ProjValue.parse(v).homogeneous() for v in values])

    @property
    def x(self) -> np.ndarray:
        """Affine values with ``inf`` at the point at infinity."""
        p, q = self.hom[:, 0], self.hom[:, 1]
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(q == 0.0, np.inf, p / np.where(q == 0.0, 1.0, q))
        out[~np.isfinite(out)] = np.inf
        return out

    @property
    def values(self) -> list[ProjValue]:
        return [ProjValue.from_homogeneous(p, q) for p, q in self.hom]

    def hom_at(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self._sampler is None:
            idx = np.clip(np.searchsorted(self.times, ts), 0, len(self.times) - 1)
            if not np.allclose(self.times[idx], ts, rtol=0, atol=1e-12):
                from .errors import GridMismatchError
                raise GridMismatchError("projective path has no dense output and t is not a sample time")
            return self.hom[idx]
        out = np.asarray(self._sampler(ts), dtype=float).reshape(-1, 2)
        return out / np.hypot(out[:, 0], out[:, 1])[:, None]

    def at(self, t: float) -> ProjValue:
        p, q = self.hom_at(t)[0]
        return ProjValue.from_homogeneous(p, q)

    def x_at(self, ts) -> np.ndarray:
        return ProjTrajectory(np.arange(np.size(ts), dtype=float), self.hom_at(ts)).x

    def resample(self, grid) -> "ProjTrajectory":
        return ProjTrajectory(grid, self.hom_at(grid), self._sampler)
