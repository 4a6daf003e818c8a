"""The Lie system on SL(2,R) behind every Riccati equation: its solution,
transport to the projective line, and gauge transformations by matrix
curves."""

from __future__ import annotations

import numpy as np

from .curves import FuncCurve, RiccatiCoeffs, ScalarCurve, as_curve
from .errors import DeterminantError
from .expr import BinOp, ExprCurve
from .liecore import ProjTrajectory, ProjValue, mobius_homogeneous, renormalize
from .numkit import IntegratorOptions, Trajectory, VectorField, integrate_ode

UNIT_DET_TOL = 1e-6


class SL2Curve:
    """Sampled curve of unit-determinant matrices, shape ``(m, 2, 2)``.

    When built from an integration, ``at`` evaluates between samples through
    the integrator's dense output, renormalised to determinant 1.
    """

    def __init__(self, times, matrices, derivatives=None, trajectory: Trajectory | None = None):
        self.times = np.asarray(times, dtype=float)
        self.matrices = np.asarray(matrices, dtype=float).reshape(-1, 2, 2)
        self.derivatives = None if derivatives is None else np.asarray(derivatives, dtype=float)
        self.trajectory = trajectory
        if self.matrices.shape[0] != self.times.shape[0]:
            raise ValueError("times and matrices must align")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        det = _det(self.matrices)
        if np.any(np.abs(det - 1.0) > 1e-9):
            raise DeterminantError(f"matrix curve leaves SL(2,R): max |det - 1| = {np.max(np.abs(det - 1)):.3e}")

    def __len__(self) -> int:
        return self.times.shape[0]

    def at(self, t) -> np.ndarray:
        scalar = np.ndim(t) == 0
        if self.trajectory is None:
            idx = np.clip(np.searchsorted(self.times, np.atleast_1d(t)), 0, len(self.times) - 1)
            out = self.matrices[idx]
        else:
            raw = np.atleast_2d(self.trajectory.at(t)).reshape(-1, 2, 2)
            out = raw / np.sqrt(_det(raw))[:, None, None]
        return out[0] if scalar else out


def _det(m: np.ndarray) -> np.ndarray:
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def coefficient_matrix(b: RiccatiCoeffs, t: float) -> np.ndarray:
    b0, b1, b2 = (float(c(t)) for c in b)
    return np.array([[0.5 * b1, b0], [-b2, -0.5 * b1]])


def solve_group_equation(b: RiccatiCoeffs, t0: float, t1: float,
                         opts: IntegratorOptions | None = None) -> SL2Curve:
    """Solve ``dg/dt = M(t) g``, ``g(t0) = I``, with ``M = b0 a0 + b1 a1 + b2 a2``.

    With this sign, ``x(t) = mobius(g(t), x0)`` solves
    ``dx/dt = b0 + b1 x + b2 x^2``.
    """

    def rhs(t, y):
        return (coefficient_matrix(b, t) @ y.reshape(2, 2)).reshape(4)

    def project(t, y):
        return renormalize(y.reshape(2, 2)).reshape(4)

    tr = integrate_ode(VectorField(4, rhs), np.eye(2).reshape(4), t0, t1, opts, project=project)
    return SL2Curve(tr.times, tr.states.reshape(-1, 2, 2), trajectory=tr)


def transport_solution(g: SL2Curve, x0) -> ProjTrajectory:
    """Pointwise ``mobius(g(t_i), x0)``."""
    start = g.matrices[0]
    if np.max(np.abs(start - np.eye(2))) > 1e-12:
        raise ValueError("group curve must start at the identity")
    h = np.array(ProjValue.parse(x0).homogeneous(), dtype=float)

    def hom_for(mats):
        return mobius_homogeneous(mats, np.tile(h, (mats.shape[0], 1)))

    sampler = None
    if g.trajectory is not None:
        def sampler(ts):
            return hom_for(g.at(np.asarray(ts)).reshape(-1, 2, 2))
    return ProjTrajectory(g.times, hom_for(g.matrices), sampler)


class MatrixCurve:
    """``t -> [[alpha, beta], [gamma, delta]]`` from four scalar curves."""

    def __init__(self, alpha, beta, gamma, delta):
        self.entries = tuple(as_curve(c) for c in (alpha, beta, gamma, delta))

    @classmethod
    def identity(cls) -> "MatrixCurve":
        return cls(1.0, 0.0, 0.0, 1.0)

    def at(self, t) -> np.ndarray:
        a, b, c, d = (np.asarray(e(t), dtype=float) for e in self.entries)
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)

    def derivative_at(self, t) -> np.ndarray:
        a, b, c, d = (np.asarray(e.derivative()(t), dtype=float) for e in self.entries)
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)

    def check_unit_det(self, grid, tol: float = UNIT_DET_TOL) -> float:
        dev = float(np.max(np.abs(_det(self.at(np.asarray(grid, dtype=float))) - 1.0)))
        if dev > tol:
            raise DeterminantError(f"matrix curve determinant deviates from 1 by {dev:.3e} (> {tol:g})")
        return dev

    def __matmul__(self, other: "MatrixCurve") -> "MatrixCurve":
        a1, b1, c1, d1 = self.entries
        a2, b2, c2, d2 = other.entries
        return MatrixCurve(_dot(a1, a2, b1, c2), _dot(a1, b2, b1, d2),
                           _dot(c1, a2, d1, c2), _dot(c1, b2, d1, d2))


def _dot(p: ScalarCurve, q: ScalarCurve, r: ScalarCurve, s: ScalarCurve) -> ScalarCurve:
    """Curve ``p*q + r*s`` with an exact derivative when all four are expressions."""
    parts = (p, q, r, s)
    if all(isinstance(c, ExprCurve) for c in parts):
        return ExprCurve(BinOp("+", BinOp("*", p.expr, q.expr), BinOp("*", r.expr, s.expr)))
    dp, dq, dr, ds = (c.derivative() for c in parts)
    return FuncCurve(
        lambda t: p(t) * q(t) + r(t) * s(t),
        FuncCurve(lambda t: dp(t) * q(t) + p(t) * dq(t) + dr(t) * s(t) + r(t) * ds(t)),
    )


def gauge_matrix(b: RiccatiCoeffs, A: MatrixCurve, t) -> np.ndarray:
    """``dA/dt A^-1 + A M A^-1`` at ``t`` (array of shape ``(..., 2, 2)``)."""
    Am = A.at(t)
    dA = A.derivative_at(t)
    det = _det(Am)
    inv = np.empty_like(Am)
    inv[..., 0, 0] = Am[..., 1, 1]
    inv[..., 0, 1] = -Am[..., 0, 1]
    inv[..., 1, 0] = -Am[..., 1, 0]
    inv[..., 1, 1] = Am[..., 0, 0]
    inv /= np.asarray(det)[..., None, None]
    b0, b1, b2 = (np.asarray(c(t), dtype=float) for c in b)
    M = np.stack([np.stack([0.5 * b1, b0], -1), np.stack([-b2, -0.5 * b1], -1)], -2)
    return dA @ inv + Am @ M @ inv


def gauge_transform(b: RiccatiCoeffs, A: MatrixCurve, grid=None) -> RiccatiCoeffs:
    """Coefficients of the Riccati equation solved by ``mobius(A(t), x(t))``.

    ``grid`` (if given) is where the unit-determinant condition is enforced.
    """
    if grid is not None:
        A.check_unit_det(grid)

    def entry(which):
        def f(t):
            m = gauge_matrix(b, A, t)
            if which == 0:
                v = m[..., 0, 1]
            elif which == 1:
                v = 2.0 * m[..., 0, 0]
            else:
                v = -m[..., 1, 0]
            return float(v) if np.ndim(v) == 0 else v
        return FuncCurve(f)

    return RiccatiCoeffs(entry(0), entry(1), entry(2))


def check_subalgebra(b: RiccatiCoeffs, which: str, grid, tol: float = 1e-9) -> bool:
    """Whether ``b`` stays in span{a0,a1} (``"a0a1"``) or span{a1,a2} (``"a1a2"``)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if which in ("a0a1", "01"):
        excluded = b.b2
    elif which in ("a1a2", "12"):
        excluded = b.b0
    else:
        raise ValueError(f"unknown subalgebra {which!r}; use 'a0a1' or 'a1a2'")
    vals = np.array([float(excluded(t)) for t in grid])
    return bool(np.all(np.abs(vals) <= tol))
