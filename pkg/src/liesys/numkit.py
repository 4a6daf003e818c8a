"""Non-autonomous ODE integration, adaptive quadrature and finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import accel
from .curves import SampledCurve, ScalarCurve, as_curve
from .errors import (
    BlowUpError,
    DomainError,
    GridMismatchError,
    MaxStepsError,
    QuadratureError,
    StepSizeError,
)


@dataclass(frozen=True)
class VectorField:
    """``rhs(t, x) -> dx/dt`` on R^dim."""

    dim: int
    rhs: Callable[[float, np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def __call__(self, t: float, x) -> np.ndarray:
        out = np.asarray(self.rhs(t, np.asarray(x, dtype=float)), dtype=float).reshape(-1)
        if out.shape[0] != self.dim:
            raise ValueError(f"field returned {out.shape[0]} components, expected {self.dim}")
        return out


@dataclass(frozen=True)
class IntegratorOptions:
    method: str = "rk45"
    step: float = 1e-2
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 200_000
    blowup: float = 1e12
    first_step: float | None = None

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown method {self.method!r}; use 'rk4' or 'rk45'")
        if self.step <= 0 or self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_steps <= 0:
            raise ValueError("step, tolerances and max_steps must be positive")


@dataclass(frozen=True)
class DenseOutput:
    """Per-step interpolants ``r0 + s(r1 + s'(r2 + s(r3 + s' r4)))``, ``s' = 1 - s``.

    With ``r4 = 0`` this is the cubic Hermite interpolant; the Dormand-Prince
    steps fill ``r4`` to get the 4th-order continuous extension.
    """

    starts: np.ndarray
    hs: np.ndarray
    coeffs: np.ndarray  # (steps, 5, n)

    def __call__(self, ts) -> np.ndarray:
        ts = np.ascontiguousarray(ts, dtype=float).reshape(-1)
        return accel.dense_eval(self.starts, self.hs, self.coeffs, ts)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dense: DenseOutput | None = field(default=None, repr=False, compare=False)
    stopped_by_event: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        if times.ndim != 1 or states.shape[0] != times.shape[0] or times.size == 0:
            raise ValueError("times and states must align and be non-empty")
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(states))):
            raise ValueError("trajectory contains non-finite entries")

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.times.shape[0]

    def at(self, t) -> np.ndarray:
        """State at ``t`` (shape ``(n,)``) or at each of an array (``(m, n)``)."""
        scalar = np.ndim(t) == 0
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        slack = 1e-12 * max(1.0, abs(self.t0), abs(self.t1))
        if np.any(ts < self.t0 - slack) or np.any(ts > self.t1 + slack):
            raise DomainError("trajectory sampled outside its interval", float(ts[0]))
        if self.dense is not None:
            out = self.dense(ts)
        else:
            idx = np.searchsorted(self.times, ts)
            idx = np.clip(idx, 0, len(self.times) - 1)
            if not np.allclose(self.times[idx], ts, rtol=0, atol=slack):
                raise GridMismatchError("trajectory has no dense output and t is not a sample time")
            out = self.states[idx]
        return out[0] if scalar else out

    def resample(self, grid) -> "Trajectory":
        grid = np.asarray(grid, dtype=float)
        return Trajectory(grid, self.at(grid), self.dense)

    def component(self, i: int) -> ScalarCurve:
        """Component ``i`` as a scalar curve (dense when available)."""
        if self.dense is not None:
            return _DenseComponent(self, i)
        return SampledCurve(self.times, self.states[:, i])


class _DenseComponent:
    def __init__(self, traj: Trajectory, i: int):
        self.traj = traj
        self.i = i

    def __call__(self, t):
        out = self.traj.at(t)
        return float(out[self.i]) if np.ndim(t) == 0 else out[:, self.i]

    def derivative(self):
        from .curves import FuncCurve
        return FuncCurve(self, h=1e-6)


# ----------------------------------------------------------------- integrator

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799, -10690763975 / 1880347072,
    701980252875 / 199316789632, -1453857185 / 822651844, 69997945 / 29380423,
])


def _dopri_step(f, t, y, h, k1):
    k = np.empty((7, y.shape[0]))
    k[0] = k1
    for s in range(1, 7):
        k[s] = f(t + _C[s] * h, y + h * (np.asarray(_A[s]) @ k[:s]))
    y_new = y + h * (_B @ k)
    err = h * (_E @ k)
    ydiff = y_new - y
    bspl = h * k[0] - ydiff
    coeffs = np.stack([y, ydiff, bspl, ydiff - h * k[6] - bspl, h * (_D @ k)])
    return y_new, err, k[6], coeffs


def _hermite_coeffs(y, y_new, h, f0, f1):
    ydiff = y_new - y
    bspl = h * f0 - ydiff
    return np.stack([y, ydiff, bspl, ydiff - h * f1 - bspl, np.zeros_like(y)])


def _initial_step(f, t0, y0, f0, t1, opts):
    sc = opts.abs_tol + opts.rel_tol * np.abs(y0)
    d0 = np.max(np.abs(y0) / sc)
    d1 = np.max(np.abs(f0) / sc)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t1 - t0)
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / sc) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t1 - t0)


def integrate_ode(
    fld: VectorField,
    x0,
    t0: float,
    t1: float,
    opts: IntegratorOptions | None = None,
    *,
    project: Callable[[float, np.ndarray], np.ndarray] | None = None,
    event: Callable[[float, np.ndarray], float] | None = None,
) -> Trajectory:
    """Integrate ``dx/dt = fld(t, x)`` from ``t0`` to ``t1``.

    ``project`` is applied to every accepted state (e.g. to restore a
    constraint).  ``event`` stops integration at the first time it crosses
    from non-positive to positive; the crossing is located on the dense
    interpolant and becomes the last sample.
    """
    opts = opts or IntegratorOptions()
    if not t1 > t0:
        raise ValueError("integration requires t1 > t0")
    y = np.asarray(x0, dtype=float).reshape(-1).copy()
    if y.shape[0] != fld.dim:
        raise ValueError(f"initial state has {y.shape[0]} components, field expects {fld.dim}")
    if not np.all(np.isfinite(y)):
        raise ValueError("initial state must be finite")
    f = fld
    t = float(t0)
    times = [t]
    states = [y.copy()]
    starts: list[float] = []
    hs: list[float] = []
    coeffs: list[np.ndarray] = []
    g_prev = event(t, y) if event is not None else None
    k1 = f(t, y)
    adaptive = opts.method == "rk45"
    if adaptive:
        h = opts.first_step or _initial_step(f, t, y, k1, t1, opts)
    else:
        h = opts.step
    steps = 0
    stopped = False
    while t < t1:
        if steps >= opts.max_steps:
            raise MaxStepsError(t, opts.max_steps)
        steps += 1
        h = min(h, t1 - t)
        last = t + h >= t1 or (t1 - (t + h)) <= 1e-13 * max(1.0, abs(t1))
        if last:
            h = t1 - t
        if adaptive:
            with np.errstate(over="ignore", invalid="ignore"):
                y_new, err, k7, cf = _dopri_step(f, t, y, h, k1)
            sc = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = float(np.max(np.abs(err) / sc)) if np.all(np.isfinite(y_new)) else math.inf
            if not err_norm <= 1.0:
                fac = 0.2 if not math.isfinite(err_norm) else max(0.2, 0.9 * err_norm ** -0.2)
                h *= fac
                if h < 1e-14 * max(1.0, abs(t)):
                    raise StepSizeError(f"step size underflow at t={float(t)!r}")
                continue
            fac = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        else:
            c2 = f(t + h / 2, y + h / 2 * k1)
            c3 = f(t + h / 2, y + h / 2 * c2)
            c4 = f(t + h, y + h * c3)
            y_new = y + h / 6 * (k1 + 2 * c2 + 2 * c3 + c4)
            k7 = None
            fac = 1.0
        t_new = t1 if last else t + h
        if not np.all(np.isfinite(y_new)) or np.max(np.abs(y_new)) > opts.blowup:
            raise BlowUpError(t, opts.blowup)
        if k7 is None:
            k7 = f(t_new, y_new)
            cf = _hermite_coeffs(y, y_new, h, k1, k7)
        starts.append(t)
        hs.append(h)
        coeffs.append(cf)
        if project is not None:
            y_new = np.asarray(project(t_new, y_new), dtype=float)
            k7 = f(t_new, y_new)
        if event is not None:
            g_new = event(t_new, y_new)
            if g_prev <= 0.0 < g_new:
                dense = DenseOutput(np.array(starts), np.array(hs), np.array(coeffs))
                t_hit = brentq(lambda s: event(s, dense(s)[0]), t, t_new, xtol=1e-14, rtol=1e-15)
                if t_hit > t:
                    y_hit = dense(t_hit)[0]
                    if project is not None:
                        y_hit = np.asarray(project(t_hit, y_hit), dtype=float)
                    times.append(t_hit)
                    states.append(y_hit)
                stopped = True
                break
            g_prev = g_new
        t, y, k1 = t_new, y_new, k7
        times.append(t)
        states.append(y.copy())
        h *= fac
    dense = DenseOutput(np.array(starts), np.array(hs), np.array(coeffs)) if starts else None
    return Trajectory(np.array(times), np.array(states), dense, stopped)


# ------------------------------------------------------------------ quadrature

_MAX_DEPTH = 50
_MAX_EVALS = 200_000


def _simpson_recursive(f, a, fa, m, fm, b, fb, whole, tol, depth, budget):
    budget[0] -= 2
    if budget[0] < 0:
        raise QuadratureError(f"adaptive Simpson exceeded {_MAX_EVALS} evaluations near [{a!r}, {b!r}]")
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(f"adaptive Simpson did not converge on [{a!r}, {b!r}]")
    return (_simpson_recursive(f, a, fa, lm, flm, m, fm, left, tol / 2, depth - 1, budget)
            + _simpson_recursive(f, m, fm, rm, frm, b, fb, right, tol / 2, depth - 1, budget))


def quadrature(fcurve, a: float, b: float, tol: float = 1e-10) -> float:
    """Adaptive Simpson estimate of the integral of ``fcurve`` over [a, b]."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    if a > b:
        return -quadrature(fcurve, b, a, tol)
    f = fcurve
    fa, fb = float(f(a)), float(f(b))
    m = 0.5 * (a + b)
    fm = float(f(m))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_recursive(f, a, fa, m, fm, b, fb, whole, tol, _MAX_DEPTH, [_MAX_EVALS])


class CumulativeCurve:
    """``F(t) = integral of f from t0 to t``, tabulated on a grid.

    Off-grid values reuse the nearest node below and integrate only the
    remaining piece, so ``F`` stays exact to the quadrature tolerance.
    """

    def __init__(self, fcurve, t0: float, grid, values, tol: float):
        self.f = fcurve
        self.t0 = float(t0)
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.tol = tol

    def __call__(self, t):
        if np.ndim(t) != 0:
            return np.array([self(float(s)) for s in np.ravel(t)]).reshape(np.shape(t))
        t = float(t)
        i = int(np.searchsorted(self.grid, t, side="right")) - 1
        if i < 0:
            return quadrature(self.f, self.t0, t, self.tol)
        return float(self.values[i]) + quadrature(self.f, float(self.grid[i]), t, self.tol)

    def derivative(self):
        return self.f


def cumulative_quadrature(fcurve, t0: float, grid, tol: float = 1e-10) -> CumulativeCurve:
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if grid[0] < t0:
        raise ValueError("grid must start at or after t0")
    f = as_curve(fcurve)
    seg_tol = tol / max(1, grid.size)
    values = np.empty(grid.size)
    acc = quadrature(f, t0, float(grid[0]), seg_tol)
    values[0] = acc
    for i in range(1, grid.size):
        acc += quadrature(f, float(grid[i - 1]), float(grid[i]), seg_tol)
        values[i] = acc
    return CumulativeCurve(f, t0, grid, values, seg_tol)


def fd_derivative(fcurve, t: float, h: float = 1e-5) -> float:
    if h <= 0:
        raise ValueError("h must be positive")
    return (float(fcurve(t + h)) - float(fcurve(t - h))) / (2.0 * h)
