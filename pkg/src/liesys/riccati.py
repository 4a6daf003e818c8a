"""Riccati equations dx/dt = b0(t) + b1(t) x + b2(t) x^2.

Direct projective integration, the cross-ratio superposition rule,
reduction by a particular solution, coefficient transformations, solution by
quadratures and the scaling-integrability criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import accel
from .curves import ConstCurve, FuncCurve, RiccatiCoeffs, ScalarCurve, as_curve
from .errors import (
    CoincidentSolutionsError,
    DegenerateScaleError,
    DeterminantError,
    NotASolutionError,
    SignError,
    StepSizeError,
    ZeroCoefficientError,
)
from .groupflow import UNIT_DET_TOL, MatrixCurve
from .liecore import ProjTrajectory, ProjValue, Sl2Element, expm_sl2, mobius, mobius_homogeneous
from .numkit import (
    IntegratorOptions,
    Trajectory,
    VectorField,
    cumulative_quadrature,
    integrate_ode,
    quadrature,
)

__all__ = [
    "RiccatiCoeffs", "SolvableSpec", "CriterionReport", "riccati_field", "riccati_fields",
    "solve_direct", "cross_ratio_superposition", "superpose_paths", "cross_ratio",
    "reduce_by_particular", "transform_coefficients", "solve_linear_inhomogeneous",
    "solve_solvable", "solve_solvable_path", "check_scaling_integrability", "scale_solution",
]

PARTICULAR_RESIDUAL_TOL = 1e-5
DEFAULT_GRID_POINTS = 201


def riccati_field(b: RiccatiCoeffs) -> VectorField:
    b0, b1, b2 = b
    return VectorField(1, lambda t, x: np.array([b0(t) + b1(t) * x[0] + b2(t) * x[0] ** 2]))


def riccati_fields() -> list[VectorField]:
    """The generators d/dx, x d/dx, x^2 d/dx."""
    return [
        VectorField(1, lambda t, x: np.ones(1)),
        VectorField(1, lambda t, x: np.array([x[0]])),
        VectorField(1, lambda t, x: np.array([x[0] ** 2])),
    ]


# ------------------------------------------------------------ direct solving

def solve_direct(b: RiccatiCoeffs, x0, t0: float, t1: float,
                 opts: IntegratorOptions | None = None) -> ProjTrajectory:
    """Integrate on the projective line using the charts x and w = 1/x.

    The x chart is used while |x| <= 1 and the w chart (dw/dt = -b2 - b1 w -
    b0 w^2) while |x| > 1; the chart changes where |x| crosses 1, so poles of
    x are passed as ordinary zeros of w.
    """
    b0, b1, b2 = b
    fx = riccati_field(b)
    fw = VectorField(1, lambda t, w: np.array([-(b2(t) + b1(t) * w[0] + b0(t) * w[0] ** 2)]))
    p = ProjValue.parse(x0)
    if not p.is_inf and abs(p.x) <= 1.0:
        chart, y = "x", p.x
    else:
        chart, y = "w", 0.0 if p.is_inf else 1.0 / p.x

    def leaves_chart(t, z):
        return abs(z[0]) - 1.0

    segments: list[tuple[str, Trajectory]] = []
    t = float(t0)
    stalls = 0
    while True:
        tr = integrate_ode(fx if chart == "x" else fw, [y], t, t1, opts, event=leaves_chart)
        if len(tr) > 1:
            segments.append((chart, tr))
            stalls = 0
        else:
            stalls += 1
            if stalls > 3:
                raise StepSizeError(f"chart switching made no progress at t={t!r}")
        if not tr.stopped_by_event:
            break
        t = tr.t1
        z = float(tr.states[-1, 0])
        chart, y = ("w" if chart == "x" else "x"), 1.0 / z

    times = []
    hom = []
    for i, (ch, tr) in enumerate(segments):
        skip = 1 if i > 0 else 0
        times.append(tr.times[skip:])
        hom.append(_chart_hom(ch, tr.states[skip:, 0]))
    starts = np.array([tr.t0 for _, tr in segments])

    def sampler(ts):
        ts = np.atleast_1d(ts)
        idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, len(segments) - 1)
        out = np.empty((ts.shape[0], 2))
        for k in np.unique(idx):
            ch, tr = segments[k]
            sel = idx == k
            out[sel] = _chart_hom(ch, tr.at(ts[sel])[:, 0])
        return out

    return ProjTrajectory(np.concatenate(times), np.concatenate(hom), sampler)


def _chart_hom(chart: str, vals: np.ndarray) -> np.ndarray:
    ones = np.ones_like(vals)
    return np.column_stack([vals, ones] if chart == "x" else [ones, vals])


# ------------------------------------------------------------- superposition

def _coincident(h1, h2) -> bool:
    return abs(h1[0] * h2[1] - h1[1] * h2[0]) <= 1e-14 * math.hypot(*h1) * math.hypot(*h2)


def cross_ratio_superposition(x1, x2, x3, k: float) -> ProjValue:
    """``(k x1 (x3 - x2) + x2 (x1 - x3)) / (k (x3 - x2) + (x1 - x3))`` on the
    projective line.

    Gives x3 at k = 1, x2 at k = 0 and x1 as k -> inf; ``k`` is the reciprocal
    of :func:`cross_ratio` of the result.
    """
    hs = [ProjValue.parse(v).homogeneous() for v in (x1, x2, x3)]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if _coincident(hs[i], hs[j]):
            raise CoincidentSolutionsError(f"solutions x{i + 1} and x{j + 1} coincide")
    (p1, q1), (p2, q2), (p3, q3) = hs
    d32 = p3 * q2 - p2 * q3
    d13 = p1 * q3 - p3 * q1
    return ProjValue.from_homogeneous(k * p1 * d32 + p2 * d13, k * q1 * d32 + q2 * d13)


def superpose_paths(x1: ProjTrajectory, x2: ProjTrajectory, x3: ProjTrajectory, k: float,
                    times=None) -> ProjTrajectory:
    """Apply the cross-ratio rule samplewise on a shared time grid."""
    times = x1.times if times is None else np.asarray(times, dtype=float)
    h1, h2, h3 = (p.hom_at(times) for p in (x1, x2, x3))
    for (a, b), (i, j) in (((h1, h2), (1, 2)), ((h1, h3), (1, 3)), ((h2, h3), (2, 3))):
        cross = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
        if np.any(cross <= 1e-14):
            bad = float(times[np.argmax(cross <= 1e-14)])
            raise CoincidentSolutionsError(f"solutions x{i} and x{j} coincide at t={bad!r}")
    p, q = accel.cross_ratio_batch(*(np.ascontiguousarray(c) for c in
                                     (h1[:, 0], h1[:, 1], h2[:, 0], h2[:, 1], h3[:, 0], h3[:, 1])),
                                   float(k))
    return ProjTrajectory(times, np.column_stack([p, q]))


def cross_ratio(x, x1, x2, x3):
    """Classical ``[(x - x1)/(x - x2)] / [(x3 - x1)/(x3 - x2)]`` (finite inputs,
    scalars or arrays)."""
    x, x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x, x1, x2, x3))
    return ((x - x1) / (x - x2)) * ((x3 - x2) / (x3 - x1))


# ------------------------------------------------------------------ reduction

def _as_path(x1):
    """Return ``(curve, check_times)`` for a particular solution."""
    if isinstance(x1, ProjTrajectory):
        vals = x1.x
        if not np.all(np.isfinite(vals)):
            raise NotASolutionError(math.inf, PARTICULAR_RESIDUAL_TOL)
        return FuncCurve(lambda t: float(x1.x_at(t)[0])), x1.times
    if isinstance(x1, Trajectory):
        return x1.component(0), x1.times
    return as_curve(x1), None


def particular_residual(b: RiccatiCoeffs, x1, times=None, h: float = 1e-5) -> float:
    """Max of ``|dx1/dt - f(t, x1)| / (1 + |dx1/dt|)`` over the check times."""
    curve, own = _as_path(x1)
    ts = np.asarray(own if times is None else times, dtype=float)
    if ts.size == 0:
        raise ValueError("no sample times to check the particular solution on")
    if isinstance(x1, (ProjTrajectory, Trajectory)):
        lo, hi = ts[0] + h, ts[-1] - h
        ts = np.clip(ts, lo, hi)
        dx = np.array([(float(curve(t + h)) - float(curve(t - h))) / (2 * h) for t in ts])
    else:
        d = curve.derivative()
        dx = np.array([float(d(t)) for t in ts])
    xs = np.array([float(curve(t)) for t in ts])
    b0, b1, b2 = b
    rhs = np.array([float(b0(t)) + float(b1(t)) * x + float(b2(t)) * x * x for t, x in zip(ts, xs)])
    return float(np.max(np.abs(dx - rhs) / (1.0 + np.abs(dx))))


def reduce_by_particular(b: RiccatiCoeffs, x1, times=None) -> RiccatiCoeffs:
    """Coefficients ``(0, b1 + 2 b2 x1, b2)`` of the equation for ``z = x - x1``.

    ``x1`` may be a Trajectory, a ProjTrajectory (finite) or a scalar curve; it
    is checked against the equation on its samples (or on ``times``).
    """
    res = particular_residual(b, x1, times)
    if res > PARTICULAR_RESIDUAL_TOL:
        raise NotASolutionError(res, PARTICULAR_RESIDUAL_TOL)
    curve, _ = _as_path(x1)
    b0, b1, b2 = b
    return RiccatiCoeffs(
        ConstCurve(0.0),
        FuncCurve(lambda t: float(b1(t)) + 2.0 * float(b2(t)) * float(curve(t))),
        b2,
    )


def transform_coefficients(b: RiccatiCoeffs, A: MatrixCurve, grid=None) -> RiccatiCoeffs:
    """New coefficients for ``x' = (alpha x + beta) / (gamma x + delta)``.

    Written out entrywise (no matrix algebra) so it can serve as an
    independent check of :func:`liesys.groupflow.gauge_transform`.
    """
    if grid is not None:
        A.check_unit_det(grid, UNIT_DET_TOL)
    al, be, ga, de = A.entries
    dal, dbe, dga, dde = (c.derivative() for c in A.entries)
    b0, b1, b2 = b

    def new_b2(t):
        a, bb, g, d = al(t), be(t), ga(t), de(t)
        return d * d * b2(t) - d * g * b1(t) + g * g * b0(t) + g * dde(t) - d * dga(t)

    def new_b1(t):
        a, bb, g, d = al(t), be(t), ga(t), de(t)
        return (-2.0 * bb * d * b2(t) + (a * d + bb * g) * b1(t) - 2.0 * a * g * b0(t)
                + d * dal(t) - a * dde(t) + bb * dga(t) - g * dbe(t))

    def new_b0(t):
        a, bb, g, d = al(t), be(t), ga(t), de(t)
        return bb * bb * b2(t) - a * bb * b1(t) + a * a * b0(t) + a * dbe(t) - bb * dal(t)

    return RiccatiCoeffs(FuncCurve(new_b0), FuncCurve(new_b1), FuncCurve(new_b2))


# ----------------------------------------------------- solution by quadrature

def solve_linear_inhomogeneous(b0, b1, x0: float, t0: float, grid, tol: float = 1e-11) -> Trajectory:
    """``x(t) = exp(E(t)) (x0 + int_t0^t b0(s) exp(-E(s)) ds)``, ``E = int_t0^t b1``."""
    b0, b1 = as_curve(b0), as_curve(b1)
    grid = np.asarray(grid, dtype=float)
    E = cumulative_quadrature(b1, t0, grid, tol)
    J = cumulative_quadrature(FuncCurve(lambda s: float(b0(s)) * math.exp(-E(s))), t0, grid, tol)
    x = np.exp(E.values) * (x0 + J.values)
    return Trajectory(grid, x[:, None])


@dataclass(frozen=True)
class SolvableSpec:
    """dy/dt = D(t) (c0 + c1 y + c2 y^2)."""

    c0: float
    c1: float
    c2: float
    D: ScalarCurve

    @property
    def element(self) -> Sl2Element:
        return Sl2Element(self.c0, self.c1, self.c2)


def solve_solvable(spec: SolvableSpec, y0, t: float, t0: float = 0.0, tol: float = 1e-12) -> ProjValue:
    """Exact solution by reparametrising time: ``tau = int_t0^t D``, then the
    constant-coefficient flow ``exp(tau M)`` acts on ``y0``."""
    tau = quadrature(as_curve(spec.D), t0, t, tol)
    return mobius(expm_sl2(spec.element, tau), ProjValue.parse(y0))


def solve_solvable_path(spec: SolvableSpec, y0, t0: float, grid, tol: float = 1e-12) -> ProjTrajectory:
    grid = np.asarray(grid, dtype=float)
    tau = cumulative_quadrature(as_curve(spec.D), t0, grid, tol).values
    n = grid.size
    e = spec.element
    mats = accel.expm_sl2_batch(np.full(n, e.b0), np.full(n, e.b1), np.full(n, e.b2), tau)
    h = np.array(ProjValue.parse(y0).homogeneous(), dtype=float)
    return ProjTrajectory(grid, mobius_homogeneous(mats, np.tile(h, (n, 1))))


# ----------------------------------------------------- integrability criterion

@dataclass(frozen=True)
class CriterionReport:
    holds: bool
    K: float
    L: float
    D: ScalarCurve
    scale: ScalarCurve
    max_deviation: float
    tol: float

    def solvable_spec(self, c0: float, c2: float) -> SolvableSpec:
        return SolvableSpec(c0, self.K, c2, self.D)


def check_scaling_integrability(b: RiccatiCoeffs, c0: float, c2: float, grid, tol: float = 1e-8
                                ) -> CriterionReport:
    """Test whether ``y' = G(t) y`` maps the equation to ``D(t)(c0 + K y' + c2 y'^2)``.

    Evaluates ``E(t) = (b1 + (b2'/b2 - b0'/b0)/2) / D(t)`` on ``grid`` with
    ``G = sqrt(b2 c0 / (b0 c2))`` and ``D = G b0 / c0`` (so ``D^2 c0 c2 = b0 b2``);
    the criterion holds when E is constant to ``tol``.
    """
    if c0 * c2 == 0:
        raise ZeroCoefficientError("c0 * c2 must be non-zero")
    grid = np.asarray(grid, dtype=float)
    b0, b1, b2 = b
    v0 = np.asarray(b0(grid), dtype=float) * np.ones_like(grid)
    v2 = np.asarray(b2(grid), dtype=float) * np.ones_like(grid)
    prod = v0 * v2
    if np.any(prod == 0.0):
        bad = float(grid[np.argmax(prod == 0.0)])
        raise ZeroCoefficientError(f"b0*b2 vanishes at t={bad!r}")
    ratio = (c0 * c2) / prod
    if np.any(ratio < 0):
        bad = float(grid[np.argmax(ratio < 0)])
        raise SignError(f"c0*c2/(b0*b2) is negative at t={bad!r}")

    def scale(t):
        return np.sqrt(b2(t) * c0 / (b0(t) * c2))

    def D(t):
        return scale(t) * b0(t) / c0

    d0, d2 = b0.derivative(), b2.derivative()
    v1 = np.asarray(b1(grid), dtype=float) * np.ones_like(grid)
    dv0 = np.asarray(d0(grid), dtype=float) * np.ones_like(grid)
    dv2 = np.asarray(d2(grid), dtype=float) * np.ones_like(grid)
    E = (v1 + 0.5 * (dv2 / v2 - dv0 / v0)) / D(grid)
    K = float(np.mean(E))
    dev = float(np.max(np.abs(E - K)))
    return CriterionReport(dev <= tol, K, c0 * c2, FuncCurve(D), FuncCurve(scale), dev, tol)


def scale_solution(scale, y, inverse: bool = False):
    """Multiply a path pointwise by ``scale(t)`` (divide when ``inverse``)."""
    scale = as_curve(scale)
    s = np.array([float(scale(t)) for t in y.times])
    if np.any(s == 0.0):
        bad = float(y.times[np.argmax(s == 0.0)])
        raise DegenerateScaleError(f"scale vanishes at t={bad!r}")
    if isinstance(y, ProjTrajectory):
        hom = y.hom.copy()
        if inverse:
            hom[:, 1] *= s
        else:
            hom[:, 0] *= s
        return ProjTrajectory(y.times, hom)
    factor = 1.0 / s if inverse else s
    return Trajectory(y.times, y.states * factor[:, None])
