"""Second-order Lie systems: time-dependent oscillators, the Pinney equation
and generalised Ermakov systems, with their first integrals and
superposition rules.

State orderings: oscillator copies ``(x1, v1, x2, v2, ...)``; Ermakov
``(x, y, vx, vy)``; Pinney with two oscillators ``(x, y, z, vx, vy, vz)``
where ``y`` is the Pinney variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curves import ConstCurve, ScalarCurve, as_curve
from .errors import (
    DegenerateWronskianError,
    DomainError,
    GridMismatchError,
    NegativeDiscriminantError,
    NegativeRadicandError,
    SingularityError,
    ZeroCrossingError,
)
from .expr import ExprCurve, parse
from .numkit import Trajectory, VectorField, cumulative_quadrature, quadrature
from .curves import SampledCurve

GUARD = 1e-6
DISCRIMINANT_TOL = 1e-9


def _curve(obj) -> ScalarCurve:
    return as_curve(obj)


def _ratio_func(obj) -> Callable[[float], float]:
    """f(u) / g(u) given as expression text in ``u``, an Expression or a callable."""
    if isinstance(obj, str):
        return ExprCurve(parse(obj, var="u"))
    if isinstance(obj, (int, float)):
        v = float(obj)
        return lambda u: v
    return obj


@dataclass(frozen=True)
class OscillatorSpec:
    omega: ScalarCurve
    mass: ScalarCurve = field(default_factory=lambda: ConstCurve(1.0))

    def __post_init__(self):
        object.__setattr__(self, "omega", _curve(self.omega))
        object.__setattr__(self, "mass", _curve(self.mass))


@dataclass(frozen=True)
class PinneySpec:
    """x'' = -omega(t)^2 x + k / x^3.  ``k`` is the constant called ``c`` in
    the invariants."""

    omega: ScalarCurve
    k: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _curve(self.omega))


@dataclass(frozen=True)
class ErmakovSpec:
    omega: ScalarCurve
    f: Callable[[float], float]
    g: Callable[[float], float]

    def __post_init__(self):
        object.__setattr__(self, "omega", _curve(self.omega))
        object.__setattr__(self, "f", _ratio_func(self.f))
        object.__setattr__(self, "g", _ratio_func(self.g))


@dataclass(frozen=True)
class PinneyInvariants:
    I1: float
    I2: float
    W: float
    c: float

    @property
    def discriminant(self) -> float:
        return 4.0 * self.I1 * self.I2 - self.c * self.W ** 2


# ------------------------------------------------------------------ oscillator

def oscillator_field(spec: OscillatorSpec, copies: int = 1) -> VectorField:
    """x' = v / m(t), v' = -m(t) omega(t)^2 x for each copy."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    om, m = spec.omega, spec.mass

    def rhs(t, s):
        mt = float(m(t))
        w2 = float(om(t)) ** 2
        out = np.empty_like(s)
        out[0::2] = s[1::2] / mt
        out[1::2] = -mt * w2 * s[0::2]
        return out

    return VectorField(2 * copies, rhs)


def oscillator_generators(copies: int = 2) -> list[VectorField]:
    """x d/dv, v d/dx and (x d/dx - v d/dv)/2 summed over copies."""
    n = 2 * copies

    def make(kind):
        def rhs(t, s):
            out = np.zeros(n)
            if kind == 1:
                out[1::2] = s[0::2]
            elif kind == 2:
                out[0::2] = s[1::2]
            else:
                out[0::2] = 0.5 * s[0::2]
                out[1::2] = -0.5 * s[1::2]
            return out
        return VectorField(n, rhs)

    return [make(1), make(2), make(3)]


def hamiltonian_oscillator_fields() -> list[VectorField]:
    """p d/dx, (x d/dx - p d/dp)/2 and -x d/dp on the (x, p) plane."""
    return [
        VectorField(2, lambda t, s: np.array([s[1], 0.0])),
        VectorField(2, lambda t, s: np.array([0.5 * s[0], -0.5 * s[1]])),
        VectorField(2, lambda t, s: np.array([0.0, -s[0]])),
    ]


def wronskian(x: float, vx: float, z: float, vz: float) -> float:
    return x * vz - z * vx


def partial_superpose_oscillator(x1: Trajectory, k: float, kprime: float, tol: float = 1e-10
                                 ) -> Trajectory:
    """Second solution ``x2 = k' x1 + k x1 int_t0^t x1^-2`` from one solution.

    Velocity: ``v2 = k' v1 + k (v1 int x1^-2 + 1 / x1)``.  Needs a dense
    trajectory, or a sampled one whose second column is dx1/dt.
    """
    xs = x1.states[:, 0]
    small = np.abs(xs) < GUARD
    if np.any(small):
        raise ZeroCrossingError(float(x1.times[np.argmax(small)]))
    flips = np.signbit(xs[1:]) != np.signbit(xs[:-1])
    if np.any(flips):
        i = int(np.argmax(flips))
        # linear estimate of the crossing inside the first offending interval
        t_a, t_b = x1.times[i], x1.times[i + 1]
        raise ZeroCrossingError(float(t_a + (t_b - t_a) * xs[i] / (xs[i] - xs[i + 1])))
    if x1.dense is not None:
        pos = x1.component(0)
    else:
        pos = SampledCurve(x1.times, xs, x1.states[:, 1])

    def inv_sq(t):
        v = float(pos(t))
        if abs(v) < GUARD:
            raise ZeroCrossingError(t)
        return 1.0 / (v * v)

    if k == 0.0:
        integral = np.zeros_like(xs)
    else:
        integral = cumulative_quadrature(inv_sq, x1.t0, x1.times, tol).values
    vs = x1.states[:, 1]
    x2 = kprime * xs + k * xs * integral
    v2 = kprime * vs + k * (vs * integral + 1.0 / xs)
    return Trajectory(x1.times, np.column_stack([x2, v2]))


def _shared(s1: Trajectory, s2: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    if s1.times.shape == s2.times.shape and np.array_equal(s1.times, s2.times):
        return s1.states, s2.states
    if s2.dense is None:
        raise GridMismatchError("trajectories do not share a grid and the second has no dense output")
    try:
        return s1.states, s2.at(s1.times)
    except DomainError as exc:
        raise GridMismatchError(f"cannot resample onto the first grid: {exc}") from None


def linear_superpose(s1: Trajectory, s2: Trajectory, k1: float, k2: float) -> Trajectory:
    """``(x, v) = k1 (x1, v1) + k2 (x2, v2)`` on the grid of ``s1``."""
    a, b = _shared(s1, s2)
    return Trajectory(s1.times, k1 * a + k2 * b)


def coefficients_from_state(s1_state, s2_state, target_state) -> tuple[float, float]:
    """Solve ``target = k1 s1 + k2 s2`` for (x, v) states by Cramer's rule.

    With W = x1 v2 - x2 v1 and the first integrals F1 = x v1 - x1 v,
    F2 = x v2 - x2 v this is ``k1 = F2 / W``, ``k2 = -F1 / W``.
    """
    x1, v1 = s1_state[0], s1_state[1]
    x2, v2 = s2_state[0], s2_state[1]
    x, v = target_state[0], target_state[1]
    W = wronskian(x1, v1, x2, v2)
    if abs(W) <= 1e-10:
        raise DegenerateWronskianError(f"|W| = {abs(W):.3e} is too small to separate solutions")
    F1 = x * v1 - x1 * v
    F2 = x * v2 - x2 * v
    return F2 / W, -F1 / W


# ---------------------------------------------------------------------- Pinney

def pinney_field(spec: PinneySpec) -> VectorField:
    om, k = spec.omega, spec.k

    def rhs(t, s):
        x, v = s
        if abs(x) < GUARD:
            raise SingularityError("Pinney field evaluated at x = 0", t)
        return np.array([v, -float(om(t)) ** 2 * x + k / x ** 3])

    return VectorField(2, rhs)


def pinney_fields(k: float) -> list[VectorField]:
    """L1 = x d/dv, L2 = v d/dx + k/x^3 d/dv, L3 = (x d/dx - v d/dv)/2."""
    def l2(t, s):
        if abs(s[0]) < GUARD:
            raise SingularityError("Pinney generator evaluated at x = 0", t)
        return np.array([s[1], k / s[0] ** 3])

    return [
        VectorField(2, lambda t, s: np.array([0.0, s[0]])),
        VectorField(2, l2),
        VectorField(2, lambda t, s: np.array([0.5 * s[0], -0.5 * s[1]])),
    ]


def pinney_system_field(omega, c: float) -> VectorField:
    """Pinney equation for y alongside two copies (x, z) of the oscillator."""
    om = _curve(omega)

    def rhs(t, s):
        x, y, z, vx, vy, vz = s
        if abs(y) < GUARD:
            raise SingularityError("Pinney variable reached y = 0", t)
        w2 = float(om(t)) ** 2
        return np.array([vx, vy, vz, -w2 * x, -w2 * y + c / y ** 3, -w2 * z])

    return VectorField(6, rhs)


def pinney_invariants(state6, c: float) -> PinneyInvariants:
    x, y, z, vx, vy, vz = (float(v) for v in state6)
    if abs(y) < GUARD:
        raise SingularityError("invariants need y != 0")
    I1 = 0.5 * ((y * vx - x * vy) ** 2 + c * (x / y) ** 2)
    I2 = 0.5 * ((y * vz - z * vy) ** 2 + c * (z / y) ** 2)
    return PinneyInvariants(I1, I2, wronskian(x, vx, z, vz), c)


def pinney_superpose(x: Trajectory, z: Trajectory, inv: PinneyInvariants, branch: str = "plus",
                     sign: float | None = None) -> Trajectory:
    """Pinney solution from two oscillator solutions::

        y = (sqrt(2) / W) (I2 x^2 + I1 z^2 +/- sqrt(4 I1 I2 - c W^2) x z)^(1/2)

    ``x`` and ``z`` carry (position, velocity).  The overall sign defaults to
    sign(W) as written; pass ``sign`` to pick the mirror solution -y.
    Returns (y, vy) on the grid of ``x``.
    """
    if branch not in ("plus", "minus"):
        raise ValueError("branch must be 'plus' or 'minus'")
    W = inv.W
    if abs(W) <= 1e-12:
        raise DegenerateWronskianError("Wronskian vanishes; x and z are dependent")
    disc = inv.discriminant
    if disc < -DISCRIMINANT_TOL:
        raise NegativeDiscriminantError(f"4 I1 I2 - c W^2 = {disc:.3e} < 0")
    s = math.sqrt(max(disc, 0.0)) * (1.0 if branch == "plus" else -1.0)
    xs, zs = _shared(x, z)
    X, VX = xs[:, 0], xs[:, 1]
    Z, VZ = zs[:, 0], zs[:, 1]
    P = inv.I2 * X ** 2 + inv.I1 * Z ** 2 + s * X * Z
    scale_p = inv.I2 * X ** 2 + inv.I1 * Z ** 2 + abs(s * X * Z)
    bad = P < -1e-12 * np.maximum(scale_p, 1.0)
    if np.any(bad):
        raise NegativeRadicandError(f"radicand negative at t={float(x.times[np.argmax(bad)])!r}")
    P = np.maximum(P, 0.0)
    sgn = math.copysign(1.0, W) if sign is None else math.copysign(1.0, sign)
    y = sgn * math.sqrt(2.0) / abs(W) * np.sqrt(P)
    dP = 2.0 * inv.I2 * X * VX + 2.0 * inv.I1 * Z * VZ + s * (VX * Z + X * VZ)
    if np.any(np.abs(y) < GUARD):
        raise SingularityError("reconstructed y passes through 0", float(x.times[np.argmax(np.abs(y) < GUARD)]))
    vy = dP / (W * W * y)
    return Trajectory(x.times, np.column_stack([y, vy]))


def select_branch(x_state, z_state, inv: PinneyInvariants, y0: float, vy0: float) -> tuple[str, float]:
    """Branch and sign whose reconstruction best matches ``(y0, vy0)``."""
    best = None
    for branch in ("plus", "minus"):
        for sign in (1.0, -1.0):
            xt = Trajectory([0.0], [list(x_state)])
            zt = Trajectory([0.0], [list(z_state)])
            try:
                y, vy = pinney_superpose(xt, zt, inv, branch, sign).states[0]
            except (NegativeRadicandError, SingularityError):
                continue
            err = abs(y - y0) + abs(vy - vy0)
            if best is None or err < best[0]:
                best = (err, branch, sign)
    if best is None:
        raise NegativeRadicandError("no branch reproduces the initial Pinney state")
    return best[1], best[2]


# --------------------------------------------------------------------- Ermakov

def ermakov_field(spec: ErmakovSpec) -> VectorField:
    """x'' = f(y/x)/x^3 - omega^2 x,  y'' = g(y/x)/y^3 - omega^2 y."""
    om, f, g = spec.omega, spec.f, spec.g

    def rhs(t, s):
        x, y, vx, vy = s
        if abs(x) < GUARD or abs(y) < GUARD:
            raise SingularityError("Ermakov field evaluated at x = 0 or y = 0", t)
        w2 = float(om(t)) ** 2
        u = y / x
        return np.array([vx, vy, -w2 * x + float(f(u)) / x ** 3, -w2 * y + float(g(u)) / y ** 3])

    return VectorField(4, rhs)


def ermakov_fields(f, g) -> list[VectorField]:
    """N1, N2, N3 with X = N2 - omega^2 N1."""
    f, g = _ratio_func(f), _ratio_func(g)

    def n2(t, s):
        x, y, vx, vy = s
        if abs(x) < GUARD or abs(y) < GUARD:
            raise SingularityError("Ermakov generator evaluated at x = 0 or y = 0", t)
        u = y / x
        return np.array([vx, vy, float(f(u)) / x ** 3, float(g(u)) / y ** 3])

    return [
        VectorField(4, lambda t, s: np.array([0.0, 0.0, s[0], s[1]])),
        VectorField(4, n2),
        VectorField(4, lambda t, s: 0.5 * np.array([s[0], s[1], -s[2], -s[3]])),
    ]


def ermakov_invariant(k: float, state) -> float:
    """(k/2)(y/x)^2 + (x vy - y vx)^2 / 2 for x the Pinney variable."""
    x, y, vx, vy = (float(v) for v in state)
    if abs(x) < GUARD:
        raise SingularityError("Ermakov invariant needs x != 0")
    return 0.5 * k * (y / x) ** 2 + 0.5 * (x * vy - y * vx) ** 2


def generalized_first_integral(spec: ErmakovSpec, state, quad_tol: float = 1e-12) -> float:
    """(x vy - y vx)^2 / 2 + int_1^{x/y} [-f(1/u)/u^3 + u g(1/u)] du.

    The lower limit is fixed at u = 1; another choice only shifts the value.
    """
    x, y, vx, vy = (float(v) for v in state)
    if abs(x) < GUARD or abs(y) < GUARD:
        raise SingularityError("first integral needs x != 0 and y != 0")
    u_top = x / y
    if u_top <= 0.0:
        raise DomainError(f"integration path [1, {u_top!r}] crosses u = 0")
    f, g = spec.f, spec.g

    def integrand(u):
        return -float(f(1.0 / u)) / u ** 3 + u * float(g(1.0 / u))

    return 0.5 * (x * vy - y * vx) ** 2 + quadrature(integrand, 1.0, u_top, quad_tol)
