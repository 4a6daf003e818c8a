import math

import numpy as np
import pytest

from liesys import ermakov as erm
from liesys.errors import (DegenerateWronskianError, DomainError, NegativeDiscriminantError, SingularityError,
                           ZeroCrossingError)
from liesys.numkit import IntegratorOptions, Trajectory, integrate_ode

OPTS = IntegratorOptions(rel_tol=1e-11, abs_tol=1e-13)
OMEGA = "1 + 0.3*sin(t)"


def osc(omega, x0, v0, t1, copies=1, mass=1.0):
    spec = erm.OscillatorSpec(omega, mass)
    return integrate_ode(erm.oscillator_field(spec, copies), [x0, v0] if copies == 1 else x0, 0.0, t1, OPTS)


def test_oscillator_examples():
    tr = osc(1.0, 1.0, 0.0, 3.0)
    ts = np.linspace(0, 3, 31)
    assert np.max(np.abs(tr.at(ts)[:, 0] - np.cos(ts))) <= 1e-8
    tr = osc(0.0, 1.0, 2.0, 3.0)
    assert np.max(np.abs(tr.at(ts)[:, 0] - (1 + 2 * ts))) <= 1e-10
    f = erm.oscillator_field(erm.OscillatorSpec(1.0), copies=2)
    np.testing.assert_array_equal(f.rhs(0.7, np.array([1.0, 0.0, 0.0, 1.0])), [0.0, -1.0, 1.0, 0.0])


def test_oscillator_with_mass():
    # m = 2, omega = 1: x' = v/2, v' = -2x gives x'' = -x
    tr = osc(1.0, 1.0, 0.0, 2.0, mass=2.0)
    assert abs(tr.states[-1, 0] - math.cos(2.0)) <= 1e-8


def test_wronskian_examples():
    t = 0.8
    assert erm.wronskian(math.cos(t), -math.sin(t), math.sin(t), math.cos(t)) == pytest.approx(1.0, abs=1e-15)
    assert erm.wronskian(1.5, -0.3, 3.0, -0.6) == 0.0
    assert erm.wronskian(1, 0, 0, 1) == 1


def test_partial_superposition_examples():
    tr = osc(1.0, 1.0, 0.0, 1.2)
    out = erm.partial_superpose_oscillator(tr, 1.0, 0.0)
    np.testing.assert_allclose(out.states[:, 0], np.sin(tr.times), atol=1e-8)
    np.testing.assert_allclose(out.states[:, 1], np.cos(tr.times), atol=1e-8)
    zero = erm.partial_superpose_oscillator(tr, 0.0, 2.5)
    np.testing.assert_allclose(zero.states, 2.5 * tr.states)


def test_partial_superposition_zero_crossing():
    tr = osc(1.0, 1.0, 0.0, 2.0)
    with pytest.raises(ZeroCrossingError) as info:
        erm.partial_superpose_oscillator(tr, 1.0, 0.0)
    assert info.value.t > 1.5


def test_linear_superposition_examples():
    c = osc(1.0, 1.0, 0.0, 2.0)
    s = osc(1.0, 0.0, 1.0, 2.0)
    np.testing.assert_array_equal(erm.linear_superpose(c, s, 1.0, 0.0).states, c.states)
    assert np.all(erm.linear_superpose(c, s, 0.0, 0.0).states == 0.0)
    comb = erm.linear_superpose(c, s, 1.0, 1.0)
    ref = osc(1.0, 1.0, 1.0, 2.0)
    np.testing.assert_allclose(comb.states, ref.at(c.times), atol=1e-8)


def test_coefficients_from_state():
    assert erm.coefficients_from_state((1, 2), (3, -1), (1, 2)) == (1.0, 0.0)
    assert erm.coefficients_from_state((1, 0), (0, 1), (3, 4)) == (3.0, 4.0)
    with pytest.raises(DegenerateWronskianError):
        erm.coefficients_from_state((1, 2), (2, 4), (1, 1))


def test_coefficients_reproduce_trajectory():
    a = osc(OMEGA, 1.0, 0.3, 5.0)
    b = osc(OMEGA, -0.2, 1.1, 5.0)
    target = osc(OMEGA, 0.7, -0.4, 5.0)
    k1, k2 = erm.coefficients_from_state(a.states[0], b.states[0], target.states[0])
    comb = erm.linear_superpose(a, b, k1, k2)
    np.testing.assert_allclose(comb.states, target.at(a.times), atol=1e-6)


def test_pinney_field_examples():
    f = erm.pinney_field(erm.PinneySpec(1.0, 1.0))
    np.testing.assert_array_equal(f.rhs(0.0, np.array([1.0, 0.0])), [0.0, 0.0])
    g0 = erm.pinney_field(erm.PinneySpec(OMEGA, 0.0))
    o = erm.oscillator_field(erm.OscillatorSpec(OMEGA))
    s = np.array([0.7, -0.2])
    np.testing.assert_array_equal(g0.rhs(1.3, s), o.rhs(1.3, s))
    with pytest.raises(SingularityError):
        f.rhs(0.0, np.array([0.0, 1.0]))


def test_pinney_closed_form():
    tr = integrate_ode(erm.pinney_field(erm.PinneySpec(1.0, 1.0)), [2.0, 0.0], 0.0, 10.0, OPTS)
    ts = np.linspace(0, 10, 201)
    exact = np.sqrt(4 * np.cos(ts) ** 2 + 0.25 * np.sin(ts) ** 2)
    ys = tr.at(ts)[:, 0]
    assert np.max(np.abs(ys - exact)) <= 1e-6
    assert ys.min() >= 0.5 - 1e-9 and ys.max() <= 2.0 + 1e-9


def test_ermakov_field_examples():
    spec = erm.ErmakovSpec(OMEGA, 2.0, 0.0)
    s = np.array([0.8, 1.3, 0.1, -0.4])
    out = erm.ermakov_field(spec).rhs(0.5, s)
    w2 = (1 + 0.3 * math.sin(0.5)) ** 2
    np.testing.assert_allclose(out, [0.1, -0.4, -w2 * 0.8 + 2.0 / 0.8 ** 3, -w2 * 1.3], rtol=1e-15)
    free = erm.ermakov_field(erm.ErmakovSpec(1.0, 0.0, 0.0)).rhs(0.0, s)
    np.testing.assert_array_equal(free, [0.1, -0.4, -0.8, -1.3])
    quartic = erm.ermakov_field(erm.ErmakovSpec(0.0, "u^4", "1")).rhs(0.0, np.array([1.0, 1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(quartic, [0.0, 0.0, 1.0, 1.0])


def test_ermakov_invariant_examples():
    assert erm.ermakov_invariant(1.0, (1, 0, 0, 1)) == 0.5
    assert erm.ermakov_invariant(2.0, (1, 1, 0, 0)) == 1.0


def test_generalized_integral_examples():
    k = 1.7
    spec = erm.ErmakovSpec(1.0, k, 0.0)
    s = (0.9, 1.4, 0.3, -0.2)
    expected = erm.ermakov_invariant(k, s) - k / 2
    assert abs(erm.generalized_first_integral(spec, s) - expected) <= 1e-12
    poly = erm.ErmakovSpec(1.0, "1+u^2", "u")
    assert erm.generalized_first_integral(poly, (1.2, 1.2, 0.5, 0.5)) == 0.0
    with pytest.raises(DomainError):
        erm.generalized_first_integral(poly, (1.0, -1.0, 0.0, 0.0))


def test_pinney_invariants_examples():
    for t in (0.0, 0.7, 2.0):
        inv = erm.pinney_invariants((math.cos(t), 1.0, math.sin(t), -math.sin(t), 0.0, math.cos(t)), 1.0)
        assert inv.I1 == pytest.approx(0.5) and inv.I2 == pytest.approx(0.5) and inv.W == pytest.approx(1.0)
    inv = erm.pinney_invariants((1.0, 2.0, 0.0, 0.0, 0.0, 1.0), 1.0)
    assert (inv.I1, inv.I2, inv.W) == (0.125, 2.0, 1.0)


def trig_pair(t1=3.0, n=61):
    ts = np.linspace(0, t1, n)
    x = Trajectory(ts, np.column_stack([np.cos(ts), -np.sin(ts)]))
    z = Trajectory(ts, np.column_stack([np.sin(ts), np.cos(ts)]))
    return ts, x, z


def test_pinney_superpose_unit_case():
    ts, x, z = trig_pair()
    inv = erm.PinneyInvariants(0.5, 0.5, 1.0, 1.0)
    for branch in ("plus", "minus"):
        np.testing.assert_allclose(erm.pinney_superpose(x, z, inv, branch).states[:, 0], 1.0, atol=1e-12)


def test_pinney_superpose_closed_case():
    ts, x, z = trig_pair()
    out = erm.pinney_superpose(x, z, erm.PinneyInvariants(0.125, 2.0, 1.0, 1.0), "plus")
    np.testing.assert_allclose(out.states[:, 0], np.sqrt(4 * np.cos(ts) ** 2 + 0.25 * np.sin(ts) ** 2),
                               atol=1e-12)


def test_pinney_superpose_errors():
    ts, x, z = trig_pair()
    with pytest.raises(NegativeDiscriminantError):
        erm.pinney_superpose(x, z, erm.PinneyInvariants(0.1, 0.1, 1.0, 1.0))
    with pytest.raises(DegenerateWronskianError):
        erm.pinney_superpose(x, x, erm.PinneyInvariants(0.5, 0.5, 0.0, 1.0))


def test_pinney_round_trip_invariants():
    c = 0.8
    s0 = np.array([0.7, 1.3, -0.2, -0.4, 0.25, 0.9])
    tr = integrate_ode(erm.pinney_system_field(OMEGA, c), s0, 0.0, 4.0, OPTS)
    inv = erm.pinney_invariants(s0, c)
    x = Trajectory(tr.times, tr.states[:, [0, 3]])
    z = Trajectory(tr.times, tr.states[:, [2, 5]])
    branch, sign = erm.select_branch(x.states[0], z.states[0], inv, s0[1], s0[4])
    y = erm.pinney_superpose(x, z, inv, branch, sign)
    for i in range(0, len(tr.times), 7):
        st = (x.states[i, 0], y.states[i, 0], z.states[i, 0], x.states[i, 1], y.states[i, 1], z.states[i, 1])
        again = erm.pinney_invariants(st, c)
        assert abs(again.I1 - inv.I1) <= 1e-6 and abs(again.I2 - inv.I2) <= 1e-6
    np.testing.assert_allclose(y.states, tr.states[:, [1, 4]], atol=1e-7)
