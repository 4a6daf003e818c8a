import math

import numpy as np
import pytest

from _coeffs import random_coeffs, random_unit_det_curve
from liesys.curves import RiccatiCoeffs
from liesys.errors import DeterminantError
from liesys.expr import ExprCurve
from liesys.groupflow import (MatrixCurve, check_subalgebra, gauge_transform, solve_group_equation,
                              transport_solution)
from liesys.liecore import ProjValue, chordal_distance
from liesys.numkit import IntegratorOptions
from liesys.riccati import solve_direct

OPTS = IntegratorOptions(rel_tol=1e-11, abs_tol=1e-12)
GRID = np.linspace(0, 2, 21)


def test_zero_coefficients_identity():
    g = solve_group_equation(RiccatiCoeffs.of(0, 0, 0), 0.0, 1.0, OPTS)
    np.testing.assert_allclose(g.matrices, np.broadcast_to(np.eye(2), g.matrices.shape), atol=1e-15)


@pytest.mark.parametrize("b,expected", [((1, 0, 0), lambda t: [[1, t], [0, 1]]),
                                        ((0, 0, 1), lambda t: [[1, 0], [-t, 1]]),
                                        ((1, 0, 1), lambda t: [[math.cos(t), math.sin(t)],
                                                               [-math.sin(t), math.cos(t)]])])
def test_constant_coefficient_flows(b, expected):
    g = solve_group_equation(RiccatiCoeffs.of(*b), 0.0, 2.0, OPTS)
    for t in np.linspace(0, 2, 9):
        np.testing.assert_allclose(g.at(t), expected(t), atol=1e-9)
    det = np.linalg.det(g.matrices)
    assert np.max(np.abs(det - 1)) <= 1e-14


def test_transport_identity_constant():
    g = solve_group_equation(RiccatiCoeffs.of(0, 0, 0), 0.0, 1.0, OPTS)
    assert all(v == ProjValue.finite(0.4) for v in transport_solution(g, 0.4).values)


def test_transport_tangent_through_pole():
    g = solve_group_equation(RiccatiCoeffs.of(1, 0, 1), 0.0, 3.0, OPTS)
    path = transport_solution(g, 0.0)
    ts = np.linspace(0, 3, 301)
    for t, v in zip(ts, path.resample(ts).values):
        assert chordal_distance(v, ProjValue.finite(math.tan(t))) <= 1e-8
    assert path.at(math.pi / 2).is_inf or abs(path.at(math.pi / 2).x) > 1e7


def test_transport_reciprocal():
    g = solve_group_equation(RiccatiCoeffs.of(0, 0, 1), 0.0, 0.9, OPTS)
    ts = np.linspace(0, 0.9, 10)
    np.testing.assert_allclose(transport_solution(g, 1.0).x_at(ts), 1 / (1 - ts), rtol=1e-6)


def test_transport_matches_direct_random():
    rng = np.random.default_rng(11)
    ts = np.linspace(0, 1, 51)
    for _ in range(5):
        b = random_coeffs(rng, 0.5)
        x0 = rng.uniform(-0.5, 0.5)
        a = transport_solution(solve_group_equation(b, 0.0, 1.0, OPTS), x0).x_at(ts)
        d = solve_direct(b, x0, 0.0, 1.0, OPTS).x_at(ts)
        assert np.max(np.abs(a - d) / np.maximum(1, np.abs(d))) <= 1e-6


def test_gauge_identity():
    b = RiccatiCoeffs(ExprCurve("1+t"), ExprCurve("sin(t)"), ExprCurve("t^2"))
    bp = gauge_transform(b, MatrixCurve.identity(), GRID)
    for t in GRID:
        assert np.allclose(bp.at(t), b.at(t), atol=1e-15)


def test_gauge_constant_diagonal():
    G = 1.7
    b = RiccatiCoeffs(ExprCurve("1+t"), ExprCurve("sin(t)"), ExprCurve("t^2"))
    bp = gauge_transform(b, MatrixCurve(G, 0.0, 0.0, 1 / G), GRID)
    for t in GRID:
        np.testing.assert_allclose(bp.at(t), [G * G * (1 + t), math.sin(t), t * t / G ** 2], atol=1e-13)


def test_gauge_by_particular_solution():
    b = RiccatiCoeffs.of(1.0, 0.0, 1.0)
    A = MatrixCurve(1.0, ExprCurve("-tan(t)"), 0.0, 1.0)
    grid = np.linspace(0, 1.2, 25)
    bp = gauge_transform(b, A, grid)
    for t in grid:
        np.testing.assert_allclose(bp.at(t), [0.0, 2 * math.tan(t), 1.0], atol=1e-12)
    assert check_subalgebra(bp, "a1a2", grid)


def test_gauge_rejects_non_unit_det():
    with pytest.raises(DeterminantError):
        gauge_transform(RiccatiCoeffs.of(1, 0, 1), MatrixCurve(2.0, 0.0, 0.0, 1.0), GRID)


def test_gauge_maps_solutions_to_solutions():
    rng = np.random.default_rng(12)
    b = random_coeffs(rng, 0.5)
    A = random_unit_det_curve(rng)
    grid = np.linspace(0, 1, 11)
    bp = gauge_transform(b, A, grid)
    x = solve_direct(b, 0.2, 0.0, 1.0, OPTS)
    y = solve_direct(bp, float(((A.at(0.0) @ [0.2, 1])[0]) / (A.at(0.0) @ [0.2, 1])[1]), 0.0, 1.0, OPTS)
    for t in grid:
        m = A.at(t)
        xt = x.at(t).x
        assert abs((m[0, 0] * xt + m[0, 1]) / (m[1, 0] * xt + m[1, 1]) - y.at(t).x) <= 1e-7


def test_check_subalgebra_examples():
    grid = np.linspace(0, 1, 11)
    assert check_subalgebra(RiccatiCoeffs(1.0, ExprCurve("t"), 0.0), "a0a1", grid)
    b = RiccatiCoeffs.of(1.0, 0.0, 1.0)
    assert not check_subalgebra(b, "a0a1", grid)
    assert not check_subalgebra(b, "a1a2", grid)
    with pytest.raises(ValueError):
        check_subalgebra(b, "a0a2", grid)
