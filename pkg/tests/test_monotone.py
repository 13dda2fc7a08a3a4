"""Resolvent oracles, anti-monotonicity certificates, constrained prox."""

import math

import numpy as np
import pytest

from montouch import (
    Box,
    ConvergenceError,
    Indicator,
    LinearMonotoneOracle,
    PreconditionError,
    ScaledSquare,
    SeparableSum,
    SubdifferentialOracle,
    SubspaceRestrictedOracle,
    Support,
    is_mu_unmonotone,
    max_sym_eigenvalue,
    minty_point,
    modulus_from_lambda,
    orthonormal_range,
    sum_prox,
)
from helpers import random_gate_matrix, random_monotone_matrix, random_prox_function

DIAGONAL = orthonormal_range(np.array([[1.0], [1.0]]) @ np.array([[1.0, 1.0]]))
ANTIDIAGONAL = orthonormal_range(np.array([[1.0], [-1.0]]) @ np.array([[1.0, -1.0]]))


def zero_function(dim):
    return Indicator(Box([-math.inf] * dim, [math.inf] * dim))


# ------------------------------------------------------------ oracles

def test_subdifferential_resolvent_is_prox():
    oracle = SubdifferentialOracle(Indicator(Box([1.0], [2.0])))
    assert np.allclose(oracle.resolvent(1.0, [0.0]), [1.0])
    assert np.allclose(oracle.resolvent(0.3, [1.5]), [1.5])


def test_linear_monotone_resolvent():
    oracle = LinearMonotoneOracle(np.diag([1.0, 3.0]))
    assert np.allclose(oracle.resolvent(1.0, [2.0, 4.0]), [1.0, 1.0])


def test_linear_monotone_rejects_nonmonotone():
    with pytest.raises(ValueError):
        LinearMonotoneOracle(-np.eye(2))
    # skew maps are monotone
    LinearMonotoneOracle(np.array([[0.0, 1.0], [-1.0, 0.0]]))


def test_subspace_restricted_matches_sum_prox():
    fn = SeparableSum((Support(Box([-1.0], [1.0])), Support(Box([-2.0], [2.0]))))
    oracle = SubspaceRestrictedOracle(fn, DIAGONAL)
    assert oracle.dim == 1
    c = np.array([3.0])
    out = oracle.resolvent(0.7, c)
    direct = sum_prox(fn, DIAGONAL, 0.7, DIAGONAL.basis @ c)
    assert np.allclose(DIAGONAL.basis @ out, direct, atol=1e-9)


def test_resolvents_firmly_nonexpansive_sampled():
    rng = np.random.default_rng(59)
    oracles = [
        SubdifferentialOracle(random_prox_function(rng, 3)),
        LinearMonotoneOracle(random_monotone_matrix(rng, 3)),
        SubspaceRestrictedOracle(
            SeparableSum((Support(Box([-1.0], [1.0])), ScaledSquare(1.0, 1))),
            DIAGONAL,
            inner_tol=1e-12,
        ),
    ]
    for oracle in oracles:
        lam = 0.8
        for _ in range(50):
            x = 2.0 * rng.normal(size=oracle.dim)
            y = 2.0 * rng.normal(size=oracle.dim)
            jx = oracle.resolvent(lam, x)
            jy = oracle.resolvent(lam, y)
            lhs = float((jx - jy) @ (jx - jy))
            rhs = float((jx - jy) @ (x - y))
            assert lhs <= rhs + 1e-10


# -------------------------------------------------------- minty points

def test_minty_point_examples():
    assert np.allclose(minty_point(SubdifferentialOracle(Indicator(Box([1.0], [2.0]))), 1.0), [1.0])
    assert np.allclose(minty_point(SubdifferentialOracle(zero_function(2)), 0.3), [0.0, 0.0])
    assert np.allclose(minty_point(LinearMonotoneOracle(np.eye(3)), 2.0), np.zeros(3))


def test_minty_point_rejects_bad_mu():
    oracle = LinearMonotoneOracle(np.eye(2))
    with pytest.raises(ValueError):
        minty_point(oracle, 0.0)
    with pytest.raises(ValueError):
        minty_point(oracle, -1.0)


def test_minty_reconstruction_residual():
    # -mu y lies in M y, so a fresh unit-step resolvent must return y
    rng = np.random.default_rng(61)
    for _ in range(20):
        dim = int(rng.integers(1, 4))
        oracle = SubdifferentialOracle(random_prox_function(rng, dim))
        for mu in (0.1, 1.0, 10.0):
            y = minty_point(oracle, mu)
            back = oracle.resolvent(1.0, y - mu * y)
            assert np.linalg.norm(back - y) <= 1e-8


# ----------------------------------------------- unmonotone certificates

def test_is_mu_unmonotone_frozen_values():
    holds, cert = is_mu_unmonotone(-np.eye(2), 0.5)
    assert holds and cert.max_eig == pytest.approx(0.0, abs=1e-12)
    holds, cert = is_mu_unmonotone(-np.eye(2), 0.6)
    assert not holds and cert.max_eig == pytest.approx(0.2, abs=1e-12)
    assert cert.operator_norm == pytest.approx(1.0, abs=1e-12)


def test_is_mu_unmonotone_rejects_bad_mu():
    with pytest.raises(ValueError):
        is_mu_unmonotone(-np.eye(2), 0.0)


def test_certificate_cross_checked_on_graph_pairs():
    # when the certificate holds, the defining inequality holds on samples
    rng = np.random.default_rng(67)
    for _ in range(20):
        dim = int(rng.integers(1, 6))
        q = random_gate_matrix(rng, dim, lam=0.5)
        mu = modulus_from_lambda(q, 0.5)
        holds, _ = is_mu_unmonotone(q, mu)
        assert holds
        for _ in range(50):
            y1 = 3.0 * rng.normal(size=dim)
            y2 = 3.0 * rng.normal(size=dim)
            dy = y1 - y2
            dq = q @ y1 - q @ y2
            value = float(dy @ dq) + mu * (float(dy @ dy) + float(dq @ dq))
            assert value <= 1e-9


def test_certificate_implies_shifted_monotonicity():
    # valid certificate at mu forces sym(Q) + mu I nonpositive
    rng = np.random.default_rng(71)
    for _ in range(20):
        dim = int(rng.integers(1, 6))
        q = random_gate_matrix(rng, dim, lam=0.5)
        mu = modulus_from_lambda(q, 0.5)
        holds, _ = is_mu_unmonotone(q, mu)
        assert holds
        assert max_sym_eigenvalue(q + mu * np.eye(dim)) <= 1e-11


def test_modulus_from_lambda_frozen_values():
    assert modulus_from_lambda(-np.eye(2), 1.0) == 0.5
    assert modulus_from_lambda(-2.0 * np.eye(3), 2.0) == pytest.approx(0.4, abs=1e-12)


def test_modulus_from_lambda_gate_failure():
    with pytest.raises(PreconditionError):
        modulus_from_lambda(-np.eye(2), 2.0)  # needs <y,Qy> <= -2||y||^2
    with pytest.raises(ValueError):
        modulus_from_lambda(-np.eye(2), 0.0)


def test_modulus_certifies_unmonotonicity():
    # mu from the gate always certifies; see the touching solver contract
    rng = np.random.default_rng(73)
    for _ in range(20):
        dim = int(rng.integers(1, 6))
        q = random_gate_matrix(rng, dim, lam=0.5)
        mu = modulus_from_lambda(q, 0.5)
        holds, cert = is_mu_unmonotone(q, mu)
        assert holds, cert


# ------------------------------------------------------------ sum_prox

def test_sum_prox_box_meets_diagonal():
    fn = Indicator(Box([0.0, -math.inf], [2.0, math.inf]))
    out = sum_prox(fn, DIAGONAL, 1.0, np.array([3.0, 3.0]))
    assert np.allclose(out, [2.0, 2.0], atol=1e-9)
    # step size does not matter for indicators
    out = sum_prox(fn, DIAGONAL, 0.05, np.array([3.0, 3.0]))
    assert np.allclose(out, [2.0, 2.0], atol=1e-9)


def test_sum_prox_zero_function_projects():
    fn = zero_function(2)
    v = np.array([3.0, 1.0])
    out = sum_prox(fn, DIAGONAL, 1.0, v)
    assert np.allclose(out, [2.0, 2.0], atol=1e-11)


def test_sum_prox_infeasible_raises():
    # box [2,3]^2 never meets the antidiagonal line
    fn = Indicator(Box([2.0, 2.0], [3.0, 3.0]))
    with pytest.raises(ConvergenceError) as info:
        sum_prox(fn, ANTIDIAGONAL, 1.0, np.zeros(2), max_iter=2000)
    assert info.value.residual > 1e-3


def test_sum_prox_rejects_bad_step():
    with pytest.raises(ValueError):
        sum_prox(zero_function(2), DIAGONAL, 0.0, np.zeros(2))


def test_sum_prox_optimality_sampled():
    rng = np.random.default_rng(79)
    for _ in range(15):
        fn = SeparableSum((
            Support(Box([-1.0 - rng.random()], [1.0 + rng.random()])),
            ScaledSquare(float(0.5 + rng.random()), 1),
        ))
        lam = float(10.0 ** rng.uniform(-0.5, 0.5))
        v = 3.0 * rng.normal(size=2)
        z = sum_prox(fn, DIAGONAL, lam, v, tol=1e-12)
        fz = fn.value(z)
        for _ in range(50):
            w = DIAGONAL.basis @ (DIAGONAL.basis.T @ (z + rng.normal(size=2)))
            gap = float((v - z) @ (w - z)) - lam * (fn.value(w) - fz)
            assert gap <= 1e-8


def test_sum_prox_output_in_subspace():
    fn = SeparableSum((Support(Box([-1.0], [1.0])), Support(Box([-1.0], [1.0]))))
    z = sum_prox(fn, DIAGONAL, 1.0, np.array([2.0, -1.0]))
    # z lies in the diagonal up to machine precision
    assert abs(z[0] - z[1]) <= 1e-12
