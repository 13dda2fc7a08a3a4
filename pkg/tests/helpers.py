"""Shared generators for randomized tests.  Everything is seeded."""

import numpy as np

from montouch import (
    Ball,
    Box,
    Halfspace,
    Indicator,
    ScaledSquare,
    SeparableSum,
    Singleton,
    Support,
    max_sym_eigenvalue,
)


def random_ball(rng, dim, spread=3.0):
    center = spread * rng.normal(size=dim)
    radius = float(0.2 + 2.0 * rng.random())
    return Ball(center, radius)


def random_box(rng, dim, spread=3.0):
    a = spread * rng.normal(size=dim)
    b = a + 0.2 + 2.0 * rng.random(size=dim)
    return Box(a, b)


def random_singleton(rng, dim, spread=3.0):
    return Singleton(spread * rng.normal(size=dim))


def random_halfspace(rng, dim, spread=2.0):
    normal = rng.normal(size=dim)
    normal /= np.linalg.norm(normal)
    return Halfspace(normal, float(spread * rng.normal()))


def random_compact_set(rng, dim):
    pick = rng.integers(0, 3)
    if pick == 0:
        return random_ball(rng, dim)
    if pick == 1:
        return random_box(rng, dim)
    return random_singleton(rng, dim)


def random_set(rng, dim):
    pick = rng.integers(0, 4)
    if pick == 3:
        return random_halfspace(rng, dim)
    return random_compact_set(rng, dim)


def random_prox_function(rng, dim):
    pick = rng.integers(0, 4)
    if pick == 0:
        return Indicator(random_compact_set(rng, dim))
    if pick == 1:
        return Support(random_compact_set(rng, dim))
    if pick == 2:
        return ScaledSquare(float(0.2 + 3.0 * rng.random()), dim)
    half = max(1, dim // 2)
    parts = (random_prox_function(rng, half), random_prox_function(rng, dim - half)) \
        if dim - half >= 1 else (random_prox_function(rng, dim),)
    return SeparableSum(parts)


def random_monotone_matrix(rng, dim, scale=1.0):
    """Random matrix with positive semidefinite symmetric part."""
    g = scale * rng.normal(size=(dim, dim))
    sym = 0.5 * (g + g.T)
    skew = 0.5 * (g - g.T)
    eigs, vecs = np.linalg.eigh(sym)
    psd = vecs @ np.diag(np.clip(eigs, 0.0, None)) @ vecs.T
    return psd + skew


def random_gate_matrix(rng, dim, lam=0.5, scale=0.25):
    """Random Q with max_sym_eigenvalue(Q) = -lam, so the quadratic gate
    <y, Qy> <= -lam ||y||^2 holds with equality in the worst direction."""
    g = scale * rng.normal(size=(dim, dim))
    shift = max_sym_eigenvalue(g) + lam
    return g - shift * np.eye(dim)


def sample_in(set_, rng, spread=4.0):
    """A point of the set, obtained by projecting a random point."""
    return set_.project(spread * rng.normal(size=set_.ambient_dim))
