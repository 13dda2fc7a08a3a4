"""Resolvent oracles for maximally monotone operators.

Three oracle kinds are provided: subdifferentials of proximable functions,
monotone linear maps, and subdifferentials of a proximable function
restricted to a subspace (resolved by a Dykstra-style scheme, ``sum_prox``).
The module also certifies strong anti-monotonicity of a linear map
(``is_mu_unmonotone``) and converts a quadratic-form bound into the
anti-monotonicity modulus used by the touching solver
(``modulus_from_lambda``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .convex import ProxFunction
from .errors import ConvergenceError, PreconditionError
from .hilbert import (
    as_operator,
    as_vector,
    max_sym_eigenvalue,
    operator_norm,
    project_onto,
)

# Gates that sit exactly at zero in exact arithmetic get this much slack.
SPECTRAL_SLACK = 1e-12
# The unmonotonicity certificate is slightly looser so that a modulus
# within ~1e-12 of the exact boundary still certifies.
UNMONOTONE_SLACK = 1e-11

SUM_PROX_TOL = 1e-11
SUM_PROX_MAX_ITER = 200000


@dataclass(frozen=True)
class UnmonotoneCertificate:
    """Spectral witness for <y, Qy> + mu (||y||^2 + ||Qy||^2) <= 0.

    ``max_eig`` is the largest eigenvalue of sym(Q) + mu (I + Q^T Q); the
    certificate holds iff it is nonpositive (up to UNMONOTONE_SLACK).
    """

    mu: float
    max_eig: float
    operator_norm: float

    @property
    def valid(self):
        return self.max_eig <= UNMONOTONE_SLACK


def is_mu_unmonotone(q, mu):
    """Check strong anti-monotonicity of the linear map ``q`` at modulus ``mu``.

    Returns (holds, certificate).  For a linear graph the defining
    inequality over all graph pairs reduces to the matrix inequality
    sym(Q) + mu (I + Q^T Q) <= 0, checked by its largest eigenvalue.
    """
    m = as_operator(q, square=True)
    mu = float(mu)
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError("mu must be positive and finite")
    n = m.shape[0]
    witness = 0.5 * (m + m.T) + mu * (np.eye(n) + m.T @ m)
    max_eig = float(np.linalg.eigvalsh(witness)[-1]) if n else 0.0
    cert = UnmonotoneCertificate(mu=mu, max_eig=max_eig, operator_norm=operator_norm(m))
    return cert.valid, cert


def modulus_from_lambda(q, lam):
    """Anti-monotonicity modulus lam / (1 + ||Q||^2) for a map satisfying
    <y, Qy> <= -lam ||y||^2.

    The hypothesis is checked spectrally (max_sym_eigenvalue(Q) <= -lam up
    to slack); PreconditionError reports the offending eigenvalue.
    """
    m = as_operator(q, square=True)
    lam = float(lam)
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError("lam must be positive and finite")
    top = max_sym_eigenvalue(m)
    if top > -lam + SPECTRAL_SLACK:
        raise PreconditionError(
            f"<y, Qy> <= -lam ||y||^2 fails: largest symmetric eigenvalue "
            f"{top:.6e} exceeds {-lam:.6e}"
        )
    return lam / (1.0 + operator_norm(m) ** 2)


class ResolventOracle:
    """Maximally monotone operator exposed through its resolvents.

    ``resolvent(lam, x)`` evaluates (I + lam M)^{-1} x for lam > 0; it is
    single valued and firmly nonexpansive.
    """

    dim = 0

    def resolvent(self, lam, x):
        raise NotImplementedError


class SubdifferentialOracle(ResolventOracle):
    """M = subdifferential of a proximable convex function."""

    def __init__(self, fn):
        if not isinstance(fn, ProxFunction):
            raise TypeError("expected a ProxFunction")
        self.fn = fn
        self.dim = fn.ambient_dim

    def resolvent(self, lam, x):
        return self.fn.prox(lam, as_vector(x, dim=self.dim))


class LinearMonotoneOracle(ResolventOracle):
    """M x = A x for a matrix with positive semidefinite symmetric part."""

    def __init__(self, matrix):
        a = as_operator(matrix, square=True)
        low = -max_sym_eigenvalue(-a)  # smallest symmetric eigenvalue
        if low < -SPECTRAL_SLACK:
            raise ValueError(
                f"matrix is not monotone: smallest symmetric eigenvalue {low:.6e}"
            )
        self.matrix = a
        self.dim = a.shape[0]

    def resolvent(self, lam, x):
        lam = float(lam)
        if lam <= 0.0:
            raise ValueError("resolvent step must be positive")
        v = as_vector(x, dim=self.dim)
        return np.linalg.solve(np.eye(self.dim) + lam * self.matrix, v)


class SubspaceRestrictedOracle(ResolventOracle):
    """M = subdifferential of (fn + indicator of a subspace), seen in the
    coordinates of an orthonormal basis of that subspace.

    Points are rank-dimensional coordinate vectors; each resolvent call
    runs ``sum_prox`` in the ambient space and maps back.
    """

    def __init__(self, fn, subspace, inner_tol=SUM_PROX_TOL, inner_max_iter=SUM_PROX_MAX_ITER):
        if not isinstance(fn, ProxFunction):
            raise TypeError("expected a ProxFunction")
        if fn.ambient_dim != subspace.ambient_dim:
            raise ValueError("function and subspace dimensions differ")
        self.fn = fn
        self.subspace = subspace
        self.inner_tol = float(inner_tol)
        self.inner_max_iter = int(inner_max_iter)
        self.dim = subspace.rank

    def resolvent(self, lam, x):
        c = as_vector(x, dim=self.dim)
        v = self.subspace.basis @ c
        try:
            z = sum_prox(self.fn, self.subspace, lam, v,
                         tol=self.inner_tol, max_iter=self.inner_max_iter)
        except ConvergenceError as err:
            raise ConvergenceError(
                f"subspace-restricted resolvent stalled at step {float(lam):.3e}: {err}",
                residual=err.residual, iterations=err.iterations,
            ) from err
        return self.subspace.basis.T @ z


def minty_point(oracle, mu):
    """The unique y with 0 in mu y + M y, namely (I + M/mu)^{-1} 0."""
    mu = float(mu)
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError("mu must be positive and finite")
    return oracle.resolvent(1.0 / mu, np.zeros(oracle.dim))


def sum_prox(fn, subspace, lam, v, tol=SUM_PROX_TOL, max_iter=SUM_PROX_MAX_ITER):
    """argmin_{z in subspace} fn(z) + ||z - v||^2 / (2 lam).

    Dykstra's scheme alternating the prox of ``lam * fn`` with the
    projection onto the subspace.  Stops when both the successive change
    of the subspace iterate and the gap between the two half-steps fall
    below ``tol``; hitting the cap (e.g. because dom fn never meets the
    subspace) raises ConvergenceError carrying the last residual.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("prox step must be positive")
    v = as_vector(v, dim=subspace.ambient_dim)
    x = v.copy()
    p = np.zeros_like(v)
    q = np.zeros_like(v)
    residual = math.inf
    for it in range(1, int(max_iter) + 1):
        y = fn.prox(lam, x + p)
        p = x + p - y
        x_next = project_onto(subspace, y + q)
        q = y + q - x_next
        residual = max(
            float(np.linalg.norm(x_next - x)),
            float(np.linalg.norm(y - x_next)),
        )
        x = x_next
        if residual <= tol:
            return x
    raise ConvergenceError(
        f"sum_prox did not converge within {max_iter} iterations "
        f"(residual {residual:.3e}); the function domain may not meet the subspace",
        residual=residual,
        iterations=int(max_iter),
    )
