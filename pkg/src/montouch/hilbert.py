"""Dense real linear algebra: validated vectors and operators, orthonormal
subspaces, spectral quantities, and condition-gated inversion.

Everything is float64.  Vectors are plain 1-d arrays and operators plain 2-d
arrays; the validators below are the single entry point for shape and
finiteness checks.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularOperatorError

# Relative singular-value cutoff when extracting a range basis.
RANK_TOL = 1e-10
# sigma_min / sigma_max at or below this is treated as singular.
COND_TOL = 1e-12
# Orthonormality defect allowed in a stored basis.
ORTHO_TOL = 1e-12


def as_vector(x, dim=None):
    """Coerce to a finite 1-d float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


def as_operator(a, square=False):
    """Coerce to a finite 2-d float array, optionally requiring squareness."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d operator, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator entries must be finite")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square operator, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class Subspace:
    """A linear subspace stored as an orthonormal column basis.

    ``basis`` has shape (ambient_dim, rank); rank 0 (the trivial subspace)
    is allowed, in which case the basis has zero columns.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = as_operator(self.basis)
        object.__setattr__(self, "basis", b)
        gram = b.T @ b
        defect = np.abs(gram - np.eye(b.shape[1]))
        if defect.size and defect.max() > ORTHO_TOL:
            raise ValueError(
                f"basis columns are not orthonormal (defect {defect.max():.3e})"
            )

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]


def orthonormal_range(a, rank_tol=RANK_TOL):
    """Orthonormal basis of the range of ``a`` via SVD.

    Singular directions with singular value <= rank_tol * sigma_max are
    discarded, so a zero operator yields the trivial subspace.
    """
    m = as_operator(a)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace(np.zeros((m.shape[0], 0)))
    keep = s > rank_tol * s[0]
    return Subspace(u[:, keep])


def project_onto(subspace, x):
    """Orthogonal projection of ``x`` onto ``subspace``."""
    v = as_vector(x, dim=subspace.ambient_dim)
    b = subspace.basis
    return b @ (b.T @ v)


def operator_norm(a):
    """Largest singular value of ``a``."""
    m = as_operator(a)
    if min(m.shape) == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def max_sym_eigenvalue(a):
    """Largest eigenvalue of the symmetric part (A + A^T) / 2."""
    m = as_operator(a, square=True)
    sym = 0.5 * (m + m.T)
    return float(np.linalg.eigvalsh(sym)[-1])


def invert(a, cond_tol=COND_TOL):
    """Inverse of a square operator, guarded by a singular-value ratio gate.

    Raises SingularOperatorError when sigma_min / sigma_max <= cond_tol,
    reporting the offending ratio.
    """
    m = as_operator(a, square=True)
    if m.shape[0] == 0:
        return m.copy()
    s = np.linalg.svd(m, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0.0 else 0.0
    if ratio <= cond_tol:
        raise SingularOperatorError(
            f"operator is numerically singular: sigma_min/sigma_max = {ratio:.3e}"
            f" <= {cond_tol:.1e}"
        )
    return np.linalg.inv(m)
