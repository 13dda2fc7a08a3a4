"""Convex sets with exact nearest-point maps, and proximable convex
functions built from them.

Sets: ball, box (bounds may be infinite), halfspace, affine set, singleton.
Functions: indicator, support function, weighted squared norm, and separable
sums over consecutive coordinate blocks.  Extended values use ``math.inf``;
a support function of an unbounded set really returns +inf off its domain.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import Subspace, as_vector, project_onto

# Distance tolerance for indicator evaluation / membership checks.
MEMBERSHIP_TOL = 1e-9
# Relative tolerance deciding whether a direction is support-admissible
# for an unbounded set (halfspace ray, affine orthogonal complement).
DIRECTION_TOL = 1e-9


class ConvexSet:
    """Nonempty closed convex subset of R^n with an exact projection."""

    ambient_dim = 0

    def project(self, x):
        """Nearest point of the set to ``x``."""
        raise NotImplementedError

    def support(self, u):
        """Support value sup { <c, u> : c in the set }; may be +inf."""
        raise NotImplementedError

    def contains(self, x, tol=MEMBERSHIP_TOL):
        """Membership up to Euclidean distance ``tol``."""
        v = as_vector(x, dim=self.ambient_dim)
        return float(np.linalg.norm(v - self.project(v))) <= tol


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Closed Euclidean ball; radius 0 degenerates to a point."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        r = float(self.radius)
        if not (r >= 0.0 and math.isfinite(r)):
            raise ValueError("radius must be finite and nonnegative")
        object.__setattr__(self, "radius", r)

    @property
    def ambient_dim(self):
        return self.center.shape[0]

    def project(self, x):
        v = as_vector(x, dim=self.ambient_dim)
        gap = v - self.center
        dist = float(np.linalg.norm(gap))
        if dist <= self.radius:
            return v
        return self.center + (self.radius / dist) * gap

    def support(self, u):
        w = as_vector(u, dim=self.ambient_dim)
        return float(self.center @ w) + self.radius * float(np.linalg.norm(w))


@dataclass(frozen=True)
class Box(ConvexSet):
    """Axis-aligned box; individual bounds may be -inf or +inf."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or hi.shape != lo.shape:
            raise ValueError("bounds must be 1-d arrays of equal length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("bounds must not be NaN")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def ambient_dim(self):
        return self.lower.shape[0]

    def project(self, x):
        v = as_vector(x, dim=self.ambient_dim)
        return np.clip(v, self.lower, self.upper)

    def support(self, u):
        w = as_vector(u, dim=self.ambient_dim)
        total = 0.0
        for wi, lo, hi in zip(w, self.lower, self.upper):
            if wi > 0.0:
                total += wi * hi
            elif wi < 0.0:
                total += wi * lo
            # wi == 0 contributes nothing even against an infinite bound
            if total == math.inf:
                return math.inf
        return float(total)


@dataclass(frozen=True)
class Halfspace(ConvexSet):
    """{ x : <normal, x> <= offset } with a nonzero normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if float(np.linalg.norm(n)) == 0.0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def ambient_dim(self):
        return self.normal.shape[0]

    def project(self, x):
        v = as_vector(x, dim=self.ambient_dim)
        slack = float(self.normal @ v) - self.offset
        if slack <= 0.0:
            return v
        return v - (slack / float(self.normal @ self.normal)) * self.normal

    def support(self, u):
        # Finite only along the outward normal ray u = t * normal, t >= 0.
        w = as_vector(u, dim=self.ambient_dim)
        nn = float(self.normal @ self.normal)
        t = float(self.normal @ w) / nn
        resid = w - t * self.normal
        scale = max(1.0, float(np.linalg.norm(w)))
        if float(np.linalg.norm(resid)) > DIRECTION_TOL * scale:
            return math.inf
        if t < -DIRECTION_TOL * scale:
            return math.inf
        return max(t, 0.0) * self.offset


@dataclass(frozen=True)
class AffineSet(ConvexSet):
    """basepoint + span(directions); rank 0 gives a single point."""

    basepoint: np.ndarray
    directions: Subspace

    def __post_init__(self):
        p = as_vector(self.basepoint)
        if self.directions.ambient_dim != p.shape[0]:
            raise ValueError("directions do not match the basepoint dimension")
        object.__setattr__(self, "basepoint", p)

    @property
    def ambient_dim(self):
        return self.basepoint.shape[0]

    def project(self, x):
        v = as_vector(x, dim=self.ambient_dim)
        return self.basepoint + project_onto(self.directions, v - self.basepoint)

    def support(self, u):
        # Finite only for u orthogonal to every direction.
        w = as_vector(u, dim=self.ambient_dim)
        scale = max(1.0, float(np.linalg.norm(w)))
        tangential = self.directions.basis.T @ w
        if tangential.size and float(np.linalg.norm(tangential)) > DIRECTION_TOL * scale:
            return math.inf
        return float(self.basepoint @ w)


@dataclass(frozen=True)
class Singleton(ConvexSet):
    """A single point."""

    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vector(self.point))

    @property
    def ambient_dim(self):
        return self.point.shape[0]

    def project(self, x):
        as_vector(x, dim=self.ambient_dim)
        return self.point.copy()

    def support(self, u):
        w = as_vector(u, dim=self.ambient_dim)
        return float(self.point @ w)


def _check_step(lam):
    lam = float(lam)
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError("prox step must be positive and finite")
    return lam


class ProxFunction:
    """Proper closed convex function with an exact prox and conjugate.

    ``value`` may return +inf.  ``prox(lam, x)`` is
    argmin_z f(z) + ||z - x||^2 / (2 lam).
    """

    ambient_dim = 0

    def value(self, x):
        raise NotImplementedError

    def prox(self, lam, x):
        raise NotImplementedError

    def conjugate(self):
        """The Fenchel conjugate, again as a ProxFunction."""
        raise NotImplementedError

    def conjugate_value(self, u):
        """f*(u) = sup_x <x, u> - f(x)."""
        return self.conjugate().value(u)


@dataclass(frozen=True)
class Indicator(ProxFunction):
    """0 on the set (membership tolerance 1e-9), +inf elsewhere."""

    set: ConvexSet

    @property
    def ambient_dim(self):
        return self.set.ambient_dim

    def value(self, x):
        return 0.0 if self.set.contains(x, MEMBERSHIP_TOL) else math.inf

    def prox(self, lam, x):
        _check_step(lam)
        # projection, independent of the step
        return self.set.project(as_vector(x, dim=self.ambient_dim))

    def conjugate(self):
        return Support(self.set)


@dataclass(frozen=True)
class Support(ProxFunction):
    """Support function of a set; prox by Moreau decomposition."""

    set: ConvexSet

    @property
    def ambient_dim(self):
        return self.set.ambient_dim

    def value(self, x):
        return self.set.support(as_vector(x, dim=self.ambient_dim))

    def prox(self, lam, x):
        lam = _check_step(lam)
        v = as_vector(x, dim=self.ambient_dim)
        return v - lam * self.set.project(v / lam)

    def conjugate(self):
        return Indicator(self.set)


@dataclass(frozen=True)
class ScaledSquare(ProxFunction):
    """f(x) = (weight / 2) ||x||^2 with weight > 0."""

    weight: float
    dim: int

    def __post_init__(self):
        w = float(self.weight)
        if not (w > 0.0 and math.isfinite(w)):
            raise ValueError("weight must be positive and finite")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def ambient_dim(self):
        return self.dim

    def value(self, x):
        v = as_vector(x, dim=self.dim)
        return 0.5 * self.weight * float(v @ v)

    def prox(self, lam, x):
        lam = _check_step(lam)
        v = as_vector(x, dim=self.dim)
        return v / (1.0 + lam * self.weight)

    def conjugate(self):
        return ScaledSquare(1.0 / self.weight, self.dim)


@dataclass(frozen=True)
class SeparableSum(ProxFunction):
    """f(x) = sum_i f_i(x_i) over consecutive coordinate blocks."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("separable sum needs at least one part")
        object.__setattr__(self, "parts", parts)
        ends = np.cumsum([p.ambient_dim for p in parts])
        object.__setattr__(self, "_ends", ends)

    _ends: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    @property
    def ambient_dim(self):
        return int(self._ends[-1])

    def _blocks(self, v):
        start = 0
        for part, end in zip(self.parts, self._ends):
            yield part, v[start:end]
            start = int(end)

    def value(self, x):
        v = as_vector(x, dim=self.ambient_dim)
        total = 0.0
        for part, block in self._blocks(v):
            total += part.value(block)
            if total == math.inf:
                return math.inf
        return total

    def prox(self, lam, x):
        lam = _check_step(lam)
        v = as_vector(x, dim=self.ambient_dim)
        return np.concatenate([part.prox(lam, block) for part, block in self._blocks(v)])

    def conjugate(self):
        return SeparableSum(tuple(p.conjugate() for p in self.parts))
