"""Finite-dimensional model of the ambient space.

Vectors are plain float64 numpy arrays of a fixed dimension d (a truncation of
the sequence space they stand in for). This module provides the l_p norms, the
feasible-set shapes used by the map catalog (with membership, Euclidean
projection, and seeded sampling), and a numerical estimator for the modulus of
convexity of the chosen norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatchError, UnsupportedSetError

# membership decisions are exact up to this tolerance
TOL_SET = 1e-12


def vector(coords) -> np.ndarray:
    """Validate and return a finite 1-D float64 vector."""
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"expected a non-empty 1-D coordinate list, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("coordinates must be finite (no NaN/inf)")
    return x


def check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")


@dataclass(frozen=True)
class NormTag:
    """Selects the l_p norm; uniform convexity needs 1 < p < inf."""

    p: float = 2.0

    def __post_init__(self):
        if not (1.0 < self.p < np.inf):
            raise ValueError(f"p must lie strictly between 1 and infinity, got {self.p}")


L2 = NormTag(2.0)


def norm(x: np.ndarray, tag: NormTag = L2) -> float:
    """(sum |x_i|^p)^(1/p); zero exactly when x = 0."""
    x = np.asarray(x, dtype=float)
    if tag.p == 2.0:
        return float(np.sqrt(np.dot(x, x)))
    return float((np.abs(x) ** tag.p).sum() ** (1.0 / tag.p))


def distance(x: np.ndarray, y: np.ndarray, tag: NormTag = L2) -> float:
    check_same_dim(np.asarray(x), np.asarray(y))
    return norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), tag)


def row_norms(X: np.ndarray, tag: NormTag = L2) -> np.ndarray:
    """Norms of the rows of an (n, d) array."""
    X = np.asarray(X, dtype=float)
    if tag.p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", X, X))
    return (np.abs(X) ** tag.p).sum(axis=1) ** (1.0 / tag.p)


class ConvexSet:
    """Base feasible-set shape. Instances are immutable and shareable."""

    kind = "abstract"
    is_convex = True

    def __init__(self, dim: int, bound: float):
        self.dim = int(dim)
        self.bound = float(bound)  # upper bound on diam(K)

    def contains(self, x, tol: float = TOL_SET) -> bool:
        return bool(self.distance_to(x) <= tol)

    def contains_rows(self, X, tol: float = TOL_SET) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.array([self.contains(row, tol) for row in X])

    def distance_to(self, x) -> float:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int, support_dim: int | None = None) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


class Ball(ConvexSet):
    kind = "ball"

    def __init__(self, center, radius):
        center = vector(center)
        radius = float(radius)
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        super().__init__(center.size, 2.0 * radius)
        self.center = center
        self.radius = radius

    def distance_to(self, x):
        x = vector(x)
        check_same_dim(x, self.center)
        return max(0.0, float(np.linalg.norm(x - self.center)) - self.radius)

    def contains_rows(self, X, tol=TOL_SET):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.sqrt(np.einsum("ij,ij->i", X - self.center, X - self.center)) <= self.radius + tol

    def project(self, x):
        x = vector(x)
        check_same_dim(x, self.center)
        v = x - self.center
        nv = float(np.linalg.norm(v))
        if nv <= self.radius:
            return x
        return self.center + v * (self.radius / nv)

    def sample(self, rng, n, support_dim=None):
        m = self.dim if support_dim is None else int(support_dim)
        if not (1 <= m <= self.dim):
            raise ValueError(f"support_dim must be in [1, {self.dim}], got {m}")
        if support_dim is not None and np.any(self.center[m:] != 0.0):
            raise ValueError("support-restricted sampling needs a center supported on the same coordinates")
        u = rng.standard_normal((n, m))
        u /= np.maximum(np.sqrt(np.einsum("ij,ij->i", u, u)), 1e-300)[:, None]
        rad = self.radius * rng.random(n) ** (1.0 / m)
        pts = np.zeros((n, self.dim))
        pts[:, :m] = u * rad[:, None]
        return pts + self.center

    def describe(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}


class BallPlusPoint(ConvexSet):
    """A ball together with one exterior point. Not convex; admitted only as a
    map domain, never for projection or center computation."""

    kind = "ball_plus_point"
    is_convex = False

    def __init__(self, center, radius, extra):
        ball = Ball(center, radius)
        extra = vector(extra)
        check_same_dim(extra, ball.center)
        gap = float(np.linalg.norm(extra - ball.center)) - ball.radius
        if gap <= TOL_SET:
            raise ValueError("the extra point must lie strictly outside the ball")
        super().__init__(ball.dim, max(2.0 * ball.radius, ball.radius + gap + ball.radius))
        self.ball = ball
        self.center = ball.center
        self.radius = ball.radius
        self.extra = extra

    def distance_to(self, x):
        x = vector(x)
        check_same_dim(x, self.center)
        return min(self.ball.distance_to(x), float(np.linalg.norm(x - self.extra)))

    def contains_rows(self, X, tol=TOL_SET):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        in_ball = self.ball.contains_rows(X, tol)
        at_extra = np.sqrt(np.einsum("ij,ij->i", X - self.extra, X - self.extra)) <= tol
        return in_ball | at_extra

    def project(self, x):
        raise UnsupportedSetError("projection onto a non-convex set is not supported")

    def sample(self, rng, n, support_dim=None):
        # the exterior point has measure zero; sample the ball component
        return self.ball.sample(rng, n, support_dim)

    def describe(self):
        d = self.ball.describe()
        return {"kind": self.kind, "center": d["center"], "radius": d["radius"],
                "extra": self.extra.tolist()}


class Box(ConvexSet):
    kind = "box"

    def __init__(self, lo, hi):
        lo, hi = vector(lo), vector(hi)
        check_same_dim(lo, hi)
        if np.any(lo > hi):
            raise ValueError("box needs lo <= hi componentwise")
        super().__init__(lo.size, float(np.linalg.norm(hi - lo)) or 1.0)
        self.lo = lo
        self.hi = hi

    def distance_to(self, x):
        x = vector(x)
        check_same_dim(x, self.lo)
        return float(np.linalg.norm(x - np.clip(x, self.lo, self.hi)))

    def contains_rows(self, X, tol=TOL_SET):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.all((X >= self.lo - tol) & (X <= self.hi + tol), axis=1)

    def project(self, x):
        x = vector(x)
        check_same_dim(x, self.lo)
        return np.clip(x, self.lo, self.hi)

    def sample(self, rng, n, support_dim=None):
        m = self.dim if support_dim is None else int(support_dim)
        if not (1 <= m <= self.dim):
            raise ValueError(f"support_dim must be in [1, {self.dim}], got {m}")
        if support_dim is not None and (np.any(self.lo[m:] > 0) or np.any(self.hi[m:] < 0)):
            raise ValueError("support-restricted sampling needs 0 inside the box on the trailing coordinates")
        pts = np.zeros((n, self.dim))
        pts[:, :m] = self.lo[:m] + (self.hi[:m] - self.lo[:m]) * rng.random((n, m))
        return pts

    def describe(self):
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class OrderInterval(Box):
    """The order interval [lo, hi] under the componentwise partial order."""

    kind = "order_interval"


def project(x, K: ConvexSet) -> np.ndarray:
    """Euclidean projection onto a convex K; identity on members."""
    if not K.is_convex:
        raise UnsupportedSetError(f"cannot project onto non-convex set of kind {K.kind!r}")
    return K.project(x)


def _pnorm(x, p):
    return float((np.abs(x) ** p).sum() ** (1.0 / p))


def modulus_of_convexity(eps: float, tag: NormTag = L2, samples: int = 24,
                         seed: int = 0, search_dim: int = 2) -> float:
    """Estimate delta(eps) = inf{1 - ||(a+b)/2|| : ||a||<=1, ||b||<=1, ||a-b||>=eps}.

    Seeded random starts refined by SLSQP; the returned value is an upper bound
    on the true infimum (every admissible pair gives one), clamped at 0.
    """
    if not (0.0 <= eps < 2.0):
        raise ValueError(f"eps must lie in [0, 2), got {eps}")
    if eps == 0.0:
        return 0.0
    p = tag.p
    d = int(search_dim)
    rng = np.random.default_rng(seed)

    def objective(z):
        return -_pnorm((z[:d] + z[d:]) / 2.0, p)

    constraints = [
        {"type": "ineq", "fun": lambda z: 1.0 - _pnorm(z[:d], p)},
        {"type": "ineq", "fun": lambda z: 1.0 - _pnorm(z[d:], p)},
        {"type": "ineq", "fun": lambda z: _pnorm(z[:d] - z[d:], p) - eps},
    ]

    best_mid = 0.0
    for _ in range(max(1, int(samples))):
        a = rng.standard_normal(d)
        a /= _pnorm(a, p)
        b = rng.standard_normal(d)
        b /= _pnorm(b, p)
        if _pnorm(a - b, p) < eps:
            b = -a.copy()  # always feasible: ||a - (-a)|| = 2 > eps
        # feasible start contributes to the random-search bound directly
        best_mid = max(best_mid, _pnorm((a + b) / 2.0, p))
        res = minimize(objective, np.concatenate([a, b]), method="SLSQP",
                       constraints=constraints, options={"maxiter": 200, "ftol": 1e-14})
        z = res.x
        a2, b2 = z[:d], z[d:]
        if (_pnorm(a2, p) <= 1 + 1e-9 and _pnorm(b2, p) <= 1 + 1e-9
                and _pnorm(a2 - b2, p) >= eps - 1e-9):
            best_mid = max(best_mid, _pnorm((a2 + b2) / 2.0, p))
    return max(0.0, 1.0 - best_mid)


def hilbert_modulus(eps: float) -> float:
    """Closed form 1 - sqrt(1 - eps^2/4) for p = 2 (test oracle)."""
    return 1.0 - np.sqrt(max(0.0, 1.0 - eps * eps / 4.0))
