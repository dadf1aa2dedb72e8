"""Catalog of self-maps T: K -> K with exact evaluation and n-fold iteration.

Every map evaluates vectorized over a leading batch axis. `apply` checks the
domain precondition for a single point; `iterate` checks the starting point
and the truncation budget, then applies the raw update, so iterates are exact
relative to the untruncated map whenever the budget admits them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomainError, TruncationBudgetError
from .vecspace import TOL_SET, ConvexSet, vector

# sentinel for maps whose fixed-point set is the whole domain
ALL_POINTS = "all"

_CHECK_SEED = 901731  # seed of the construction-time K -> K sampling check
_CHECK_SAMPLES = 1000


@dataclass
class AlphaSequence:
    """Per-step Lipschitz factors alpha_1..alpha_N with the limit they are
    claimed to approach (1 under the majorant reading)."""

    values: np.ndarray
    claimed_limit: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("alpha sequence must be a non-empty 1-D array")
        if np.any(self.values <= 0) or self.claimed_limit <= 0:
            raise ValueError("alpha values and claimed limit must be positive")

    def to_dict(self) -> dict:
        return {"values": [float(v) for v in self.values],
                "claimed_limit": float(self.claimed_limit)}


class SelfMap:
    """Base class; subclasses implement the raw vectorized update."""

    kind = "abstract"
    order_monotone = False

    def __init__(self, domain: ConvexSet, check_invariance: bool = True):
        self.domain = domain
        if check_invariance:
            self._check_maps_into_domain()

    # raw update, no domain check, vectorized over a leading axis
    def raw_step(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, x) -> np.ndarray:
        x = vector(x)
        if not self.domain.contains(x, TOL_SET):
            raise OutOfDomainError(
                f"point outside the domain of {self.kind} (distance {self.domain.distance_to(x):.3e})",
                distance=self.domain.distance_to(x))
        return self.raw_step(x)

    def iterate(self, x0, n: int) -> np.ndarray:
        """Exact n-fold application; iterate(x, 0) = x."""
        x0 = vector(x0)
        if n < 0:
            raise ValueError("n must be nonnegative")
        if not self.domain.contains(x0, TOL_SET):
            raise OutOfDomainError(
                f"starting point outside the domain (distance {self.domain.distance_to(x0):.3e})",
                distance=self.domain.distance_to(x0))
        self.check_budget(x0, n)
        x = x0
        for _ in range(n):
            x = self.raw_step(x)
        return x

    def iteration_budget(self, x0) -> int | None:
        """Max n for which iterates stay exact; None means unlimited."""
        return None

    def check_budget(self, x0, n: int) -> None:
        budget = self.iteration_budget(x0)
        if budget is not None and n > budget:
            raise TruncationBudgetError(
                f"{n} iterations exceed the truncation budget {budget} for this start "
                f"(nonzero coordinates would be dropped)")

    def support_dim_for(self, n: int) -> int | None:
        """Largest support a start may have so that n iterations stay exact."""
        return None

    def fixed_points(self):
        """Analytically known fixed points, or ALL_POINTS."""
        return []

    def describe(self) -> dict:
        return {"kind": self.kind}

    def _check_maps_into_domain(self):
        rng = np.random.default_rng(_CHECK_SEED)
        pts = self.domain.sample(rng, _CHECK_SAMPLES)
        img = self.raw_step(pts)
        ok = self.domain.contains_rows(img, TOL_SET)
        if not np.all(ok):
            bad = int(np.argmin(ok))
            raise ValueError(
                f"{self.kind} does not map its domain into itself: sampled point "
                f"{pts[bad].tolist()} leaves the set by {self.domain.distance_to(img[bad]):.3e}")


def known_fixed_points(T: SelfMap):
    return T.fixed_points()


class Identity(SelfMap):
    kind = "identity"
    order_monotone = True

    def raw_step(self, x):
        return np.asarray(x, dtype=float).copy()

    def fixed_points(self):
        return ALL_POINTS


class Contraction(SelfMap):
    """x -> anchor + lam * (x - anchor), 0 < lam < 1."""

    kind = "contraction"
    order_monotone = True

    def __init__(self, lam: float, anchor, domain: ConvexSet, **kw):
        lam = float(lam)
        if not (0.0 < lam < 1.0):
            raise ValueError(f"lam must lie in (0, 1), got {lam}")
        anchor = vector(anchor)
        if anchor.size != domain.dim:
            raise ValueError("anchor dimension must match the domain")
        if not domain.contains(anchor, 1e-9):
            raise ValueError("anchor must belong to the domain")
        self.lam = lam
        self.anchor = anchor
        super().__init__(domain, **kw)

    def raw_step(self, x):
        return self.anchor + self.lam * (np.asarray(x, dtype=float) - self.anchor)

    def fixed_points(self):
        return [self.anchor.copy()]

    def describe(self):
        return {"kind": self.kind, "lam": self.lam, "anchor": self.anchor.tolist()}


class Rotation(SelfMap):
    """Plane rotation by theta on a coordinate pair; identity elsewhere.
    An isometry: asymptotically nonexpansive but not asymptotically regular."""

    kind = "rotation"

    def __init__(self, theta: float, plane, domain: ConvexSet, **kw):
        i, j = (int(plane[0]), int(plane[1]))
        if not (0 <= i < j < domain.dim):
            raise ValueError(f"plane {plane} is not a valid coordinate pair for dim {domain.dim}")
        self.theta = float(theta)
        self.plane = (i, j)
        self._c = float(np.cos(self.theta))
        self._s = float(np.sin(self.theta))
        super().__init__(domain, **kw)

    def raw_step(self, x):
        x = np.asarray(x, dtype=float)
        out = x.copy()
        i, j = self.plane
        out[..., i] = self._c * x[..., i] - self._s * x[..., j]
        out[..., j] = self._s * x[..., i] + self._c * x[..., j]
        return out

    def fixed_points(self):
        z = getattr(self.domain, "center", np.zeros(self.domain.dim)).copy()
        z[list(self.plane)] = 0.0
        return [z] if self.domain.contains(z, 1e-9) else []

    def describe(self):
        return {"kind": self.kind, "theta": self.theta, "plane": list(self.plane)}


class AveragedRotation(Rotation):
    """x -> (x + R x)/2: the standard asymptotically regular repair of a
    rotation; contracts the rotation plane by |1 + e^{i theta}| / 2."""

    kind = "averaged_rotation"

    def raw_step(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (x + super().raw_step(x))


class MonotoneAverage(SelfMap):
    """x -> (x + u)/2 for a fixed u in K; monotone for the componentwise order."""

    kind = "monotone_average"
    order_monotone = True

    def __init__(self, u, domain: ConvexSet, **kw):
        u = vector(u)
        if u.size != domain.dim:
            raise ValueError("u dimension must match the domain")
        if not domain.contains(u, 1e-9):
            raise ValueError("u must belong to the domain")
        self.u = u
        super().__init__(domain, **kw)

    def raw_step(self, x):
        return 0.5 * (np.asarray(x, dtype=float) + self.u)

    def fixed_points(self):
        return [self.u.copy()]

    def describe(self):
        return {"kind": self.kind, "u": self.u.tolist()}


class SquareShift(SelfMap):
    """x -> (0, x_1^2, b_2 x_2, ..., b_{d-1} x_{d-1}): squares the head and
    shifts the tail one slot with positive damping factors b_n.

    The last input coordinate is dropped by the truncation, so iterates are
    exact only while the start's support stays at least n slots away from the
    boundary; `iterate` enforces that budget.
    """

    kind = "square_shift"

    def __init__(self, damping, domain: ConvexSet, **kw):
        d = domain.dim
        if d < 3:
            raise ValueError("square_shift needs dimension >= 3")
        b = np.full(d, float(damping)) if np.isscalar(damping) else np.asarray(damping, dtype=float)
        if b.shape != (d,):
            raise ValueError(f"damping must be a scalar or a length-{d} sequence")
        if np.any(b[2:] <= 0):
            raise ValueError("damping factors must be positive")
        self.b = b.copy()
        self.b[:2] = 1.0  # slots 0 and 1 carry no damping factor
        super().__init__(domain, **kw)

    def raw_step(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[..., 1] = x[..., 0] ** 2
        out[..., 2:] = self.b[2:] * x[..., 1:-1]
        return out

    def iteration_budget(self, x0):
        x0 = np.asarray(x0, dtype=float)
        nz = np.nonzero(x0)[0]
        if nz.size == 0:
            return None  # the zero vector is fixed; iterates are exact forever
        return int(self.domain.dim - (nz[-1] + 1))

    def support_dim_for(self, n):
        return max(1, self.domain.dim - n)

    def alpha_bound(self, i: int) -> float:
        """prod_{n=2}^{i} b_n (empty product for i = 1)."""
        return float(np.prod(self.b[2:i + 1])) if i >= 2 else 1.0

    def fixed_points(self):
        return [np.zeros(self.domain.dim)]

    def describe(self):
        return {"kind": self.kind, "damping": self.b.tolist()}
