"""Picard-iteration driver and convergence detection.

The orbit stores every iterate and the residual trace g_n = ||x_n - x_{n+1}||.
Convergence is detected as a coordinatewise-Cauchy condition on the last
window of iterates, which in the finite-dimensional truncation stands in for
weak convergence; reports label it accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .maps import SelfMap
from .vecspace import L2, NormTag, row_norms, vector

LIMIT_LABEL = "weak-limit proxy (coordinatewise)"


@dataclass
class Orbit:
    x0: np.ndarray
    points: np.ndarray      # (N+1, d), points[n] = T^n(x0)
    residuals: np.ndarray   # (N,), g_n = ||x_n - x_{n+1}||
    map_id: dict = field(default_factory=dict)
    graph_id: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return self.points.shape[0] - 1

    def summary(self) -> dict:
        return {
            "steps": int(self.n_steps),
            "final_residual": float(self.residuals[-1]) if self.residuals.size else 0.0,
            "max_displacement": float(self.residuals.max()) if self.residuals.size else 0.0,
        }


def run_orbit(T: SelfMap, x0, N: int, tag: NormTag = L2,
              graph_id: dict | None = None) -> Orbit:
    """The exact orbit x0, T x0, ..., T^N x0 with its residual trace."""
    x0 = vector(x0)
    if N < 1:
        raise ValueError("N must be a positive integer")
    T.check_budget(x0, N)
    # route the first step through apply so the domain precondition is enforced
    points = np.empty((N + 1, x0.size))
    points[0] = x0
    points[1] = T.apply(x0)
    for n in range(1, N):
        points[n + 1] = T.raw_step(points[n])
    residuals = row_norms(points[:-1] - points[1:], tag)
    return Orbit(x0=x0, points=points, residuals=residuals,
                 map_id=T.describe(), graph_id=graph_id or {})


def detect_limit(orbit: Orbit, tol_cauchy: float = 1e-9, window: int = 50):
    """Return the final iterate when the last `window` iterates are mutually
    within tol_cauchy (max pairwise distance), else None."""
    n_pts = orbit.points.shape[0]
    if n_pts <= 2 * window:
        raise ValueError(f"orbit length {n_pts} must exceed twice the window {window}")
    tail = orbit.points[-window:]
    spread = _max_pairwise(tail)
    if spread < tol_cauchy:
        return orbit.points[-1].copy()
    return None


def _max_pairwise(tail: np.ndarray) -> float:
    diffs = tail[:, None, :] - tail[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs)).max())
