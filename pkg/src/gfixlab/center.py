"""Asymptotic radius and center of a sequence over a tail window.

The limsup functional r(y) = limsup_n ||x_n - y|| is approximated by the max
over a finite tail window; its minimizer over a convex K is computed by three
independent routes:

* projected subgradient (primary): unit subgradient of the max-distance
  objective, Polyak-style steps off the best known upper bound with a
  c/sqrt(k) fallback, followed by a deterministic smoothed-minimax polish;
* core-set miniball (cross-check, p = 2): farthest-point stepping followed by
  the core-set loop with an exact small-ball solve;
* grid oracle (2-D test route): coarse grid, Nelder-Mead, and active-pair
  bisector line searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import EmptyWindowError, UnsupportedSetError
from .vecspace import L2, ConvexSet, NormTag, row_norms, vector

SOLVERS = ("projected_subgradient", "coreset_meb", "grid_oracle")


@dataclass(frozen=True)
class TailWindow:
    """Use iterates x_start .. x_end (inclusive) as the limsup surrogate."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise EmptyWindowError(f"need 0 <= start < end, got [{self.start}, {self.end}]")
        if self.end - self.start < 8:
            raise EmptyWindowError("tail window must span at least 8 steps")

    def describe(self) -> dict:
        return {"start": self.start, "end": self.end}


def window_points(seq, w: TailWindow) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(seq, dtype=float))
    if w.end >= pts.shape[0]:
        raise EmptyWindowError(f"window end {w.end} exceeds sequence length {pts.shape[0]}")
    return pts[w.start:w.end + 1]


def radius_at(seq, w: TailWindow, y, tag: NormTag = L2) -> float:
    """max_{n in window} ||x_n - y||, the finite surrogate of limsup."""
    pts = window_points(seq, w)
    return float(row_norms(pts - vector(y), tag).max())


@dataclass
class CenterResult:
    center: np.ndarray
    radius: float
    solver: str
    iterations: int
    window: TailWindow
    residual: float  # probe-certificate gap: best improvement a tol-step finds
    trace: list = field(default_factory=list)  # (iteration, value, best_value)

    def to_dict(self) -> dict:
        return {
            "center": [float(v) for v in self.center],
            "radius": float(self.radius),
            "solver": self.solver,
            "iterations": int(self.iterations),
            "window": self.window.describe(),
            "residual": float(self.residual),
        }


def _fmax(pts: np.ndarray, y: np.ndarray, tag: NormTag):
    dists = row_norms(pts - y, tag)
    i = int(np.argmax(dists))  # argmax takes the lowest attaining index
    return float(dists[i]), i


def _unit_subgradient(pts, y, i, dist, tag: NormTag):
    v = y - pts[i]
    if tag.p == 2.0:
        return v / max(dist, 1e-300)
    # gradient of the p-norm at v, which has dual-norm 1
    a = np.abs(v)
    return np.sign(v) * (a / max(dist, 1e-300)) ** (tag.p - 1.0)


def _polish_smoothed(pts: np.ndarray, y0: np.ndarray) -> np.ndarray:
    """Minimize softmax_beta of squared distances with L-BFGS, beta ladder."""
    y = y0.copy()
    for beta in (1e2, 1e4, 1e6, 1e8, 1e10):
        def value_grad(z, beta=beta):
            diff = z - pts
            d2 = np.einsum("ij,ij->i", diff, diff)
            m = d2.max()
            wts = np.exp(beta * (d2 - m))
            s = wts.sum()
            val = m + math.log(s) / beta
            grad = 2.0 * (wts @ diff) / s
            return val, grad

        res = minimize(value_grad, y, jac=True, method="L-BFGS-B",
                       options={"maxiter": 200, "ftol": 1e-18, "gtol": 1e-14})
        y = res.x
    return y


def solve_projected_subgradient(pts, K: ConvexSet, tol: float = 1e-8,
                                max_iter: int = 100000, tag: NormTag = L2,
                                trace_stride: int | None = None):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    y = K.project(pts.mean(axis=0))
    F, i = _fmax(pts, y, tag)
    y_best, F_best = y.copy(), F
    delta = max(F / 2.0, tol)
    c = K.bound
    stall = 0
    stride = trace_stride if trace_stride else max(1, max_iter // 2000)
    trace = [(0, F, F_best)]
    k = 0
    for k in range(1, max_iter + 1):
        if F_best <= 0.0:
            break
        g = _unit_subgradient(pts, y, i, F, tag)
        step = F - (F_best - delta)
        if step <= 0.0:
            step = c / math.sqrt(k)
        y = K.project(y - step * g)
        F, i = _fmax(pts, y, tag)
        if F < F_best:
            improvement = F_best - F
            F_best, y_best = F, y.copy()
        else:
            improvement = 0.0
        if k % stride == 0:
            trace.append((k, F, F_best))
        if improvement >= tol:
            stall = 0
            continue
        stall += 1
        if stall % 10 == 0:
            delta = max(delta / 2.0, tol / 10.0)
        if stall >= 50:
            break
    if tag.p == 2.0 and pts.shape[0] > 1:
        polished = K.project(_polish_smoothed(pts, y_best))
        Fp, _ = _fmax(pts, polished, tag)
        if Fp <= F_best:
            y_best, F_best = polished, Fp
    trace.append((k, F_best, F_best))
    return y_best, k, trace


def _exact_miniball(P: np.ndarray):
    """Exact minimum enclosing ball of a small point set by support-subset
    enumeration: circumcenters from the Gram linear system, kept when the
    center is a convex combination of the subset and the ball covers P."""
    n, d = P.shape
    best = None
    for m in range(1, min(n, d + 1) + 1):
        for idx in combinations(range(n), m):
            sub = P[list(idx)]
            x1 = sub[0]
            if m == 1:
                c, r = x1.copy(), 0.0
            else:
                V = sub[1:] - x1
                A = 2.0 * (V @ V.T)
                rhs = np.einsum("ij,ij->i", V, V)
                try:
                    wts = np.linalg.solve(A, rhs)
                except np.linalg.LinAlgError:
                    continue
                if not np.all(np.isfinite(wts)):
                    continue
                if np.linalg.norm(A @ wts - rhs) > 1e-9 * (1.0 + np.linalg.norm(rhs)):
                    continue
                lam = np.concatenate([[1.0 - wts.sum()], wts])
                if np.any(lam < -1e-9):
                    continue
                c = x1 + wts @ V
                r = float(np.linalg.norm(c - x1))
            dmax = float(np.sqrt(np.einsum("ij,ij->i", P - c, P - c)).max())
            if dmax > r * (1.0 + 1e-10) + 1e-12:
                continue
            if best is None or r < best[1] - 1e-15:
                best = (c, r)
        if best is not None:
            break  # any covering ball on fewer support points is already minimal
    return best


def solve_coreset_meb(pts, K: ConvexSet, tol: float = 1e-8, max_iter: int = 100000,
                      stepping_iters: int = 200):
    """Farthest-point stepping y <- y + (far - y)/(k+1), then the core-set loop
    with the exact small-ball solve. Euclidean geometry only."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    y = pts[0].copy()
    trace = []
    iters = 0
    for k in range(1, min(stepping_iters, max_iter) + 1):
        F, f = _fmax(pts, y, L2)
        trace.append((k, F, F))
        y = y + (pts[f] - y) / (k + 1.0)
        iters = k
    _, f0 = _fmax(pts, y, L2)
    S = [f0]
    _, f1 = _fmax(pts, pts[f0], L2)
    if f1 != f0:
        S.append(f1)
    c, r = pts[S[0]].copy(), 0.0
    for _ in range(64):
        sol = _exact_miniball(pts[S])
        if sol is None:
            break
        c, r = sol
        iters += 1
        dists = np.sqrt(np.einsum("ij,ij->i", pts - c, pts - c))
        f = int(np.argmax(dists))
        trace.append((iters, float(dists[f]), r))
        if dists[f] <= r * (1.0 + 1e-12) + 1e-14 or f in S:
            break
        S.append(f)
    y = K.project(c)
    return y, iters, trace


def _golden_section(f, lo, hi, tol=1e-13, iters=300):
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - gr * (hi - lo), lo + gr * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if hi - lo < tol:
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - gr * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + gr * (hi - lo)
            fd = f(d)
    return (lo + hi) / 2.0


def solve_grid_oracle(pts, K: ConvexSet, tol: float = 1e-8, max_iter: int = 100000,
                      coarse: float = 0.05):
    """2-D oracle: exhaustive coarse grid over K, Nelder-Mead, then exact line
    minimizations along bisectors of the most distant point pairs."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != 2:
        raise UnsupportedSetError("the grid oracle handles 2-D instances only")

    def F(y):
        return float(np.sqrt(np.einsum("ij,ij->i", pts - y, pts - y)).max())

    if hasattr(K, "center"):
        origin = K.center
    elif hasattr(K, "lo"):
        origin = (K.lo + K.hi) / 2.0
    else:
        origin = pts.mean(axis=0)
    half = K.bound / 2.0
    axis = np.arange(-half, half + coarse / 2.0, coarse)
    evals = 0
    y, best_val = None, np.inf
    # evaluate the grid in row chunks so fine resolutions stay in memory
    for lo_idx in range(0, axis.size, max(1, 2_000_000 // max(1, axis.size))):
        rows = axis[lo_idx:lo_idx + max(1, 2_000_000 // max(1, axis.size))]
        gx, gy = np.meshgrid(axis, rows)
        chunk = np.stack([gx.ravel(), gy.ravel()], axis=1) + origin
        chunk = chunk[K.contains_rows(chunk, 1e-9)]
        if chunk.size == 0:
            continue
        evals += len(chunk)
        diffs = chunk[:, None, :] - pts[None, :, :]
        vals = np.sqrt(np.einsum("ijk,ijk->ij", diffs, diffs)).max(axis=1)
        b = int(np.argmin(vals))
        if vals[b] < best_val:
            best_val, y = float(vals[b]), chunk[b].copy()
    if y is None:  # grid coarser than K: fall back to the projected centroid
        y = K.project(pts.mean(axis=0))
        best_val = F(y)
    res = minimize(F, y, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
    if res.fun <= F(y) and K.contains(res.x, 1e-9):
        y = res.x
    trace = [(0, best_val, best_val), (1, F(y), F(y))]
    for round_ in range(60):
        dists = np.sqrt(np.einsum("ij,ij->i", pts - y, pts - y))
        order = np.argsort(-dists, kind="stable")[: min(5, len(pts))]
        best_y, best_f = y, F(y)
        for i, j in combinations(order, 2):
            e = pts[j] - pts[i]
            ne = float(np.linalg.norm(e))
            if ne < 1e-14:
                continue
            e = e / ne
            t = float(np.dot(pts[j] - pts[i], (pts[i] + pts[j]) / 2.0 - y)) / ne
            y_mid = y + t * e
            u = np.array([-e[1], e[0]])
            s = _golden_section(lambda s: F(y_mid + s * u), -K.bound, K.bound)
            cand = y_mid + s * u
            if K.contains(cand, 1e-9):
                fc = F(cand)
                if fc < best_f:
                    best_y, best_f = cand, fc
        trace.append((2 + round_, best_f, best_f))
        if best_f < F(y) - 1e-16:
            y = best_y
        else:
            break
    return K.project(y), evals, trace


def probe_gap(pts, y, tol: float, tag: NormTag = L2) -> float:
    """Largest objective reduction a coordinate-axis step of size tol finds
    (the optimality certificate; 0 when no probe improves)."""
    base, _ = _fmax(pts, y, tag)
    gap = 0.0
    for i in range(y.size):
        for sgn in (1.0, -1.0):
            z = y.copy()
            z[i] += sgn * tol
            val, _ = _fmax(pts, z, tag)
            gap = max(gap, base - val)
    return gap


def asymptotic_center(seq, w: TailWindow, K: ConvexSet, tol: float = 1e-8,
                      max_iter: int = 100000, solver: str = "projected_subgradient",
                      tag: NormTag = L2) -> CenterResult:
    """Minimize y -> max_{n in window} ||x_n - y|| over the convex set K."""
    if not K.is_convex:
        raise UnsupportedSetError("asymptotic centers are computed over convex sets only")
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
    pts = window_points(seq, w)
    if solver == "projected_subgradient":
        y, iters, trace = solve_projected_subgradient(pts, K, tol, max_iter, tag)
    elif solver == "coreset_meb":
        if tag.p != 2.0:
            raise UnsupportedSetError("the core-set solver is Euclidean (p = 2) only")
        y, iters, trace = solve_coreset_meb(pts, K, tol, max_iter)
    else:
        if tag.p != 2.0:
            raise UnsupportedSetError("the grid oracle is Euclidean (p = 2) only")
        y, iters, trace = solve_grid_oracle(pts, K, tol, max_iter)
    radius = radius_at(seq, w, y, tag)
    return CenterResult(center=y, radius=radius, solver=solver, iterations=iters,
                        window=w, residual=probe_gap(pts, y, tol, tag), trace=trace)


def minimizing_sequence_check(seq, w: TailWindow, K: ConvexSet, perturbation_scales,
                              seed: int = 0, result: CenterResult | None = None,
                              tag: NormTag = L2) -> dict:
    """Perturb the center by shrinking scales and record how the radius and the
    distance to the center decay (z_k = project(z + delta_k u_k, K))."""
    if result is None:
        result = asymptotic_center(seq, w, K, tag=tag)
    z, rho = result.center, result.radius
    rng = np.random.default_rng(seed)
    scales = [float(s) for s in perturbation_scales]
    r_values, dist_values = [], []
    for delta in scales:
        u = rng.standard_normal(z.size)
        nu = float(np.linalg.norm(u))
        u = u / nu if nu > 0 else u
        zk = K.project(z + delta * u)
        r_values.append(radius_at(seq, w, zk, tag))
        dist_values.append(float(np.linalg.norm(zk - z)))
    gaps = [r - rho for r in r_values]
    return {
        "scales": scales,
        "radius": rho,
        "r_values": r_values,
        "r_gaps": gaps,
        "dist_values": dist_values,
        "bound_ok": all(g <= s + 1e-12 for g, s in zip(gaps, scales))
        and all(dv <= s + 1e-12 for dv, s in zip(dist_values, scales)),
        "r_gaps_decreasing": all(a > b for a, b in zip(gaps[:-1], gaps[1:])),
        "dists_decreasing": all(a > b for a, b in zip(dist_values[:-1], dist_values[1:])),
    }
