"""Empirical certification of the hypotheses the pipelines consume.

Verifiers are samplers, not provers: PASS means no counterexample was found at
the configured sample size, FAIL always carries a reproducible witness (inputs,
measured violation, seed), and INCONCLUSIVE flags starved sampling. Identical
seed and configuration give bit-identical reports; aggregates are max/min/
first-index over a canonically ordered sample stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoValidPairsError
from .graphs import GraphSpec, componentwise_leq, has_edge
from .maps import AlphaSequence, SelfMap
from .orbit import run_orbit
from .vecspace import L2, ConvexSet, NormTag, row_norms

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"

EDGE_PRESERVATION = "EdgePreservation"
ASYMPTOTIC_G_NONEXPANSIVE = "AsymptoticGNonexpansive"
ASYMPTOTIC_REGULARITY = "AsymptoticRegularity"
GRAPH_OF_T_IN_EDGES = "GraphOfTInEdges"
CONTINUITY = "Continuity"
ORDER_MONOTONE = "OrderMonotone"
LOCALLY_NONEXPANSIVE = "LocallyNonexpansive"

# pairs closer than this are skipped in ratio estimates (0/0 noise guard)
PAIR_SKIP = 1e-9


@dataclass
class HypothesisReport:
    hypothesis: str
    verdict: str
    sample_count: int
    seed: int
    witness: dict | None = None
    empirical_alphas: AlphaSequence | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == FAIL and not self.witness:
            raise ValueError("a FAIL verdict must carry a witness")

    def to_dict(self) -> dict:
        out = {"hypothesis": self.hypothesis, "verdict": self.verdict,
               "sample_count": int(self.sample_count), "seed": int(self.seed)}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.empirical_alphas is not None:
            out["empirical_alphas"] = self.empirical_alphas.to_dict()
        if self.details:
            out["details"] = self.details
        return out


def _edge_keep(K: ConvexSet, G: GraphSpec, X, Y):
    in_k = K.contains_rows(X) & K.contains_rows(Y)
    if G.kind == "full":
        return in_k
    if G.kind == "proximity":
        return in_k & (row_norms(X - Y, G.tag) < G.eps)
    cmp = np.array([componentwise_leq(x, y) or componentwise_leq(y, x)
                    for x, y in zip(X, Y)])
    return in_k & cmp


def sample_edge_pairs(K: ConvexSet, G: GraphSpec, rng: np.random.Generator,
                      pairs: int, support_dim: int | None = None,
                      max_factor: int = 200):
    """Rejection-sample `pairs` in-K pairs that are edges of G.

    The first batch draws both endpoints independently; when the graph is too
    sparse for that to land (proximity with small eps, order graphs in high
    dimension), later batches propose the second endpoint near / above the
    first and still reject anything outside K or off the edge set. Returns
    (X, Y, attempted); callers treat a success rate below 1% as INCONCLUSIVE.

    The batch size is fixed so the accepted-pair stream is canonical: asking
    for more pairs extends the stream instead of reshuffling it, which keeps
    max-aggregates monotone in the sample count.
    """
    xs, ys = [], []
    got, attempted = 0, 0
    budget = pairs * max_factor
    batch = 2048
    first = True
    while got < pairs and attempted < budget:
        n = min(batch, budget - attempted)
        X = K.sample(rng, n, support_dim)
        if first or G.kind == "full":
            Y = K.sample(rng, n, support_dim)
        elif G.kind == "proximity":
            m = X.shape[1] if support_dim is None else support_dim
            U = np.zeros_like(X)
            U[:, :m] = rng.standard_normal((n, m))
            U /= np.maximum(np.sqrt(np.einsum("ij,ij->i", U, U)), 1e-300)[:, None]
            Y = X + U * (G.eps * rng.random(n))[:, None]
        else:
            m = X.shape[1] if support_dim is None else support_dim
            off = np.zeros_like(X)
            off[:, :m] = rng.random((n, m)) * (K.bound / (2.0 * np.sqrt(m)))
            Y = X + off
        attempted += n
        keep = _edge_keep(K, G, X, Y)
        xs.append(X[keep])
        ys.append(Y[keep])
        got += int(keep.sum())
        first = False
    X = np.concatenate(xs)[:pairs] if xs else np.empty((0, K.dim))
    Y = np.concatenate(ys)[:pairs] if ys else np.empty((0, K.dim))
    return X, Y, attempted


def check_edge_preservation(T: SelfMap, G: GraphSpec, K: ConvexSet,
                            pairs: int = 2000, seed: int = 0) -> HypothesisReport:
    """Sampled edge pairs must map to edge pairs: (T x, T y) in E(G)."""
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    rng = np.random.default_rng(seed)
    X, Y, attempted = sample_edge_pairs(K, G, rng, pairs)
    if len(X) < max(1, pairs // 100):
        return HypothesisReport(EDGE_PRESERVATION, INCONCLUSIVE, len(X), seed,
                                details={"attempted": attempted,
                                         "note": "edge-pair rejection sampling starved"})
    TX, TY = T.raw_step(X), T.raw_step(Y)
    for i in range(len(X)):
        if not has_edge(G, TX[i], TY[i]):
            witness = {"x": X[i].tolist(), "y": Y[i].tolist(),
                       "Tx": TX[i].tolist(), "Ty": TY[i].tolist()}
            if G.kind == "proximity":
                witness["measured"] = float(np.linalg.norm(TX[i] - TY[i]))
                witness["eps"] = G.eps
            return HypothesisReport(EDGE_PRESERVATION, FAIL, len(X), seed, witness=witness)
    return HypothesisReport(EDGE_PRESERVATION, PASS, len(X), seed,
                            details={"attempted": attempted})


def estimate_alpha(T: SelfMap, G: GraphSpec, K: ConvexSet, n_max: int = 10,
                   pairs: int = 2000, seed: int = 0, tag: NormTag = L2) -> AlphaSequence:
    """alpha-hat_i = max over sampled edge pairs of ||T^i x - T^i y|| / ||x - y||.

    Each alpha-hat_i is a lower bound on the best admissible Lipschitz factor.
    Pairs closer than the skip threshold are dropped.
    """
    rng = np.random.default_rng(seed)
    support = T.support_dim_for(n_max)
    X, Y, _ = sample_edge_pairs(K, G, rng, pairs, support_dim=support)
    base = row_norms(X - Y, tag)
    keep = base >= PAIR_SKIP
    X, Y, base = X[keep], Y[keep], base[keep]
    if len(X) == 0:
        raise NoValidPairsError("no usable edge pairs were sampled")
    alphas = np.empty(n_max)
    for i in range(1, n_max + 1):
        X, Y = T.raw_step(X), T.raw_step(Y)
        alphas[i - 1] = float((row_norms(X - Y, tag) / base).max())
    return AlphaSequence(values=alphas, claimed_limit=1.0)


def check_asymptotic_g_nonexpansive(T: SelfMap, G: GraphSpec, K: ConvexSet,
                                    n_max: int = 10, pairs: int = 2000,
                                    seed: int = 0, tag: NormTag = L2,
                                    tol: float = 1e-9) -> HypothesisReport:
    """PASS when the measured tail factors are consistent with a majorant
    sequence converging to 1 (alpha-hat_i <= 1 + tol on the last quarter)."""
    try:
        alphas = estimate_alpha(T, G, K, n_max, pairs, seed, tag)
    except NoValidPairsError:
        return HypothesisReport(ASYMPTOTIC_G_NONEXPANSIVE, INCONCLUSIVE, 0, seed,
                                details={"note": "no usable edge pairs"})
    vals = alphas.values
    tail = vals[-max(1, len(vals) // 4):]
    details = {
        "note": "majorant reading: the constant sequence 1 is an admissible "
                "alpha when all measured factors stay below 1 + tol",
        "max_alpha": float(vals.max()),
    }
    if np.all(tail <= 1.0 + tol):
        return HypothesisReport(ASYMPTOTIC_G_NONEXPANSIVE, PASS, pairs, seed,
                                empirical_alphas=alphas, details=details)
    bad = int(len(vals) - len(tail) + np.argmax(tail))
    witness = {"i": bad + 1, "alpha_hat": float(vals[bad]), "threshold": 1.0 + tol}
    return HypothesisReport(ASYMPTOTIC_G_NONEXPANSIVE, FAIL, pairs, seed,
                            witness=witness, empirical_alphas=alphas, details=details)


def check_asymptotic_regularity(T: SelfMap, x0, n_max: int = 1000,
                                decay_tol: float = 1e-9,
                                residuals: np.ndarray | None = None,
                                tag: NormTag = L2) -> HypothesisReport:
    """PASS when the residuals g_n = ||T^n x0 - T^{n+1} x0|| reach decay_tol in
    the last tenth; FAIL when the last half fits a positive constant floor
    (relative residual < 1%); INCONCLUSIVE otherwise."""
    if residuals is None:
        residuals = run_orbit(T, x0, n_max, tag).residuals
    g = np.asarray(residuals, dtype=float)
    last_tenth = g[-max(1, len(g) // 10):]
    details = {"n_max": int(len(g)), "decay_tol": decay_tol,
               "tail_min": float(last_tenth.min())}
    if float(last_tenth.min()) < decay_tol:
        return HypothesisReport(ASYMPTOTIC_REGULARITY, PASS, len(g), 0, details=details)
    half = g[-max(2, len(g) // 2):]
    floor = float(half.mean())
    rel_residual = float(np.linalg.norm(half - floor) / max(np.linalg.norm(half), 1e-300))
    details.update({"fitted_floor": floor, "fit_relative_residual": rel_residual})
    if rel_residual < 0.01 and floor > 10.0 * decay_tol:
        witness = {"x0": np.asarray(x0, dtype=float).tolist(), "fitted_floor": floor,
                   "fit_relative_residual": rel_residual}
        return HypothesisReport(ASYMPTOTIC_REGULARITY, FAIL, len(g), 0,
                                witness=witness, details=details)
    return HypothesisReport(ASYMPTOTIC_REGULARITY, INCONCLUSIVE, len(g), 0, details=details)


def check_graph_of_T_in_edges(T: SelfMap, G: GraphSpec, K: ConvexSet,
                              samples: int = 2000, seed: int = 0) -> HypothesisReport:
    """(x, T x) must be an edge for sampled x in K."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    X = K.sample(rng, samples)
    TX = T.raw_step(X)
    for i in range(samples):
        if not has_edge(G, X[i], TX[i]):
            witness = {"x": X[i].tolist(), "Tx": TX[i].tolist(),
                       "measured": float(np.linalg.norm(X[i] - TX[i]))}
            if G.kind == "proximity":
                witness["eps"] = G.eps
            return HypothesisReport(GRAPH_OF_T_IN_EDGES, FAIL, samples, seed, witness=witness)
    return HypothesisReport(GRAPH_OF_T_IN_EDGES, PASS, samples, seed)


def check_order_monotone_orbit(T: SelfMap, x0, cmp=None, n_max: int = 100,
                               points: np.ndarray | None = None) -> HypothesisReport:
    """The seed comparison x0 <= T(x0) must hold and propagate along the orbit.

    The report records which reading held: the seed direction persisting at
    every step, or merely comparability in either direction.
    """
    cmp = cmp if cmp is not None else componentwise_leq
    if points is None:
        points = run_orbit(T, x0, n_max).points
    up = cmp(points[0], points[1])
    down = cmp(points[1], points[0])
    if not (up or down):
        witness = {"step": 0, "x": points[0].tolist(), "Tx": points[1].tolist()}
        return HypothesisReport(ORDER_MONOTONE, FAIL, len(points) - 1, 0, witness=witness,
                                details={"note": "seed pair not comparable"})
    direction = "increasing" if up else "decreasing"
    either_ok = True
    for n in range(1, len(points) - 1):
        a, b = points[n], points[n + 1]
        step_up, step_down = cmp(a, b), cmp(b, a)
        if not (step_up or step_down):
            witness = {"step": n, "x": a.tolist(), "Tx": b.tolist()}
            return HypothesisReport(ORDER_MONOTONE, FAIL, len(points) - 1, 0, witness=witness,
                                    details={"note": "comparability lost along the orbit"})
        if direction == "increasing" and not step_up:
            either_ok = either_ok and step_down
            direction = "mixed"
        elif direction == "decreasing" and not step_down:
            either_ok = either_ok and step_up
            direction = "mixed"
    details = {"seed_direction": "increasing" if up else "decreasing",
               "reading": "seed direction persists" if direction != "mixed"
               else "comparable in either direction only"}
    if direction == "mixed":
        witness = {"note": "seed direction did not persist", "x0": points[0].tolist()}
        return HypothesisReport(ORDER_MONOTONE, FAIL, len(points) - 1, 0,
                                witness=witness, details=details)
    return HypothesisReport(ORDER_MONOTONE, PASS, len(points) - 1, 0, details=details)


def check_continuity(T: SelfMap, K: ConvexSet, seed: int = 0,
                     scales=None, pairs_per_scale: int = 200,
                     tol: float = 1e-4, tag: NormTag = L2) -> HypothesisReport:
    """Sampled continuity modulus at shrinking pair distances; PASS when the
    modulus at the smallest scale is below tol.

    Each scale re-anchors a quarter of its pairs at the previous scale's worst
    pair, so a discontinuity found at a coarse scale keeps being probed as the
    pair distance shrinks instead of being lost to thin-set sampling."""
    rng = np.random.default_rng(seed)
    scales = list(scales) if scales is not None else [K.bound * 10.0 ** (-j) for j in range(1, 7)]
    moduli = []
    worst_mid = None
    for delta in scales:
        X = K.sample(rng, pairs_per_scale)
        if worst_mid is not None and K.is_convex:
            n_zoom = max(1, pairs_per_scale // 4)
            jitter = rng.standard_normal((n_zoom, X.shape[1])) * delta
            X[:n_zoom] = np.array([K.project(worst_mid + j) for j in jitter])
        U = rng.standard_normal(X.shape)
        U /= np.maximum(np.sqrt(np.einsum("ij,ij->i", U, U)), 1e-300)[:, None]
        Y = np.array([K.project(x + delta * u) if K.is_convex else x
                      for x, u in zip(X, U)])
        gaps = row_norms(T.raw_step(X) - T.raw_step(Y), tag)
        w = int(np.argmax(gaps))
        worst_mid = (X[w] + Y[w]) / 2.0
        moduli.append(float(gaps.max()))
    details = {"scales": [float(s) for s in scales], "moduli": moduli, "tol": tol}
    if moduli[-1] <= tol:
        return HypothesisReport(CONTINUITY, PASS, pairs_per_scale * len(scales), seed,
                                details=details)
    witness = {"scale": float(scales[-1]), "modulus": moduli[-1], "tol": tol}
    return HypothesisReport(CONTINUITY, FAIL, pairs_per_scale * len(scales), seed,
                            witness=witness, details=details)


def check_locally_nonexpansive(T: SelfMap, K: ConvexSet, eps: float,
                               pairs: int = 2000, seed: int = 0,
                               slack: float = 1e-12, tag: NormTag = L2) -> HypothesisReport:
    """||T x - T y|| <= ||x - y|| for sampled pairs with ||x - y|| < eps."""
    G = GraphSpec.proximity(eps, tag)
    rng = np.random.default_rng(seed)
    X, Y, attempted = sample_edge_pairs(K, G, rng, pairs)
    if len(X) < max(1, pairs // 100):
        return HypothesisReport(LOCALLY_NONEXPANSIVE, INCONCLUSIVE, len(X), seed,
                                details={"attempted": attempted})
    base = row_norms(X - Y, tag)
    keep = base >= PAIR_SKIP
    X, Y, base = X[keep], Y[keep], base[keep]
    mapped = row_norms(T.raw_step(X) - T.raw_step(Y), tag)
    excess = mapped - base
    worst = int(np.argmax(excess))
    details = {"eps": eps, "max_excess": float(excess[worst]), "pairs": int(len(X))}
    if excess[worst] <= slack:
        return HypothesisReport(LOCALLY_NONEXPANSIVE, PASS, len(X), seed, details=details)
    witness = {"x": X[worst].tolist(), "y": Y[worst].tolist(),
               "input_distance": float(base[worst]), "output_distance": float(mapped[worst])}
    return HypothesisReport(LOCALLY_NONEXPANSIVE, FAIL, len(X), seed,
                            witness=witness, details=details)
