"""End-to-end certification pipelines.

Each pipeline runs the hypothesis verifiers for its convergence theorem, drives
the Picard orbit, detects the limit (coordinatewise proxy), certifies the
fixed-point identity and the limit-equals-asymptotic-center identity, and
returns a machine-readable verdict:

* CERTIFIED        - every hypothesis report PASSed and every conclusion gate
                     held;
* HYPOTHESIS_FAIL  - some hypothesis report is FAIL or INCONCLUSIVE (sampled
                     hypotheses and realized-orbit conditions alike);
* NO_CONVERGENCE   - hypotheses held but no limit was detected, or a
                     conclusion gate (fixed point, center match) failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .center import CenterResult, TailWindow, asymptotic_center
from .errors import ConfigError
from .graphs import GraphSpec, chain_path, componentwise_leq, has_edge, in_reachability_class
from .maps import SelfMap
from .orbit import LIMIT_LABEL, Orbit, detect_limit, run_orbit
from .vecspace import L2, ConvexSet, NormTag, distance, row_norms
from . import verify

T35, T37, C38, S4 = "T35", "T37", "C38", "S4"

CERTIFIED = "CERTIFIED"
HYPOTHESIS_FAIL = "HYPOTHESIS_FAIL"
NO_CONVERGENCE = "NO_CONVERGENCE"

# realized-orbit condition kinds (beyond the sampled verifiers)
REACHABILITY_WITHIN_L = "ReachabilityWithinL"
ORBIT_TO_LIMIT = "OrbitToLimit"
RADIUS_GATE = "AsymptoticRadiusGate"

SCOPE_NOTES = [
    "weak convergence is operationalized as coordinatewise Cauchy convergence "
    "in the finite-dimensional truncation",
    "edge and comparability conditions that quantify over all sequences are "
    "checked on the realized orbit only",
]

# chain paths longer than this are skipped when the radius gate already failed
MAX_PATH_NODES = 10000


@dataclass
class PipelineSettings:
    iterations: int = 10000
    seed: int = 0
    samples: int = 2000
    alpha_steps: int = 10
    tol_fp: float = 1e-8
    tol_center: float = 1e-6
    tol_cauchy: float = 1e-9
    decay_tol: float = 1e-9
    detect_window: int = 50
    center_tol: float = 1e-8
    center_max_iter: int = 100000
    center_solver: str = "projected_subgradient"
    tag: NormTag = L2


@dataclass
class PipelineVerdict:
    pipeline: str
    verdict: str
    hypothesis_reports: list
    limit: np.ndarray | None = None
    fixed_point_residual: float | None = None
    center_match: float | None = None
    center_result: CenterResult | None = None
    orbit_summary: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)
    scope_notes: list = field(default_factory=lambda: list(SCOPE_NOTES))
    orbit: Orbit | None = None

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "verdict": self.verdict,
            "hypotheses": [r.to_dict() for r in self.hypothesis_reports],
            "limit": None if self.limit is None else [float(v) for v in self.limit],
            "limit_label": LIMIT_LABEL,
            "fixed_point_residual": _opt_float(self.fixed_point_residual),
            "center_match": _opt_float(self.center_match),
            "center": None if self.center_result is None else self.center_result.to_dict(),
            "orbit": self.orbit_summary,
            "gates": self.gates,
            "extras": self.extras,
            "scope_notes": self.scope_notes,
        }


def _opt_float(v):
    return None if v is None else float(v)


def _condition_report(kind: str, ok: bool, sample_count: int,
                      witness: dict | None, details: dict) -> verify.HypothesisReport:
    return verify.HypothesisReport(
        hypothesis=kind,
        verdict=verify.PASS if ok else verify.FAIL,
        sample_count=sample_count,
        seed=0,
        witness=None if ok else witness,
        details=details,
    )


def _tail_window(orbit: Orbit) -> TailWindow:
    n = orbit.n_steps
    return TailWindow(start=n // 2, end=n)


def _conclude(v: PipelineVerdict, s: PipelineSettings, T: SelfMap, K: ConvexSet,
              orbit: Orbit) -> None:
    """Shared conclusion stage: limit detection, fixed-point residual, and the
    limit-equals-center identity over the tail window."""
    v.orbit_summary = orbit.summary()
    limit = detect_limit(orbit, s.tol_cauchy, s.detect_window)
    v.gates["limit_detected"] = limit is not None
    if limit is None:
        return
    v.limit = limit
    v.fixed_point_residual = distance(T.raw_step(limit), limit, s.tag)
    v.gates["fixed_point"] = v.fixed_point_residual < s.tol_fp
    w = _tail_window(orbit)
    v.center_result = asymptotic_center(orbit.points, w, K, tol=s.center_tol,
                                        max_iter=s.center_max_iter,
                                        solver=s.center_solver, tag=s.tag)
    v.center_match = distance(limit, v.center_result.center, s.tag)
    v.gates["center_match"] = v.center_match < s.tol_center


def _finalize(v: PipelineVerdict) -> PipelineVerdict:
    if not all(r.verdict == verify.PASS for r in v.hypothesis_reports):
        v.verdict = HYPOTHESIS_FAIL
    elif not all(v.gates.values()):
        v.verdict = NO_CONVERGENCE
    else:
        v.verdict = CERTIFIED
    return v


def _tail_indices(orbit: Orbit, window: int) -> range:
    return range(max(0, orbit.points.shape[0] - window), orbit.points.shape[0])


def _tail_to_limit_report(v: PipelineVerdict, orbit: Orbit, window: int,
                          relation, note: str) -> None:
    """A-posteriori limit-compatibility condition on the realized orbit tail."""
    if v.limit is None:
        return
    bad = [n for n in _tail_indices(orbit, window) if not relation(orbit.points[n], v.limit)]
    details = {"checked": window, "note": note + "; checked on the realized orbit tail only"}
    witness = None if not bad else {"step": bad[0], "point": orbit.points[bad[0]].tolist(),
                                    "limit": v.limit.tolist()}
    v.hypothesis_reports.append(
        _condition_report(ORBIT_TO_LIMIT, not bad, window, witness, details))


def pipeline_T35(T: SelfMap, G: GraphSpec, K: ConvexSet, x0,
                 settings: PipelineSettings | None = None) -> PipelineVerdict:
    """Full-hypothesis pipeline: graph of T inside E(G), edge preservation,
    empirical Lipschitz factors, asymptotic regularity, then orbit, limit,
    fixed point, and the limit-equals-center identity."""
    s = settings or PipelineSettings()
    v = PipelineVerdict(pipeline=T35, verdict=NO_CONVERGENCE, hypothesis_reports=[])
    v.hypothesis_reports.append(verify.check_graph_of_T_in_edges(T, G, K, s.samples, s.seed))
    v.hypothesis_reports.append(verify.check_edge_preservation(T, G, K, s.samples, s.seed + 1))
    v.hypothesis_reports.append(verify.check_asymptotic_g_nonexpansive(
        T, G, K, s.alpha_steps, s.samples, s.seed + 2, s.tag))
    orbit = run_orbit(T, x0, s.iterations, s.tag, graph_id=G.describe())
    v.orbit = orbit
    v.hypothesis_reports.append(verify.check_asymptotic_regularity(
        T, x0, s.iterations, s.decay_tol, residuals=orbit.residuals, tag=s.tag))
    # consecutive iterates must themselves be edges along the realized orbit
    bad = [n for n in range(orbit.n_steps)
           if not has_edge(G, orbit.points[n], orbit.points[n + 1])]
    v.hypothesis_reports.append(_condition_report(
        verify.GRAPH_OF_T_IN_EDGES, not bad, orbit.n_steps,
        None if not bad else {"step": bad[0],
                              "displacement": float(orbit.residuals[bad[0]])},
        {"note": "consecutive iterate pairs along the realized orbit"}))
    _conclude(v, s, T, K, orbit)
    _tail_to_limit_report(v, orbit, s.detect_window,
                          lambda p, lim: has_edge(G, p, lim),
                          "orbit tail to limit must be edges")
    return _finalize(v)


def pipeline_T37(T: SelfMap, G: GraphSpec, K: ConvexSet, x0, L: int,
                 settings: PipelineSettings | None = None) -> PipelineVerdict:
    """Reachability pipeline: T(x0) within L steps of x0, every realized
    iterate within L steps of its predecessor, plus a sampled continuity
    check; conclusion stage as in the full pipeline."""
    if L < 1:
        raise ValueError("L must be >= 1")
    s = settings or PipelineSettings()
    v = PipelineVerdict(pipeline=T37, verdict=NO_CONVERGENCE, hypothesis_reports=[])
    v.hypothesis_reports.append(verify.check_edge_preservation(T, G, K, s.samples, s.seed + 1))
    v.hypothesis_reports.append(verify.check_asymptotic_g_nonexpansive(
        T, G, K, s.alpha_steps, s.samples, s.seed + 2, s.tag))
    if K.is_convex:
        v.hypothesis_reports.append(verify.check_continuity(T, K, s.seed + 3, tag=s.tag))
    orbit = run_orbit(T, x0, s.iterations, s.tag, graph_id=G.describe())
    v.orbit = orbit
    v.hypothesis_reports.append(verify.check_asymptotic_regularity(
        T, x0, s.iterations, s.decay_tol, residuals=orbit.residuals, tag=s.tag))
    first_bad = None
    for n in range(orbit.n_steps):
        if not in_reachability_class(orbit.points[n], orbit.points[n + 1], G, K, L):
            first_bad = n
            break
    v.hypothesis_reports.append(_condition_report(
        REACHABILITY_WITHIN_L, first_bad is None, orbit.n_steps,
        None if first_bad is None else {
            "step": first_bad,
            "displacement": float(orbit.residuals[first_bad])},
        {"L": int(L),
         "note": "step 0 is the seed condition: T(x0) in the L-class of x0"}))
    _conclude(v, s, T, K, orbit)
    _tail_to_limit_report(v, orbit, s.detect_window,
                          lambda p, lim: has_edge(G, p, lim),
                          "orbit tail to limit must be edges")
    return _finalize(v)


def pipeline_C38(T: SelfMap, K: ConvexSet, x0,
                 settings: PipelineSettings | None = None) -> PipelineVerdict:
    """Order-graph pipeline: the reachability pipeline with L = 1 on the
    comparability graph, plus the monotone-orbit check and the realized
    tail-to-limit comparison in the direction the orbit actually runs."""
    if not T.order_monotone:
        raise ConfigError("map.kind", f"{T.kind} is not flagged order-compatible")
    s = settings or PipelineSettings()
    G = GraphSpec.order()
    v = pipeline_T37(T, G, K, x0, L=1, settings=s)
    v.pipeline = C38
    orbit = v.orbit
    mono = verify.check_order_monotone_orbit(T, x0, n_max=s.iterations,
                                             points=orbit.points)
    v.hypothesis_reports.append(mono)
    if mono.details.get("seed_direction") == "decreasing":
        relation = lambda p, lim: componentwise_leq(lim, p)
        note = "decreasing seed: orbit tail must stay above the limit (slack 1e-12)"
    else:
        relation = componentwise_leq
        note = "orbit tail must stay below the limit (slack 1e-12)"
    _tail_to_limit_report(v, orbit, s.detect_window, relation, note)
    return _finalize(v)


def pipeline_S4(T: SelfMap, K: ConvexSet, x0, eps: float,
                settings: PipelineSettings | None = None) -> PipelineVerdict:
    """Locally-nonexpansive pipeline on the proximity graph: sampled local
    nonexpansiveness, asymptotic regularity, the chain path from x0 to T(x0),
    the pushed-forward path staying an eps-chain along the orbit, and the
    asymptotic-radius gate rho < eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    s = settings or PipelineSettings()
    G = GraphSpec.proximity(eps, s.tag)
    v = PipelineVerdict(pipeline=S4, verdict=NO_CONVERGENCE, hypothesis_reports=[])
    v.hypothesis_reports.append(verify.check_locally_nonexpansive(
        T, K, eps, s.samples, s.seed + 1, tag=s.tag))
    orbit = run_orbit(T, x0, s.iterations, s.tag, graph_id=G.describe())
    v.orbit = orbit
    v.hypothesis_reports.append(verify.check_asymptotic_regularity(
        T, x0, s.iterations, s.decay_tol, residuals=orbit.residuals, tag=s.tag))
    _conclude(v, s, T, K, orbit)

    # asymptotic-radius gate: rho over the tail window must stay below eps
    if v.center_result is not None:
        rho = v.center_result.radius
    else:
        w = _tail_window(orbit)
        rho = asymptotic_center(orbit.points, w, K, tol=s.center_tol,
                                max_iter=s.center_max_iter, tag=s.tag).radius
    radius_ok = rho < eps
    v.extras["radius_gate"] = {"rho": float(rho), "eps": float(eps)}
    v.hypothesis_reports.append(_condition_report(
        RADIUS_GATE, radius_ok, orbit.n_steps,
        None if radius_ok else {"rho": float(rho), "eps": float(eps)},
        {"rho": float(rho), "eps": float(eps)}))

    # chain path from x0 to T(x0) and its pushed-forward levels
    path = chain_path(x0, orbit.points[1], K, G)
    seg = path.segment_lengths(s.tag)
    v.extras["chain_path"] = {"L": int(path.L),
                              "max_segment": float(seg.max()),
                              "eps": float(eps)}
    if path.L + 1 > MAX_PATH_NODES and not radius_ok:
        v.hypothesis_reports.append(_condition_report(
            REACHABILITY_WITHIN_L, False, 0,
            {"L": int(path.L), "note": "path too long; radius gate already failed"},
            {"skipped": True}))
    else:
        nodes = path.nodes.copy()
        first_bad_level = None
        for n in range(1, orbit.n_steps + 1):
            nodes = T.raw_step(nodes)
            lengths = row_norms(nodes[1:] - nodes[:-1], s.tag)
            if float(lengths.max()) >= eps:
                first_bad_level = n
                break
        v.hypothesis_reports.append(_condition_report(
            REACHABILITY_WITHIN_L, first_bad_level is None, orbit.n_steps,
            None if first_bad_level is None else {"level": first_bad_level},
            {"L": int(path.L),
             "note": "pushed chain path must stay an eps-chain at every level"}))
    _tail_to_limit_report(v, orbit, s.detect_window,
                          lambda p, lim: distance(p, lim, s.tag) < eps,
                          "orbit tail must lie within eps of the limit")
    return _finalize(v)
