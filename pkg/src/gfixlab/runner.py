"""Execute a validated experiment config and assemble the run artifacts.

The report is a JSON-ready dict (schema documented in docs/report_schema.md);
orbit and center-solver traces are rendered to CSV strings here so every
client writes byte-identical artifacts. Exit codes: 0 certified/pass,
2 hypothesis failure, 3 no convergence, 1 config or runtime error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__, pipelines, verify
from .center import TailWindow, asymptotic_center, minimizing_sequence_check
from .config import (ExperimentConfig, build_graph, build_map, build_set,
                     build_settings, build_x0)
from .errors import ConfigError, GfixError
from .orbit import run_orbit

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HYPOTHESIS_FAIL = 2
EXIT_NO_CONVERGENCE = 3

_VERDICT_EXIT = {
    pipelines.CERTIFIED: EXIT_OK,
    verify.PASS: EXIT_OK,
    pipelines.HYPOTHESIS_FAIL: EXIT_HYPOTHESIS_FAIL,
    verify.FAIL: EXIT_HYPOTHESIS_FAIL,
    verify.INCONCLUSIVE: EXIT_HYPOTHESIS_FAIL,
    pipelines.NO_CONVERGENCE: EXIT_NO_CONVERGENCE,
}


@dataclass
class RunArtifacts:
    report: dict
    exit_code: int
    verdict: str
    orbit_csv: str | None = None
    center_csv: str | None = None


def exit_code_for(verdict: str) -> int:
    return _VERDICT_EXIT.get(verdict, EXIT_ERROR)


def _base_report(kind: str, config_echo: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "gfixlab", "version": __version__},
        "created_at": datetime.now(timezone.utc).isoformat(),
        "kind": kind,
        "config": config_echo,
    }


def orbit_csv_text(orbit, limit=None) -> str:
    """Columns: n, residual g_n, distance to the detected limit (when known),
    and the first 8 coordinates."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    ncoord = min(8, orbit.points.shape[1])
    w.writerow(["n", "residual", "dist_to_limit"] + [f"c{i}" for i in range(ncoord)])
    if limit is not None:
        diffs = orbit.points - np.asarray(limit)
        dists = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
    for n in range(orbit.points.shape[0]):
        res = repr(float(orbit.residuals[n])) if n < orbit.residuals.size else ""
        dl = repr(float(dists[n])) if limit is not None else ""
        w.writerow([n, res, dl] + [repr(float(c)) for c in orbit.points[n, :ncoord]])
    return buf.getvalue()


def center_csv_text(trace) -> str:
    """Solver trajectory: iteration, current value, best value."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "value", "best_value"])
    for k, val, best in trace:
        w.writerow([int(k), repr(float(val)), repr(float(best))])
    return buf.getvalue()


def _run_pipeline(cfg: ExperimentConfig):
    tag_settings = build_settings(cfg)
    K = build_set(cfg)
    T = build_map(cfg, K)
    x0 = build_x0(cfg, K)
    name = cfg.pipeline
    if name == "T35":
        G = build_graph(cfg, tag_settings.tag)
        return pipelines.pipeline_T35(T, G, K, x0, tag_settings)
    if name == "T37":
        if cfg.L is None:
            raise ConfigError("L", "required for the T37 pipeline")
        G = build_graph(cfg, tag_settings.tag)
        return pipelines.pipeline_T37(T, G, K, x0, cfg.L, tag_settings)
    if name == "C38":
        return pipelines.pipeline_C38(T, K, x0, tag_settings)
    if cfg.eps is None:
        raise ConfigError("eps", "required for the S4 pipeline")
    return pipelines.pipeline_S4(T, K, x0, cfg.eps, tag_settings)


def _run_verify_only(cfg: ExperimentConfig) -> RunArtifacts:
    s = build_settings(cfg)
    K = build_set(cfg)
    T = build_map(cfg, K)
    G = build_graph(cfg, s.tag)
    x0 = build_x0(cfg, K)
    reports = [
        verify.check_graph_of_T_in_edges(T, G, K, s.samples, s.seed),
        verify.check_edge_preservation(T, G, K, s.samples, s.seed + 1),
        verify.check_asymptotic_g_nonexpansive(T, G, K, s.alpha_steps, s.samples,
                                               s.seed + 2, s.tag),
        verify.check_asymptotic_regularity(T, x0, s.iterations, s.decay_tol, tag=s.tag),
    ]
    verdict = (verify.PASS if all(r.verdict == verify.PASS for r in reports)
               else verify.FAIL)
    report = _base_report("VERIFY_ONLY", cfg.model_dump(by_alias=True))
    report.update({
        "verdict": verdict,
        "exit_code": exit_code_for(verdict),
        "hypotheses": [r.to_dict() for r in reports],
    })
    return RunArtifacts(report=report, exit_code=report["exit_code"], verdict=verdict)


def _run_center_only(cfg: ExperimentConfig) -> RunArtifacts:
    s = build_settings(cfg)
    K = build_set(cfg)
    T = build_map(cfg, K)
    x0 = build_x0(cfg, K)
    orbit = run_orbit(T, x0, s.iterations, s.tag)
    w = TailWindow(orbit.n_steps // 2, orbit.n_steps)
    result = asymptotic_center(orbit.points, w, K, tol=s.center_tol,
                               max_iter=s.center_max_iter, solver=s.center_solver,
                               tag=s.tag)
    mseq = minimizing_sequence_check(orbit.points, w, K,
                                     (0.1, 0.01, 0.001, 0.0001),
                                     seed=s.seed, result=result, tag=s.tag)
    report = _base_report("CENTER_ONLY", cfg.model_dump(by_alias=True))
    report.update({
        "verdict": pipelines.CERTIFIED,
        "exit_code": EXIT_OK,
        "center": result.to_dict(),
        "minimizing_sequence": mseq,
        "orbit": orbit.summary(),
    })
    return RunArtifacts(report=report, exit_code=EXIT_OK, verdict=pipelines.CERTIFIED,
                        orbit_csv=orbit_csv_text(orbit),
                        center_csv=center_csv_text(result.trace))


def execute(cfg: ExperimentConfig) -> RunArtifacts:
    """Run one experiment; raises ConfigError for invalid scenarios."""
    if cfg.pipeline == "VERIFY_ONLY":
        return _run_verify_only(cfg)
    if cfg.pipeline == "CENTER_ONLY":
        return _run_center_only(cfg)
    v = _run_pipeline(cfg)
    report = _base_report(cfg.pipeline, cfg.model_dump(by_alias=True))
    report.update(v.to_dict())
    report["exit_code"] = exit_code_for(v.verdict)
    orbit_csv = None
    center_csv = None
    if v.orbit is not None:
        orbit_csv = orbit_csv_text(v.orbit, v.limit)
    if v.center_result is not None:
        center_csv = center_csv_text(v.center_result.trace)
    return RunArtifacts(report=report, exit_code=report["exit_code"],
                        verdict=v.verdict, orbit_csv=orbit_csv, center_csv=center_csv)


def execute_example34(samples: int = 10000, seed: int = 20260811) -> RunArtifacts:
    from .example34 import run_example34
    body = run_example34(samples=samples, seed=seed)
    report = _base_report("verify-example34",
                          {"samples": samples, "seed": seed})
    report.update(body)
    report["exit_code"] = exit_code_for(report["verdict"])
    return RunArtifacts(report=report, exit_code=report["exit_code"],
                        verdict=report["verdict"])


def run_error_artifacts(message: str) -> RunArtifacts:
    report = _base_report("error")
    report.update({"verdict": "ERROR", "exit_code": EXIT_ERROR, "error": message})
    return RunArtifacts(report=report, exit_code=EXIT_ERROR, verdict="ERROR")


def safe_execute(cfg: ExperimentConfig) -> RunArtifacts:
    try:
        return execute(cfg)
    except (ConfigError, GfixError, ValueError) as e:
        return run_error_artifacts(str(e))
