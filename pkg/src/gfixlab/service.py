"""FastAPI service wrapping the lab.

Endpoints accept the same pydantic config models the CLI parses from disk and
return the full report plus pre-rendered CSV artifacts, so any client that
writes the response verbatim produces byte-identical files.
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .center import SOLVERS, TailWindow, asymptotic_center
from .config import ExperimentConfig, SetCfg, build_set
from .errors import ConfigError, GfixError
from .runner import execute, execute_example34, exit_code_for
from .vecspace import NormTag

app = FastAPI(title="gfixlab", version=__version__)


class RunRequest(BaseModel):
    config: ExperimentConfig


class RunResponse(BaseModel):
    verdict: str
    exit_code: int
    report: dict
    orbit_csv: Optional[str] = None
    center_csv: Optional[str] = None


class Example34Request(BaseModel):
    samples: int = Field(default=10000, ge=0)
    seed: int = 20260811


class CenterRequest(BaseModel):
    points: list[list[float]]
    window_start: int = 0
    window_end: Optional[int] = None
    set_: SetCfg = Field(default_factory=SetCfg, alias="set")
    dim: Optional[int] = None
    p: float = 2.0
    tol: float = 1e-8
    max_iter: int = 100000
    solver: str = "projected_subgradient"

    model_config = {"populate_by_name": True}


class CenterResponse(BaseModel):
    center: list[float]
    radius: float
    solver: str
    iterations: int
    residual: float
    center_csv: str


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/version")
def version():
    return {"name": "gfixlab", "version": __version__, "schema_version": 1}


@app.post("/runs", response_model=RunResponse)
def create_run(req: RunRequest):
    try:
        art = execute(req.config)
    except (ConfigError, GfixError, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    return RunResponse(verdict=art.verdict, exit_code=art.exit_code, report=art.report,
                       orbit_csv=art.orbit_csv, center_csv=art.center_csv)


@app.post("/verify/example34", response_model=RunResponse)
def verify_example34(req: Example34Request):
    art = execute_example34(samples=req.samples, seed=req.seed)
    return RunResponse(verdict=art.verdict, exit_code=art.exit_code, report=art.report)


@app.post("/center", response_model=CenterResponse)
def center(req: CenterRequest):
    from .runner import center_csv_text

    if req.solver not in SOLVERS:
        raise HTTPException(status_code=422, detail=f"solver: must be one of {SOLVERS}")
    try:
        pts = [list(map(float, row)) for row in req.points]
        if not pts:
            raise ValueError("points must be non-empty")
        if len({len(row) for row in pts}) != 1:
            raise ValueError("points: all rows must share one dimension")
        cfg = ExperimentConfig.model_validate({
            "pipeline": "CENTER_ONLY",
            "space": {"dim": req.dim or len(pts[0]), "p": req.p},
            "set": req.set_.model_dump(),
            "map": {"kind": "identity"},
            "x0": pts[0],
        })
        K = build_set(cfg)
        end = req.window_end if req.window_end is not None else len(pts) - 1
        w = TailWindow(req.window_start, end)
        result = asymptotic_center(pts, w, K, tol=req.tol, max_iter=req.max_iter,
                                   solver=req.solver, tag=NormTag(req.p))
    except (ConfigError, GfixError, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    return CenterResponse(center=[float(v) for v in result.center],
                          radius=result.radius, solver=result.solver,
                          iterations=result.iterations, residual=result.residual,
                          center_csv=center_csv_text(result.trace))


__all__ = ["app", "RunRequest", "RunResponse", "Example34Request",
           "CenterRequest", "CenterResponse", "exit_code_for"]
