"""Thin command-line client for the service.

Every computing subcommand speaks the HTTP API: against a remote instance when
`--server URL` is given, otherwise against the app mounted in-process through
an ASGI transport (no server needed). `emit-plot-data` is local file plumbing.

Exit codes: 0 certified/pass, 2 hypothesis failure or inconclusive,
3 no convergence, 1 config/runtime errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

import httpx

from . import __version__
from .config import load_config
from .errors import ConfigError

OUTPUT_ROOT_ENV = "GFIXLAB_OUTPUT_ROOT"


class ServiceClient:
    """POSTs JSON to a live server or to the in-process app."""

    def __init__(self, server: str | None = None):
        self.server = server

    async def _post_async(self, path: str, payload: dict) -> tuple[int, dict]:
        if self.server:
            async with httpx.AsyncClient(base_url=self.server, timeout=600.0) as client:
                resp = await client.post(path, json=payload)
        else:
            from .service import app
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://gfixlab.local",
                                         timeout=600.0) as client:
                resp = await client.post(path, json=payload)
        return resp.status_code, resp.json()

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        try:
            return asyncio.run(self._post_async(path, payload))
        except httpx.HTTPError as e:
            return 0, {"detail": f"cannot reach service at {self.server}: {e}"}

    def post_many(self, requests: list[tuple[str, dict]]) -> list[tuple[int, dict]]:
        async def gather():
            return await asyncio.gather(*[self._post_async(p, body) for p, body in requests],
                                        return_exceptions=True)
        results = asyncio.run(gather())
        out = []
        for r in results:
            if isinstance(r, BaseException):
                out.append((0, {"detail": f"cannot reach service at {self.server}: {r}"}))
            else:
                out.append(r)
        return out


def report_json_text(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _resolve_output_dir(explicit: str | None, config_value: str | None, stem: str) -> Path:
    if explicit:
        return Path(explicit)
    if config_value:
        return Path(config_value)
    root = os.environ.get(OUTPUT_ROOT_ENV, "runs")
    return Path(root) / stem


def _write_run_artifacts(out_dir: Path, body: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report_json_text(body["report"]), encoding="utf-8")
    if body.get("orbit_csv"):
        (out_dir / "orbit.csv").write_text(body["orbit_csv"], encoding="utf-8")
    if body.get("center_csv"):
        (out_dir / "center.csv").write_text(body["center_csv"], encoding="utf-8")


def _fail(message: str) -> int:
    print(f"gfixlab: error: {message}", file=sys.stderr)
    return 1


def _do_single_run(client: ServiceClient, config_path: str, out_override: str | None,
                   solver_override: str | None = None, pipeline_override: str | None = None) -> int:
    try:
        cfg = load_config(config_path)
    except FileNotFoundError:
        return _fail(f"config file not found: {config_path}")
    except ConfigError as e:
        return _fail(str(e))
    if pipeline_override:
        cfg = cfg.model_copy(update={"pipeline": pipeline_override})
    if solver_override:
        cfg = cfg.model_copy(update={"center_solver": solver_override})
    status, body = client.post("/runs", {"config": cfg.model_dump(by_alias=True)})
    if status != 200:
        return _fail(str(body.get("detail", body)))
    out_dir = _resolve_output_dir(out_override, cfg.output_dir, Path(config_path).stem)
    _write_run_artifacts(out_dir, body)
    print(f"{body['report'].get('pipeline', cfg.pipeline)}: {body['verdict']} -> {out_dir}")
    return int(body["exit_code"])


def cmd_run(args) -> int:
    client = ServiceClient(args.server)
    if args.sweep:
        configs, payloads = [], []
        for path in args.config:
            try:
                cfg = load_config(path)
            except (FileNotFoundError, ConfigError) as e:
                return _fail(f"{path}: {e}")
            configs.append((path, cfg))
            payloads.append(("/runs", {"config": cfg.model_dump(by_alias=True)}))
        results = client.post_many(payloads)
        worst = 0
        for (path, cfg), (status, body) in zip(configs, results):
            if status != 200:
                print(f"{path}: error: {body.get('detail', body)}", file=sys.stderr)
                worst = max(worst, 1)
                continue
            out_dir = _resolve_output_dir(args.output_dir and str(Path(args.output_dir) / Path(path).stem),
                                          cfg.output_dir, Path(path).stem)
            _write_run_artifacts(out_dir, body)
            print(f"{path}: {body['verdict']} -> {out_dir}")
            worst = max(worst, int(body["exit_code"]))
        return worst
    if len(args.config) != 1:
        return _fail("run takes exactly one config (use --sweep for several)")
    return _do_single_run(client, args.config[0], args.output_dir)


def cmd_verify_example34(args) -> int:
    client = ServiceClient(args.server)
    status, body = client.post("/verify/example34",
                               {"samples": args.samples, "seed": args.seed})
    if status != 200:
        return _fail(str(body.get("detail", body)))
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report_json_text(body["report"]), encoding="utf-8")
    print(f"verify-example34: {body['verdict']}")
    return int(body["exit_code"])


def cmd_center(args) -> int:
    client = ServiceClient(args.server)
    solver = "grid_oracle" if args.grid_oracle else None
    return _do_single_run(client, args.config, args.output_dir,
                          solver_override=solver, pipeline_override="CENTER_ONLY")


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app
    # the portable loop/http stack; the "auto" defaults probe optional
    # extensions that hang inside some sandboxes
    uvicorn.run(app, host=args.host, port=args.port, loop="asyncio", http="h11",
                lifespan="off")
    return 0


def _read_csv_columns(path: Path, wanted: list[str]) -> list[list[str]]:
    import csv as _csv
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(_csv.reader(fh))
    header, data = rows[0], rows[1:]
    idx = [header.index(w) for w in wanted]
    return [[row[i] for i in idx] for row in data]


def cmd_emit_plot_data(args) -> int:
    run_dir = Path(args.run_dir)
    report_path = run_dir / "report.json"
    if not report_path.exists():
        return _fail(f"no report.json in {run_dir}")
    report = json.loads(report_path.read_text(encoding="utf-8"))
    wrote = []

    orbit_path = run_dir / "orbit.csv"
    if orbit_path.exists():
        rows = _read_csv_columns(orbit_path, ["n", "residual"])
        out = run_dir / "residual_decay.csv"
        out.write_text("n,residual\n" + "".join(f"{n},{r}\n" for n, r in rows if r != ""),
                       encoding="utf-8")
        wrote.append(out.name)

    alphas = None
    for rep in report.get("hypotheses", []):
        if rep.get("empirical_alphas"):
            alphas = rep["empirical_alphas"]["values"]
            break
    if alphas is not None:
        out = run_dir / "alpha_hat.csv"
        out.write_text("i,alpha_hat\n" + "".join(f"{i + 1},{a!r}\n" for i, a in enumerate(alphas)),
                       encoding="utf-8")
        wrote.append(out.name)

    center_path = run_dir / "center.csv"
    if center_path.exists():
        rows = _read_csv_columns(center_path, ["iteration", "value", "best_value"])
        out = run_dir / "center_value.csv"
        out.write_text("iteration,value,best_value\n"
                       + "".join(f"{k},{v},{b}\n" for k, v, b in rows), encoding="utf-8")
        wrote.append(out.name)

    if not wrote:
        return _fail(f"run directory {run_dir} has no plottable series")
    print(f"emit-plot-data: wrote {', '.join(wrote)} in {run_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfixlab",
                                     description="graph-constrained fixed-point lab")
    parser.add_argument("--version", action="version", version=f"gfixlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config (or several with --sweep)")
    p_run.add_argument("config", nargs="+")
    p_run.add_argument("--output-dir", default=None)
    p_run.add_argument("--server", default=None, help="URL of a running service")
    p_run.add_argument("--sweep", action="store_true",
                       help="run every config concurrently, each into its own directory")
    p_run.set_defaults(func=cmd_run)

    p_v34 = sub.add_parser("verify-example34", help="run the bundled example34 certification")
    p_v34.add_argument("--samples", type=int, default=10000)
    p_v34.add_argument("--seed", type=int, default=20260811)
    p_v34.add_argument("--output-dir", default=None)
    p_v34.add_argument("--server", default=None)
    p_v34.set_defaults(func=cmd_verify_example34)

    p_center = sub.add_parser("center", help="asymptotic center of a config's orbit tail")
    p_center.add_argument("config")
    p_center.add_argument("--output-dir", default=None)
    p_center.add_argument("--server", default=None)
    p_center.add_argument("--grid-oracle", action="store_true",
                          help="use the 2-D grid-oracle solver (test flag)")
    p_center.set_defaults(func=cmd_center)

    p_plot = sub.add_parser("emit-plot-data", help="tabular series from a completed run dir")
    p_plot.add_argument("run_dir")
    p_plot.set_defaults(func=cmd_emit_plot_data)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        return _fail(str(e))


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
