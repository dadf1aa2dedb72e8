import json
import re
from pathlib import Path

import pytest

from gfixlab.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"

FAST_CFG = """
pipeline = T35
space.dim = 4
set.kind = ball
set.radius = 1.0
graph.kind = full
map.kind = contraction
map.lam = 0.5
map.anchor = zeros
x0 = 0.9
iterations = 300
seed = 3
samples = 300
"""


@pytest.fixture()
def fast_cfg(tmp_path):
    p = tmp_path / "fast.cfg"
    p.write_text(FAST_CFG, encoding="utf-8")
    return p


def test_run_writes_artifacts_and_exit_zero(fast_cfg, tmp_path):
    out = tmp_path / "out"
    rc = main(["run", str(fast_cfg), "--output-dir", str(out)])
    assert rc == 0
    assert (out / "report.json").exists()
    assert (out / "orbit.csv").exists()
    assert (out / "center.csv").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["verdict"] == "CERTIFIED"


def test_run_missing_config_exits_one(tmp_path, capsys):
    rc = main(["run", str(tmp_path / "nope.cfg")])
    assert rc == 1
    assert "not found" in capsys.readouterr().err


def test_run_invalid_config_names_field(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text(FAST_CFG.replace("map.kind = contraction\n", ""), encoding="utf-8")
    rc = main(["run", str(p)])
    assert rc == 1
    assert "map.kind" in capsys.readouterr().err


def test_output_root_env_fallback(fast_cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("GFIXLAB_OUTPUT_ROOT", str(tmp_path / "root"))
    rc = main(["run", str(fast_cfg)])
    assert rc == 0
    assert (tmp_path / "root" / "fast" / "report.json").exists()


def test_sweep_runs_every_config(fast_cfg, tmp_path):
    # second sweep member: a failing-verdict scenario
    rot = tmp_path / "rot.cfg"
    rot.write_text((SCENARIOS / "t35_pure_rotation.cfg").read_text(), encoding="utf-8")
    rc = main(["run", "--sweep", str(fast_cfg), str(rot),
               "--output-dir", str(tmp_path / "sw")])
    assert rc == 2  # worst exit across the sweep
    assert (tmp_path / "sw" / "fast" / "report.json").exists()
    assert (tmp_path / "sw" / "rot" / "report.json").exists()


def test_verify_example34_subcommand(tmp_path):
    out = tmp_path / "v34"
    rc = main(["verify-example34", "--samples", "1500", "--seed", "9",
               "--output-dir", str(out)])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["verdict"] == "PASS"


def test_verify_example34_zero_samples_exit_two():
    rc = main(["verify-example34", "--samples", "0"])
    assert rc == 2


def test_center_subcommand_with_grid_oracle(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text((SCENARIOS / "center_three_point_cycle.cfg").read_text(),
                   encoding="utf-8")
    out = tmp_path / "center_out"
    rc = main(["center", str(cfg), "--grid-oracle", "--output-dir", str(out)])
    assert rc == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["center"]["solver"] == "grid_oracle"


def test_emit_plot_data_full_run(fast_cfg, tmp_path):
    out = tmp_path / "run"
    assert main(["run", str(fast_cfg), "--output-dir", str(out)]) == 0
    rc = main(["emit-plot-data", str(out)])
    assert rc == 0
    assert (out / "residual_decay.csv").read_text().startswith("n,residual")
    assert (out / "alpha_hat.csv").read_text().startswith("i,alpha_hat")
    assert (out / "center_value.csv").read_text().startswith("iteration,value")


def test_emit_plot_data_verify_only_run(tmp_path):
    cfg = tmp_path / "v.cfg"
    cfg.write_text(FAST_CFG.replace("pipeline = T35", "pipeline = VERIFY_ONLY"),
                   encoding="utf-8")
    out = tmp_path / "vrun"
    assert main(["run", str(cfg), "--output-dir", str(out)]) == 0
    rc = main(["emit-plot-data", str(out)])
    assert rc == 0
    assert (out / "alpha_hat.csv").exists()
    assert not (out / "residual_decay.csv").exists()
    assert not (out / "center_value.csv").exists()


def test_emit_plot_data_empty_dir_exit_one(tmp_path, capsys):
    rc = main(["emit-plot-data", str(tmp_path / "empty")])
    assert rc == 1


def _strip_timestamp(raw: bytes) -> bytes:
    return re.sub(rb'"created_at": "[^"]*",?\n', b"", raw)


@pytest.mark.parametrize("stem,expected", [
    ("t35_averaged_rotation", 0),
    ("t35_pure_rotation", 2),
    ("t37_reachability", 0),
    ("t37_reachability_L1", 2),
    ("c38_monotone_average", 0),
    ("s4_local_nonexpansive", 0),
    ("s4_small_eps", 2),
    ("center_three_point_cycle", 0),
    ("verify_contraction", 0),
])
def test_bundled_scenario_exit_codes(stem, expected, tmp_path):
    rc = main(["run", str(SCENARIOS / f"{stem}.cfg"),
               "--output-dir", str(tmp_path / stem)])
    assert rc == expected
    report = json.loads((tmp_path / stem / "report.json").read_text())
    assert report["exit_code"] == expected


def test_module_entry_point_runs():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "gfixlab.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "gfixlab" in out.stdout


def test_unreachable_server_exits_one(fast_cfg, capsys):
    rc = main(["run", str(fast_cfg), "--server", "http://127.0.0.1:1"])
    assert rc == 1
    assert "cannot reach service" in capsys.readouterr().err


def test_rerun_is_byte_identical_modulo_timestamp(tmp_path):
    cfg = SCENARIOS / "c38_monotone_average.cfg"
    rc1 = main(["run", str(cfg), "--output-dir", str(tmp_path / "a")])
    rc2 = main(["run", str(cfg), "--output-dir", str(tmp_path / "b")])
    assert rc1 == rc2 == 0
    a = _strip_timestamp((tmp_path / "a" / "report.json").read_bytes())
    b = _strip_timestamp((tmp_path / "b" / "report.json").read_bytes())
    assert a == b
    assert (tmp_path / "a" / "orbit.csv").read_bytes() == (tmp_path / "b" / "orbit.csv").read_bytes()
