from fastapi.testclient import TestClient

from gfixlab.service import app

client = TestClient(app)

CONFIG = {
    "pipeline": "T35",
    "space": {"dim": 4, "p": 2.0},
    "set": {"kind": "ball", "center": "zeros", "radius": 1.0},
    "graph": {"kind": "full"},
    "map": {"kind": "contraction", "lam": 0.5, "anchor": "zeros"},
    "x0": [0.9],
    "iterations": 300,
    "seed": 3,
    "samples": 300,
}


def test_health_and_version():
    assert client.get("/health").json() == {"status": "ok"}
    v = client.get("/version").json()
    assert v["name"] == "gfixlab"
    assert v["schema_version"] == 1


def test_run_endpoint_returns_full_artifacts():
    resp = client.post("/runs", json={"config": CONFIG})
    assert resp.status_code == 200
    body = resp.json()
    assert body["verdict"] == "CERTIFIED"
    assert body["exit_code"] == 0
    assert body["report"]["pipeline"] == "T35"
    assert body["orbit_csv"].startswith("n,residual")
    assert body["center_csv"].startswith("iteration,value")


def test_run_endpoint_rejects_invalid_schema_with_field_path():
    bad = {k: v for k, v in CONFIG.items() if k != "map"}
    resp = client.post("/runs", json={"config": bad})
    assert resp.status_code == 422
    assert any("map" in str(err.get("loc", ())) for err in resp.json()["detail"])


def test_run_endpoint_rejects_semantic_errors():
    bad = dict(CONFIG, x0=[9.0])
    resp = client.post("/runs", json={"config": bad})
    assert resp.status_code == 422
    assert "x0" in resp.json()["detail"]


def test_example34_endpoint():
    resp = client.post("/verify/example34", json={"samples": 1500, "seed": 4})
    assert resp.status_code == 200
    body = resp.json()
    assert body["verdict"] == "PASS"
    assert body["report"]["parts"]["alpha_within_bound"]["verdict"] == "PASS"


def test_example34_zero_samples_inconclusive():
    resp = client.post("/verify/example34", json={"samples": 0})
    body = resp.json()
    assert body["verdict"] == "INCONCLUSIVE"
    assert body["exit_code"] == 2


def test_center_endpoint():
    pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] * 4
    resp = client.post("/center", json={
        "points": pts,
        "set": {"kind": "ball", "center": "zeros", "radius": 2.0},
        "solver": "projected_subgradient",
    })
    assert resp.status_code == 200
    body = resp.json()
    assert abs(body["radius"] - 0.5 ** 0.5) < 1e-6
    assert abs(body["center"][0] - 0.5) < 1e-4
    assert body["center_csv"].startswith("iteration")


def test_center_endpoint_rejects_unknown_solver():
    resp = client.post("/center", json={"points": [[0.0, 0.0]] * 10, "solver": "magic"})
    assert resp.status_code == 422


def test_center_endpoint_window_validation():
    resp = client.post("/center", json={"points": [[0.0, 0.0]] * 4})
    assert resp.status_code == 422  # window shorter than the 8-step minimum
