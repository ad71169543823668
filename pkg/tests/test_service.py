import numpy as np
import pytest
from fastapi.testclient import TestClient

from anisomf.phantoms import PhantomSpec, make_phantom, stripe_phantom
from anisomf.service import app

client = TestClient(app)


def test_healthz():
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_mf_ring():
    ring = [[1, 1, 1], [1, 0, 1], [1, 1, 1]]
    r = client.post("/mf", json={"pixels": ring, "threshold": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["area"] == 8
    assert body["perimeter"] == 16
    assert body["euler"] == 0
    assert body["oracle_match"] is True


def test_mf_diagonal_pair():
    img = [[1, 0], [0, 1]]
    r = client.post("/mf", json={"pixels": img, "threshold": 1})
    body = r.json()
    assert (body["n_s"], body["n_e"], body["n_v"]) == (2, 8, 7)
    assert (body["area"], body["perimeter"], body["euler"]) == (2, 8, 1)


def test_analyze_stripe():
    g = stripe_phantom(PhantomSpec(64, 64, "stripes", angle=60.0, period=8,
                                   contrast=100.0, noise_sigma=10.0, seed=1))
    r = client.post("/analyze", json={
        "pixels": g.tolist(),
        "options": {"n_thresholds": 6, "direction_bins": 9}})
    assert r.status_code == 200
    body = r.json()
    assert body["functional"] == "area"
    assert len(body["thresholds"]) == 6
    fa = np.asarray(body["fa_map"])
    assert fa.shape == (64, 64)
    dh = body["direction_histogram"]
    mode = int(np.argmax(dh["counts"]))
    assert dh["bin_edges"][mode] <= 60.0 <= dh["bin_edges"][mode + 1]
    # angle entries are either null or finite floats in [0, 180)
    for row in body["angle_map"]:
        for a in row:
            assert a is None or 0.0 <= a < 180.0


def test_analyze_unknown_functional_rejected():
    r = client.post("/analyze", json={"pixels": [[0, 1], [1, 0]],
                                      "functional": "volume"})
    assert r.status_code == 422


def test_analyze_constant_image_422():
    r = client.post("/analyze", json={"pixels": [[5.0] * 4] * 4})
    assert r.status_code == 422
    assert "degenerate" in r.json()["detail"]


def test_phantom_matches_library():
    req = {"kind": "blobs", "width": 16, "height": 12, "period": 6, "seed": 9}
    r = client.post("/phantom", json=req)
    assert r.status_code == 200
    got = np.asarray(r.json()["pixels"])
    want = make_phantom(PhantomSpec(width=16, height=12, kind="blobs",
                                    period=6.0, seed=9))
    assert got.shape == (12, 16)
    assert np.allclose(got, want, rtol=0, atol=1e-12)


def test_phantom_bad_kind_422():
    r = client.post("/phantom", json={"kind": "zigzag"})
    assert r.status_code == 422


def test_regress_small_cohort_deterministic():
    req = {"n_specimens": 12, "seed": 3, "repetitions": 10}
    r1 = client.post("/regress", json=req)
    r2 = client.post("/regress", json=req)
    assert r1.status_code == 200
    assert r1.json() == r2.json()
    body = r1.json()
    assert body["baseline"] == "bmd"
    names = [s["bundle"] for s in body["summaries"]]
    assert names[0] == "bmd"
    assert "iso-mf" in names
    assert body["best_bundle"] in names
