"""HTTP endpoints, exercised in-process through the ASGI transport."""

import asyncio

import httpx
import pytest

import procnet
from procnet.bench import REPORT_FIELDS
from procnet.service import app


def _request(method, path, **kw):
    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://test") as client:
            return await getattr(client, method)(path, **kw)

    return asyncio.run(go())


def _get(path):
    return _request("get", path)


def _post(path, body):
    return _request("post", path, json=body)


def test_health():
    resp = _get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": procnet.__version__}


def test_designs_catalog():
    resp = _get("/designs")
    assert resp.status_code == 200
    entries = resp.json()
    assert [e["id"] for e in entries] == ["d1", "d2", "d3", "d4", "d5"]
    assert all(e["label"] for e in entries)
    flags = {e["id"]: e["k_independent"] for e in entries}
    assert flags == {"d1": False, "d2": False, "d3": True, "d4": True,
                     "d5": True}


def test_run_endpoint_happy_path():
    resp = _post("/run", {"designs": ["d5", "d1"], "dims": [[2, 2, 2]]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["exit_code"] == 0
    assert [r["design"] for r in body["reports"]] == ["d1", "d5"]
    for r in body["reports"]:
        assert set(r) == set(REPORT_FIELDS)
        assert r["dims"] == [2, 2, 2]
        assert r["verified"] is True and r["warnings"] == []


def test_run_endpoint_reports_advisory_warnings():
    resp = _post("/run", {"designs": ["d4"], "dims": [[5, 3, 2]]})
    body = resp.json()
    assert resp.status_code == 200 and body["exit_code"] == 0
    (report,) = body["reports"]
    assert report["verified"] is True
    assert any("memory banks" in w for w in report["warnings"])


def test_run_endpoint_reports_budget_blowups_as_data():
    resp = _post("/run", {"designs": ["d2"], "dims": [[2, 2, 2]],
                          "max_cycles": 1})
    body = resp.json()
    assert resp.status_code == 200 and body["exit_code"] == 2
    (report,) = body["reports"]
    assert report["verified"] is False
    assert report["throughput_items_per_cycle"] is None
    assert any(w.startswith("cycle-budget:") for w in report["warnings"])


def test_compare_endpoint_sorts_and_validates():
    resp = _post("/compare", {"designs": ["d2", "d3"], "dims": [[3, 3, 8]]})
    assert resp.status_code == 200
    body = resp.json()
    thr = [r["throughput_items_per_cycle"] for r in body["reports"]]
    assert thr == sorted(thr, reverse=True)
    assert body["exit_code"] == 0

    resp = _post("/compare", {"designs": ["d1"], "dims": [[2, 2, 2]]})
    assert resp.status_code == 400
    assert "at least two designs" in resp.json()["detail"]


def test_sweep_endpoint():
    resp = _post("/sweep-k", {"designs": ["d3"],
                              "dims": [[3, 3, 4], [3, 3, 8]]})
    assert resp.status_code == 200
    body = resp.json()
    (series,) = body["series"]
    assert series["ks"] == [1, 4, 8]
    assert series["affine"] is True and series["counts_constant"] is True
    assert series["fit"]["max_abs_residual"] < 1.0
    assert body["exit_code"] == 0

    resp = _post("/sweep-k", {"designs": ["d1"], "dims": [[3, 3, 4]]})
    assert resp.status_code == 400
    assert "not a pipelined design" in resp.json()["detail"]


def test_config_problems_are_http_400():
    resp = _post("/run", {"designs": ["d1"], "dims": [[2, 2, 2]], "width": 3})
    assert resp.status_code == 400
    assert resp.json()["detail"].startswith("width:")

    resp = _post("/run", {"designs": ["d9"], "dims": [[2, 2, 2]]})
    assert resp.status_code == 400
    assert "unknown design" in resp.json()["detail"]


@pytest.mark.parametrize("body", [
    {"designs": ["d1"], "dims": [[2, 2]]},       # not a triple
    {"designs": ["d1"], "dims": "2,2,2"},        # wrong type
    {"designs": [], "dims": [[2, 2, 2]]},        # empty list
    {"dims": [[2, 2, 2]]},                       # missing designs
])
def test_malformed_bodies_are_http_422(body):
    assert _post("/run", body).status_code == 422
