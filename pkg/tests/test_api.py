"""HTTP API integration tests (in-process via TestClient)."""

import time

import pytest
from fastapi.testclient import TestClient

from recomply.api import create_app
from recomply.expertise import ExpertiseStore
from recomply.netmodel import generate_testbed, save_scenario


def wait_done(client, run_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        data = client.get(f"/runs/{run_id}").json()
        if data["state"] in ("done", "failed"):
            return data
        time.sleep(0.02)
    raise TimeoutError(f"run {run_id} did not finish")


@pytest.fixture()
def workdir(tmp_path):
    scenarios = tmp_path / "scenarios"
    scenarios.mkdir()
    save_scenario(generate_testbed(5, 6, "small"), scenarios / "lab6.json")
    save_scenario(generate_testbed(9, 4, "small"), scenarios / "lab4.json")
    return tmp_path


@pytest.fixture()
def client(workdir):
    return TestClient(create_app(workdir))


class TestScenarios:
    def test_listing(self, client):
        assert client.get("/scenarios").json() == {"scenarios": ["lab4", "lab6"]}


class TestRuns:
    def test_valid_request_accepted(self, client):
        resp = client.post("/runs", json={"scenario": "lab6", "policy": "blind", "seed": 1})
        assert resp.status_code == 202
        data = resp.json()
        assert data["state"] in ("queued", "running")
        done = wait_done(client, data["id"])
        assert done["state"] == "done"
        assert done["metrics"]["coverage"] == 1.0
        assert done["progress"]["steps_completed"] > 0

    def test_unknown_policy_400(self, client):
        resp = client.post("/runs", json={"scenario": "lab6", "policy": "foo"})
        assert resp.status_code == 400

    def test_unknown_scenario_404(self, client):
        resp = client.post("/runs", json={"scenario": "nope", "policy": "blind"})
        assert resp.status_code == 404

    def test_bogus_run_id_404(self, client):
        assert client.get("/runs/run-9999").status_code == 404

    def test_report_before_done_409(self, workdir):
        client = TestClient(create_app(workdir))
        run = client.post(
            "/runs", json={"scenario": "lab6", "policy": "esascf", "seed": 2}
        ).json()
        resp = client.get(f"/runs/{run['id']}/report")
        if resp.status_code != 409:  # the run may already have finished
            wait_done(client, run["id"])
            assert client.get(f"/runs/{run['id']}/report").status_code == 200
        wait_done(client, run["id"])

    def test_report_after_done(self, client):
        run = client.post(
            "/runs", json={"scenario": "lab4", "policy": "blind", "seed": 3}
        ).json()
        wait_done(client, run["id"])
        report = client.get(f"/runs/{run['id']}/report").json()
        assert {"total_cost", "coverage", "vectors_extracted", "compromised"} <= set(report)

    def test_concurrent_store_writers_409(self, client):
        first = client.post(
            "/runs", json={"scenario": "lab6", "policy": "esascf", "seed": 4}
        )
        assert first.status_code == 202
        second = client.post(
            "/runs", json={"scenario": "lab4", "policy": "esascf", "seed": 5}
        )
        # the first run may finish arbitrarily fast; busy answers 409
        assert second.status_code in (202, 409)
        wait_done(client, first.json()["id"])
        if second.status_code == 202:
            wait_done(client, second.json()["id"])
        third = client.post(
            "/runs", json={"scenario": "lab4", "policy": "esascf", "seed": 6}
        )
        assert third.status_code == 202
        wait_done(client, third.json()["id"])

    def test_read_only_run_never_blocked(self, client):
        writer = client.post(
            "/runs", json={"scenario": "lab6", "policy": "esascf", "seed": 7}
        )
        reader = client.post(
            "/runs",
            json={"scenario": "lab4", "policy": "blind", "seed": 8, "capture": False},
        )
        assert reader.status_code == 202
        wait_done(client, writer.json()["id"])
        wait_done(client, reader.json()["id"])


class TestReviews:
    def run_capture(self, client, scenario="lab6", seed=11):
        run = client.post(
            "/runs",
            json={"scenario": scenario, "policy": "esascf", "seed": seed,
                  "auto_approve": False},
        ).json()
        wait_done(client, run["id"])
        return run

    def test_capture_surfaces_pending(self, client):
        self.run_capture(client)
        reviews = client.get("/reviews").json()["reviews"]
        assert len(reviews) >= 1
        item = reviews[0]
        assert item["status"] == "pending"
        assert item["chain"] and all("phase" in s for s in item["chain"])

    def test_approve_removes_from_queue_and_counts(self, client, workdir):
        self.run_capture(client)
        before = client.get("/store/summary").json()["counts"]
        reviews = client.get("/reviews").json()["reviews"]
        target = reviews[0]["record_id"]
        resp = client.post(
            f"/reviews/{target}/decision",
            json={"decision": "approve", "reviewer": "tester"},
        )
        assert resp.status_code == 200
        after = client.get("/store/summary").json()["counts"]
        assert after["validated"] == before["validated"] + 1
        remaining = {r["record_id"] for r in client.get("/reviews").json()["reviews"]}
        assert target not in remaining
        # API state equals library state over the same working directory
        store = ExpertiseStore.open(workdir / "store.jsonl")
        assert store.get(target).status == "validated"

    def test_reject_excluded_from_matching(self, client, workdir):
        self.run_capture(client)
        reviews = client.get("/reviews").json()["reviews"]
        victim = reviews[0]
        client.post(
            f"/reviews/{victim['record_id']}/decision",
            json={"decision": "reject", "reviewer": "tester"},
        )
        store = ExpertiseStore.open(workdir / "store.jsonl")
        fingerprint = frozenset(victim["fingerprint"])
        assert victim["record_id"] not in store.match_context(fingerprint, 0.0)

    def test_double_decide_409(self, client):
        self.run_capture(client)
        reviews = client.get("/reviews").json()["reviews"]
        target = reviews[0]["record_id"]
        client.post(f"/reviews/{target}/decision", json={"decision": "approve"})
        resp = client.post(f"/reviews/{target}/decision", json={"decision": "approve"})
        assert resp.status_code == 409

    def test_unknown_record_404(self, client):
        resp = client.post("/reviews/r999999/decision", json={"decision": "approve"})
        assert resp.status_code == 404


class TestSummary:
    def test_empty_store_zero_counts(self, client):
        counts = client.get("/store/summary").json()["counts"]
        assert counts == {"pending": 0, "validated": 0, "rejected": 0}
