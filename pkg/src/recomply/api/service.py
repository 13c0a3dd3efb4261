"""HTTP API over runs, the expertise review queue and reports.

One working directory is the single source of truth: scenario files under
scenarios/, traces under traces/, and the expertise store at store.jsonl.
Sessions execute on background threads behind run handles; the store's
single-writer rule answers 409 rather than queuing.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..expertise import ExpertiseStore, capture_and_store, replay_plan
from ..netmodel import apply_changeset, load_scenario
from ..session import blind_policy, run_session, scripted_expert_policy
from ..session.actions import KIND_PHASE

POLICIES = ("blind", "expert", "esascf")


class RunRequest(BaseModel):
    scenario: str
    policy: str = "esascf"
    mode: str = "PT"
    seed: int = 0
    change_fraction: float | None = Field(default=None, ge=0.0, le=1.0)
    capture: bool = True
    auto_approve: bool = False


class DecisionRequest(BaseModel):
    decision: str
    reviewer: str = "console"


@dataclass
class RunHandle:
    id: str
    request: dict
    state: str = "queued"  # queued -> running -> done | failed
    steps_completed: int = 0
    estimated_steps: int = 0
    error: str | None = None
    trace_path: str | None = None
    metrics: dict = field(default_factory=dict)
    writes_store: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "request": self.request,
            "progress": {
                "steps_completed": self.steps_completed,
                "estimated_steps": self.estimated_steps,
            },
            "trace": self.trace_path,
            "error": self.error,
        }


class RunRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self._runs: dict[str, RunHandle] = {}
        self._counter = 0

    def create(self, request: dict, writes_store: bool) -> RunHandle:
        with self._lock:
            if writes_store and any(
                h.writes_store and h.state in ("queued", "running")
                for h in self._runs.values()
            ):
                raise StoreBusy()
            self._counter += 1
            handle = RunHandle(
                id=f"run-{self._counter:04d}", request=request, writes_store=writes_store
            )
            self._runs[handle.id] = handle
            return handle

    def get(self, run_id: str) -> RunHandle | None:
        with self._lock:
            return self._runs.get(run_id)


class StoreBusy(RuntimeError):
    pass


def create_app(workdir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    workdir = Path(workdir)
    scenarios_dir = workdir / "scenarios"
    traces_dir = workdir / "traces"
    store_path = workdir / "store.jsonl"
    for d in (scenarios_dir, traces_dir):
        d.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="recomply", version="0.1.0")
    registry = RunRegistry()
    store_lock = threading.Lock()

    def open_store() -> ExpertiseStore:
        return ExpertiseStore.open(store_path)

    def scenario_path(name: str) -> Path:
        path = scenarios_dir / name
        if path.suffix != ".json":
            path = path.with_suffix(".json")
        return path

    @app.get("/scenarios")
    def list_scenarios():
        names = sorted(p.stem for p in scenarios_dir.glob("*.json"))
        return {"scenarios": names}

    @app.post("/runs", status_code=202)
    def start_run(request: RunRequest):
        if request.policy not in POLICIES:
            raise HTTPException(400, f"unknown policy {request.policy!r}")
        if request.mode not in ("VA", "PT"):
            raise HTTPException(400, f"mode must be VA or PT, not {request.mode!r}")
        path = scenario_path(request.scenario)
        if not path.exists():
            raise HTTPException(404, f"no scenario {request.scenario!r}")
        writes_store = request.capture or request.policy == "esascf"
        try:
            handle = registry.create(request.model_dump(), writes_store)
        except StoreBusy:
            raise HTTPException(409, "another run is using the expertise store")
        thread = threading.Thread(
            target=_execute_run, args=(handle, path, request), daemon=True
        )
        thread.start()
        return handle.to_dict()

    def _execute_run(handle: RunHandle, path: Path, request: RunRequest):
        handle.state = "running"
        try:
            network = load_scenario(path)
            changeset = None
            if request.change_fraction is not None:
                network, changeset = apply_changeset(
                    network, request.change_fraction, request.seed
                )
            handle.estimated_steps = 8 * len(network.machines)
            with store_lock:
                store = open_store()
            if request.policy == "blind":
                policy = blind_policy()
            elif request.policy == "expert":
                policy = scripted_expert_policy("typical")
            else:
                policy = replay_plan(network, changeset, store)

            def on_step(count: int):
                handle.steps_completed = count

            trace = run_session(
                network, policy, request.mode,
                seed=request.seed,
                network_ref={"scenario": path.stem},
                on_step=on_step,
            )
            stats = {}
            if request.capture:
                with store_lock:
                    stats = capture_and_store(
                        trace, network, store,
                        auto_approve=request.auto_approve,
                        session_id=handle.id,
                    )
            trace_path = traces_dir / f"{handle.id}.jsonl"
            trace.save(trace_path)
            handle.trace_path = str(trace_path)
            handle.metrics = {
                "total_cost": trace.total_cost,
                "coverage": trace.coverage,
                "vectors_extracted": stats.get("vectors", 0),
                "compromised": len(trace.compromised),
                "steps": len(trace.steps),
                "machines": len(network.machines),
                "budget_exhausted": trace.budget_exhausted,
            }
            handle.state = "done"
        except Exception as exc:  # surfaced via the handle, not the socket
            handle.error = f"{exc.__class__.__name__}: {exc}"
            handle.state = "failed"

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        handle = registry.get(run_id)
        if handle is None:
            raise HTTPException(404, f"no run {run_id!r}")
        out = handle.to_dict()
        if handle.state == "done":
            out["metrics"] = handle.metrics
        return out

    @app.get("/runs/{run_id}/report")
    def get_report(run_id: str):
        handle = registry.get(run_id)
        if handle is None:
            raise HTTPException(404, f"no run {run_id!r}")
        if handle.state != "done":
            raise HTTPException(409, f"run {run_id} is {handle.state}, not done")
        return {"id": handle.id, **handle.metrics}

    @app.get("/reviews")
    def list_reviews():
        store = open_store()
        items = []
        for record in store.records("pending"):
            items.append(_review_item(record))
        return {"reviews": items}

    def _review_item(record) -> dict:
        chain = [
            {"kind": a.kind, "phase": KIND_PHASE[a.kind], "params": a.to_dict()["params"]}
            for a in record.vector.chain
        ]
        return {
            "record_id": record.record_id,
            "target": record.vector.target,
            "fingerprint": sorted(record.vector.fingerprint),
            "outcome": record.vector.outcome,
            "likelihood": record.likelihood,
            "chain": chain,
            "status": record.status,
            "provenance": record.provenance,
        }

    @app.post("/reviews/{record_id}/decision")
    def decide_review(record_id: str, request: DecisionRequest):
        if request.decision not in ("approve", "reject"):
            raise HTTPException(400, "decision must be approve or reject")
        with store_lock:
            store = open_store()
            record = store.get(record_id)
            if record is None:
                raise HTTPException(404, f"no record {record_id!r}")
            if record.status != "pending":
                raise HTTPException(409, f"record {record_id} is {record.status}")
            updated = store.review_decide(record_id, request.decision, request.reviewer)
        return {"record_id": record_id, "status": updated.status}

    @app.get("/store/summary")
    def store_summary():
        return open_store().summary()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
