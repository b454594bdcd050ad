"""HTTP service exposing estimation runs as asynchronous jobs.

Runs take tens of seconds at realistic settings, so submissions return a job
id immediately and clients poll; a running job exposes its partial FDR curve
so a UI can draw the curve growing.  Jobs are executed by a small fixed worker
pool in FIFO order, each from its own seed-derived random stream, so results
are byte-identical to a CLI run with the same config.
"""

from __future__ import annotations

import argparse
import json
import queue
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import dataio
from .errors import ConfigError, MetsizerError, PilotDataError
from .fit import fit_ppca, fit_ppcca
from .search import estimate_sample_size
from .types import EstimationConfig, FdrCurvePoint, SampleSizeResult

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class Job:
    id: str
    config: EstimationConfig
    state: str = QUEUED
    progress: float = 0.0
    partial_curve: List[FdrCurvePoint] = field(default_factory=list)
    result: Optional[SampleSizeResult] = None
    error: Optional[str] = None
    submitted_at: str = field(default_factory=_now_iso)
    finished_at: Optional[str] = None
    cancel_requested: bool = False
    seq: int = 0

    def view(self) -> dict:
        return {
            "id": self.id,
            "state": self.state,
            "progress": round(self.progress, 6),
            "partial_curve": [pt.to_json_dict() for pt in self.partial_curve],
            "result": None if self.result is None else self.result.to_json_dict(),
            "error": self.error,
            "submitted_at": self.submitted_at,
            "finished_at": self.finished_at,
            "config": self.config.to_json_dict(),
        }


class JobStore:
    """Thread-safe job registry with a FIFO work queue and a worker pool."""

    def __init__(self, n_workers: int = 2, queue_limit: int = 64,
                 state_dir: Optional[Path] = None):
        self._lock = threading.RLock()
        self._jobs: dict = {}
        self._queue: "queue.Queue" = queue.Queue()
        self._workers: List[threading.Thread] = []
        self._n_workers = max(1, n_workers)
        self.queue_limit = queue_limit
        self.state_dir = Path(state_dir) if state_dir else None
        self._seq = 0
        if self.state_dir:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            self._load_state()

    # -- lifecycle ---------------------------------------------------------
    def start(self) -> None:
        for i in range(self._n_workers):
            worker = threading.Thread(target=self._run_worker, daemon=True,
                                      name=f"metsizer-worker-{i}")
            worker.start()
            self._workers.append(worker)

    def stop(self) -> None:
        for _ in self._workers:
            self._queue.put(None)
        for worker in self._workers:
            worker.join(timeout=2.0)
        self._workers.clear()

    # -- public operations --------------------------------------------------
    def pending_count(self) -> int:
        with self._lock:
            return sum(1 for j in self._jobs.values() if j.state in (QUEUED, RUNNING))

    def submit(self, config: EstimationConfig) -> Job:
        with self._lock:
            self._seq += 1
            job = Job(id=uuid.uuid4().hex, config=config, seq=self._seq)
            self._jobs[job.id] = job
        self._queue.put(job.id)
        return job

    def get(self, job_id: str) -> Optional[Job]:
        with self._lock:
            return self._jobs.get(job_id)

    def view(self, job_id: str) -> Optional[dict]:
        with self._lock:
            job = self._jobs.get(job_id)
            return None if job is None else job.view()

    def list_views(self) -> List[dict]:
        with self._lock:
            return [j.view() for j in sorted(self._jobs.values(), key=lambda j: j.seq)]

    def cancel(self, job_id: str) -> Optional[dict]:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return None
            job.cancel_requested = True
            if job.state == QUEUED:
                job.state = FAILED
                job.error = "cancelled"
                job.finished_at = _now_iso()
                self._persist(job)
            return job.view()

    # -- worker internals ----------------------------------------------------
    def _run_worker(self) -> None:
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            with self._lock:
                job = self._jobs.get(job_id)
                if job is None or job.state != QUEUED:
                    continue
                job.state = RUNNING
            self._execute(job)

    def _execute(self, job: Job) -> None:
        def on_point(point: FdrCurvePoint, done: int, total: int) -> None:
            with self._lock:
                job.partial_curve.append(point)
                job.progress = max(job.progress, done / total)

        try:
            result = estimate_sample_size(
                job.config, threads=1, on_point=on_point,
                cancel=lambda: job.cancel_requested,
            )
            with self._lock:
                job.result = result
                job.partial_curve = list(result.curve)
                job.progress = 1.0
                job.state = DONE
                job.finished_at = _now_iso()
        except InterruptedError:
            with self._lock:
                job.state = FAILED
                job.error = "cancelled"
                job.finished_at = _now_iso()
        except Exception as exc:  # job failures are reported, not raised
            with self._lock:
                job.state = FAILED
                job.error = str(exc)
                job.finished_at = _now_iso()
        self._persist(job)

    # -- optional on-disk persistence ----------------------------------------
    def _persist(self, job: Job) -> None:
        if self.state_dir is None or job.state not in (DONE, FAILED):
            return
        path = self.state_dir / f"{job.id}.json"
        path.write_text(json.dumps(job.view(), indent=2, sort_keys=True), encoding="utf-8")

    def _load_state(self) -> None:
        for path in sorted(self.state_dir.glob("*.json")):
            try:
                view = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                continue
            try:
                config = EstimationConfig.from_json_dict(view.get("config", {}))
            except ConfigError:
                continue
            self._seq += 1
            job = Job(
                id=view.get("id", path.stem),
                config=config,
                state=view.get("state", FAILED),
                progress=float(view.get("progress", 1.0)),
                error=view.get("error"),
                submitted_at=view.get("submitted_at", _now_iso()),
                finished_at=view.get("finished_at"),
                seq=self._seq,
            )
            if view.get("result"):
                job.result = SampleSizeResult.from_json_dict(view["result"])
                job.partial_curve = list(job.result.curve)
            self._jobs[job.id] = job


def create_app(
    n_workers: int = 2,
    queue_limit: int = 64,
    state_dir: Optional[str] = None,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    store = JobStore(n_workers=n_workers, queue_limit=queue_limit,
                     state_dir=Path(state_dir) if state_dir else None)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        store.start()
        yield
        store.stop()

    app = FastAPI(title="metsizer", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.store = store

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/api/v1/defaults")
    def defaults() -> dict:
        return EstimationConfig().to_json_dict()

    @app.post("/api/v1/jobs")
    async def submit_job(request: Request) -> JSONResponse:
        raw = await request.body()
        try:
            body = json.loads(raw.decode("utf-8") if raw else "")
        except (UnicodeDecodeError, json.JSONDecodeError):
            return JSONResponse({"error": "malformed JSON body"}, status_code=400)
        if not isinstance(body, dict):
            return JSONResponse({"error": "config must be a JSON object"}, status_code=400)
        try:
            config = EstimationConfig.from_json_dict(body)
            config.validate()
        except ConfigError as exc:
            return JSONResponse(
                {"errors": [{"field": exc.field, "message": exc.message}]}, status_code=400
            )
        if store.pending_count() >= store.queue_limit:
            return JSONResponse({"error": "job queue is full, retry later"}, status_code=429)
        job = store.submit(config)
        return JSONResponse({"id": job.id}, status_code=202)

    @app.get("/api/v1/jobs")
    def list_jobs() -> dict:
        return {"jobs": store.list_views()}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str) -> JSONResponse:
        view = store.view(job_id)
        if view is None:
            return JSONResponse({"error": f"unknown job id {job_id}"}, status_code=404)
        return JSONResponse(view)

    @app.delete("/api/v1/jobs/{job_id}")
    def cancel_job(job_id: str) -> JSONResponse:
        view = store.cancel(job_id)
        if view is None:
            return JSONResponse({"error": f"unknown job id {job_id}"}, status_code=404)
        return JSONResponse(view)

    @app.post("/api/v1/fit")
    async def fit_pilot(request: Request) -> JSONResponse:
        raw = await request.body()
        try:
            body = json.loads(raw.decode("utf-8") if raw else "")
        except (UnicodeDecodeError, json.JSONDecodeError):
            return JSONResponse({"error": "malformed JSON body"}, status_code=400)
        if not isinstance(body, dict) or not isinstance(body.get("csv"), str):
            return JSONResponse(
                {"errors": [{"field": "csv", "message": "csv text is required"}]},
                status_code=400,
            )
        kind = str(body.get("kind", "ppca")).lower()
        q = int(body.get("q", 2))
        schema = dataio.PilotFileSchema.from_json_dict(body.get("schema") or {})
        import tempfile

        try:
            with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
                fh.write(body["csv"])
                tmp_path = fh.name
            try:
                pilot = dataio.load_pilot_csv(tmp_path, schema)
            finally:
                Path(tmp_path).unlink(missing_ok=True)
            if kind == "ppca":
                fitted = fit_ppca(pilot, q)
            elif kind == "ppcca":
                if pilot.covariates is None:
                    raise PilotDataError("ppcca fitting needs covariate columns in the schema")
                fitted = fit_ppcca(pilot, q)
            else:
                return JSONResponse(
                    {"errors": [{"field": "kind",
                                 "message": "pilot fitting supports ppca and ppcca"}]},
                    status_code=400,
                )
        except (PilotDataError, MetsizerError, ValueError) as exc:
            return JSONResponse(
                {"errors": [{"field": "csv", "message": str(exc)}]}, status_code=400
            )
        return JSONResponse({"fitted_model": fitted.to_json_dict()})

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _default_ui_dir() -> Optional[str]:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="metsizer-api",
                                     description="HTTP API for sample-size estimation jobs")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--workers", type=int, default=2,
                        help="concurrent estimation jobs (default 2)")
    parser.add_argument("--queue-limit", type=int, default=64)
    parser.add_argument("--state-dir", default=None,
                        help="directory for on-disk job persistence")
    parser.add_argument("--ui-dir", default=_default_ui_dir(),
                        help="built UI bundle to serve at / (default: bundled frontend)")
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(n_workers=args.workers, queue_limit=args.queue_limit,
                     state_dir=args.state_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    import sys

    sys.exit(main())
