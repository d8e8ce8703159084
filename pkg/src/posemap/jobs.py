"""Minimal async job machinery for the long-running analysis operations."""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import NotFoundError

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


@dataclass
class Job:
    id: str
    kind: str
    status: str = QUEUED
    progress: float = 0.0
    result_ref: str | None = None
    error: str | None = None
    created_at: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "progress": self.progress,
            "result_ref": self.result_ref,
            "error": self.error,
        }


class JobRunner:
    """Bounded worker pool plus an in-memory registry of job states.

    Status only ever moves queued -> running -> done|failed; result_ref is
    set if and only if the job finished. The work callable receives a
    progress callback taking a float in [0, 1].
    """

    def __init__(self, workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, work, on_done=None) -> Job:
        job = Job(id=uuid.uuid4().hex, kind=kind)
        with self._lock:
            self._jobs[job.id] = job

        def progress(value: float):
            with self._lock:
                job.progress = min(max(float(value), 0.0), 1.0)

        def runner():
            with self._lock:
                job.status = RUNNING
            try:
                result_ref = work(progress)
            except Exception as e:  # surfaces via the job record, not the worker
                with self._lock:
                    job.status = FAILED
                    job.error = f"{type(e).__name__}: {e}"
                return
            with self._lock:
                job.status = DONE
                job.progress = 1.0
                job.result_ref = result_ref
            if on_done is not None:
                on_done(result_ref)

        self._pool.submit(runner)
        return job

    def completed(self, kind: str, result_ref: str) -> Job:
        """Register an already-satisfied job (e.g. a cache hit)."""
        job = Job(id=uuid.uuid4().hex, kind=kind, status=DONE, progress=1.0,
                  result_ref=result_ref)
        with self._lock:
            self._jobs[job.id] = job
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job id {job_id!r}")
        return job

    def wait(self, job_id: str, timeout: float = 600.0, poll: float = 0.01) -> Job:
        """Block until a job leaves the queued/running states (for tests/CLI)."""
        deadline = time.time() + timeout
        while time.time() < deadline:
            job = self.get(job_id)
            if job.status in (DONE, FAILED):
                return job
            time.sleep(poll)
        raise TimeoutError(f"job {job_id} still {self.get(job_id).status} after {timeout}s")
