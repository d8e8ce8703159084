"""REST service tying the analysis modules together.

All payloads are JSON; errors come back as ``{"code": ..., "message": ...}``
with 400 for invalid requests, 404 for unknown resources, 409 for a
concurrent mutation on the same cluster model, and 500 otherwise.

Expensive operations (training, consensus, cluster runs) are submitted as
jobs and polled via ``GET /jobs/{id}``; their results land in a
content-hash cache, so repeating a request with identical parameters is
served from the cache with a byte-identical payload.
"""

from __future__ import annotations

import threading
import uuid
from typing import Any

import numpy as np
from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import clustering
from .barycenter import DbaConfig, histogram_from_distances, variance_consensus
from .cache import ResultCache
from .dtw import distance_matrix, nearest_neighbors
from .errors import (
    ConcurrencyError,
    DomainError,
    ExportError,
    NotFoundError,
    ParseError,
    PosemapError,
    SchemaError,
    ValidationError,
)
from .exports import build_export, parse_import
from .ingest import Corpus, canonical_json
from .jobs import JobRunner
from .mapgrid import (
    Viewport,
    default_viewport,
    density_grid,
    landmark_grid,
    path_projection,
    scatter_projection,
)
from .vae import VAEConfig, VAEModel, decode, encode, encode_sequence, train

_ERROR_STATUS = {
    ValidationError: 400,
    DomainError: 400,
    SchemaError: 400,
    ParseError: 400,
    ExportError: 400,
    NotFoundError: 404,
    ConcurrencyError: 409,
}

_ERROR_CODE = {400: "validation", 404: "not_found", 409: "conflict", 500: "internal"}


class ServiceState:
    """Mutable session behind the API: corpus, model, jobs, cache, artifacts."""

    def __init__(self, corpus: Corpus, model: VAEModel | None = None,
                 cache_dir: str = ".posemap-cache", workers: int = 2):
        self.corpus = corpus
        self.model = model
        self.cache = ResultCache(cache_dir)
        self.jobs = JobRunner(workers=workers)
        self.lock = threading.Lock()
        self.cluster_models: dict[str, clustering.ClusterModel] = {}
        self.cluster_busy: set[str] = set()
        self.consensus: dict[str, dict] = {}   # referent -> {params, cache_key, payload}
        self.annotations: dict[str, str] = {}
        self._embeddings: dict[str, Any] = {}

    def require_model(self) -> VAEModel:
        if self.model is None:
            raise ValidationError("no embedding model loaded; train or upload one first")
        return self.model

    def set_model(self, model: VAEModel) -> None:
        with self.lock:
            self.model = model
            self._embeddings = {}

    def embeddings(self) -> dict:
        """Latent paths for every corpus sequence, computed once per model."""
        model = self.require_model()
        with self.lock:
            if not self._embeddings:
                self._embeddings = {
                    sid: encode_sequence(model, self.corpus.sequence(sid))
                    for sid in self.corpus.sequence_ids()
                }
            return self._embeddings

    def whole_map_viewport(self, grid_m: int) -> Viewport:
        points = np.concatenate([p.points for p in self.embeddings().values()])
        return default_viewport(points, grid_m=grid_m)


def create_app(corpus: Corpus, model: VAEModel | None = None,
               cache_dir: str = ".posemap-cache", workers: int = 2,
               frontend_dir: str | None = None) -> FastAPI:
    state = ServiceState(corpus, model=model, cache_dir=cache_dir, workers=workers)
    app = FastAPI(title="posemap analysis service")
    app.state.posemap = state
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    if frontend_dir:
        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")

    @app.exception_handler(PosemapError)
    async def posemap_error(request: Request, exc: PosemapError):
        status = _ERROR_STATUS.get(type(exc), 500)
        return JSONResponse(status_code=status,
                            content={"code": _ERROR_CODE[status], "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": "validation", "message": str(exc.errors())})

    # -- corpus browsing ------------------------------------------------------

    @app.get("/datasets")
    def get_datasets():
        counts: dict[str, int] = {}
        for seq in state.corpus.sequences:
            counts[seq.dataset_id] = counts.get(seq.dataset_id, 0) + 1
        return {"datasets": [
            {**d.to_dict(), "sequences": counts.get(d.id, 0)}
            for d in state.corpus.datasets
        ], "content_hash": state.corpus.content_hash}

    @app.get("/referents")
    def get_referents():
        return {"referents": state.corpus.referents()}

    @app.get("/referents/{referent}/gestures")
    def get_referent_gestures(referent: str):
        sequences = state.corpus.sequences_for_referent(referent)
        return {"referent": referent, "gestures": [
            {"id": s.id, "participant": s.participant, "trial": s.trial,
             "length": s.length, "dropped_frames": s.dropped_frames}
            for s in sorted(sequences, key=lambda s: s.id)
        ]}

    @app.get("/gestures/{sequence_id:path}/neighbors")
    def get_neighbors(sequence_id: str, k: int = 5):
        seq = state.corpus.sequence(sequence_id)
        pool = [s.id for s in state.corpus.sequences_for_referent(seq.referent)]
        return nearest_neighbors(state.corpus, sequence_id, pool, k).to_dict()

    @app.get("/gestures/{sequence_id:path}")
    def get_gesture(sequence_id: str):
        return state.corpus.sequence(sequence_id).to_dict()

    # -- embedding ------------------------------------------------------------

    @app.post("/embedding/train")
    def post_train(body: dict = Body(default={})):
        overrides = body.get("config", {})
        try:
            config = VAEConfig(**overrides)
        except TypeError as e:
            raise ValidationError(f"bad training config: {e}") from None
        params = {"config": config.to_dict()}
        key = state.cache.key(state.corpus.content_hash, "train", params)
        cached = state.cache.get(key)
        if cached is not None:
            state.set_model(VAEModel.from_dict(cached["payload"]))
            job = state.jobs.completed("train", key)
            return {"job_id": job.id, "cached": True, "result_ref": key}

        def work(progress):
            model = train(state.corpus, config,
                          on_epoch=lambda e, total: progress((e + 1) / total))
            state.cache.put(key, model.to_dict())
            state.set_model(model)
            return key

        job = state.jobs.submit("train", work)
        return {"job_id": job.id, "cached": False}

    @app.get("/embedding/model")
    def get_model():
        return state.require_model().to_dict()

    @app.post("/embedding/model")
    def post_model(body: dict = Body(...)):
        state.set_model(VAEModel.from_dict(body))
        return {"ok": True}

    @app.post("/embedding/encode")
    def post_encode(body: dict = Body(...)):
        model = state.require_model()
        if "sequence_id" in body:
            path = encode_sequence(model, state.corpus.sequence(body["sequence_id"]))
            return {"id": path.sequence_id, "points": path.points.tolist()}
        if "pose" in body:
            return {"point": encode(model, np.asarray(body["pose"], dtype=float)).tolist()}
        raise ValidationError("body must carry 'pose' or 'sequence_id'")

    @app.post("/embedding/decode")
    def post_decode(body: dict = Body(...)):
        if "z" not in body:
            raise ValidationError("body must carry 'z': [x, y]")
        pose = decode(state.require_model(), np.asarray(body["z"], dtype=float))
        return {"pose": pose.tolist()}

    # -- map artifacts ----------------------------------------------------------

    def _viewport(x0, x1, y0, y1, m) -> Viewport:
        if None in (x0, x1, y0, y1):
            return state.whole_map_viewport(m)
        return Viewport(x0, x1, y0, y1, m)

    @app.get("/map/grid")
    def get_grid(x0: float | None = None, x1: float | None = None,
                 y0: float | None = None, y1: float | None = None, m: int = 11):
        grid = landmark_grid(state.require_model(), _viewport(x0, x1, y0, y1, m))
        return grid.to_dict()

    @app.get("/map/scatter")
    def get_scatter(referent: str | None = None, participant: str | None = None,
                    trial: int | None = None):
        records = scatter_projection(
            state.require_model(), state.corpus, referent=referent,
            participant=participant, trial=trial, paths=state.embeddings())
        return {"records": [r.to_dict() for r in records]}

    @app.get("/map/density")
    def get_density(x0: float | None = None, x1: float | None = None,
                    y0: float | None = None, y1: float | None = None,
                    r: int = 64, bandwidth: float | None = None,
                    referent: str | None = None):
        paths = state.embeddings()
        ids = state.corpus.sequence_ids()
        if referent is not None:
            ids = [s.id for s in state.corpus.sequences_for_referent(referent)]
        points = np.concatenate([paths[i].points for i in ids])
        viewport = _viewport(x0, x1, y0, y1, 11)
        grid = density_grid(points, viewport, resolution=r,
                            bandwidth="scott" if bandwidth is None else bandwidth)
        return grid.to_dict()

    @app.get("/map/paths")
    def get_paths(ids: str):
        wanted = [s for s in ids.split(",") if s]
        return {"paths": path_projection(state.require_model(), state.corpus,
                                         wanted, paths=state.embeddings())}

    # -- consensus ---------------------------------------------------------------

    def _consensus_params(body: dict) -> dict:
        return {"max_iter": int(body.get("max_iter", 10)),
                "tol": float(body.get("tol", 1e-6))}

    @app.post("/consensus/{referent}")
    def post_consensus(referent: str, body: dict = Body(default={})):
        state.corpus.sequences_for_referent(referent)  # 404 on unknown referent
        params = _consensus_params(body)
        bypass = bool(body.get("bypass_cache", False))
        key = state.cache.key(state.corpus.content_hash, "consensus",
                              {"referent": referent, **params})
        cached = state.cache.get(key) if not bypass else None
        if cached is not None:
            with state.lock:
                state.consensus[referent] = {"params": params, "cache_key": key,
                                             "payload": cached["payload"]}
            job = state.jobs.completed("variance", key)
            return {"job_id": job.id, "cached": True, "result_ref": key}

        def work(progress):
            report = variance_consensus(
                state.corpus, referent,
                DbaConfig(max_iter=params["max_iter"], tol=params["tol"]))
            payload = report.to_dict()
            if not bypass:
                state.cache.put(key, payload)
            with state.lock:
                state.consensus[referent] = {"params": params, "cache_key": key,
                                             "payload": payload}
            return key

        job = state.jobs.submit("variance", work)
        return {"job_id": job.id, "cached": False}

    @app.get("/consensus/{referent}")
    def get_consensus(referent: str):
        entry = state.consensus.get(referent)
        if entry is None:
            raise NotFoundError(f"no consensus computed for referent {referent!r}")
        return entry["payload"]

    @app.get("/consensus/{referent}/distribution")
    def get_distribution(referent: str):
        entry = state.consensus.get(referent)
        if entry is None:
            raise NotFoundError(f"no consensus computed for referent {referent!r}")
        distances = [d["distance"] for d in entry["payload"]["distances"]]
        return histogram_from_distances(distances).to_dict()

    @app.get("/metrics/matrix")
    def get_matrix(referent: str, bypass_cache: bool = False):
        sequences = sorted(state.corpus.sequences_for_referent(referent), key=lambda s: s.id)

        def compute():
            return distance_matrix(sequences).to_dict()

        payload, cached, key = state.cache.get_or_compute(
            state.corpus.content_hash, "distance-matrix", {"referent": referent},
            compute, bypass=bypass_cache)
        return {"cached": cached, "result_ref": key, **payload}

    @app.get("/results/{key}")
    def get_result(key: str):
        data = state.cache.payload_bytes(key)
        if data is None:
            raise NotFoundError(f"no cached result {key!r}")
        return Response(content=data, media_type="application/json")

    # -- clustering ----------------------------------------------------------------

    def _cluster_model(model_id: str) -> clustering.ClusterModel:
        model = state.cluster_models.get(model_id)
        if model is None:
            raise NotFoundError(f"unknown cluster model {model_id!r}")
        return model

    def _claim(model_id: str):
        with state.lock:
            if model_id in state.cluster_busy:
                raise ConcurrencyError(f"a job is already running for cluster model {model_id}")
            state.cluster_busy.add(model_id)

    @app.post("/clusters")
    def post_clusters(body: dict = Body(...)):
        scope_spec = body.get("scope")
        if isinstance(scope_spec, dict) and "referent" in scope_spec:
            scope = [s.id for s in state.corpus.sequences_for_referent(scope_spec["referent"])]
        elif isinstance(scope_spec, dict) and "ids" in scope_spec:
            scope = list(scope_spec["ids"])
        else:
            raise ValidationError("scope must be {'referent': name} or {'ids': [...]}")
        data = state.corpus.flattened_map(scope)
        seeds = body.get("seeds")
        model = clustering.init_clusters(
            data, scope,
            seeds=None if seeds in (None, "auto") else list(seeds),
            k=body.get("k"), rng_seed=int(body.get("rng_seed", 0)))
        model_id = uuid.uuid4().hex[:12]
        with state.lock:
            state.cluster_models[model_id] = model
        return {"model_id": model_id, "model": model.to_dict()}

    @app.get("/clusters/{model_id}")
    def get_cluster(model_id: str):
        return {"model_id": model_id, "model": _cluster_model(model_id).to_dict()}

    def _submit_cluster_job(model_id: str, kind: str, runner, params: dict):
        _claim(model_id)
        # key on the pre-run model state: run() is deterministic, so equal
        # keys imply equal cached values (the cache stays a pure memo)
        before = _cluster_model(model_id).to_dict()
        state_digest = state.cache.key(state.corpus.content_hash, kind,
                                       {"state": before, **params})

        def work(progress):
            try:
                model = runner()
                with state.lock:
                    state.cluster_models[model_id] = model
                state.cache.put(state_digest, model.to_dict())
                return state_digest
            finally:
                with state.lock:
                    state.cluster_busy.discard(model_id)

        return state.jobs.submit(kind, work)

    @app.post("/clusters/{model_id}/run")
    def post_cluster_run(model_id: str, body: dict = Body(default={})):
        model = _cluster_model(model_id)
        data = state.corpus.flattened_map(model.scope)
        max_iter = int(body.get("max_iter", 20))
        job = _submit_cluster_job(
            model_id, "cluster-run",
            lambda: clustering.run(data, _cluster_model(model_id), max_iter=max_iter),
            params={"max_iter": max_iter})
        return {"job_id": job.id}

    @app.post("/clusters/{model_id}/reassign")
    def post_reassign(model_id: str, body: dict = Body(...)):
        if "sequence_id" not in body or "cluster" not in body:
            raise ValidationError("body must carry 'sequence_id' and 'cluster'")
        with state.lock:
            if model_id in state.cluster_busy:
                raise ConcurrencyError(f"a job is already running for cluster model {model_id}")
        model = clustering.reassign(_cluster_model(model_id),
                                    str(body["sequence_id"]), int(body["cluster"]))
        with state.lock:
            state.cluster_models[model_id] = model
        return {"model_id": model_id, "model": model.to_dict()}

    @app.post("/clusters/{model_id}/rerun")
    def post_cluster_rerun(model_id: str, body: dict = Body(default={})):
        model = _cluster_model(model_id)
        data = state.corpus.flattened_map(model.scope)
        max_iter = int(body.get("max_iter", 20))
        job = _submit_cluster_job(
            model_id, "cluster-rerun",
            lambda: clustering.rerun_from_assignments(
                data, _cluster_model(model_id), max_iter=max_iter),
            params={"max_iter": max_iter})
        return {"job_id": job.id}

    # -- annotations / export ---------------------------------------------------------

    @app.get("/annotations")
    def get_annotations():
        return {"annotations": dict(state.annotations)}

    @app.post("/annotations")
    def post_annotations(body: dict = Body(...)):
        with state.lock:
            for k, v in body.items():
                state.annotations[str(k)] = str(v)
        return {"annotations": dict(state.annotations)}

    @app.get("/export")
    def get_export():
        return build_export(state.corpus, state.consensus, state.cluster_models,
                            state.annotations)

    @app.post("/export")
    def post_import(body: dict = Body(...)):
        consensus, cluster_models, annotations = parse_import(body, state.corpus)
        with state.lock:
            state.consensus = consensus
            state.cluster_models = cluster_models
            state.annotations = annotations
            for entry in consensus.values():
                key = entry.get("cache_key")
                if key and state.cache.get(key) is None:
                    state.cache.put(key, entry["payload"])
        return {"ok": True,
                "consensus": sorted(consensus),
                "cluster_models": sorted(cluster_models)}

    # -- jobs ------------------------------------------------------------------------

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return state.jobs.get(job_id).to_dict()

    return app


def create_app_from_paths(corpus_path: str, model_path: str | None = None,
                          cache_dir: str = ".posemap-cache", workers: int = 2,
                          frontend_dir: str | None = None) -> FastAPI:
    corpus = Corpus.load(corpus_path)
    model = VAEModel.load(model_path) if model_path else None
    return create_app(corpus, model=model, cache_dir=cache_dir, workers=workers,
                      frontend_dir=frontend_dir)
