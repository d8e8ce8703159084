"""k-means over gesture sequences: DTW assignment, averaged-sequence centroids.

The lifecycle is built for interactive refinement:

    init_clusters -> run -> reassign (pins the sequence) -> rerun_from_assignments

``run`` alternates nearest-centroid assignment with a centroid update that
re-averages each cluster starting *from its current centroid*, so the traced
inertia (total WGSS) can only go down within a run. Pinned sequences keep
their user-chosen cluster through every later run. An emptied cluster is
reseeded with the unpinned sequence farthest from it rather than failing.

All operations return a fresh model; inputs are never mutated. Ties are
broken deterministically (lowest cluster index, then lowest sequence id).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .barycenter import DbaConfig, dba, medoid_index
from .dtw import dtw
from .errors import DomainError, ValidationError

STATUS_INITIALIZED = "initialized"
STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max_iter_reached"


@dataclass
class ClusterModel:
    """State of one interactive clustering session over a fixed scope."""

    k: int
    scope: list[str]
    centroids: list[np.ndarray]            # k sequences, (L_c, D) each
    assignments: dict[str, int]
    pinned: set[str] = field(default_factory=set)
    inertia: float = 0.0
    inertia_trace: list[float] = field(default_factory=list)
    status: str = STATUS_INITIALIZED
    reseeds: list[dict] = field(default_factory=list)

    def members(self, cluster: int) -> list[str]:
        return sorted(i for i, c in self.assignments.items() if c == cluster)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "scope": list(self.scope),
            "centroids": [c.tolist() for c in self.centroids],
            "assignments": dict(sorted(self.assignments.items())),
            "pinned": sorted(self.pinned),
            "inertia": self.inertia,
            "inertia_trace": list(self.inertia_trace),
            "status": self.status,
            "reseeds": list(self.reseeds),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClusterModel":
        return cls(
            k=int(doc["k"]),
            scope=list(doc["scope"]),
            centroids=[np.asarray(c, dtype=np.float64) for c in doc["centroids"]],
            assignments={k: int(v) for k, v in doc["assignments"].items()},
            pinned=set(doc.get("pinned", [])),
            inertia=float(doc.get("inertia", 0.0)),
            inertia_trace=[float(v) for v in doc.get("inertia_trace", [])],
            status=doc.get("status", STATUS_INITIALIZED),
            reseeds=list(doc.get("reseeds", [])),
        )


SequenceData = Mapping[str, np.ndarray]


def _check_scope(data: SequenceData, scope: Sequence[str]) -> list[str]:
    ids = sorted(set(scope))
    if not ids:
        raise ValidationError("clustering scope is empty")
    missing = [i for i in ids if i not in data]
    if missing:
        raise ValidationError(f"scope ids missing from data: {missing}")
    return ids


def _nearest(seq: np.ndarray, centroids: Sequence[np.ndarray]) -> tuple[int, float]:
    best_c, best_d = 0, None
    for c, centroid in enumerate(centroids):
        d, _ = dtw(seq, centroid)
        if best_d is None or d < best_d:
            best_c, best_d = c, d
    return best_c, float(best_d)


def farthest_first_seeds(data: SequenceData, scope: Sequence[str], k: int,
                         rng_seed: int = 0) -> list[str]:
    """Pick k seed ids: random first pick, then repeatedly the id whose
    minimum DTW distance to the chosen seeds is largest (ties -> lowest id)."""
    ids = _check_scope(data, scope)
    if k > len(ids):
        raise ValidationError(f"k={k} exceeds scope size {len(ids)}")
    rng = np.random.default_rng(rng_seed)
    seeds = [ids[int(rng.integers(len(ids)))]]
    min_dist = {i: dtw(data[i], data[seeds[0]])[0] for i in ids}
    while len(seeds) < k:
        candidates = [i for i in ids if i not in seeds]
        # farthest candidate; ties resolved toward the lowest id
        nxt = min(candidates, key=lambda i: (-min_dist[i], i))
        seeds.append(nxt)
        for i in candidates:
            d, _ = dtw(data[i], data[nxt])
            if d < min_dist[i]:
                min_dist[i] = d
    return seeds


def init_clusters(data: SequenceData, scope: Sequence[str],
                  seeds: Sequence[str] | None = None, k: int | None = None,
                  rng_seed: int = 0) -> ClusterModel:
    """Seed centroids (explicit ids or farthest-first) and assign by DTW."""
    ids = _check_scope(data, scope)
    if seeds is not None:
        seeds = list(seeds)
        if len(set(seeds)) != len(seeds):
            raise ValidationError("duplicate seed ids")
        outside = [s for s in seeds if s not in set(ids)]
        if outside:
            raise ValidationError(f"seed ids outside scope: {outside}")
        if k is not None and k != len(seeds):
            raise ValidationError(f"k={k} disagrees with {len(seeds)} explicit seeds")
        k = len(seeds)
    else:
        if k is None:
            raise ValidationError("either explicit seeds or k must be given")
        if k < 1:
            raise ValidationError(f"k must be >= 1, got {k}")
        if k > len(ids):
            raise ValidationError(f"k={k} exceeds scope size {len(ids)}")
        seeds = farthest_first_seeds(data, ids, k, rng_seed=rng_seed)

    centroids = [np.array(data[s], dtype=np.float64, copy=True) for s in seeds]
    model = ClusterModel(k=k, scope=ids, centroids=centroids, assignments={})
    for i in ids:
        c, _ = _nearest(data[i], centroids)
        model.assignments[i] = c
    model.inertia = _total_wgss(data, model)
    return model


def _total_wgss(data: SequenceData, model: ClusterModel) -> float:
    total = 0.0
    for i in model.scope:
        d, _ = dtw(data[i], model.centroids[model.assignments[i]])
        total += d * d
    return float(total)


def _fix_empty_clusters(data: SequenceData, model: ClusterModel, iteration: int) -> bool:
    """Reseed emptied clusters with the farthest unpinned sequence; returns
    True if anything changed. Prefers donors from clusters of size >= 2."""
    changed = False
    for c in range(model.k):
        if model.members(c):
            continue
        sizes = {q: len(model.members(q)) for q in range(model.k)}
        unpinned = [i for i in model.scope if i not in model.pinned]
        candidates = [i for i in unpinned if sizes[model.assignments[i]] >= 2]
        if not candidates:
            candidates = unpinned
        if not candidates:
            model.reseeds.append({"iteration": iteration, "cluster": c, "sequence": None})
            continue
        scored = []
        for i in candidates:
            d, _ = dtw(data[i], model.centroids[c])
            scored.append((d, i))
        # farthest first; ties toward the lowest id
        scored.sort(key=lambda item: (-item[0], item[1]))
        chosen = scored[0][1]
        model.centroids[c] = np.array(data[chosen], dtype=np.float64, copy=True)
        model.assignments[chosen] = c
        model.reseeds.append({"iteration": iteration, "cluster": c, "sequence": chosen})
        changed = True
    return changed


def run(data: SequenceData, model: ClusterModel, max_iter: int = 20,
        dba_max_iter: int = 10, dba_tol: float = 1e-6) -> ClusterModel:
    """Alternate assignment and centroid updates until a full fixed point.

    Stops when an iteration changes neither the assignments nor any
    centroid; pinned sequences are never reassigned. Appends the total
    WGSS to inertia_trace after every productive iteration.
    """
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter}")
    m = copy.deepcopy(model)
    for iteration in range(1, max_iter + 1):
        changed = False
        for i in m.scope:
            if i in m.pinned:
                continue
            c, _ = _nearest(data[i], m.centroids)
            if c != m.assignments[i]:
                m.assignments[i] = c
                changed = True
        changed |= _fix_empty_clusters(data, m, iteration)

        for c in range(m.k):
            members = m.members(c)
            if not members:
                continue
            result = dba([data[i] for i in members],
                         DbaConfig(init=m.centroids[c], max_iter=dba_max_iter, tol=dba_tol),
                         member_ids=members)
            if not np.array_equal(result.frames, m.centroids[c]):
                m.centroids[c] = result.frames
                changed = True

        if changed:
            m.inertia = _total_wgss(data, m)
            m.inertia_trace.append(m.inertia)
        else:
            m.status = STATUS_CONVERGED
            break
    else:
        m.status = STATUS_MAX_ITER
    return m


def reassign(model: ClusterModel, sequence_id: str, target: int) -> ClusterModel:
    """Move a sequence to a chosen cluster and pin it there.

    Centroids are left untouched; call run() or rerun_from_assignments()
    to propagate. Repeating the same reassignment is a no-op.
    """
    if sequence_id not in model.assignments:
        raise ValidationError(f"unknown sequence id {sequence_id!r}")
    if not (0 <= target < model.k):
        raise ValidationError(f"target cluster {target} outside [0, {model.k})")
    m = copy.deepcopy(model)
    m.assignments[sequence_id] = target
    m.pinned.add(sequence_id)
    return m


def rerun_from_assignments(data: SequenceData, model: ClusterModel, max_iter: int = 20,
                           dba_max_iter: int = 10, dba_tol: float = 1e-6) -> ClusterModel:
    """Recompute centroids from the current (possibly refined) partition,
    then run to convergence. Each centroid restarts from its cluster's
    medoid, so its length adapts to the refined membership."""
    m = copy.deepcopy(model)
    for c in range(m.k):
        members = m.members(c)
        if not members:
            continue
        result = dba([data[i] for i in members],
                     DbaConfig(init="medoid", max_iter=dba_max_iter, tol=dba_tol),
                     member_ids=members)
        m.centroids[c] = result.frames
    m.inertia = _total_wgss(data, m)
    return run(data, m, max_iter=max_iter, dba_max_iter=dba_max_iter, dba_tol=dba_tol)
