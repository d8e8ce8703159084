"""Average gestures by iterative alignment, and the variance consensus measure.

The averaging loop alternates two steps until the objective stalls:

1. align the current center with every member sequence (DTW paths),
2. replace each center frame by the arithmetic mean of all member frames
   the paths associated with it.

The traced objective (WGSS) is the within-group sum of squared DTW
distances of the members to the center. The loop stops when the relative
WGSS improvement drops below ``tol``; an iteration that would *worsen*
the WGSS is discarded outright, so the recorded trace never increases.

Center length is fixed by the initial sequence. The default init is the
medoid: the member with the smallest summed DTW distance to all others,
ties broken by lowest id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .dtw import _as_matrix, dtw, pairwise_distances
from .errors import DomainError
from .ingest import Corpus
from .skeleton import POSE_DIM, unflatten


@dataclass
class DbaConfig:
    """Averaging knobs: initial center selection, iteration cap, stop tolerance."""

    init: str | np.ndarray = "medoid"  # "medoid" or an explicit (L, D) center
    max_iter: int = 10
    tol: float = 1e-6

    def params_dict(self) -> dict:
        init = self.init if isinstance(self.init, str) else "explicit"
        return {"init": init, "max_iter": self.max_iter, "tol": self.tol}


@dataclass
class Barycenter:
    """An average sequence with its convergence record."""

    frames: np.ndarray                      # (L, D)
    member_ids: list[str]
    member_distances: list[float]           # DTW distance of each member to frames
    wgss_trace: list[float]                 # per-iteration objective, non-increasing
    iterations_run: int
    converged: bool

    @property
    def wgss(self) -> float:
        return self.wgss_trace[-1]

    def frames_as_poses(self) -> np.ndarray:
        """(L, 20, 3) view for 60-D pose barycenters."""
        if self.frames.shape[1] != POSE_DIM:
            raise DomainError("barycenter is not in pose space")
        return np.stack([unflatten(f) for f in self.frames])

    def to_dict(self) -> dict:
        return {
            "frames": self.frames.tolist(),
            "member_ids": list(self.member_ids),
            "member_distances": list(self.member_distances),
            "wgss_trace": list(self.wgss_trace),
            "iterations_run": self.iterations_run,
            "converged": self.converged,
        }


def medoid_index(members: Sequence[np.ndarray], ids: Sequence[str]) -> int:
    """Member minimizing the summed DTW distance to all members; ties -> lowest id."""
    values = pairwise_distances(members)
    sums = values.sum(axis=1)
    order = sorted(range(len(members)), key=lambda i: (sums[i], ids[i]))
    return order[0]


def _align_all(center: np.ndarray, members: Sequence[np.ndarray]):
    distances, paths = [], []
    for m in members:
        d, path = dtw(center, m)
        distances.append(d)
        paths.append(path.pairs)
    return distances, paths


def _mean_update(center: np.ndarray, members: Sequence[np.ndarray], paths) -> np.ndarray:
    sums = np.zeros_like(center)
    counts = np.zeros(len(center))
    # members arrive in caller-fixed order, so the accumulation order (and
    # therefore the floating-point result) is deterministic
    for member, pairs in zip(members, paths):
        for i, j in pairs:
            sums[i] += member[j]
            counts[i] += 1
    return sums / counts[:, None]


def dba(members: Sequence, config: DbaConfig | None = None,
        member_ids: Sequence[str] | None = None) -> Barycenter:
    """Average the member sequences; see module docstring for the loop."""
    config = config or DbaConfig()
    if len(members) == 0:
        raise DomainError("dba requires at least one member sequence")
    mats = [_as_matrix(m) for m in members]
    dims = {m.shape[1] for m in mats}
    if len(dims) != 1:
        raise DomainError(f"members disagree on pose dimensionality: {sorted(dims)}")
    ids = list(member_ids) if member_ids is not None else [str(i) for i in range(len(mats))]
    if len(ids) != len(mats):
        raise DomainError("member_ids length does not match members")

    if isinstance(config.init, str):
        if config.init != "medoid":
            raise DomainError(f"unknown init strategy {config.init!r}")
        center = mats[medoid_index(mats, ids)].copy()
    else:
        center = np.asarray(config.init, dtype=np.float64).copy()
        if center.ndim == 1:
            center = center.reshape(-1, 1)
        if center.shape[1] not in dims:
            raise DomainError("explicit init dimensionality does not match members")

    distances, paths = _align_all(center, mats)
    wgss = float(sum(d * d for d in distances))
    trace = [wgss]
    converged = False
    iterations = 0
    for _ in range(config.max_iter):
        new_center = _mean_update(center, mats, paths)
        new_distances, new_paths = _align_all(new_center, mats)
        new_wgss = float(sum(d * d for d in new_distances))
        iterations += 1
        if new_wgss > wgss:
            # worsening step: keep the previous center, stop
            converged = True
            break
        center, distances, paths = new_center, new_distances, new_paths
        improvement = (wgss - new_wgss) / wgss if wgss > 0 else 0.0
        wgss = new_wgss
        trace.append(wgss)
        if improvement < config.tol:
            converged = True
            break

    return Barycenter(
        frames=center,
        member_ids=ids,
        member_distances=[float(d) for d in distances],
        wgss_trace=trace,
        iterations_run=iterations,
        converged=converged,
    )


@dataclass
class ConsensusReport:
    """Variance of member DTW distances around the referent's average gesture."""

    referent: str
    variance: float
    distances: list[tuple[str, float]]
    barycenter: Barycenter

    def to_dict(self) -> dict:
        return {
            "referent": self.referent,
            "variance": self.variance,
            "distances": [{"id": i, "distance": d} for i, d in self.distances],
            "barycenter": self.barycenter.to_dict(),
        }


def variance_from_distances(distances: Sequence[float]) -> float:
    """Consensus variance: the mean of the squared distances."""
    if len(distances) == 0:
        raise DomainError("variance needs at least one distance")
    return float(sum(d * d for d in distances) / len(distances))


def variance_consensus(corpus: Corpus, referent: str,
                       config: DbaConfig | None = None) -> ConsensusReport:
    """Mean squared DTW distance of a referent's gestures to their average.

    The member list is ordered by sequence id so results do not depend on
    corpus insertion order.
    """
    sequences = sorted(corpus.sequences_for_referent(referent), key=lambda s: s.id)
    mats = [s.flattened() for s in sequences]
    ids = [s.id for s in sequences]
    center = dba(mats, config=config, member_ids=ids)
    variance = variance_from_distances(center.member_distances)
    return ConsensusReport(
        referent=referent,
        variance=variance,
        distances=list(zip(ids, center.member_distances)),
        barycenter=center,
    )


@dataclass
class DistanceHistogram:
    """Raw member-to-average distances plus fixed-width bin counts."""

    distances: list[float]
    bin_width: float
    counts: list[int]
    bin_edges: list[float]

    def to_dict(self) -> dict:
        return {
            "distances": list(self.distances),
            "bin_width": self.bin_width,
            "counts": list(self.counts),
            "bin_edges": list(self.bin_edges),
        }


def histogram_from_distances(distances: Sequence[float]) -> DistanceHistogram:
    """Fixed-width bins: width = max distance / 10, at least one bin."""
    values = np.asarray(list(distances), dtype=np.float64)
    top = float(values.max())
    if top > 0:
        counts, edges = np.histogram(values, bins=10, range=(0.0, top))
        width = top / 10.0
    else:
        counts, edges = np.histogram(values, bins=1, range=(0.0, 1.0))
        width = 1.0
    return DistanceHistogram(
        distances=[float(v) for v in values],
        bin_width=width,
        counts=[int(c) for c in counts],
        bin_edges=[float(e) for e in edges],
    )


def distance_distribution(corpus: Corpus, referent: str,
                          config: DbaConfig | None = None,
                          report: ConsensusReport | None = None) -> DistanceHistogram:
    """Histogram of member DTW distances to the referent's average gesture."""
    if report is None:
        report = variance_consensus(corpus, referent, config=config)
    return histogram_from_distances([d for _, d in report.distances])
