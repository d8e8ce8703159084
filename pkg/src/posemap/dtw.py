"""Dynamic time warping over pose sequences.

Definition used throughout the package:

* local cost between two frames is the Euclidean distance of their
  flattened coordinate vectors (not squared),
* the DTW distance is the unnormalized sum of local costs along the
  cheapest monotone warping path with steps {(1,0), (0,1), (1,1)},
* no slope weights; an optional Sakoe-Chiba band can cap the warp.

Backtracking resolves ties by preferring the diagonal step, then (1,0),
then (0,1), which makes the returned path deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DomainError, NotFoundError
from .ingest import Corpus, GestureSequence

_INF = float("inf")


@dataclass
class AlignmentPath:
    """Monotone index pairing between two sequences plus its total cost."""

    pairs: list[tuple[int, int]]
    total_cost: float

    def validate(self, len_a: int, len_b: int) -> None:
        if self.pairs[0] != (0, 0) or self.pairs[-1] != (len_a - 1, len_b - 1):
            raise DomainError("alignment path does not span both sequences")
        for (i0, j0), (i1, j1) in zip(self.pairs, self.pairs[1:]):
            di, dj = i1 - i0, j1 - j0
            if (di, dj) not in ((1, 0), (0, 1), (1, 1)):
                raise DomainError(f"illegal path step ({di}, {dj})")


def _as_matrix(seq) -> np.ndarray:
    """Accept a GestureSequence, a (T, D) matrix, or a 1-D value list."""
    if isinstance(seq, GestureSequence):
        return seq.flattened()
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim == 3:
        arr = arr.reshape(arr.shape[0], -1)
    if arr.ndim != 2:
        raise DomainError(f"sequence must be 1-D or (T, D), got shape {arr.shape}")
    return arr


def dtw(a, b, window: int | None = None) -> tuple[float, AlignmentPath]:
    """DTW distance and one optimal alignment path between two sequences.

    ``window``, if given, is a Sakoe-Chiba band half-width: cells with
    |i - j| > window are excluded.
    """
    am, bm = _as_matrix(a), _as_matrix(b)
    if len(am) == 0 or len(bm) == 0:
        raise DomainError("dtw requires nonempty sequences")
    if am.shape[1] != bm.shape[1]:
        raise DomainError(f"pose dimensionality mismatch: {am.shape[1]} vs {bm.shape[1]}")

    cost = cdist(am, bm)
    n, m = cost.shape
    c = cost.tolist()

    acc = [[_INF] * m for _ in range(n)]
    acc[0][0] = c[0][0]
    first_hi = m if window is None else min(m, window + 1)
    for j in range(1, first_hi):
        acc[0][j] = acc[0][j - 1] + c[0][j]
    for i in range(1, n):
        row, prev = acc[i], acc[i - 1]
        ci = c[i]
        lo = 0 if window is None else max(0, i - window)
        hi = m if window is None else min(m, i + window + 1)
        for j in range(lo, hi):
            if j == 0:
                best = prev[0]
            else:
                best = prev[j - 1]
                if prev[j] < best:
                    best = prev[j]
                if row[j - 1] < best:
                    best = row[j - 1]
            if best < _INF:
                row[j] = ci[j] + best

    distance = acc[n - 1][m - 1]
    if distance == _INF:
        raise DomainError("no admissible warping path inside the band")

    pairs = _backtrack(acc, n, m)
    return float(distance), AlignmentPath(pairs=pairs, total_cost=float(distance))


def _backtrack(acc, n: int, m: int) -> list[tuple[int, int]]:
    i, j = n - 1, m - 1
    pairs = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag, up, left = acc[i - 1][j - 1], acc[i - 1][j], acc[i][j - 1]
            best = min(diag, up, left)
            if diag == best:
                i, j = i - 1, j - 1
            elif up == best:
                i -= 1
            else:
                j -= 1
        pairs.append((i, j))
    pairs.reverse()
    return pairs


@dataclass
class DistanceMatrix:
    """Symmetric pairwise DTW distances with a zero diagonal."""

    sequence_ids: list[str]
    values: np.ndarray

    def row(self, sequence_id: str) -> dict[str, float]:
        i = self.sequence_ids.index(sequence_id)
        return {sid: float(self.values[i, j]) for j, sid in enumerate(self.sequence_ids)}

    def to_dict(self) -> dict:
        return {"ids": list(self.sequence_ids), "rows": self.values.tolist()}


def pairwise_distances(arrays: Sequence[np.ndarray], window: int | None = None) -> np.ndarray:
    """DTW distances for every unordered pair; symmetric by construction."""
    n = len(arrays)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d, _ = dtw(arrays[i], arrays[j], window=window)
            values[i, j] = values[j, i] = d
    return values


def distance_matrix(sequences: Sequence[GestureSequence], window: int | None = None) -> DistanceMatrix:
    if len(sequences) < 1:
        raise DomainError("distance_matrix requires at least one sequence")
    ids = [s.id for s in sequences]
    try:
        values = pairwise_distances([s.flattened() for s in sequences], window=window)
    except DomainError as e:
        raise DomainError(f"{e} (while computing pairwise distances over {ids})") from None
    return DistanceMatrix(sequence_ids=ids, values=values)


@dataclass
class NeighborQuery:
    """k nearest pool members by DTW distance, ascending; ties by id."""

    items: list[tuple[str, float]]
    truncated: bool

    def to_dict(self) -> dict:
        return {
            "neighbors": [{"id": i, "distance": d} for i, d in self.items],
            "truncated": self.truncated,
        }


def nearest_neighbors(corpus: Corpus, target: str, pool: Sequence[str], k: int,
                      window: int | None = None) -> NeighborQuery:
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    target_seq = corpus.sequence(target)
    candidates = [pid for pid in pool if pid != target]
    for pid in candidates:
        if not corpus.has_sequence(pid):
            raise NotFoundError(f"unknown sequence id {pid!r} in pool")
    scored = []
    for pid in candidates:
        d, _ = dtw(target_seq, corpus.sequence(pid), window=window)
        scored.append((pid, d))
    scored.sort(key=lambda item: (item[1], item[0]))
    truncated = k > len(scored)
    return NeighborQuery(items=scored[:k], truncated=truncated)
