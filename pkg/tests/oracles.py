"""Independent reference implementations the tests check the library against.

Nothing here imports the code paths it verifies: warping paths are
enumerated outright, kernel masses are summed point by point with the
Gaussian CDF, and the consensus formula is re-derived from raw distances.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.stats import norm


@lru_cache(maxsize=None)
def enumerate_warping_paths(len_a: int, len_b: int) -> tuple:
    """All monotone index paths from (0,0) to (len_a-1, len_b-1)."""
    if len_a == 1 and len_b == 1:
        return (((0, 0),),)
    paths = []
    last = (len_a - 1, len_b - 1)
    for di, dj in ((1, 0), (0, 1), (1, 1)):
        pi, pj = len_a - di, len_b - dj
        if pi >= 1 and pj >= 1:
            for prefix in enumerate_warping_paths(pi, pj):
                paths.append(prefix + (last,))
    return tuple(paths)


def _as_rows(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x.reshape(-1, 1) if x.ndim == 1 else x


@lru_cache(maxsize=None)
def _padded_path_arrays(len_a: int, len_b: int):
    """Enumerated paths as padded index arrays for vectorized cost sums."""
    paths = enumerate_warping_paths(len_a, len_b)
    width = max(len(p) for p in paths)
    i_idx = np.zeros((len(paths), width), dtype=np.intp)
    j_idx = np.zeros((len(paths), width), dtype=np.intp)
    mask = np.zeros((len(paths), width))
    for r, path in enumerate(paths):
        for c, (i, j) in enumerate(path):
            i_idx[r, c], j_idx[r, c], mask[r, c] = i, j, 1.0
    return i_idx, j_idx, mask


def exhaustive_dtw(a, b) -> float:
    """Minimum over *every* enumerated warping path of its local-cost sum;
    local cost |x - y| in 1-D, Euclidean for vectors."""
    a, b = _as_rows(a), _as_rows(b)
    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    i_idx, j_idx, mask = _padded_path_arrays(len(a), len(b))
    totals = (cost[i_idx, j_idx] * mask).sum(axis=1)
    return float(totals.min())


def wgss_for_center(center, members, dtw_fn) -> float:
    """Within-group sum of squared DTW distances for a fixed center."""
    total = 0.0
    for m in members:
        d, _ = dtw_fn(center, m)
        total += d * d
    return total


def consensus_variance_from_scratch(barycenter_frames, member_arrays, dtw_fn) -> float:
    """Eq-style aggregation re-derived at the distance level."""
    squared = []
    for m in member_arrays:
        d, _ = dtw_fn(barycenter_frames, m)
        squared.append(d * d)
    return sum(squared) / len(squared)


def kernel_mass_in_cell(points: np.ndarray, x_lo: float, x_hi: float,
                        y_lo: float, y_hi: float, hx: float, hy: float) -> float:
    """Gaussian kernel mass inside one cell, summed point by point."""
    total = 0.0
    for px, py in points:
        mass_x = norm.cdf((x_hi - px) / hx) - norm.cdf((x_lo - px) / hx)
        mass_y = norm.cdf((y_hi - py) / hy) - norm.cdf((y_lo - py) / hy)
        total += mass_x * mass_y
    return total / len(points)
