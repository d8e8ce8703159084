"""2D map artifacts: landmark grids, scatter records, density grids, paths.

Everything here is a pure function of an immutable model/corpus pair, so a
service can evaluate viewport requests concurrently. The density estimator
reports *cell-averaged* Gaussian kernel mass (integral of the kernel over
the cell divided by cell area), which makes the grid exactly mass-
preserving: sum(values) * cell_area equals the fraction of the input's
kernel mass that falls inside the viewport.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, NotFoundError, ValidationError
from .ingest import Corpus, GestureSequence
from .vae import LatentPath, VAEModel, decode_batch, encode_sequence

DEFAULT_GRID_M = 11
DEFAULT_DENSITY_RESOLUTION = 64
DENSITY_FALLBACK_BANDWIDTH = 1e-3


@dataclass
class Viewport:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    grid_m: int = DEFAULT_GRID_M

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValidationError("viewport must have positive extent on both axes")
        if self.grid_m < 2:
            raise ValidationError("grid_m must be >= 2")

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max,
                "y_min": self.y_min, "y_max": self.y_max, "grid_m": self.grid_m}


def default_viewport(points: np.ndarray, grid_m: int = DEFAULT_GRID_M,
                     margin: float = 0.05) -> Viewport:
    """Bounding box of the given 2D points expanded by ``margin`` per side.

    Degenerate extents (a single point, collinear data) are padded to unit
    width so the viewport stays valid.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return Viewport(-1.0, 1.0, -1.0, 1.0, grid_m)
    x_min, y_min = pts.min(axis=0)
    x_max, y_max = pts.max(axis=0)
    dx = (x_max - x_min) or 1.0
    dy = (y_max - y_min) or 1.0
    return Viewport(x_min - margin * dx, x_max + margin * dx,
                    y_min - margin * dy, y_max + margin * dy, grid_m)


@dataclass
class LandmarkGrid:
    """Evenly spaced latent points with their decoded skeleton poses."""

    viewport: Viewport
    points: np.ndarray  # (m, m, 2)
    poses: np.ndarray   # (m, m, 20, 3)

    def to_dict(self) -> dict:
        return {
            "viewport": self.viewport.to_dict(),
            "m": self.viewport.grid_m,
            "points": self.points.tolist(),
            "poses": self.poses.tolist(),
        }


def landmark_grid(model: VAEModel, viewport: Viewport) -> LandmarkGrid:
    """Decode an m x m grid of latent points spanning the viewport.

    Row i runs along y (ascending), column j along x, and the four corner
    points coincide exactly with the viewport corners. Recompute on every
    pan or zoom to keep the landmarks representative of the visible region.
    """
    m = viewport.grid_m
    xs = np.linspace(viewport.x_min, viewport.x_max, m)
    ys = np.linspace(viewport.y_min, viewport.y_max, m)
    points = np.stack(np.meshgrid(xs, ys, indexing="xy"), axis=-1)  # (m, m, 2)
    flat = decode_batch(model, points.reshape(m * m, 2))
    poses = flat.reshape(m, m, 20, 3)
    return LandmarkGrid(viewport=viewport, points=points, poses=poses)


@dataclass
class ScatterRecord:
    """One embedded frame with the provenance shown in details-on-demand."""

    point: np.ndarray
    sequence_id: str
    frame_index: int
    dataset_id: str
    participant: str
    referent: str
    trial: int

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "sequence_id": self.sequence_id,
            "frame_index": self.frame_index,
            "dataset": self.dataset_id,
            "participant": self.participant,
            "referent": self.referent,
            "trial": self.trial,
        }


def scatter_projection(model: VAEModel, corpus: Corpus,
                       scope: Iterable[str] | None = None,
                       referent: str | None = None,
                       participant: str | None = None,
                       trial: int | None = None,
                       paths: dict[str, LatentPath] | None = None) -> list[ScatterRecord]:
    """One record per frame in scope, filtered by the given predicates.

    ``paths`` may carry precomputed embeddings (id -> LatentPath) to avoid
    re-encoding; anything missing is encoded on the fly. An empty selection
    is a valid result, not an error.
    """
    ids = corpus.sequence_ids() if scope is None else list(scope)
    records: list[ScatterRecord] = []
    for sid in ids:
        seq = corpus.sequence(sid)
        if referent is not None and seq.referent != referent:
            continue
        if participant is not None and seq.participant != participant:
            continue
        if trial is not None and seq.trial != trial:
            continue
        path = paths.get(sid) if paths else None
        if path is None:
            path = encode_sequence(model, seq)
        for t, point in enumerate(path.points):
            records.append(ScatterRecord(
                point=np.asarray(point), sequence_id=sid, frame_index=t,
                dataset_id=seq.dataset_id, participant=seq.participant,
                referent=seq.referent, trial=seq.trial,
            ))
    return records


@dataclass
class DensityGrid:
    viewport: Viewport
    resolution: int
    values: np.ndarray           # (r, r), row i = y ascending, col j = x
    bandwidth: tuple[float, float]
    bandwidth_fallback: bool = False

    def to_dict(self) -> dict:
        return {
            "viewport": self.viewport.to_dict(),
            "r": self.resolution,
            "bandwidth": list(self.bandwidth),
            "bandwidth_fallback": self.bandwidth_fallback,
            "values": self.values.tolist(),
        }


def scott_bandwidth(points: np.ndarray) -> tuple[tuple[float, float], bool]:
    """Per-axis Scott rule n^(-1/6) * sigma-hat; falls back to a small fixed
    bandwidth on any axis with zero (or undefined) spread."""
    n = len(points)
    factor = n ** (-1.0 / 6.0)
    bandwidths = []
    fallback = False
    for axis in range(2):
        sigma = float(np.std(points[:, axis], ddof=1)) if n > 1 else 0.0
        h = factor * sigma
        if not np.isfinite(h) or h <= 0:
            h = DENSITY_FALLBACK_BANDWIDTH
            fallback = True
        bandwidths.append(h)
    return (bandwidths[0], bandwidths[1]), fallback


def density_grid(points: np.ndarray, viewport: Viewport,
                 resolution: int = DEFAULT_DENSITY_RESOLUTION,
                 bandwidth="scott") -> DensityGrid:
    """Gaussian kernel density on an r x r lattice over the viewport.

    values[i, j] is the average density over cell (i, j): the total kernel
    mass inside the cell divided by (n * cell_area). ``bandwidth`` is
    "scott", a single float (both axes), or an (hx, hy) pair.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 1:
        raise DomainError("density_grid requires at least one point")
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")

    fallback = False
    if isinstance(bandwidth, str):
        if bandwidth != "scott":
            raise ValidationError(f"unknown bandwidth rule {bandwidth!r}")
        (hx, hy), fallback = scott_bandwidth(pts)
    elif np.isscalar(bandwidth):
        hx = hy = float(bandwidth)
    else:
        hx, hy = (float(b) for b in bandwidth)
    if hx <= 0 or hy <= 0:
        raise ValidationError("bandwidth must be positive")

    x_edges = np.linspace(viewport.x_min, viewport.x_max, resolution + 1)
    y_edges = np.linspace(viewport.y_min, viewport.y_max, resolution + 1)
    # per-point Gaussian CDF at the edges -> per-cell kernel mass, per axis
    cdf_x = ndtr((x_edges[None, :] - pts[:, 0:1]) / hx)   # (n, r+1)
    cdf_y = ndtr((y_edges[None, :] - pts[:, 1:2]) / hy)
    mass_x = np.diff(cdf_x, axis=1)                       # (n, r)
    mass_y = np.diff(cdf_y, axis=1)
    cell_area = (x_edges[1] - x_edges[0]) * (y_edges[1] - y_edges[0])
    values = (mass_y.T @ mass_x) / (len(pts) * cell_area)  # (r, r)
    return DensityGrid(viewport=viewport, resolution=resolution, values=values,
                       bandwidth=(hx, hy), bandwidth_fallback=fallback)


def path_projection(model: VAEModel, corpus: Corpus,
                    sequence_ids: Sequence[str],
                    paths: dict[str, LatentPath] | None = None) -> list[dict]:
    """Latent paths with per-frame clocks for map/skeleton animation.

    The frame index doubles as the shared animation clock, so the map
    marker and the 3D skeleton stay in lockstep.
    """
    results = []
    for sid in sequence_ids:
        seq = corpus.sequence(sid)  # raises NotFoundError for unknown ids
        path = paths.get(sid) if paths else None
        if path is None:
            path = encode_sequence(model, seq)
        results.append({
            "id": sid,
            "referent": seq.referent,
            "participant": seq.participant,
            "trial": seq.trial,
            "points": path.points.tolist(),
            "frames": list(range(seq.length)),
        })
    return results
