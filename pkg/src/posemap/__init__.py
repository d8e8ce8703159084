"""posemap: quantitative analysis of motion elicitation data on a learned 2D map.

The pieces, bottom to top:

* :mod:`posemap.ingest` -- dataset parsing, pose normalization, corpora
* :mod:`posemap.dtw` -- DTW distances, alignment paths, neighbor queries
* :mod:`posemap.barycenter` -- average gestures and the variance consensus
* :mod:`posemap.clustering` -- interactive k-means with averaged centroids
* :mod:`posemap.vae` -- the 2D pose embedding (train / encode / decode)
* :mod:`posemap.mapgrid` -- landmark grids, scatter, density, path overlays
* :mod:`posemap.service` -- the REST service; :mod:`posemap.cli` -- batch CLI
"""

from .barycenter import Barycenter, ConsensusReport, DbaConfig, dba, distance_distribution, variance_consensus
from .clustering import ClusterModel, init_clusters, reassign, rerun_from_assignments, run
from .dtw import AlignmentPath, DistanceMatrix, distance_matrix, dtw, nearest_neighbors
from .ingest import Corpus, DatasetDescriptor, GestureSequence, build_corpus, parse_dataset
from .mapgrid import DensityGrid, LandmarkGrid, Viewport, default_viewport, density_grid, landmark_grid, path_projection, scatter_projection
from .skeleton import flatten, normalize_pose, unflatten
from .vae import LatentPath, VAEConfig, VAEModel, decode, encode, encode_sequence, gradient_check, train

__version__ = "0.1.0"

__all__ = [
    "AlignmentPath", "Barycenter", "ClusterModel", "ConsensusReport", "Corpus",
    "DatasetDescriptor", "DbaConfig", "DensityGrid", "DistanceMatrix",
    "GestureSequence", "LandmarkGrid", "LatentPath", "VAEConfig", "VAEModel",
    "Viewport", "build_corpus", "dba", "decode", "default_viewport",
    "density_grid", "distance_distribution", "distance_matrix", "dtw", "encode",
    "encode_sequence", "flatten", "gradient_check", "init_clusters",
    "landmark_grid", "nearest_neighbors", "normalize_pose", "parse_dataset",
    "path_projection", "reassign", "rerun_from_assignments", "run",
    "scatter_projection", "train", "unflatten", "variance_consensus",
]
