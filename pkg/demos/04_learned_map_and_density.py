"""Train the 2D embedding and produce every map artifact.

The encoder puts each pose on a 2D map; the decoder turns any 2D point
back into a skeleton, so an evenly spaced landmark grid summarizes what
the map regions "look like". Scatter and density overlays show where the
recorded poses actually live, and sequences become latent paths.
"""

import numpy as np

from posemap import (
    VAEConfig,
    decode,
    default_viewport,
    density_grid,
    encode_sequence,
    landmark_grid,
    path_projection,
    scatter_projection,
    train,
)
from demo_data import demo_corpus

corpus = demo_corpus(seed=5)

config = VAEConfig()  # desk-scale defaults: 4x64 layers, 200 epochs
model = train(corpus, config)
trace = model.training_trace["reconstruction"]
print(f"trained {config.epochs} epochs: reconstruction {trace[0]:.3f} -> {trace[-1]:.3f}")

paths = {sid: encode_sequence(model, corpus.sequence(sid)) for sid in corpus.sequence_ids()}
points = np.concatenate([p.points for p in paths.values()])
viewport = default_viewport(points)
print(f"map viewport: x [{viewport.x_min:.2f}, {viewport.x_max:.2f}], "
      f"y [{viewport.y_min:.2f}, {viewport.y_max:.2f}]")

grid = landmark_grid(model, viewport)
print(f"landmark grid: {grid.points.shape[0]}x{grid.points.shape[1]} decoded skeletons")

# any 2D point decodes, including regions no participant visited
corner = decode(model, [viewport.x_max, viewport.y_max])
print(f"decoded viewport corner -> pose with torso length "
      f"{np.linalg.norm(corner[1] - corner[0]):.3f}")

records = scatter_projection(model, corpus, referent="wave", paths=paths)
print(f"scatter overlay for 'wave': {len(records)} pose points")

density = density_grid(points, viewport, resolution=32, bandwidth="scott")
occupancy = float((density.values > density.values.max() * 0.05).mean())
print(f"density grid 32x32, scott bandwidth ({density.bandwidth[0]:.3f}, "
      f"{density.bandwidth[1]:.3f}); {occupancy:.0%} of cells carry mass")

wave_ids = [s.id for s in corpus.sequences_for_referent("wave")][:3]
for p in path_projection(model, corpus, wave_ids, paths=paths):
    pts = np.asarray(p["points"])
    span = np.linalg.norm(pts.max(axis=0) - pts.min(axis=0))
    print(f"latent path {p['id']}: {len(pts)} frames, map span {span:.2f}")
