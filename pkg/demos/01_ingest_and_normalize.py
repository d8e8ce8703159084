"""Ingest a raw dataset and inspect the normalized corpus.

Every pose ends up with its hip center at the origin and torso length 1,
so recordings from different people (and different sensor placements)
become directly comparable. No temporal resampling happens: DTW downstream
tolerates the length differences.
"""

import numpy as np

from posemap import build_corpus, parse_dataset
from posemap.ingest import canonical_json
from demo_data import dataset_document

doc = dataset_document(participants=3, trials=2, seed=0)
print(f"raw dataset: {len(doc['sequences'])} sequences, "
      f"{sum(len(s['frames']) for s in doc['sequences'])} frames")

fragment = parse_dataset(canonical_json(doc))
corpus = build_corpus([fragment])

print(f"corpus hash: {corpus.content_hash[:16]}...")
print(f"referents:  {corpus.referents()}")

seq = corpus.sequences[0]
pose = seq.frames[0]
print(f"\nfirst pose of {seq.id}:")
print(f"  hip center   -> {pose[0]}           (at the origin)")
print(f"  torso length -> {np.linalg.norm(pose[1] - pose[0]):.12f} (unit)")

# the same gesture translated and scaled normalizes to the same corpus content
moved = dataset_document(participants=3, trials=2, seed=0)
for s in moved["sequences"]:
    s["frames"] = (2.5 * np.asarray(s["frames"]) + np.array([1.0, -2.0, 0.5])).tolist()
corpus_moved = build_corpus([parse_dataset(canonical_json(moved))])
drift = max(
    float(np.abs(a.frames - b.frames).max())
    for a, b in zip(corpus.sequences, corpus_moved.sequences)
)
print(f"\nmax drift after scaling x2.5 and translating: {drift:.2e}")
