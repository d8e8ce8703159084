"""The interactive clustering loop: run, disagree, pin, rerun.

k-means assigns sequences to their nearest averaged centroid by DTW. When
the analyst drags a proposal into another cluster, that choice is pinned:
later reruns recompute the centroids from the refined partition but never
override the pinned assignment.
"""

from posemap import init_clusters, reassign, rerun_from_assignments, run
from demo_data import demo_corpus

corpus = demo_corpus(seed=4)
scope = [s.id for s in corpus.sequences]          # cluster across all referents
data = corpus.flattened_map(scope)

model = init_clusters(data, scope, k=3, rng_seed=1)
model = run(data, model)
print(f"status: {model.status}, inertia trace: "
      f"{['%.2f' % v for v in model.inertia_trace]}")

def show(m, title):
    print(f"\n{title}")
    for c in range(m.k):
        members = m.members(c)
        referents = sorted({corpus.sequence(i).referent for i in members})
        pins = sum(1 for i in members if i in m.pinned)
        print(f"  cluster {c}: {len(members):2d} members, referents {referents}, {pins} pinned")

show(model, "after the first run:")

# the analyst decides one proposal belongs elsewhere
victim = model.members(0)[0]
target = (model.assignments[victim] + 1) % model.k
model = reassign(model, victim, target)
print(f"\nreassigned {victim} -> cluster {target} (now pinned)")

model = rerun_from_assignments(data, model)
show(model, "after rerunning from the refined assignments:")
assert model.assignments[victim] == target, "pinned choice must survive"
print(f"\npinned member stayed in cluster {model.assignments[victim]}; "
      f"final inertia {model.inertia:.2f}")
