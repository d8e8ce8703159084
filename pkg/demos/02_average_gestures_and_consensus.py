"""Average gestures and the variance-around-average consensus measure.

For each referent we compute the averaged sequence of all its proposals,
then summarize agreement as the mean squared DTW distance of the proposals
to that average. Low variance = participants converged on similar motions.
"""

from posemap import DbaConfig, distance_distribution, dtw, variance_consensus
from demo_data import demo_corpus

corpus = demo_corpus(seed=3)

print(f"{'referent':<10} {'members':>7} {'variance':>10} {'dba iters':>9} {'converged':>9}")
reports = {}
for referent in corpus.referents():
    report = variance_consensus(corpus, referent, DbaConfig(max_iter=10, tol=1e-6))
    reports[referent] = report
    b = report.barycenter
    print(f"{referent:<10} {len(report.distances):>7} {report.variance:>10.4f} "
          f"{b.iterations_run:>9} {str(b.converged):>9}")

referent = min(reports, key=lambda r: reports[r].variance)
print(f"\nhighest consensus: {referent!r}")

report = reports[referent]
print("per-member distances to the average gesture:")
for sid, d in report.distances:
    print(f"  {sid:<28} {d:8.4f}")

hist = distance_distribution(corpus, referent, report=report)
print(f"\ndistance histogram (bin width {hist.bin_width:.3f}): {hist.counts}")

# the average is a real sequence: compare any member against it directly
member = corpus.sequences_for_referent(referent)[0]
d, path = dtw(member.flattened(), report.barycenter.frames)
print(f"\n{member.id} vs average: distance {d:.4f}, "
      f"alignment path of {len(path.pairs)} steps")
