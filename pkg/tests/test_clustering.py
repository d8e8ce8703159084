"""Interactive k-means lifecycle: init, run, pin, rerun."""

from __future__ import annotations

import numpy as np
import pytest

from posemap.clustering import (
    ClusterModel,
    STATUS_CONVERGED,
    STATUS_MAX_ITER,
    farthest_first_seeds,
    init_clusters,
    reassign,
    rerun_from_assignments,
    run,
)
from posemap.dtw import dtw, pairwise_distances
from posemap.errors import ValidationError

from conftest import grouped_sequences
from oracles import wgss_for_center


def separation_ratio(data, labels):
    """min inter-group DTW / max intra-group DTW."""
    ids = sorted(data)
    values = pairwise_distances([data[i] for i in ids])
    intra, inter = [], []
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            (intra if labels[ids[i]] == labels[ids[j]] else inter).append(values[i, j])
    return min(inter) / max(intra)


def one_seed_per_group(data, labels, groups):
    seeds = []
    for g in range(groups):
        seeds.append(sorted(i for i in data if labels[i] == g)[0])
    return seeds


class TestInit:
    def test_k1_assigns_everything_to_cluster_zero(self):
        data, _ = grouped_sequences(1, 5, seed=0)
        model = init_clusters(data, sorted(data), k=1, rng_seed=0)
        assert set(model.assignments.values()) == {0}
        assert model.status == "initialized"

    def test_separated_groups_split_at_init(self):
        data, labels = grouped_sequences(2, 6, seed=1)
        assert separation_ratio(data, labels) >= 10.0
        seeds = one_seed_per_group(data, labels, 2)
        model = init_clusters(data, sorted(data), seeds=seeds)
        for sid, cluster in model.assignments.items():
            assert labels[sid] == labels[seeds[cluster]]

    def test_farthest_first_deterministic(self):
        data, _ = grouped_sequences(3, 4, seed=2)
        a = init_clusters(data, sorted(data), k=3, rng_seed=11)
        b = init_clusters(data, sorted(data), k=3, rng_seed=11)
        assert a.to_dict() == b.to_dict()

    def test_farthest_first_spreads_across_groups(self):
        data, labels = grouped_sequences(3, 5, seed=3)
        seeds = farthest_first_seeds(data, sorted(data), k=3, rng_seed=0)
        assert {labels[s] for s in seeds} == {0, 1, 2}

    def test_duplicate_seeds_rejected(self):
        data, _ = grouped_sequences(1, 4, seed=4)
        sid = sorted(data)[0]
        with pytest.raises(ValidationError):
            init_clusters(data, sorted(data), seeds=[sid, sid])

    def test_k_larger_than_scope_rejected(self):
        data, _ = grouped_sequences(1, 3, seed=5)
        with pytest.raises(ValidationError):
            init_clusters(data, sorted(data), k=4, rng_seed=0)


class TestRun:
    def test_two_groups_recovered_with_brute_force_inertia(self):
        data, labels = grouped_sequences(2, 5, seed=6)
        seeds = one_seed_per_group(data, labels, 2)
        model = run(data, init_clusters(data, sorted(data), seeds=seeds))
        assert model.status == STATUS_CONVERGED
        for sid, cluster in model.assignments.items():
            assert labels[sid] == labels[seeds[cluster]]
        expected = sum(
            wgss_for_center(model.centroids[c], [data[i] for i in model.members(c)], dtw)
            for c in range(model.k))
        assert model.inertia == pytest.approx(expected, rel=1e-12)

    def test_identical_sequences_converge_immediately(self):
        seq = np.arange(12, dtype=float).reshape(4, 3)
        data = {f"s{i}": seq.copy() for i in range(4)}
        model = run(data, init_clusters(data, sorted(data), k=1, rng_seed=0))
        assert model.status == STATUS_CONVERGED
        assert model.inertia == 0.0

    def test_rerun_after_convergence_is_identity(self):
        data, labels = grouped_sequences(2, 4, seed=7)
        seeds = one_seed_per_group(data, labels, 2)
        converged = run(data, init_clusters(data, sorted(data), seeds=seeds))
        again = run(data, converged)
        assert again.to_dict() == converged.to_dict()

    def test_inertia_trace_monotone(self):
        rng_seeds = [0, 1, 2]
        for s in rng_seeds:
            data, _ = grouped_sequences(3, 5, seed=s, center_scale=3.0, noise=1.0)
            model = run(data, init_clusters(data, sorted(data), k=3, rng_seed=s))
            trace = model.inertia_trace
            for prev, cur in zip(trace, trace[1:]):
                assert cur <= prev + 1e-9 * max(prev, 1.0)

    def test_permutation_invariance_with_explicit_seeds(self):
        data, labels = grouped_sequences(2, 5, seed=8)
        seeds = one_seed_per_group(data, labels, 2)
        scope = sorted(data)
        rng = np.random.default_rng(0)
        permuted = list(rng.permutation(scope))
        a = run(data, init_clusters(data, scope, seeds=seeds))
        b = run(data, init_clusters(data, permuted, seeds=seeds))
        assert a.assignments == b.assignments
        for ca, cb in zip(a.centroids, b.centroids):
            np.testing.assert_array_equal(ca, cb)

    def test_empty_cluster_reseeds_instead_of_failing(self):
        # all-identical scope with k=2: every tie resolves to cluster 0, so
        # cluster 1 keeps emptying; the run must reseed and terminate cleanly
        seq = np.ones((3, 2))
        data = {f"s{i}": seq.copy() for i in range(4)}
        ids = sorted(data)
        model = run(data, init_clusters(data, ids, seeds=[ids[0], ids[1]]), max_iter=5)
        assert model.status in (STATUS_CONVERGED, STATUS_MAX_ITER)
        assert sorted(model.assignments) == ids
        assert model.reseeds  # the recovery was recorded
        assert all(v in (0, 1) for v in model.assignments.values())


class TestReassignAndRerun:
    def _converged_two_groups(self, seed=9):
        data, labels = grouped_sequences(2, 5, seed=seed)
        seeds = one_seed_per_group(data, labels, 2)
        model = run(data, init_clusters(data, sorted(data), seeds=seeds))
        return data, labels, model

    def test_pinned_survives_run(self):
        data, _, model = self._converged_two_groups()
        victim = model.members(0)[1]
        pinned = reassign(model, victim, 1)
        after = run(data, pinned)
        assert after.assignments[victim] == 1
        assert victim in after.pinned

    def test_reassign_to_same_cluster_only_pins(self):
        data, _, model = self._converged_two_groups()
        sid = model.members(0)[0]
        updated = reassign(model, sid, 0)
        assert updated.assignments == model.assignments
        assert updated.pinned == model.pinned | {sid}
        np.testing.assert_array_equal(updated.centroids[0], model.centroids[0])

    def test_reassign_validation(self):
        _, _, model = self._converged_two_groups()
        with pytest.raises(ValidationError):
            reassign(model, "missing", 0)
        with pytest.raises(ValidationError):
            reassign(model, model.scope[0], 5)

    def test_reassign_then_rerun_recomputes_centroids(self):
        data, _, model = self._converged_two_groups()
        victim = model.members(0)[1]
        before = [c.copy() for c in model.centroids]
        rerun = rerun_from_assignments(data, reassign(model, victim, 1))
        assert rerun.assignments[victim] == 1
        assert not all(np.array_equal(b, a) for b, a in zip(before, rerun.centroids))

    def test_repeated_reassign_idempotent(self):
        data, _, model = self._converged_two_groups()
        victim = model.members(1)[0]
        once = reassign(model, victim, 0)
        twice = reassign(once, victim, 0)
        assert once.to_dict() == twice.to_dict()

    def test_all_pinned_rerun_keeps_assignments(self):
        data, _, model = self._converged_two_groups()
        for sid in model.scope:
            model = reassign(model, sid, model.assignments[sid])
        rerun = rerun_from_assignments(data, model)
        assert rerun.assignments == model.assignments
        assert rerun.status == STATUS_CONVERGED

    def test_unpinned_noisy_member_migrates_on_rerun(self):
        data, labels = grouped_sequences(2, 5, seed=10)
        seeds = one_seed_per_group(data, labels, 2)
        # plant an unpinned sequence that actually lives in group 1's region
        noisy = "noisy"
        donor = sorted(i for i in data if labels[i] == 1)[0]
        data[noisy] = data[donor] + 0.01
        model = init_clusters(data, sorted(data), seeds=seeds)
        # misfile it into cluster 0 by hand, as a user might
        doc = model.to_dict()
        doc["assignments"][noisy] = 0
        misfiled = ClusterModel.from_dict(doc)
        d_own, _ = dtw(data[noisy], misfiled.centroids[0])
        d_other, _ = dtw(data[noisy], misfiled.centroids[1])
        assert d_own >= 10 * d_other
        rerun = rerun_from_assignments(data, misfiled)
        assert rerun.assignments[noisy] == 1

    def test_rerun_twice_is_fixed_point(self):
        data, _, model = self._converged_two_groups()
        victim = model.members(0)[0]
        once = rerun_from_assignments(data, reassign(model, victim, 1))
        twice = rerun_from_assignments(data, once)
        assert twice.assignments == once.assignments
        for ca, cb in zip(twice.centroids, once.centroids):
            np.testing.assert_array_equal(ca, cb)


class TestSeparationRecovery:
    @pytest.mark.parametrize("groups", [2, 3])
    def test_adjusted_rand_index_is_one(self, groups):
        from sklearn.metrics import adjusted_rand_score

        data, labels = grouped_sequences(groups, 6, seed=20 + groups)
        assert separation_ratio(data, labels) >= 10.0
        seeds = one_seed_per_group(data, labels, groups)
        model = run(data, init_clusters(data, sorted(data), seeds=seeds))
        ids = sorted(data)
        truth = [labels[i] for i in ids]
        found = [model.assignments[i] for i in ids]
        assert adjusted_rand_score(truth, found) == 1.0
