"""Landmark grids, scatter records, density lattices, path overlays."""

from __future__ import annotations

import numpy as np
import pytest

from posemap.errors import DomainError, NotFoundError, ValidationError
from posemap.mapgrid import (
    Viewport,
    default_viewport,
    density_grid,
    landmark_grid,
    path_projection,
    scatter_projection,
    scott_bandwidth,
)
from posemap.vae import VAEConfig, encode_sequence, train

from oracles import kernel_mass_in_cell
from test_vae import tiny_model  # noqa: F401  (module-scoped fixture)


class TestViewport:
    def test_extent_validated(self):
        with pytest.raises(ValidationError):
            Viewport(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(ValidationError):
            Viewport(0.0, 1.0, 0.0, 1.0, grid_m=1)

    def test_default_viewport_pads_bbox(self):
        points = np.array([[0.0, 0.0], [2.0, 4.0]])
        vp = default_viewport(points)
        assert vp.x_min == pytest.approx(-0.1)
        assert vp.x_max == pytest.approx(2.1)
        assert vp.y_min == pytest.approx(-0.2)
        assert vp.y_max == pytest.approx(4.2)

    def test_default_viewport_degenerate_points(self):
        vp = default_viewport(np.array([[1.0, 1.0]]))
        assert vp.x_min < vp.x_max and vp.y_min < vp.y_max


class TestLandmarkGrid:
    def test_default_m_gives_121_landmarks(self, tiny_model):
        grid = landmark_grid(tiny_model, Viewport(-4.0, 4.0, -4.0, 4.0))
        assert grid.points.shape == (11, 11, 2)
        assert grid.poses.shape == (11, 11, 20, 3)
        assert grid.points.reshape(-1, 2).shape[0] == 121

    def test_m3_unit_square_exact_points(self, tiny_model):
        grid = landmark_grid(tiny_model, Viewport(-1.0, 1.0, -1.0, 1.0, grid_m=3))
        xs = sorted(set(grid.points[:, :, 0].ravel()))
        ys = sorted(set(grid.points[:, :, 1].ravel()))
        assert xs == [-1.0, 0.0, 1.0]
        assert ys == [-1.0, 0.0, 1.0]

    def test_spacing_uniform_and_corners_coincide(self, tiny_model):
        vp = Viewport(-2.5, 3.5, 0.25, 4.75, grid_m=7)
        grid = landmark_grid(tiny_model, vp)
        col_steps = np.diff(grid.points[:, :, 0], axis=1)
        row_steps = np.diff(grid.points[:, :, 1], axis=0)
        assert np.ptp(col_steps) < 1e-12
        assert np.ptp(row_steps) < 1e-12
        assert grid.points[0, 0, 0] == vp.x_min and grid.points[0, 0, 1] == vp.y_min
        assert grid.points[-1, -1, 0] == vp.x_max and grid.points[-1, -1, 1] == vp.y_max

    def test_all_poses_finite(self, tiny_model):
        grid = landmark_grid(tiny_model, Viewport(-40.0, 40.0, -40.0, 40.0, grid_m=5))
        assert np.isfinite(grid.poses).all()

    def test_zoom_stays_inside_parent(self, tiny_model):
        parent = Viewport(-4.0, 4.0, -4.0, 4.0)
        child = Viewport(-1.0, 0.5, 0.25, 2.0)
        grid = landmark_grid(tiny_model, child)
        pts = grid.points.reshape(-1, 2)
        assert (pts[:, 0] >= parent.x_min).all() and (pts[:, 0] <= parent.x_max).all()
        assert (pts[:, 1] >= parent.y_min).all() and (pts[:, 1] <= parent.y_max).all()


class TestScatter:
    def test_one_record_per_frame(self, tiny_model, demo_corpus):
        sid = demo_corpus.sequence_ids()[0]
        seq = demo_corpus.sequence(sid)
        records = scatter_projection(tiny_model, demo_corpus, scope=[sid])
        assert len(records) == seq.length
        assert {r.sequence_id for r in records} == {sid}

    def test_referent_filter(self, tiny_model, demo_corpus):
        records = scatter_projection(tiny_model, demo_corpus, referent="wave")
        assert records
        assert all(r.referent == "wave" for r in records)

    def test_points_match_encode_sequence(self, tiny_model, demo_corpus):
        sid = demo_corpus.sequence_ids()[0]
        path = encode_sequence(tiny_model, demo_corpus.sequence(sid))
        records = scatter_projection(tiny_model, demo_corpus, scope=[sid],
                                     paths={sid: path})
        for t, record in enumerate(records):
            np.testing.assert_array_equal(record.point, path.points[t])
            assert record.frame_index == t

    def test_empty_scope_is_empty_result(self, tiny_model, demo_corpus):
        assert scatter_projection(tiny_model, demo_corpus, scope=[]) == []


class TestDensity:
    def test_single_point_argmax_cell_contains_it(self):
        vp = Viewport(0.0, 1.0, 0.0, 1.0)
        grid = density_grid(np.array([[0.33, 0.71]]), vp, resolution=10, bandwidth=0.05)
        i, j = np.unravel_index(np.argmax(grid.values), grid.values.shape)
        assert j == 3   # x = 0.33 falls in column 3
        assert i == 7   # y = 0.71 falls in row 7

    def test_mirror_symmetric_input_gives_mirror_symmetric_grid(self):
        pts = np.array([[0.4, 0.0], [-0.4, 0.0], [0.1, 0.2], [-0.1, 0.2]])
        vp = Viewport(-1.0, 1.0, -1.0, 1.0)
        grid = density_grid(pts, vp, resolution=16, bandwidth=0.3)
        np.testing.assert_allclose(grid.values, grid.values[:, ::-1], atol=1e-9)

    def test_probe_cells_match_brute_force(self):
        rng = np.random.default_rng(17)
        pts = rng.normal(0.0, 1.0, size=(100, 2))
        vp = Viewport(-3.0, 3.0, -3.0, 3.0)
        r = 32
        grid = density_grid(pts, vp, resolution=r, bandwidth="scott")
        hx, hy = grid.bandwidth
        xe = np.linspace(vp.x_min, vp.x_max, r + 1)
        ye = np.linspace(vp.y_min, vp.y_max, r + 1)
        cell_area = (xe[1] - xe[0]) * (ye[1] - ye[0])
        probes = [(0, 0), (5, 20), (16, 16), (31, 2), (12, 31)]
        for i, j in probes:
            mass = kernel_mass_in_cell(pts, xe[j], xe[j + 1], ye[i], ye[i + 1], hx, hy)
            assert grid.values[i, j] == pytest.approx(mass / cell_area, abs=1e-9)

    def test_mass_conservation(self):
        rng = np.random.default_rng(23)
        pts = rng.normal(0.0, 0.8, size=(60, 2))
        vp = Viewport(-2.0, 2.0, -2.0, 2.0)
        grid = density_grid(pts, vp, resolution=48, bandwidth=0.4)
        cell_area = (4.0 / 48) ** 2
        total = grid.values.sum() * cell_area
        from scipy.stats import norm
        expected = np.mean(
            (norm.cdf((vp.x_max - pts[:, 0]) / 0.4) - norm.cdf((vp.x_min - pts[:, 0]) / 0.4))
            * (norm.cdf((vp.y_max - pts[:, 1]) / 0.4) - norm.cdf((vp.y_min - pts[:, 1]) / 0.4)))
        assert total == pytest.approx(expected, abs=1e-6)

    def test_scott_zero_variance_falls_back(self):
        pts = np.array([[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]])
        vp = Viewport(0.0, 1.0, 0.0, 1.0)
        grid = density_grid(pts, vp, resolution=8, bandwidth="scott")
        assert grid.bandwidth_fallback
        assert grid.bandwidth == (1e-3, 1e-3)

    def test_single_point_scott_falls_back(self):
        (hx, hy), fallback = scott_bandwidth(np.array([[0.1, 0.9]]))
        assert fallback and hx == 1e-3 and hy == 1e-3

    def test_no_points_rejected(self):
        with pytest.raises(DomainError):
            density_grid(np.zeros((0, 2)), Viewport(0, 1, 0, 1))


class TestPathProjection:
    def test_single_id(self, tiny_model, demo_corpus):
        sid = demo_corpus.sequence_ids()[0]
        result = path_projection(tiny_model, demo_corpus, [sid])
        assert len(result) == 1
        assert len(result[0]["points"]) == demo_corpus.sequence(sid).length
        assert result[0]["frames"] == list(range(demo_corpus.sequence(sid).length))

    def test_trials_distinguished_by_id(self, tiny_model, demo_corpus):
        ids = [s.id for s in demo_corpus.sequences_for_referent("wave")
               if s.participant == "p00" and s.dataset_id == "studyA"]
        assert len(ids) == 2  # two trials
        result = path_projection(tiny_model, demo_corpus, ids)
        assert [p["id"] for p in result] == ids
        assert {p["trial"] for p in result} == {1, 2}

    def test_empty_list(self, tiny_model, demo_corpus):
        assert path_projection(tiny_model, demo_corpus, []) == []

    def test_unknown_id(self, tiny_model, demo_corpus):
        with pytest.raises(NotFoundError):
            path_projection(tiny_model, demo_corpus, ["missing"])
