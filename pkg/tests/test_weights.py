"""Tests for weight functions and the control-point estimator."""

import numpy as np
import pytest

from wqisa.splines import KnotVector, TensorSplineSpace, knot_averages
from wqisa.weights import (
    WeightSpec,
    ZeroWeightError,
    estimate_all_coefficients,
    estimate_control_point,
    weight_gaussian,
    weight_idw,
    weight_indicator,
    weight_knn,
)

from oracles import brute_estimate, random_cloud


class TestWeightSpec:
    def test_missing_parameter_rejected(self):
        with pytest.raises(ValueError, match="requires parameter"):
            WeightSpec(kind="knn")

    def test_extraneous_parameter_rejected(self):
        with pytest.raises(ValueError, match="does not apply"):
            WeightSpec(kind="knn", k=3, radius=1.0)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown weight kind"):
            WeightSpec(kind="voronoi")

    def test_positivity_checks(self):
        with pytest.raises(ValueError):
            WeightSpec.indicator(0.0)
        with pytest.raises(ValueError):
            WeightSpec.gaussian(-1.0)
        with pytest.raises(ValueError):
            WeightSpec.knn(0)

    def test_parameter_property(self):
        assert WeightSpec.knn(4).parameter == 4
        assert WeightSpec.indicator(0.5).parameter == 0.5
        assert WeightSpec.idw().parameter is None


class TestWeightFunctions:
    def test_indicator_zero_distance(self):
        assert weight_indicator(0, 0, 0, 0, r=1.0) == 1.0

    def test_indicator_pythagorean_boundary(self):
        assert weight_indicator(3, 4, 0, 0, r=5.0) == 1.0
        assert weight_indicator(3, 4, 0, 0, r=4.9) == 0.0

    def test_indicator_symmetric(self):
        rng = np.random.default_rng(1)
        for x, y, u, v in rng.uniform(-3, 3, size=(25, 4)):
            r = rng.uniform(0.1, 4.0)
            assert weight_indicator(x, y, u, v, r) == weight_indicator(u, v, x, y, r)

    def test_gaussian_coincident(self):
        assert weight_gaussian(1.0, 2.0, 1.0, 2.0, sigma=0.7) == 1.0

    def test_gaussian_characteristic_distance(self):
        # at planar distance 2*sigma^2 the printed exponent is exactly -1
        for sigma in (0.3, 1.0, 2.5):
            d = 2.0 * sigma * sigma
            assert weight_gaussian(d, 0, 0, 0, sigma) == pytest.approx(np.exp(-1.0), rel=1e-14)

    def test_gaussian_strictly_decreasing(self):
        values = [weight_gaussian(d, 0, 0, 0, sigma=0.8) for d in np.linspace(0, 4, 30)]
        assert np.all(np.diff(values) < 0)

    def test_gaussian_squared_variant(self):
        d = 1.7
        sigma = 0.9
        expected = np.exp(-(d * d) / (2 * sigma * sigma))
        assert weight_gaussian(d, 0, 0, 0, sigma, squared=True) == pytest.approx(expected, rel=1e-15)

    def test_knn_all_points(self):
        cloud = random_cloud(np.random.default_rng(2), 12)
        w = weight_knn((0.0, 0.0), cloud, k=12)
        np.testing.assert_allclose(w, np.full(12, 1 / 12))

    def test_knn_unique_nearest(self):
        cloud = np.array([[0, 0, 1.0], [5, 5, 2.0], [9, 9, 3.0]])
        w = weight_knn((0.1, 0.0), cloud, k=1)
        np.testing.assert_allclose(w, [1.0, 0.0, 0.0])

    def test_knn_collinear_end_query(self):
        cloud = np.column_stack([np.arange(5.0), np.zeros(5), np.arange(5.0)])
        w = weight_knn((0.0, 0.0), cloud, k=2)
        np.testing.assert_allclose(w, [0.5, 0.5, 0, 0, 0])

    def test_knn_weights_sum_to_one(self):
        rng = np.random.default_rng(3)
        cloud = random_cloud(rng, 40)
        for k in (1, 5, 17, 40):
            w = weight_knn(rng.uniform(-2, 2, size=2), cloud, k)
            assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_knn_k_out_of_range(self):
        cloud = random_cloud(np.random.default_rng(4), 5)
        with pytest.raises(ValueError):
            weight_knn((0, 0), cloud, k=6)
        with pytest.raises(ValueError):
            weight_knn((0, 0), cloud, k=0)

    def test_idw_reciprocal_distance(self):
        cloud = np.array([[2.0, 0.0, 1.0], [5.0, 5.0, 2.0]])
        assert weight_idw(2.0, 0.0, 0.0, 0.0, cloud, tol=0.0) == pytest.approx(0.5, rel=1e-15)

    def test_idw_coincident_points_share_weight(self):
        cloud = np.array([[1, 1, 0.0], [1, 1, 2.0], [1, 1, 4.0], [3, 3, 9.0]])
        for x, y, expected in [(1, 1, 1 / 3), (3, 3, 0.0)]:
            assert weight_idw(x, y, 1.0, 1.0, cloud, tol=1e-9) == pytest.approx(expected, rel=1e-15)


class TestEstimateControlPoint:
    def test_weighted_mean_of_constant(self):
        cloud = random_cloud(np.random.default_rng(5), 30)
        cloud[:, 2] = 5.0
        for spec in (
            WeightSpec.knn(7),
            WeightSpec.gaussian(0.5),
            WeightSpec.idw(),
            WeightSpec.indicator(100.0),
        ):
            assert estimate_control_point(cloud, 0.2, 0.3, spec) == 5.0

    def test_knn_full_neighborhood_is_mean(self):
        rng = np.random.default_rng(6)
        cloud = random_cloud(rng, 20)
        got = estimate_control_point(cloud, 1.0, -1.0, WeightSpec.knn(20))
        assert got == pytest.approx(cloud[:, 2].mean(), rel=1e-14)

    def test_indicator_selects_single_point(self):
        cloud = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 3.0]])
        got = estimate_control_point(cloud, 0.0, 0.0, WeightSpec.indicator(0.5))
        assert got == 1.0

    def test_zero_weight_reported(self):
        cloud = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 3.0]])
        with pytest.raises(ZeroWeightError):
            estimate_control_point(cloud, 10.0, 10.0, WeightSpec.indicator(0.5))

    def test_estimate_within_contributing_range(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            cloud = random_cloud(rng, int(rng.integers(3, 60)), dupes=True)
            u, v = rng.uniform(-6, 6, size=2)
            spec = WeightSpec.knn(int(rng.integers(1, cloud.shape[0] + 1)))
            value = estimate_control_point(cloud, u, v, spec)
            assert cloud[:, 2].min() <= value <= cloud[:, 2].max()

    def test_translation_equivariance(self):
        rng = np.random.default_rng(8)
        cloud = random_cloud(rng, 50)
        shifted = cloud.copy()
        shifted[:, 2] += 11.25
        for spec in (WeightSpec.knn(5), WeightSpec.gaussian(0.4), WeightSpec.idw()):
            base = estimate_control_point(cloud, 0.5, 0.5, spec)
            moved = estimate_control_point(shifted, 0.5, 0.5, spec)
            assert moved == pytest.approx(base + 11.25, rel=1e-12)

    def test_outlier_filter_drops_spike(self):
        # nine agreeing heights and one wild spike inside the neighborhood
        rng = np.random.default_rng(9)
        xy = rng.uniform(0, 1, size=(10, 2))
        z = np.full(10, 2.0) + rng.normal(0, 0.01, size=10)
        z[4] = 500.0
        cloud = np.column_stack([xy, z])
        plain = estimate_control_point(cloud, 0.5, 0.5, WeightSpec.knn(10))
        filtered = estimate_control_point(cloud, 0.5, 0.5, WeightSpec.knn(10, outlier_filter=True))
        assert abs(plain - 2.0) > 10
        assert filtered == pytest.approx(2.0, abs=0.05)

    def test_filter_fallback_warns(self):
        # fence 0 with two distinct heights rejects both quartile outliers
        cloud = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [9, 9, 5.0]])
        spec = WeightSpec.knn(2, outlier_filter=True, fence=0.0)
        with pytest.warns(RuntimeWarning, match="rejected every"):
            got = estimate_control_point(cloud, 0.0, 0.0, spec)
        assert got == pytest.approx(0.5)

    def test_knn_matches_brute_force_bit_for_bit(self):
        rng = np.random.default_rng(10)
        for _ in range(60):
            cloud = random_cloud(rng, int(rng.integers(2, 51)), dupes=True)
            u, v = rng.uniform(-6, 6, size=2)
            k = int(rng.integers(1, cloud.shape[0] + 1))
            spec = WeightSpec.knn(k)
            assert estimate_control_point(cloud, u, v, spec) == brute_estimate(cloud, u, v, spec)


class TestEstimateAllCoefficients:
    def test_constant_cloud_constant_grid(self):
        cloud = random_cloud(np.random.default_rng(11), 25)
        cloud[:, 2] = -3.5
        space = TensorSplineSpace(
            KnotVector.uniform_open(2, 2, cloud[:, 0].min(), cloud[:, 0].max()),
            KnotVector.uniform_open(2, 3, cloud[:, 1].min(), cloud[:, 1].max()),
        )
        grid = estimate_all_coefficients(cloud, space, WeightSpec.knn(4))
        np.testing.assert_array_equal(grid, np.full(space.shape, -3.5))

    def test_single_element_full_knn_is_cloud_mean(self):
        cloud = random_cloud(np.random.default_rng(12), 15)
        space = TensorSplineSpace.single_element(
            (2, 2),
            (cloud[:, 0].min(), cloud[:, 0].max(), cloud[:, 1].min(), cloud[:, 1].max()),
        )
        grid = estimate_all_coefficients(cloud, space, WeightSpec.knn(15))
        np.testing.assert_allclose(grid, cloud[:, 2].mean(), rtol=1e-14)

    def test_one_nearest_picks_nearest_sample(self):
        # 2x2 coefficient grid (bilinear single element); averages sit at corners
        cloud = np.array(
            [[0.05, 0.05, 1.0], [0.95, 0.1, 2.0], [0.0, 0.9, 3.0], [1.0, 1.0, 4.0]]
        )
        space = TensorSplineSpace.single_element((1, 1), (0, 1, 0, 1))
        grid = estimate_all_coefficients(cloud, space, WeightSpec.knn(1))
        np.testing.assert_array_equal(grid, [[1.0, 3.0], [2.0, 4.0]])

    def test_zero_weight_names_offending_entry(self):
        cloud = np.array([[0.0, 0.0, 1.0], [1.0, 1.0, 2.0]])
        space = TensorSplineSpace.single_element((1, 1), (0, 1, 0, 1))
        with pytest.raises(ZeroWeightError, match=r"\(i=0, j=1\)"):
            estimate_all_coefficients(cloud, space, WeightSpec.indicator(0.05))

    def test_spatial_index_path_matches_direct_path(self):
        # past the size threshold a k-d tree serves the neighbor queries;
        # results must not change
        rng = np.random.default_rng(13)
        cloud = random_cloud(rng, 5000)
        bbox = (cloud[:, 0].min(), cloud[:, 0].max(), cloud[:, 1].min(), cloud[:, 1].max())
        space = TensorSplineSpace.single_element((2, 2), bbox)
        for spec in (WeightSpec.knn(3), WeightSpec.indicator(0.8), WeightSpec.truncated_idw(40)):
            grid = estimate_all_coefficients(cloud, space, spec)
            for i, u in enumerate(knot_averages(space.knots_x)):
                for j, v in enumerate(knot_averages(space.knots_y)):
                    assert grid[i, j] == brute_estimate(cloud, u, v, spec)
