import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cimkit import (
    CorrelationCurve,
    DegenerateCloudError,
    NoScalingRegionError,
    PointCloud,
    box_counting_dimension,
    box_occupancy,
    correlation_integral,
    default_box_sizes,
    default_radii,
    estimate_correlation_dimension,
)


def cloud_of(arr):
    return PointCloud(np.asarray(arr, dtype=float))


class TestCorrelationIntegral:
    def test_three_collinear_points(self):
        # pairwise distances 1, 1, 2
        c = cloud_of([[0.0], [1.0], [2.0]])
        curve = correlation_integral(c, radii=[1.0])
        assert curve.values[0] == pytest.approx(2.0 / 3.0)

    def test_all_pairs_within_max_distance(self):
        c = cloud_of([[0.0], [1.0], [2.0]])
        curve = correlation_integral(c, radii=[2.0])
        assert curve.values[0] == 1.0

    def test_radius_below_min_distance(self):
        c = cloud_of([[0.0], [1.0], [2.0]])
        curve = correlation_integral(c, radii=[0.5])
        assert curve.values[0] == 0.0

    def test_single_point_rejected(self):
        with pytest.raises(DegenerateCloudError):
            correlation_integral(cloud_of([[1.0, 2.0]]))

    def test_monotone_nondecreasing(self):
        rng = np.random.default_rng(5)
        c = cloud_of(rng.standard_normal((200, 3)))
        curve = correlation_integral(c)
        assert (np.diff(curve.values) >= 0).all()

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**16), st.integers(-3, 3))
    def test_scale_covariance_power_of_two(self, seed, log2_s):
        # power-of-two scaling is exact in floating point, so counts match bitwise
        s = 2.0**log2_s
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((60, 2))
        radii = np.geomspace(0.1, 4.0, 12)
        a = correlation_integral(cloud_of(pts), radii=radii)
        b = correlation_integral(cloud_of(pts * s), radii=radii * s)
        np.testing.assert_array_equal(a.values, b.values)

    def test_subsampled_estimate_close_to_exact(self):
        rng = np.random.default_rng(17)
        pts = rng.standard_normal((3000, 2))
        radii = default_radii(cloud_of(pts))
        exact = correlation_integral(cloud_of(pts), radii=radii)
        sampled = correlation_integral(
            cloud_of(pts), radii=radii, subsample_threshold=100, max_pairs=400_000, seed=1
        )
        np.testing.assert_allclose(sampled.values, exact.values, atol=5e-3)

    def test_curve_validation(self):
        with pytest.raises(ValueError):
            CorrelationCurve(radii=[1.0, 0.5], values=[0.1, 0.2], n_points=10)
        with pytest.raises(ValueError):
            CorrelationCurve(radii=[0.5, 1.0], values=[0.4, 0.2], n_points=10)


class TestCorrelationDimension:
    def test_segment_in_2d(self):
        rng = np.random.default_rng(42)
        pts = np.column_stack([rng.uniform(0, 1, 2000), np.zeros(2000)])
        est = estimate_correlation_dimension(correlation_integral(cloud_of(pts)))
        assert est.value == pytest.approx(1.0, abs=0.05)
        assert 0 <= est.r_squared <= 1
        assert est.fit_lo < est.fit_hi

    def test_unit_square(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform(0, 1, (5000, 2))
        est = estimate_correlation_dimension(correlation_integral(cloud_of(pts)))
        assert est.value == pytest.approx(2.0, abs=0.1)

    def test_repeated_point_cloud(self):
        c = cloud_of(np.zeros((30, 2)))
        with pytest.raises(NoScalingRegionError):
            correlation_integral(c)

    def test_saturated_curve_rejected(self):
        curve = CorrelationCurve(
            radii=np.geomspace(1, 10, 8), values=np.ones(8), n_points=10
        )
        with pytest.raises(NoScalingRegionError):
            estimate_correlation_dimension(curve)

    def test_too_few_positive_values(self):
        curve = CorrelationCurve(
            radii=np.geomspace(1, 10, 6),
            values=[0.0, 0.0, 0.0, 0.1, 0.2, 0.3],
            n_points=10,
        )
        with pytest.raises(NoScalingRegionError):
            estimate_correlation_dimension(curve)

    def test_exactly_four_positive_values_fit(self):
        # with fewer usable radii than the preferred window, the window
        # shrinks to the usable count
        radii = np.geomspace(0.1, 1.0, 6)
        values = np.concatenate([[0.0, 0.0], np.clip(radii[2:] ** 1.5, 0, 1)])
        curve = CorrelationCurve(radii=radii, values=values, n_points=40)
        est = estimate_correlation_dimension(curve)
        assert est.value == pytest.approx(1.5, abs=0.05)
        assert est.fit_lo == 2 and est.fit_hi == 5

    def test_isometry_invariance(self):
        rng = np.random.default_rng(9)
        pts = rng.standard_normal((400, 2))
        theta = 0.7
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        moved = pts @ rot.T + np.array([3.5, -1.25])
        radii = default_radii(cloud_of(pts))
        a = estimate_correlation_dimension(
            correlation_integral(cloud_of(pts), radii=radii)
        )
        b = estimate_correlation_dimension(
            correlation_integral(cloud_of(moved), radii=radii)
        )
        assert abs(a.value - b.value) < 1e-9

    def test_subsample_stability(self):
        rng = np.random.default_rng(23)
        pts = rng.uniform(0, 1, (5000, 2))
        full = estimate_correlation_dimension(correlation_integral(cloud_of(pts)))
        half_idx = rng.choice(5000, 2500, replace=False)
        half = estimate_correlation_dimension(
            correlation_integral(cloud_of(pts[half_idx]))
        )
        assert abs(full.value - half.value) <= 0.1

    def test_suspect_flag(self):
        # a fabricated curve with slope far above the ambient dimension
        radii = np.geomspace(0.1, 1.0, 10)
        values = np.clip(radii**3.2 * 0.9, 0, 1)
        curve = CorrelationCurve(radii=radii, values=values, n_points=50, ambient_dim=2)
        est = estimate_correlation_dimension(curve)
        assert est.suspect


class TestBoxCounting:
    def test_occupancy_counts(self):
        c = cloud_of([[0.0, 0.0], [0.9, 0.9], [1.1, 1.1]])
        assert box_occupancy(c, 1.0) == 2
        assert box_occupancy(c, 0.5) == 3

    def test_segment(self):
        rng = np.random.default_rng(42)
        pts = np.column_stack([rng.uniform(0, 1, 1000), np.zeros(1000)])
        est = box_counting_dimension(cloud_of(pts))
        assert est.value == pytest.approx(1.0, abs=0.1)
        assert est.method == "box"

    def test_unit_square(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform(0, 1, (5000, 2))
        est = box_counting_dimension(cloud_of(pts))
        assert est.value == pytest.approx(2.0, abs=0.15)

    def test_matches_correlation_on_noisy_blob(self):
        # a filled 2-D region observed with Gaussian noise; for a bare
        # normal sample the two estimators genuinely separate at this n
        # (box counting reads the fuzzy support, correlation the measure)
        rng = np.random.default_rng(7)
        n = 5000
        radius = np.sqrt(rng.uniform(0, 1, n))
        angle = rng.uniform(0, 2 * np.pi, n)
        pts = np.column_stack(
            [radius * np.cos(angle), radius * np.sin(angle)]
        ) + 0.05 * rng.standard_normal((n, 2))
        corr = estimate_correlation_dimension(correlation_integral(cloud_of(pts)))
        box = box_counting_dimension(cloud_of(pts))
        assert abs(box.value - corr.value) <= 0.1

    def test_sizes_must_decrease(self):
        c = cloud_of(np.random.default_rng(0).standard_normal((50, 2)))
        with pytest.raises(ValueError):
            box_counting_dimension(c, sizes=[0.1, 0.2, 0.3])

    def test_default_sizes_are_decreasing(self):
        c = cloud_of(np.random.default_rng(0).standard_normal((100, 2)))
        sizes = default_box_sizes(c)
        assert (np.diff(sizes) < 0).all()
